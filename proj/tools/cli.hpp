#ifndef FRIED_CLI_HPP
#define FRIED_CLI_HPP

namespace fried {

/// Experiment driver entry point. Subcommands: train, eval, sweep, cmi,
/// audit, gen-data. Exit codes: 0 success, 2 configuration error, 3 data
/// error, 4 numeric divergence.
int run_cli(int argc, const char* const* argv);

}  // namespace fried

#endif
