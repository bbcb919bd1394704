#ifndef FRIED_MODEL_IO_HPP
#define FRIED_MODEL_IO_HPP

#include <string>

#include "fried/model.hpp"

namespace fried {

/// Versioned JSON container ("fried-model", version 1) holding every network,
/// the dims, beta/lambda, the training seed and the preprocessing metadata.
/// save/load round-trips are bit-exact: doubles are emitted in shortest
/// round-trip form and reruns of a deterministic training produce identical
/// bytes.
std::string model_to_json(const FriedModel& model);
FriedModel model_from_json(const std::string& text);

void save_model(const FriedModel& model, const std::string& path);
FriedModel load_model(const std::string& path);

}  // namespace fried

#endif
