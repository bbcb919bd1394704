#ifndef FRIED_PRESETS_HPP
#define FRIED_PRESETS_HPP

#include <string>
#include <vector>

#include "fried/train.hpp"

namespace fried {

/// Named training presets: adult, compas, dsprites_synth, wikipedia_synth.
TrainConfig preset_train_config(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace fried

#endif
