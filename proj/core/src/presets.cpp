#include "fried/presets.hpp"

#include "fried/errors.hpp"

namespace fried {

TrainConfig preset_train_config(const std::string& name) {
    TrainConfig config;
    if (name == "adult") {
        config.hidden = {30, 15};
        config.latent_dim = 30;
        config.epochs = 100;
        config.batch_size = 100;
        config.learning_rate = 0.01;
    } else if (name == "compas") {
        config.hidden = {25, 12};
        config.latent_dim = 12;
        config.epochs = 75;
        config.batch_size = 100;
        config.learning_rate = 0.01;
    } else if (name == "dsprites_synth") {
        config.hidden = {256, 64};
        config.latent_dim = 32;
        config.epochs = 5000;
        config.batch_size = 50;
        config.learning_rate = 0.03;
    } else if (name == "wikipedia_synth") {
        config.hidden = {500, 250, 100};
        config.latent_dim = 50;
        config.epochs = 7000;
        config.batch_size = 100;
        config.learning_rate = 0.05;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return config;
}

std::vector<std::string> preset_names() {
    return {"adult", "compas", "dsprites_synth", "wikipedia_synth"};
}

}  // namespace fried
