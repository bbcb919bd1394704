#ifndef FRIED_TRAIN_HPP
#define FRIED_TRAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fried/dataset.hpp"
#include "fried/model.hpp"

namespace fried {

enum class Ablation { full, no_critic_dis, no_critic_i, vanilla_ae };

std::string ablation_name(Ablation a);
Ablation ablation_from_name(const std::string& name);

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 100;
    double learning_rate = 0.01;
    double critic_learning_rate = 0.0;  // 0 means: use learning_rate
    double beta = 1.0;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    Ablation ablation = Ablation::full;
    bool literal_composition = false;  // add the critics' own errors instead of fooling terms
    std::vector<std::size_t> hidden = {30, 15};
    std::size_t latent_dim = 30;

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double reconstruction = 0.0;
    double disentanglement_term = 0.0;
    double interpolation_term = 0.0;
    double total = 0.0;
    double critic_dis_loss = 0.0;
    double critic_i_loss = 0.0;
};

struct TrainResult {
    FriedModel model;
    std::vector<EpochRecord> history;  // one record per epoch
};

/// One update of the disentanglement critic on the given batch's mixed code;
/// returns the critic loss before the step.
double critic_dis_step(FriedModel& model, const Matrix& zprime, const Matrix& p,
                       double learning_rate);

/// One update of the interpolation critic; returns the loss before the step.
double critic_i_step(FriedModel& model, const Matrix& xhat, const Matrix& p, double alpha,
                     double learning_rate);

/// One encoder/decoder update on the full objective; returns its parts.
LossParts autoencoder_step(FriedModel& model, const Batch& batch,
                           const std::vector<double>& p_bar, double learning_rate,
                           bool literal_composition);

/// Adversarial training: per mini-batch draw one alpha ~ U(0,1), pair each
/// shuffled instance with the next one (wrapping inside the batch), step the
/// two critics on their own objectives, then step the autoencoder. The
/// vanilla_ae ablation disables mixing and both critics; the single-critic
/// ablations leave the missing critic at initialization. (dataset, config)
/// fully determine the result.
TrainResult train(const Dataset& dataset, const TrainConfig& config);

}  // namespace fried

#endif
