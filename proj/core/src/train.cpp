#include "fried/train.hpp"

#include <cmath>

#include "fried/errors.hpp"
#include "fried/rng.hpp"

namespace fried {

std::string ablation_name(Ablation a) {
    switch (a) {
        case Ablation::full: return "full";
        case Ablation::no_critic_dis: return "no_critic_dis";
        case Ablation::no_critic_i: return "no_critic_i";
        case Ablation::vanilla_ae: return "vanilla_ae";
    }
    throw std::logic_error("unknown ablation");
}

Ablation ablation_from_name(const std::string& name) {
    if (name == "full") return Ablation::full;
    if (name == "no_critic_dis") return Ablation::no_critic_dis;
    if (name == "no_critic_i") return Ablation::no_critic_i;
    if (name == "vanilla_ae") return Ablation::vanilla_ae;
    throw ConfigError("unknown ablation '" + name + "'");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
    if (learning_rate <= 0.0) throw ConfigError("train config: learning_rate must be > 0");
    if (critic_learning_rate < 0.0)
        throw ConfigError("train config: critic_learning_rate must be >= 0");
    if (beta < 0.0 || lambda < 0.0) throw ConfigError("train config: beta, lambda must be >= 0");
    if (latent_dim < 1) throw ConfigError("train config: latent_dim must be >= 1");
    if (hidden.empty()) throw ConfigError("train config: need at least one hidden layer");
}

double critic_dis_step(FriedModel& model, const Matrix& zprime, const Matrix& p,
                       double learning_rate) {
    MlpGrads grads = zero_grads(model.critic_dis);
    const double loss = critic_dis_loss_grads(model, zprime, p, grads);
    sgd_step(model.critic_dis, grads, learning_rate);
    return loss;
}

double critic_i_step(FriedModel& model, const Matrix& xhat, const Matrix& p, double alpha,
                     double learning_rate) {
    MlpGrads grads = zero_grads(model.critic_i);
    const double loss = critic_i_loss_grads(model, xhat, p, alpha, grads);
    sgd_step(model.critic_i, grads, learning_rate);
    return loss;
}

LossParts autoencoder_step(FriedModel& model, const Batch& batch,
                           const std::vector<double>& p_bar, double learning_rate,
                           bool literal_composition) {
    FriedGrads grads = zero_grads(model);
    const LossParts parts =
        autoencoder_loss_grads(model, batch, grads, p_bar, literal_composition);
    sgd_step(model.encoder, grads.encoder, learning_rate);
    sgd_step(model.decoder, grads.decoder, learning_rate);
    return parts;
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
    config.validate();
    dataset.validate();
    if (dataset.rows() == 0) throw DataError("train: empty dataset");
    if (dataset.p.cols() == 0) throw DataError("train: dataset has no protected column");

    const bool vanilla = config.ablation == Ablation::vanilla_ae;
    const bool use_dis = config.ablation == Ablation::full ||
                         config.ablation == Ablation::no_critic_i;
    const bool use_interp = config.ablation == Ablation::full ||
                            config.ablation == Ablation::no_critic_dis;
    const double critic_lr =
        config.critic_learning_rate > 0.0 ? config.critic_learning_rate : config.learning_rate;

    Rng rng(config.seed);
    FriedModel model = make_fried_model(dataset.x.cols(), dataset.p.cols(), config.latent_dim,
                                        config.hidden, use_dis ? config.beta : 0.0,
                                        use_interp ? config.lambda : 0.0, rng);
    model.seed = config.seed;
    model.preprocessing = dataset.preprocessing;

    const std::vector<double> p_bar = column_means(dataset.p);
    const std::size_t n = dataset.rows();

    TrainResult result;
    result.history.reserve(config.epochs);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const std::vector<std::size_t> order = rng.permutation(n);
        EpochRecord record;
        record.epoch = epoch;
        std::size_t n_batches = 0;

        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t m = std::min(config.batch_size, n - start);
            const double alpha = vanilla ? 1.0 : rng.uniform01();

            std::vector<std::size_t> idx1(m), idx2(m);
            for (std::size_t i = 0; i < m; ++i) {
                idx1[i] = order[start + i];
                // Consecutive pairing; the batch's last instance wraps to its first.
                idx2[i] = vanilla ? idx1[i] : order[start + (i + 1) % m];
            }

            Batch batch;
            batch.x1 = dataset.x.take_rows(idx1);
            batch.x2 = vanilla ? batch.x1 : dataset.x.take_rows(idx2);
            batch.p = dataset.p.take_rows(idx1);
            batch.p2 = vanilla ? batch.p : dataset.p.take_rows(idx2);
            batch.alpha = alpha;

            try {
                if (use_dis || use_interp) {
                    const Matrix z1 = encode(model, batch.x1, batch.p);
                    const Matrix zprime =
                        vanilla ? z1 : mix(z1, encode(model, batch.x2, batch.p2), alpha);
                    if (use_dis)
                        record.critic_dis_loss +=
                            critic_dis_step(model, zprime, batch.p, critic_lr);
                    if (use_interp) {
                        const Matrix xhat = decode(model, zprime, batch.p);
                        record.critic_i_loss +=
                            critic_i_step(model, xhat, batch.p, alpha, critic_lr);
                    }
                }
                const LossParts parts = autoencoder_step(model, batch, p_bar,
                                                         config.learning_rate,
                                                         config.literal_composition);
                record.reconstruction += parts.reconstruction;
                record.disentanglement_term += parts.disentanglement_term;
                record.interpolation_term += parts.interpolation_term;
                record.total += parts.total;
            } catch (const DivergenceError& e) {
                throw DivergenceError("epoch " + std::to_string(epoch) + ", batch " +
                                      std::to_string(n_batches) + ": " + e.what());
            }
            ++n_batches;
        }

        const double scale = 1.0 / static_cast<double>(n_batches);
        record.reconstruction *= scale;
        record.disentanglement_term *= scale;
        record.interpolation_term *= scale;
        record.total *= scale;
        record.critic_dis_loss *= scale;
        record.critic_i_loss *= scale;
        result.history.push_back(record);
    }

    result.model = std::move(model);
    return result;
}

}  // namespace fried
