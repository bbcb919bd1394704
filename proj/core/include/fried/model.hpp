#ifndef FRIED_MODEL_HPP
#define FRIED_MODEL_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "fried/dataset.hpp"
#include "fried/matrix.hpp"
#include "fried/mlp.hpp"
#include "fried/rng.hpp"

namespace fried {

/// Autoencoder with a weight-shared encoder, a protected-conditioned decoder
/// and two adversaries: one predicting the protected attribute from the mixed
/// latent code, one recovering the interpolation coefficient from the
/// reconstruction.
struct FriedModel {
    MlpParams encoder;     // (feature_dim + protected_dim) -> latent_dim
    MlpParams decoder;     // (latent_dim + protected_dim) -> feature_dim
    MlpParams critic_dis;  // latent_dim -> protected_dim, sigmoid output
    MlpParams critic_i;    // (feature_dim + protected_dim) -> 1, sigmoid output
    double beta = 0.0;
    double lambda = 0.0;
    std::size_t feature_dim = 0;
    std::size_t protected_dim = 0;
    std::size_t latent_dim = 0;
    std::uint64_t seed = 0;
    Preprocessing preprocessing;  // carried over from the training dataset

    void validate() const;  // checks the dimension chaining above
};

/// Builds all four networks with the given hidden widths. Hidden layers are
/// relu; the encoder and decoder end in identity, the critics in sigmoid.
FriedModel make_fried_model(std::size_t feature_dim, std::size_t protected_dim,
                            std::size_t latent_dim, const std::vector<std::size_t>& hidden,
                            double beta, double lambda, Rng& rng);

/// A pair of instance batches with their protected columns and the mixing
/// coefficient. p (and p2) hold the protected rows aligned with x1 (and x2).
struct Batch {
    Matrix x1;
    Matrix x2;
    Matrix p;
    Matrix p2;
    double alpha = 1.0;

    void validate() const;
};

Matrix encode(const FriedModel& model, const Matrix& x, const Matrix& p);

/// Elementwise convex combination alpha*z1 + (1-alpha)*z2.
Matrix mix(const Matrix& z1, const Matrix& z2, double alpha);

Matrix decode(const FriedModel& model, const Matrix& zprime, const Matrix& p);

/// Mean squared error of the disentanglement critic's protected-attribute
/// prediction from the mixed code.
double critic_dis_loss(const FriedModel& model, const Matrix& zprime, const Matrix& p);

/// Mean squared error of the interpolation critic's coefficient estimate
/// from (reconstruction, p).
double critic_i_loss(const FriedModel& model, const Matrix& xhat, const Matrix& p, double alpha);

struct LossParts {
    double reconstruction = 0.0;
    double disentanglement_term = 0.0;
    double interpolation_term = 0.0;
    double total = 0.0;
};

/// Full autoencoder objective on a batch:
///   reconstruction + beta * disentanglement term + lambda * interpolation term.
///
/// By default the regularizers are fooling terms: the critic output is pushed
/// toward the uninformative target (the protected mean p_bar, and coefficient
/// zero). With literal_composition the critics' own error terms are added
/// instead. p_bar defaults to the batch mean of p.
LossParts autoencoder_loss(const FriedModel& model, const Batch& batch,
                           std::optional<std::vector<double>> p_bar = std::nullopt,
                           bool literal_composition = false);

/// Gradients of every parameter in the model, one slot per network.
struct FriedGrads {
    MlpGrads encoder, decoder, critic_dis, critic_i;
};

FriedGrads zero_grads(const FriedModel& model);

/// autoencoder_loss together with its gradient with respect to all four
/// networks (the critics enter the objective as frozen functions; their
/// slots still receive the true partial derivatives so the objective can be
/// verified numerically end to end).
LossParts autoencoder_loss_grads(const FriedModel& model, const Batch& batch, FriedGrads& grads,
                                 std::optional<std::vector<double>> p_bar = std::nullopt,
                                 bool literal_composition = false);

/// Eq-style critic objectives with gradients for the critic's own parameters.
double critic_dis_loss_grads(const FriedModel& model, const Matrix& zprime, const Matrix& p,
                             MlpGrads& grads);
double critic_i_loss_grads(const FriedModel& model, const Matrix& xhat, const Matrix& p,
                           double alpha, MlpGrads& grads);

struct InferResult {
    Matrix xprime;  // latent representation, no mixing
    Matrix xhat;    // reconstruction
};

/// Test-time path: xprime = encode(x, p), xhat = decode(xprime, p).
InferResult infer(const FriedModel& model, const Matrix& x, const Matrix& p);

std::vector<double> flatten_parameters(const FriedModel& model);
void unflatten_parameters(FriedModel& model, const std::vector<double>& flat);
std::vector<double> flatten_grads(const FriedGrads& grads, const FriedModel& model);

}  // namespace fried

#endif
