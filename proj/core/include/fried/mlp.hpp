#ifndef FRIED_MLP_HPP
#define FRIED_MLP_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fried/matrix.hpp"
#include "fried/rng.hpp"

namespace fried {

enum class Activation { identity, relu, sigmoid };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// One dense layer: weights are (in, out), bias length out.
struct Layer {
    Matrix w;
    std::vector<double> b;
    Activation act = Activation::identity;
};

struct MlpParams {
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().w.rows(); }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().w.cols(); }
    std::size_t parameter_count() const;
    bool operator==(const MlpParams& other) const;
};

/// Gradients with the same shapes as the parameters they belong to.
struct MlpGrads {
    std::vector<Matrix> w;
    std::vector<std::vector<double>> b;

    void add_scaled(const MlpGrads& other, double scale);
};

MlpGrads zero_grads(const MlpParams& params);

/// Builds an MLP with the given layer widths; dims has one more entry than
/// acts. Weights are uniform in +-sqrt(6/(fan_in+fan_out)), biases zero,
/// drawn row-major from rng so construction is reproducible.
MlpParams make_mlp(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                   Rng& rng);

/// Activations per layer; acts[0] is the input, acts[i] the output of layer i.
struct ForwardCache {
    std::vector<Matrix> acts;
};

/// Batched forward pass; fills cache (when given) with everything backward needs.
Matrix mlp_forward(const MlpParams& params, const Matrix& input, ForwardCache* cache = nullptr);

/// Backpropagates output_grad (dLoss/dOutput) through the cached forward pass.
/// Accumulates parameter gradients into grads and returns dLoss/dInput.
Matrix mlp_backward(const MlpParams& params, const ForwardCache& cache,
                    const Matrix& output_grad, MlpGrads& grads);

/// In-place SGD update: param -= learning_rate * grad.
/// Throws DivergenceError on non-finite gradients.
void sgd_step(MlpParams& params, const MlpGrads& grads, double learning_rate);

std::vector<double> flatten(const MlpParams& params);
void unflatten(MlpParams& params, const std::vector<double>& flat);

/// Central-difference check of an analytic gradient for an arbitrary scalar
/// loss over a flat parameter vector. Returns the max over coordinates of
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
double gradcheck(const std::function<double(const std::vector<double>&)>& loss_fn,
                 const std::vector<double>& params, const std::vector<double>& analytic_grad,
                 double epsilon);

}  // namespace fried

#endif
