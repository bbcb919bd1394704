#include "fried/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fried/errors.hpp"

namespace fried {

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
    }
    throw std::logic_error("unknown activation");
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    throw ConfigError("unknown activation '" + name + "'");
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
}

bool MlpParams::operator==(const MlpParams& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (!(layers[i].w == other.layers[i].w)) return false;
        if (layers[i].b != other.layers[i].b) return false;
        if (layers[i].act != other.layers[i].act) return false;
    }
    return true;
}

void MlpGrads::add_scaled(const MlpGrads& other, double scale) {
    for (std::size_t l = 0; l < w.size(); ++l) {
        for (std::size_t i = 0; i < w[l].size(); ++i)
            w[l].data()[i] += scale * other.w[l].data()[i];
        for (std::size_t i = 0; i < b[l].size(); ++i) b[l][i] += scale * other.b[l][i];
    }
}

MlpGrads zero_grads(const MlpParams& params) {
    MlpGrads g;
    g.w.reserve(params.layers.size());
    g.b.reserve(params.layers.size());
    for (const auto& l : params.layers) {
        g.w.emplace_back(l.w.rows(), l.w.cols());
        g.b.emplace_back(l.b.size(), 0.0);
    }
    return g;
}

MlpParams make_mlp(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                   Rng& rng) {
    if (dims.size() < 2 || acts.size() != dims.size() - 1)
        throw ConfigError("make_mlp: dims must have one more entry than acts");
    MlpParams params;
    params.layers.reserve(acts.size());
    for (std::size_t l = 0; l < acts.size(); ++l) {
        Layer layer;
        layer.w = Matrix(dims[l], dims[l + 1]);
        const double r = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
        for (double& v : layer.w.data()) v = rng.uniform(-r, r);
        layer.b.assign(dims[l + 1], 0.0);
        layer.act = acts[l];
        params.layers.push_back(std::move(layer));
    }
    return params;
}

namespace {

void apply_activation(Matrix& z, Activation act) {
    switch (act) {
        case Activation::identity:
            return;
        case Activation::relu:
            for (double& v : z.data()) v = v > 0.0 ? v : 0.0;
            return;
        case Activation::sigmoid:
            for (double& v : z.data()) v = 1.0 / (1.0 + std::exp(-v));
            return;
    }
}

// delta = upstream .* act'(output); derivative expressed through the output value.
void apply_activation_grad(Matrix& delta, const Matrix& output, Activation act) {
    switch (act) {
        case Activation::identity:
            return;
        case Activation::relu:
            for (std::size_t i = 0; i < delta.size(); ++i)
                if (output.data()[i] <= 0.0) delta.data()[i] = 0.0;
            return;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < delta.size(); ++i) {
                const double a = output.data()[i];
                delta.data()[i] *= a * (1.0 - a);
            }
            return;
    }
}

}  // namespace

Matrix mlp_forward(const MlpParams& params, const Matrix& input, ForwardCache* cache) {
    if (params.layers.empty()) throw ConfigError("mlp_forward: empty network");
    if (input.cols() != params.input_dim())
        throw ConfigError("mlp_forward: input has " + std::to_string(input.cols()) +
                          " columns, network expects " + std::to_string(params.input_dim()));
    if (cache) {
        cache->acts.clear();
        cache->acts.reserve(params.layers.size() + 1);
        cache->acts.push_back(input);
    }
    Matrix a = input;
    for (const auto& layer : params.layers) {
        Matrix z = matmul(a, layer.w);
        add_row_inplace(z, layer.b);
        apply_activation(z, layer.act);
        a = std::move(z);
        if (cache) cache->acts.push_back(a);
    }
    return a;
}

Matrix mlp_backward(const MlpParams& params, const ForwardCache& cache,
                    const Matrix& output_grad, MlpGrads& grads) {
    const std::size_t n_layers = params.layers.size();
    if (cache.acts.size() != n_layers + 1)
        throw std::invalid_argument("mlp_backward: cache does not match network");
    if (!output_grad.same_shape(cache.acts.back()))
        throw std::invalid_argument("mlp_backward: output_grad shape mismatch");
    if (grads.w.size() != n_layers) throw std::invalid_argument("mlp_backward: grads shape");

    Matrix upstream = output_grad;
    for (std::size_t l = n_layers; l-- > 0;) {
        const Layer& layer = params.layers[l];
        apply_activation_grad(upstream, cache.acts[l + 1], layer.act);
        grads.w[l] += matmul_transpose_a(cache.acts[l], upstream);
        const std::vector<double> db = column_sums(upstream);
        for (std::size_t i = 0; i < db.size(); ++i) grads.b[l][i] += db[i];
        if (l > 0) upstream = matmul_transpose_b(upstream, layer.w);
    }
    return matmul_transpose_b(upstream, params.layers[0].w);
}

void sgd_step(MlpParams& params, const MlpGrads& grads, double learning_rate) {
    if (grads.w.size() != params.layers.size())
        throw std::invalid_argument("sgd_step: grads do not match params");
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        Layer& layer = params.layers[l];
        const Matrix& gw = grads.w[l];
        if (!gw.same_shape(layer.w) || grads.b[l].size() != layer.b.size())
            throw std::invalid_argument("sgd_step: gradient shape mismatch");
        for (std::size_t i = 0; i < gw.size(); ++i) {
            if (!std::isfinite(gw.data()[i]))
                throw DivergenceError("sgd_step: non-finite weight gradient");
            layer.w.data()[i] -= learning_rate * gw.data()[i];
        }
        for (std::size_t i = 0; i < grads.b[l].size(); ++i) {
            if (!std::isfinite(grads.b[l][i]))
                throw DivergenceError("sgd_step: non-finite bias gradient");
            layer.b[i] -= learning_rate * grads.b[l][i];
        }
    }
}

std::vector<double> flatten(const MlpParams& params) {
    std::vector<double> flat;
    flat.reserve(params.parameter_count());
    for (const auto& l : params.layers) {
        flat.insert(flat.end(), l.w.data().begin(), l.w.data().end());
        flat.insert(flat.end(), l.b.begin(), l.b.end());
    }
    return flat;
}

void unflatten(MlpParams& params, const std::vector<double>& flat) {
    if (flat.size() != params.parameter_count())
        throw std::invalid_argument("unflatten: length mismatch");
    std::size_t pos = 0;
    for (auto& l : params.layers) {
        std::copy_n(flat.begin() + pos, l.w.size(), l.w.data().begin());
        pos += l.w.size();
        std::copy_n(flat.begin() + pos, l.b.size(), l.b.begin());
        pos += l.b.size();
    }
}

double gradcheck(const std::function<double(const std::vector<double>&)>& loss_fn,
                 const std::vector<double>& params, const std::vector<double>& analytic_grad,
                 double epsilon) {
    if (epsilon <= 0.0) throw std::invalid_argument("gradcheck: epsilon must be positive");
    if (params.size() != analytic_grad.size())
        throw std::invalid_argument("gradcheck: gradient length mismatch");
    std::vector<double> point = params;
    double worst = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double saved = point[i];
        point[i] = saved + epsilon;
        const double up = loss_fn(point);
        point[i] = saved - epsilon;
        const double down = loss_fn(point);
        point[i] = saved;
        if (!std::isfinite(up) || !std::isfinite(down))
            throw DivergenceError("gradcheck: loss is non-finite near the evaluation point");
        const double numeric = (up - down) / (2.0 * epsilon);
        const double analytic = analytic_grad[i];
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
    return worst;
}

}  // namespace fried
