#include "fried/model.hpp"

#include <cmath>
#include <string>

#include "fried/errors.hpp"

namespace fried {

void FriedModel::validate() const {
    if (feature_dim == 0 || latent_dim == 0 || protected_dim == 0)
        throw ConfigError("model: zero dimension");
    if (encoder.input_dim() != feature_dim + protected_dim ||
        encoder.output_dim() != latent_dim)
        throw ConfigError("model: encoder dims do not chain");
    if (decoder.input_dim() != latent_dim + protected_dim ||
        decoder.output_dim() != feature_dim)
        throw ConfigError("model: decoder dims do not chain");
    if (critic_dis.input_dim() != latent_dim || critic_dis.output_dim() != protected_dim)
        throw ConfigError("model: critic_dis dims do not chain");
    if (critic_i.input_dim() != feature_dim + protected_dim || critic_i.output_dim() != 1)
        throw ConfigError("model: critic_i dims do not chain");
    if (beta < 0.0 || lambda < 0.0) throw ConfigError("model: beta and lambda must be >= 0");
}

FriedModel make_fried_model(std::size_t feature_dim, std::size_t protected_dim,
                            std::size_t latent_dim, const std::vector<std::size_t>& hidden,
                            double beta, double lambda, Rng& rng) {
    auto dims_for = [&hidden](std::size_t in, std::size_t out) {
        std::vector<std::size_t> dims{in};
        dims.insert(dims.end(), hidden.begin(), hidden.end());
        dims.push_back(out);
        return dims;
    };
    auto acts_for = [&hidden](Activation last) {
        std::vector<Activation> acts(hidden.size(), Activation::relu);
        acts.push_back(last);
        return acts;
    };

    FriedModel model;
    model.feature_dim = feature_dim;
    model.protected_dim = protected_dim;
    model.latent_dim = latent_dim;
    model.beta = beta;
    model.lambda = lambda;
    // Construction order matters for reproducibility: encoder, decoder,
    // disentanglement critic, interpolation critic. The critics regress their
    // targets through a linear output: a sigmoid head saturates once the
    // critic gets confident and the fooling gradient through it vanishes,
    // which stalls the adversarial removal.
    model.encoder = make_mlp(dims_for(feature_dim + protected_dim, latent_dim),
                             acts_for(Activation::identity), rng);
    model.decoder = make_mlp(dims_for(latent_dim + protected_dim, feature_dim),
                             acts_for(Activation::identity), rng);
    model.critic_dis =
        make_mlp(dims_for(latent_dim, protected_dim), acts_for(Activation::identity), rng);
    model.critic_i = make_mlp(dims_for(feature_dim + protected_dim, 1),
                              acts_for(Activation::identity), rng);
    model.validate();
    return model;
}

void Batch::validate() const {
    if (!x1.same_shape(x2)) throw ConfigError("batch: x1 and x2 shapes differ");
    if (p.rows() != x1.rows() || p2.rows() != x1.rows())
        throw ConfigError("batch: protected rows do not match");
    if (p.cols() != p2.cols()) throw ConfigError("batch: protected widths differ");
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("batch: alpha must be in [0,1]");
}

Matrix encode(const FriedModel& model, const Matrix& x, const Matrix& p) {
    if (x.cols() != model.feature_dim)
        throw ConfigError("encode: expected " + std::to_string(model.feature_dim) +
                          " feature columns, got " + std::to_string(x.cols()));
    if (p.cols() != model.protected_dim || p.rows() != x.rows())
        throw ConfigError("encode: protected matrix shape mismatch");
    return mlp_forward(model.encoder, hcat(x, p));
}

Matrix mix(const Matrix& z1, const Matrix& z2, double alpha) {
    if (!z1.same_shape(z2)) throw ConfigError("mix: shape mismatch");
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("mix: alpha must be in [0,1]");
    if (alpha == 1.0) return z1;
    if (alpha == 0.0) return z2;
    Matrix out = z1;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = alpha * z1.data()[i] + (1.0 - alpha) * z2.data()[i];
    return out;
}

Matrix decode(const FriedModel& model, const Matrix& zprime, const Matrix& p) {
    if (zprime.cols() != model.latent_dim)
        throw ConfigError("decode: expected " + std::to_string(model.latent_dim) +
                          " latent columns, got " + std::to_string(zprime.cols()));
    if (p.cols() != model.protected_dim || p.rows() != zprime.rows())
        throw ConfigError("decode: protected matrix shape mismatch");
    return mlp_forward(model.decoder, hcat(zprime, p));
}

double critic_dis_loss(const FriedModel& model, const Matrix& zprime, const Matrix& p) {
    const Matrix phat = mlp_forward(model.critic_dis, zprime);
    return mean_squared_error(p, phat);
}

double critic_i_loss(const FriedModel& model, const Matrix& xhat, const Matrix& p, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("critic_i_loss: alpha must be in [0,1]");
    const Matrix ahat = mlp_forward(model.critic_i, hcat(xhat, p));
    Matrix target(ahat.rows(), 1);
    for (double& v : target.data()) v = alpha;
    return mean_squared_error(target, ahat);
}

FriedGrads zero_grads(const FriedModel& model) {
    return FriedGrads{zero_grads(model.encoder), zero_grads(model.decoder),
                      zero_grads(model.critic_dis), zero_grads(model.critic_i)};
}

namespace {

// d/dpred of mean((pred - target)^2), written into a fresh matrix.
Matrix mse_grad(const Matrix& pred, const Matrix& target, double weight) {
    Matrix g = pred;
    const double scale = 2.0 * weight / static_cast<double>(pred.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        g.data()[i] = scale * (pred.data()[i] - target.data()[i]);
    return g;
}

}  // namespace

LossParts autoencoder_loss(const FriedModel& model, const Batch& batch,
                           std::optional<std::vector<double>> p_bar, bool literal_composition) {
    FriedGrads scratch = zero_grads(model);
    return autoencoder_loss_grads(model, batch, scratch, std::move(p_bar), literal_composition);
}

LossParts autoencoder_loss_grads(const FriedModel& model, const Batch& batch, FriedGrads& grads,
                                 std::optional<std::vector<double>> p_bar,
                                 bool literal_composition) {
    batch.validate();
    const std::size_t n = batch.x1.rows();

    ForwardCache cache_e1, cache_e2, cache_dec, cache_cdis, cache_ci;
    const Matrix z1 = mlp_forward(model.encoder, hcat(batch.x1, batch.p), &cache_e1);
    const Matrix z2 = mlp_forward(model.encoder, hcat(batch.x2, batch.p2), &cache_e2);
    const Matrix zprime = mix(z1, z2, batch.alpha);
    const Matrix xhat = mlp_forward(model.decoder, hcat(zprime, batch.p), &cache_dec);

    LossParts parts;
    parts.reconstruction = mean_squared_error(batch.x1, xhat);
    Matrix dxhat = mse_grad(xhat, batch.x1, 1.0);

    Matrix dzprime(zprime.rows(), zprime.cols());
    if (model.beta > 0.0) {
        const Matrix phat = mlp_forward(model.critic_dis, zprime, &cache_cdis);
        Matrix target;
        if (literal_composition) {
            target = batch.p;
        } else {
            const std::vector<double> pbar =
                p_bar ? std::move(*p_bar) : column_means(batch.p);
            if (pbar.size() != model.protected_dim)
                throw ConfigError("autoencoder_loss: p_bar width mismatch");
            target = Matrix(n, model.protected_dim);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < pbar.size(); ++c) target(r, c) = pbar[c];
        }
        parts.disentanglement_term = mean_squared_error(target, phat);
        Matrix dphat = mse_grad(phat, target, model.beta);
        dzprime += mlp_backward(model.critic_dis, cache_cdis, dphat, grads.critic_dis);
    }

    if (model.lambda > 0.0) {
        const Matrix ahat = mlp_forward(model.critic_i, hcat(xhat, batch.p), &cache_ci);
        Matrix target(n, 1);  // fooled toward a non-interpolated reading
        if (literal_composition)
            for (double& v : target.data()) v = batch.alpha;
        parts.interpolation_term = mean_squared_error(target, ahat);
        Matrix dahat = mse_grad(ahat, target, model.lambda);
        const Matrix dci_in = mlp_backward(model.critic_i, cache_ci, dahat, grads.critic_i);
        dxhat += dci_in.slice_cols(0, model.feature_dim);
    }

    const Matrix ddec_in = mlp_backward(model.decoder, cache_dec, dxhat, grads.decoder);
    dzprime += ddec_in.slice_cols(0, model.latent_dim);

    Matrix dz1 = dzprime;
    dz1 *= batch.alpha;
    Matrix dz2 = dzprime;
    dz2 *= 1.0 - batch.alpha;
    mlp_backward(model.encoder, cache_e1, dz1, grads.encoder);
    mlp_backward(model.encoder, cache_e2, dz2, grads.encoder);  // shared weights accumulate

    parts.total = parts.reconstruction + model.beta * parts.disentanglement_term +
                  model.lambda * parts.interpolation_term;
    if (!std::isfinite(parts.total))
        throw DivergenceError("autoencoder_loss: non-finite loss");
    return parts;
}

double critic_dis_loss_grads(const FriedModel& model, const Matrix& zprime, const Matrix& p,
                             MlpGrads& grads) {
    ForwardCache cache;
    const Matrix phat = mlp_forward(model.critic_dis, zprime, &cache);
    const double loss = mean_squared_error(p, phat);
    Matrix dphat = mse_grad(phat, p, 1.0);
    mlp_backward(model.critic_dis, cache, dphat, grads);
    return loss;
}

double critic_i_loss_grads(const FriedModel& model, const Matrix& xhat, const Matrix& p,
                           double alpha, MlpGrads& grads) {
    ForwardCache cache;
    const Matrix ahat = mlp_forward(model.critic_i, hcat(xhat, p), &cache);
    Matrix target(ahat.rows(), 1);
    for (double& v : target.data()) v = alpha;
    const double loss = mean_squared_error(target, ahat);
    Matrix dahat = mse_grad(ahat, target, 1.0);
    mlp_backward(model.critic_i, cache, dahat, grads);
    return loss;
}

InferResult infer(const FriedModel& model, const Matrix& x, const Matrix& p) {
    InferResult out;
    out.xprime = encode(model, x, p);
    out.xhat = decode(model, out.xprime, p);
    return out;
}

std::vector<double> flatten_parameters(const FriedModel& model) {
    std::vector<double> flat = flatten(model.encoder);
    auto append = [&flat](const MlpParams& params) {
        const auto part = flatten(params);
        flat.insert(flat.end(), part.begin(), part.end());
    };
    append(model.decoder);
    append(model.critic_dis);
    append(model.critic_i);
    return flat;
}

void unflatten_parameters(FriedModel& model, const std::vector<double>& flat) {
    const std::size_t counts[4] = {
        model.encoder.parameter_count(), model.decoder.parameter_count(),
        model.critic_dis.parameter_count(), model.critic_i.parameter_count()};
    if (flat.size() != counts[0] + counts[1] + counts[2] + counts[3])
        throw std::invalid_argument("unflatten_parameters: length mismatch");
    MlpParams* nets[4] = {&model.encoder, &model.decoder, &model.critic_dis, &model.critic_i};
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        std::vector<double> part(flat.begin() + pos, flat.begin() + pos + counts[i]);
        unflatten(*nets[i], part);
        pos += counts[i];
    }
}

std::vector<double> flatten_grads(const FriedGrads& grads, const FriedModel& model) {
    std::vector<double> flat;
    const MlpGrads* gs[4] = {&grads.encoder, &grads.decoder, &grads.critic_dis, &grads.critic_i};
    const MlpParams* ps[4] = {&model.encoder, &model.decoder, &model.critic_dis, &model.critic_i};
    for (int i = 0; i < 4; ++i) {
        for (std::size_t l = 0; l < ps[i]->layers.size(); ++l) {
            flat.insert(flat.end(), gs[i]->w[l].data().begin(), gs[i]->w[l].data().end());
            flat.insert(flat.end(), gs[i]->b[l].begin(), gs[i]->b[l].end());
        }
    }
    return flat;
}

}  // namespace fried
