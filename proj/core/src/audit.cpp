#include "fried/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fried/errors.hpp"
#include "fried/rng.hpp"

namespace fried {

BlackBoxModel linear_black_box(std::vector<double> weights, double intercept,
                               std::vector<std::string> feature_names) {
    BlackBoxModel model;
    model.feature_names = std::move(feature_names);
    model.predict = [weights = std::move(weights), intercept](const Matrix& x) {
        if (x.cols() != weights.size())
            throw ConfigError("linear target: expected " + std::to_string(weights.size()) +
                              " columns, got " + std::to_string(x.cols()));
        std::vector<double> out(x.rows(), intercept);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double* row = x.row_ptr(r);
            for (std::size_t c = 0; c < weights.size(); ++c) out[r] += weights[c] * row[c];
        }
        return out;
    };
    return model;
}

std::vector<std::size_t> AttributionReport::ranking() const {
    std::vector<std::size_t> order(mean_abs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [this](std::size_t a, std::size_t b) { return mean_abs[a] > mean_abs[b]; });
    return order;
}

namespace {

constexpr std::size_t kExhaustiveLimit = 8;

// Coalition value v(S) per instance: mean prediction over composite rows
// that take S from the instance and the rest from each background row.
std::vector<double> coalition_values(const BlackBoxModel& predictor, const Matrix& x,
                                     const Matrix& background, std::uint32_t mask) {
    const std::size_t d = x.cols();
    const std::size_t nb = background.rows();
    Matrix composite(x.rows() * nb, d);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t b = 0; b < nb; ++b) {
            double* row = composite.row_ptr(i * nb + b);
            for (std::size_t c = 0; c < d; ++c)
                row[c] = (mask >> c) & 1u ? x(i, c) : background(b, c);
        }
    }
    const auto scores = predictor.predict(composite);
    std::vector<double> values(x.rows(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t b = 0; b < nb; ++b) acc += scores[i * nb + b];
        values[i] = acc / static_cast<double>(nb);
    }
    return values;
}

AttributionReport shapley_exhaustive(const BlackBoxModel& predictor, const Matrix& x,
                                     const Matrix& background, std::uint64_t seed) {
    const std::size_t d = x.cols();
    const std::size_t n_masks = std::size_t{1} << d;

    std::vector<std::vector<double>> v(n_masks);
    for (std::uint32_t mask = 0; mask < n_masks; ++mask)
        v[mask] = coalition_values(predictor, x, background, mask);

    // Coalition weights |S|! (d-|S|-1)! / d!
    std::vector<double> weight(d);
    double d_factorial = 1.0;
    for (std::size_t k = 2; k <= d; ++k) d_factorial *= static_cast<double>(k);
    for (std::size_t s = 0; s < d; ++s) {
        double num = 1.0;
        for (std::size_t k = 2; k <= s; ++k) num *= static_cast<double>(k);
        for (std::size_t k = 2; k <= d - s - 1; ++k) num *= static_cast<double>(k);
        weight[s] = num / d_factorial;
    }

    AttributionReport report;
    report.phi = Matrix(x.rows(), d);
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
        for (std::size_t i = 0; i < d; ++i) {
            if ((mask >> i) & 1u) continue;
            const std::uint32_t with_i = mask | (1u << i);
            const double w = weight[size];
            for (std::size_t r = 0; r < x.rows(); ++r)
                report.phi(r, i) += w * (v[with_i][r] - v[mask][r]);
        }
    }
    report.base_value = v[0].empty() ? 0.0 : v[0][0];
    report.predictions = v[n_masks - 1];
    report.exhaustive = true;
    report.n_samples = 0;
    report.seed = seed;
    return report;
}

AttributionReport shapley_monte_carlo(const BlackBoxModel& predictor, const Matrix& x,
                                      const Matrix& background, std::size_t n_samples,
                                      std::uint64_t seed) {
    const std::size_t d = x.cols();
    const std::size_t nb = background.rows();

    AttributionReport report;
    report.phi = Matrix(x.rows(), d);
    report.exhaustive = false;
    report.n_samples = n_samples;
    report.seed = seed;

    const auto base_scores = predictor.predict(background);
    report.base_value =
        std::accumulate(base_scores.begin(), base_scores.end(), 0.0) / static_cast<double>(nb);
    report.predictions = predictor.predict(x);

    // Walk one permutation at a time: d+1 composite rows per sample, scored
    // in a single batched call per instance.
    for (std::size_t inst = 0; inst < x.rows(); ++inst) {
        Rng rng(Rng::mix(seed, inst));
        Matrix walk(n_samples * (d + 1), d);
        std::vector<std::vector<std::size_t>> perms(n_samples);
        for (std::size_t s = 0; s < n_samples; ++s) {
            perms[s] = rng.permutation(d);
            const std::size_t b = static_cast<std::size_t>(rng.below(nb));
            double* row = walk.row_ptr(s * (d + 1));
            for (std::size_t c = 0; c < d; ++c) row[c] = background(b, c);
            for (std::size_t step = 0; step < d; ++step) {
                double* next = walk.row_ptr(s * (d + 1) + step + 1);
                const double* prev = walk.row_ptr(s * (d + 1) + step);
                for (std::size_t c = 0; c < d; ++c) next[c] = prev[c];
                next[perms[s][step]] = x(inst, perms[s][step]);
            }
        }
        const auto scores = predictor.predict(walk);
        for (std::size_t s = 0; s < n_samples; ++s) {
            for (std::size_t step = 0; step < d; ++step) {
                const double delta =
                    scores[s * (d + 1) + step + 1] - scores[s * (d + 1) + step];
                report.phi(inst, perms[s][step]) += delta;
            }
        }
        for (std::size_t c = 0; c < d; ++c)
            report.phi(inst, c) /= static_cast<double>(n_samples);
    }
    return report;
}

}  // namespace

namespace {

void check_attribution_inputs(const Matrix& x, const Matrix& background, std::size_t n_samples) {
    if (x.rows() == 0) throw DataError("shapley_attribution: no instances");
    if (background.rows() == 0) throw DataError("shapley_attribution: empty background");
    if (background.cols() != x.cols())
        throw DataError("shapley_attribution: background width differs from instances");
    if (n_samples < 1) throw ConfigError("shapley_attribution: n_samples must be >= 1");
}

void finalize_report(AttributionReport& report, const BlackBoxModel& predictor) {
    report.feature_names = predictor.feature_names;
    report.mean_abs.assign(report.phi.cols(), 0.0);
    for (std::size_t r = 0; r < report.phi.rows(); ++r)
        for (std::size_t c = 0; c < report.phi.cols(); ++c)
            report.mean_abs[c] += std::abs(report.phi(r, c));
    for (double& v : report.mean_abs) v /= static_cast<double>(report.phi.rows());
}

}  // namespace

AttributionReport shapley_attribution(const BlackBoxModel& predictor, const Matrix& x,
                                      const Matrix& background, std::size_t n_samples,
                                      std::uint64_t seed) {
    check_attribution_inputs(x, background, n_samples);
    AttributionReport report = x.cols() <= kExhaustiveLimit
                                   ? shapley_exhaustive(predictor, x, background, seed)
                                   : shapley_monte_carlo(predictor, x, background, n_samples, seed);
    finalize_report(report, predictor);
    return report;
}

AttributionReport shapley_attribution_monte_carlo(const BlackBoxModel& predictor, const Matrix& x,
                                                  const Matrix& background, std::size_t n_samples,
                                                  std::uint64_t seed) {
    check_attribution_inputs(x, background, n_samples);
    AttributionReport report = shapley_monte_carlo(predictor, x, background, n_samples, seed);
    finalize_report(report, predictor);
    return report;
}

BlackBoxModel compose_audit_predictor(const FriedModel& model, const BlackBoxModel& target) {
    BlackBoxModel composed;
    for (std::size_t i = 0; i < model.latent_dim; ++i)
        composed.feature_names.push_back("z" + std::to_string(i));
    for (std::size_t i = 0; i < model.protected_dim; ++i)
        composed.feature_names.push_back("p" + std::to_string(i));
    composed.predict = [model, target](const Matrix& input) {
        if (input.cols() != model.latent_dim + model.protected_dim)
            throw ConfigError("composed predictor: expected latent+protected columns");
        const Matrix latent = input.slice_cols(0, model.latent_dim);
        const Matrix p = input.slice_cols(model.latent_dim, model.protected_dim);
        const Matrix xhat = decode(model, latent, p);
        return target.predict(hcat(xhat, p));  // p passes through untransformed
    };
    return composed;
}

InfluenceReport indirect_influence_report(const FriedModel& model, const BlackBoxModel& target,
                                          const Dataset& dataset, const AuditConfig& cfg,
                                          std::uint64_t seed) {
    dataset.validate();
    if (cfg.n_background == 0 || cfg.max_instances == 0)
        throw ConfigError("indirect_influence_report: background and instance counts must be > 0");

    Rng rng(Rng::mix(seed, 0xa0d17));
    auto sample_rows = [&rng, &dataset](std::size_t count) {
        auto order = rng.permutation(dataset.rows());
        order.resize(std::min(count, dataset.rows()));
        std::sort(order.begin(), order.end());
        return order;
    };
    const auto bg_rows = sample_rows(cfg.n_background);
    const auto audit_rows = sample_rows(cfg.max_instances);

    const Matrix raw = hcat(dataset.x, dataset.p);
    BlackBoxModel direct_target = target;
    if (direct_target.feature_names.size() != raw.cols()) {
        direct_target.feature_names = dataset.feature_names;
        for (const auto& name : dataset.protected_names)
            direct_target.feature_names.push_back(name);
    }

    InfluenceReport report;
    report.direct = shapley_attribution(direct_target, raw.take_rows(audit_rows),
                                        raw.take_rows(bg_rows), cfg.n_samples,
                                        Rng::mix(seed, 1));

    const Matrix xprime = encode(model, dataset.x, dataset.p);
    const Matrix latent_space = hcat(xprime, dataset.p);
    BlackBoxModel composed = compose_audit_predictor(model, target);
    // Keep the protected passthrough columns recognizable in the report.
    for (std::size_t i = 0; i < model.protected_dim; ++i)
        if (i < dataset.protected_names.size())
            composed.feature_names[model.latent_dim + i] = dataset.protected_names[i];
    report.indirect = shapley_attribution(composed, latent_space.take_rows(audit_rows),
                                          latent_space.take_rows(bg_rows), cfg.n_samples,
                                          Rng::mix(seed, 2));
    return report;
}

}  // namespace fried
