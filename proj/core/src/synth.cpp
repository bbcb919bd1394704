#include "fried/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fried/errors.hpp"
#include "fried/rng.hpp"

namespace fried {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// In-place standardization of every feature column, recorded as transforms.
void standardize_features(Dataset& ds) {
    const std::size_t n = ds.rows();
    ds.preprocessing.columns.resize(ds.x.cols());
    for (std::size_t c = 0; c < ds.x.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += ds.x(r, c);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = ds.x(r, c) - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        auto& t = ds.preprocessing.columns[c];
        t.kind = ColumnTransform::Kind::numeric;
        t.source = c < ds.feature_names.size() ? ds.feature_names[c] : "f" + std::to_string(c);
        t.mean = mean;
        t.stddev = sd > 0.0 ? sd : 1.0;
        for (std::size_t r = 0; r < n; ++r)
            ds.x(r, c) = sd > 0.0 ? (ds.x(r, c) - mean) / sd : 0.0;
    }
}

}  // namespace

Dataset synth_bias_dataset(std::size_t n, double bias, double label_noise, std::uint64_t seed) {
    if (n < 10) throw DataError("synth_bias_dataset: need at least 10 rows");
    if (bias < 0.0 || bias > 1.0) throw ConfigError("synth_bias_dataset: bias must be in [0,1]");
    if (label_noise < 0.0 || label_noise > 1.0)
        throw ConfigError("synth_bias_dataset: label_noise must be in [0,1]");

    constexpr double kDelta = 0.65;      // class-conditional Gaussian separation
    constexpr double kProxyNoise = 0.1;  // proxy = p + N(0, kProxyNoise)
    const double w = bias * bias;        // probability the label copies p

    Rng rng(seed);
    Dataset ds;
    ds.x = Matrix(n, 3);
    ds.p = Matrix(n, 1);
    ds.y.resize(n);
    ds.feature_names = {"info1", "info2", "proxy"};
    ds.protected_names = {"protected"};

    for (std::size_t i = 0; i < n; ++i) {
        const int p = rng.bernoulli(0.5) ? 1 : 0;
        const int u = rng.bernoulli(0.5) ? 1 : 0;
        int y = rng.bernoulli(w) ? p : u;
        if (label_noise > 0.0 && rng.bernoulli(label_noise)) y = 1 - y;
        const double mu = (2 * u - 1) * kDelta;
        ds.x(i, 0) = mu + rng.normal();
        ds.x(i, 1) = mu + rng.normal();
        ds.x(i, 2) = static_cast<double>(p) + kProxyNoise * rng.normal();
        ds.p(i, 0) = static_cast<double>(p);
        ds.y[i] = y;
    }

    // Closed forms for the Bayes classifier. With s = info1 + info2,
    // P(y=1 | f, p) = w*p + (1-w)*sigmoid(2*kDelta*s), so the decision
    // thresholds on s are logit(tau)/(2*kDelta) with tau = (1/2 - w*p)/(1-w).
    auto prob_shat1 = [&](double s_threshold) {
        // P(s > t) marginal over u; s | u ~ N(+-2*kDelta, sqrt(2)).
        const double sd = std::numbers::sqrt2;
        return 0.5 * (normal_cdf((2.0 * kDelta - s_threshold) / sd) +
                      normal_cdf((-2.0 * kDelta - s_threshold) / sd));
    };
    double ddp_with_p = 1.0;
    if (w < 1.0) {
        const double tau1 = (0.5 - w) / (1.0 - w);
        const double tau0 = 0.5 / (1.0 - w);
        const double t1 = tau1 <= 0.0 ? -1e9 : std::log(tau1 / (1.0 - tau1)) / (2.0 * kDelta);
        const double t0 = tau0 >= 1.0 ? 1e9 : std::log(tau0 / (1.0 - tau0)) / (2.0 * kDelta);
        ddp_with_p = std::abs(prob_shat1(t1) - prob_shat1(t0));
    }
    auto& extra = ds.preprocessing.extra;
    extra["bias"] = bias;
    extra["label_noise"] = label_noise;
    extra["bayes_ddp_with_p"] = ddp_with_p;
    extra["bayes_ddp_without_p"] = 0.0;  // features are independent of p
    const double y1_p1 = w + (1.0 - w) * 0.5;
    const double y1_p0 = (1.0 - w) * 0.5;
    extra["prob_y1_given_p1"] = y1_p1 * (1.0 - label_noise) + (1.0 - y1_p1) * label_noise;
    extra["prob_y1_given_p0"] = y1_p0 * (1.0 - label_noise) + (1.0 - y1_p0) * label_noise;

    standardize_features(ds);
    ds.validate();
    return ds;
}

Dataset synth_shapes_dataset(std::size_t n, ShapeFactor factor, double min_scale,
                             std::uint64_t seed) {
    if (n < 10) throw DataError("synth_shapes_dataset: need at least 10 rows");
    if (min_scale < 0.0 || min_scale >= 1.0)
        throw ConfigError("synth_shapes_dataset: min_scale must be in [0,1)");

    constexpr std::size_t kGrid = 16;
    constexpr double kScaleThreshold = 0.7;

    Rng rng(seed);
    Dataset ds;
    ds.x = Matrix(n, kGrid * kGrid);
    const std::size_t p_cols = factor == ShapeFactor::scale_and_shape ? 2 : 1;
    ds.p = Matrix(n, p_cols);
    ds.y.resize(n);
    for (std::size_t px = 0; px < kGrid * kGrid; ++px)
        ds.feature_names.push_back("px" + std::to_string(px));
    switch (factor) {
        case ShapeFactor::scale: ds.protected_names = {"scale_large"}; break;
        case ShapeFactor::shape: ds.protected_names = {"shape_disc"}; break;
        case ShapeFactor::scale_and_shape:
            ds.protected_names = {"scale_large", "shape_disc"};
            break;
    }

    for (std::size_t i = 0; i < n; ++i) {
        double scale;
        do {
            scale = rng.uniform(0.5, 1.0);
        } while (scale <= min_scale);
        const bool disc = rng.bernoulli(0.5);
        const double cx = rng.uniform(0.25, 0.75);
        const double cy = rng.uniform(0.25, 0.75);
        const double half = 0.22 * scale;  // half-extent in unit coordinates

        // Soft-edged rendering: intensity 1 inside, ramping to 0 over one pixel.
        const double edge = 1.0 / kGrid;
        for (std::size_t row = 0; row < kGrid; ++row) {
            for (std::size_t col = 0; col < kGrid; ++col) {
                const double px = (static_cast<double>(col) + 0.5) / kGrid;
                const double py = (static_cast<double>(row) + 0.5) / kGrid;
                double dist;  // signed distance outside the shape boundary
                if (disc) {
                    dist = std::hypot(px - cx, py - cy) - half;
                } else {
                    dist = std::max(std::abs(px - cx), std::abs(py - cy)) - half;
                }
                double v = 1.0 - dist / edge;
                v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
                ds.x(i, row * kGrid + col) = v;
            }
        }

        std::size_t pc = 0;
        if (factor == ShapeFactor::scale || factor == ShapeFactor::scale_and_shape)
            ds.p(i, pc++) = scale > kScaleThreshold ? 1.0 : 0.0;
        if (factor == ShapeFactor::shape || factor == ShapeFactor::scale_and_shape)
            ds.p(i, pc++) = disc ? 1.0 : 0.0;
        ds.y[i] = cy > 0.5 ? 1 : 0;
    }

    ds.preprocessing.extra["min_scale"] = min_scale;
    standardize_features(ds);
    ds.validate();
    return ds;
}

Dataset synth_bow_dataset(std::size_t n, std::size_t vocabulary, std::uint64_t seed) {
    if (n < 10) throw DataError("synth_bow_dataset: need at least 10 rows");
    if (vocabulary < 30) throw ConfigError("synth_bow_dataset: vocabulary too small");

    // Vocabulary layout: [0, topic) label-driven, [topic, topic+block)
    // protected-correlated, the rest background.
    const std::size_t topic = vocabulary / 10;
    const std::size_t block = vocabulary / 10;

    Rng rng(seed);
    Dataset ds;
    ds.x = Matrix(n, vocabulary);
    ds.p = Matrix(n, 1);
    ds.y.resize(n);
    for (std::size_t t = 0; t < vocabulary; ++t)
        ds.feature_names.push_back("tok" + std::to_string(t));
    ds.protected_names = {"protected"};

    auto poisson_small = [&rng](double lambda) {
        // Knuth's method; lambdas here are small so this stays cheap.
        const double limit = std::exp(-lambda);
        double prod = rng.uniform01();
        int k = 0;
        while (prod > limit) {
            ++k;
            prod *= rng.uniform01();
        }
        return k;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const int p = rng.bernoulli(0.5) ? 1 : 0;
        const int y = rng.bernoulli(0.5) ? 1 : 0;
        for (std::size_t t = 0; t < vocabulary; ++t) {
            double lambda = 0.05;  // background rate
            if (t < topic)
                lambda += (y == 1) == (t % 2 == 0) ? 0.8 : 0.1;
            else if (t < topic + block)
                lambda += (p == 1) == (t % 2 == 0) ? 0.9 : 0.05;
            ds.x(i, t) = static_cast<double>(poisson_small(lambda));
        }
        ds.p(i, 0) = static_cast<double>(p);
        ds.y[i] = y;
    }

    standardize_features(ds);
    ds.validate();
    return ds;
}

}  // namespace fried
