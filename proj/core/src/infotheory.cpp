#include "fried/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fried/errors.hpp"
#include "fried/rng.hpp"

namespace fried {

void DiscreteDistribution::validate() const {
    if (probs.empty()) throw DataError("distribution: empty support");
    double sum = 0.0;
    for (double v : probs) {
        if (!(v >= 0.0)) throw DataError("distribution: negative or NaN probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DataError("distribution: probabilities do not sum to 1");
}

namespace {

// log sum_x p0^(1-u) p1^u over the shared support, via logsumexp.
double log_bhattacharyya_sum(const std::vector<double>& log_p0, const std::vector<double>& log_p1,
                             double u) {
    double max_term = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < log_p0.size(); ++i)
        max_term = std::max(max_term, (1.0 - u) * log_p0[i] + u * log_p1[i]);
    double acc = 0.0;
    for (std::size_t i = 0; i < log_p0.size(); ++i)
        acc += std::exp((1.0 - u) * log_p0[i] + u * log_p1[i] - max_term);
    return max_term + std::log(acc);
}

}  // namespace

ChernoffResult chernoff_information(const DiscreteDistribution& p0,
                                    const DiscreteDistribution& p1) {
    p0.validate();
    p1.validate();
    if (p0.support_size() != p1.support_size())
        throw DataError("chernoff_information: support sizes differ");

    if (p0.probs == p1.probs) return {0.0, 0.5, false};

    std::vector<double> log_p0, log_p1;
    for (std::size_t i = 0; i < p0.support_size(); ++i) {
        if (p0.probs[i] > 0.0 && p1.probs[i] > 0.0) {
            log_p0.push_back(std::log(p0.probs[i]));
            log_p1.push_back(std::log(p1.probs[i]));
        }
    }
    if (log_p0.empty()) {
        ChernoffResult r;
        r.value = std::numeric_limits<double>::infinity();
        r.disjoint_support = true;
        return r;
    }

    // The objective is convex in u, so golden-section search is exact enough.
    constexpr double kGolden = 0.6180339887498949;
    double lo = 1e-6, hi = 1.0 - 1e-6;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = log_bhattacharyya_sum(log_p0, log_p1, x1);
    double f2 = log_bhattacharyya_sum(log_p0, log_p1, x2);
    while (hi - lo > 1e-9) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = log_bhattacharyya_sum(log_p0, log_p1, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = log_bhattacharyya_sum(log_p0, log_p1, x2);
        }
    }
    ChernoffResult r;
    r.u_star = 0.5 * (lo + hi);
    r.value = std::max(0.0, -log_bhattacharyya_sum(log_p0, log_p1, r.u_star));
    return r;
}

double kl_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    p.validate();
    q.validate();
    if (p.support_size() != q.support_size())
        throw DataError("kl_discrete: support sizes differ");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.support_size(); ++i) {
        if (p.probs[i] == 0.0) continue;
        if (q.probs[i] == 0.0)
            throw DataError("kl_discrete: q vanishes where p does not (not absolutely continuous)");
        kl += p.probs[i] * std::log(p.probs[i] / q.probs[i]);
    }
    return std::max(0.0, kl);
}

KLEstimate kl_estimate_classifier(const Matrix& samples_p, const Matrix& samples_q,
                                  const KlEstimatorConfig& cfg, std::uint64_t seed) {
    if (samples_p.cols() != samples_q.cols())
        throw DataError("kl_estimate_classifier: sample dimensions differ");
    if (samples_p.rows() < 2 || samples_q.rows() < 2)
        throw DataError("kl_estimate_classifier: need at least 2 samples per side");

    KLEstimate est;
    est.n_p = samples_p.rows();
    est.n_q = samples_q.rows();
    est.reliable = est.n_p >= cfg.min_samples && est.n_q >= cfg.min_samples;

    Rng rng(seed);
    // Per-side split so both the train and held-out sets stay two-class.
    auto split_side = [&rng, &cfg](std::size_t n) {
        auto order = rng.permutation(n);
        auto n_train = static_cast<std::size_t>(
            std::round(cfg.train_fraction * static_cast<double>(n)));
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
        return std::pair{std::vector<std::size_t>(order.begin(), order.begin() + n_train),
                         std::vector<std::size_t>(order.begin() + n_train, order.end())};
    };
    const auto [train_p, eval_p] = split_side(est.n_p);
    const auto [train_q, eval_q] = split_side(est.n_q);

    const Matrix xp_train = samples_p.take_rows(train_p);
    const Matrix xq_train = samples_q.take_rows(train_q);
    Matrix x_train = Matrix(xp_train.rows() + xq_train.rows(), samples_p.cols());
    std::vector<int> y_train(x_train.rows());
    for (std::size_t r = 0; r < xp_train.rows(); ++r) {
        for (std::size_t c = 0; c < x_train.cols(); ++c) x_train(r, c) = xp_train(r, c);
        y_train[r] = 1;
    }
    for (std::size_t r = 0; r < xq_train.rows(); ++r) {
        for (std::size_t c = 0; c < x_train.cols(); ++c)
            x_train(xp_train.rows() + r, c) = xq_train(r, c);
        y_train[xp_train.rows() + r] = 0;
    }

    const BinaryClassifier clf = train_binary_classifier(x_train, y_train, cfg.classifier, rng);

    const Matrix xp_eval = samples_p.take_rows(eval_p);
    const Matrix xq_eval = samples_q.take_rows(eval_q);
    const auto gamma_p = clf.predict_proba(xp_eval);
    const auto gamma_q = clf.predict_proba(xq_eval);

    const double eps = cfg.clamp_epsilon;
    auto log_ratio = [eps](double gamma) {
        const double g = std::clamp(gamma, eps, 1.0 - eps);
        return std::log(g) - std::log1p(-g);
    };

    double mean_log_l = 0.0;
    for (double g : gamma_p) mean_log_l += log_ratio(g);
    mean_log_l /= static_cast<double>(gamma_p.size());

    // log of the mean likelihood ratio on q, computed as a logsumexp.
    double max_lr = -std::numeric_limits<double>::infinity();
    for (double g : gamma_q) max_lr = std::max(max_lr, log_ratio(g));
    double acc = 0.0;
    for (double g : gamma_q) acc += std::exp(log_ratio(g) - max_lr);
    const double log_mean_l_q =
        max_lr + std::log(acc) - std::log(static_cast<double>(gamma_q.size()));

    est.value = mean_log_l - log_mean_l_q;

    std::size_t correct = 0;
    for (double g : gamma_p) correct += g > 0.5;
    for (double g : gamma_q) correct += g <= 0.5;
    est.classifier_accuracy =
        static_cast<double>(correct) / static_cast<double>(gamma_p.size() + gamma_q.size());
    return est;
}

void SampleTriple::validate() const {
    if (y.rows() != x.rows() || z.rows() != x.rows())
        throw DataError("sample triple: row counts disagree");
}

namespace {

// Joint rows [a, b] against product rows [a, b at deranged indices].
KLEstimate mi_estimate(const Matrix& a, const Matrix& b, const KlEstimatorConfig& cfg,
                       std::uint64_t seed) {
    Rng rng(Rng::mix(seed, 0x6d69));
    const auto perm = rng.derangement(a.rows());
    const Matrix joint = hcat(a, b);
    const Matrix product = hcat(a, b.take_rows(perm));
    return kl_estimate_classifier(joint, product, cfg, Rng::mix(seed, 0x6b6c));
}

}  // namespace

CmiEstimate cmi_estimate_difference(const SampleTriple& samples, const KlEstimatorConfig& cfg,
                                    std::uint64_t seed) {
    samples.validate();
    if (samples.rows() < 100) throw DataError("cmi_estimate_difference: need at least 100 rows");

    CmiEstimate est;
    est.mi_xyz = mi_estimate(samples.x, hcat(samples.y, samples.z), cfg, Rng::mix(seed, 1)).value;
    est.mi_xz = mi_estimate(samples.x, samples.z, cfg, Rng::mix(seed, 2)).value;
    est.value = est.mi_xyz - est.mi_xz;
    return est;
}

namespace {

// I(X';Y|X) through the symmetric chain rule, I(Y;(X',X)) - I(Y;X), with the
// second term computed as I(Y;(pi(X'),X)) for a deranged X' block. The
// derangement adds no information, so the population value is unchanged, but
// both classifier problems now share the same input width and the
// dimensionality bias of the plug-in cancels in the difference. (The direct
// I(X';(Y,X)) - I(X';X) form is unusable here: the latent code is a
// deterministic map of the features, so both terms saturate and their
// difference is dominated by estimator noise.)
double incremental_label_information(const Matrix& xprime, const Matrix& y, const Matrix& x,
                                     const KlEstimatorConfig& cfg, std::uint64_t seed) {
    Rng noise_rng(Rng::mix(seed, 0x626c6b));
    const Matrix xprime_noise = xprime.take_rows(noise_rng.derangement(xprime.rows()));
    auto mi_with = [&](const Matrix& block, std::uint64_t s) {
        return mi_estimate(y, hcat(block, x), cfg, s).value;
    };
    const std::uint64_t shared = Rng::mix(seed, 0x6d31);
    return mi_with(xprime, shared) - mi_with(xprime_noise, shared);
}

}  // namespace

SeparabilityResult separability_check(const Matrix& x, const Matrix& xprime,
                                      const std::vector<int>& y, const std::vector<int>& p,
                                      const SeparabilityConfig& cfg, std::uint64_t seed) {
    if (x.rows() != xprime.rows() || y.size() != x.rows() || p.size() != x.rows())
        throw DataError("separability_check: row counts disagree");

    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] == 0) group.push_back(i);
    if (group.size() < 100)
        throw DataError("separability_check: unprotected group has fewer than 100 rows");

    const Matrix xg = x.take_rows(group);
    const Matrix xpg = xprime.take_rows(group);
    Matrix yg(group.size(), 1);
    for (std::size_t i = 0; i < group.size(); ++i) yg(i, 0) = static_cast<double>(y[group[i]]);

    SeparabilityResult result;
    result.cmi = incremental_label_information(xpg, yg, xg, cfg.kl, Rng::mix(seed, 0));

    // Null distribution: the same statistic with the labels shuffled. A label
    // permutation severs exactly the Y-channel while keeping the X'-X
    // dependence intact, so estimator artifacts driven by that dependence
    // show up in the null and cancel out of the decision.
    std::vector<double> null_values(cfg.permutations);
    Rng perm_rng(Rng::mix(seed, 0x7065726d));
    for (std::size_t t = 0; t < cfg.permutations; ++t) {
        const Matrix y_shuffled = yg.take_rows(perm_rng.permutation(group.size()));
        null_values[t] =
            incremental_label_information(xpg, y_shuffled, xg, cfg.kl, Rng::mix(seed, t + 1));
    }

    if (null_values.empty()) {
        result.tau = cfg.min_margin;
    } else {
        std::sort(null_values.begin(), null_values.end());
        const auto rank = static_cast<std::size_t>(
            std::ceil(0.95 * static_cast<double>(null_values.size()))) - 1;
        result.tau = std::max(null_values[rank], 0.0);
    }
    result.improves = result.cmi > result.tau;
    return result;
}

double informativeness_score(const FriedModel& model, const Dataset& dataset,
                             const KlEstimatorConfig& cfg, std::uint64_t seed) {
    if (dataset.rows() < 500)
        throw DataError("informativeness_score: need at least 500 evaluation rows");
    const Matrix z = encode(model, dataset.x, dataset.p);
    const double mi = mi_estimate(dataset.x, z, cfg, seed).value;
    return std::max(0.0, 1.0 - std::exp(-mi));
}

}  // namespace fried
