#ifndef FRIED_INFOTHEORY_HPP
#define FRIED_INFOTHEORY_HPP

#include <cstdint>
#include <vector>

#include "fried/classifier.hpp"
#include "fried/matrix.hpp"
#include "fried/model.hpp"

namespace fried {

/// Finite-support probability vector. Probabilities must be non-negative and
/// sum to 1 within 1e-9.
struct DiscreteDistribution {
    std::vector<double> probs;

    std::size_t support_size() const { return probs.size(); }
    void validate() const;
};

struct ChernoffResult {
    double value = 0.0;   // nats; +infinity when the supports are disjoint
    double u_star = 0.5;  // minimizer in (0, 1)
    bool disjoint_support = false;
};

/// C(P0,P1) = -min_u log sum_x P0(x)^(1-u) P1(x)^u, minimized by golden
/// section on u in [1e-6, 1-1e-6] to 1e-9; the sum runs over the shared
/// support in log space. Identical distributions give exactly zero.
ChernoffResult chernoff_information(const DiscreteDistribution& p0,
                                    const DiscreteDistribution& p1);

/// sum p log(p/q) in nats. Throws DataError where q(x)=0 < p(x).
double kl_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// KL estimation settings: the classifier itself, the held-out fraction the
/// plug-in is evaluated on, and the odds clamp.
struct KlEstimatorConfig {
    ClassifierConfig classifier;
    double train_fraction = 0.7;
    double clamp_epsilon = 1e-6;
    std::size_t min_samples = 20;  // below this per side the estimate is unreliable
};

struct KLEstimate {
    double value = 0.0;  // nats; may be negative on finite samples
    std::size_t n_p = 0;
    std::size_t n_q = 0;
    double classifier_accuracy = 0.0;
    bool reliable = true;
};

/// Plug-in estimate of D_KL(p||q) from samples of each side: a probabilistic
/// classifier is trained to tell them apart (p labeled 1) and its held-out
/// odds gamma/(1-gamma) enter the Donsker-Varadhan form
///   mean_i log L(x_i^p) - log(mean_j L(x_j^q)).
KLEstimate kl_estimate_classifier(const Matrix& samples_p, const Matrix& samples_q,
                                  const KlEstimatorConfig& cfg, std::uint64_t seed);

/// n aligned samples of (x, y, z).
struct SampleTriple {
    Matrix x, y, z;

    std::size_t rows() const { return x.rows(); }
    void validate() const;
};

struct CmiEstimate {
    double value = 0.0;   // I(X;Y|Z) = I(X;Y,Z) - I(X;Z)
    double mi_xyz = 0.0;  // I(X;(Y,Z)) component
    double mi_xz = 0.0;   // I(X;Z) component
};

/// Difference-based conditional mutual information: each mutual information
/// term is a KL between joint rows and product rows formed by a within-set
/// derangement of the second block.
CmiEstimate cmi_estimate_difference(const SampleTriple& samples, const KlEstimatorConfig& cfg,
                                    std::uint64_t seed);

struct SeparabilityConfig {
    KlEstimatorConfig kl;
    std::size_t permutations = 20;
    double min_margin = 0.02;  // threshold fallback when permutations == 0
};

struct SeparabilityResult {
    double cmi = 0.0;
    bool improves = false;
    double tau = 0.0;  // significance threshold actually used
};

/// Tests whether new features xprime add label information beyond x within
/// the unprotected group (rows with p = 0): estimates I(X';Y|X) there via the
/// symmetric difference I(Y;(X',X)) - I(Y;(shuffled X',X)) and compares it
/// against the 95th percentile of a label-permutation null (min_margin when
/// no permutations are run).
SeparabilityResult separability_check(const Matrix& x, const Matrix& xprime,
                                      const std::vector<int>& y, const std::vector<int>& p,
                                      const SeparabilityConfig& cfg, std::uint64_t seed);

/// Mutual information between the latent code and the input, squashed to
/// [0, 1] as 1 - exp(-MI); higher means the code retains more of the input.
double informativeness_score(const FriedModel& model, const Dataset& dataset,
                             const KlEstimatorConfig& cfg, std::uint64_t seed);

}  // namespace fried

#endif
