#ifndef FRIED_AUDIT_HPP
#define FRIED_AUDIT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fried/dataset.hpp"
#include "fried/matrix.hpp"
#include "fried/model.hpp"

namespace fried {

/// Pure scoring function over a feature matrix, one score per row.
struct BlackBoxModel {
    std::function<std::vector<double>(const Matrix&)> predict;
    std::vector<std::string> feature_names;
};

BlackBoxModel linear_black_box(std::vector<double> weights, double intercept,
                               std::vector<std::string> feature_names);

struct AttributionReport {
    Matrix phi;                       // per-instance Shapley values (instances x features)
    std::vector<double> mean_abs;     // mean |phi| per feature
    std::vector<double> predictions;  // predictor value per instance
    double base_value = 0.0;          // mean prediction over the background set
    std::vector<std::string> feature_names;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    bool exhaustive = false;

    /// Features ordered by mean |phi|, largest first.
    std::vector<std::size_t> ranking() const;
};

/// Shapley values with background-set imputation: an absent feature is
/// replaced by the corresponding entry of a background row, and the value of
/// a coalition is the mean prediction over all background rows. Exact subset
/// enumeration when the feature count is at most 8, otherwise Monte-Carlo
/// permutation sampling with n_samples permutations per instance (one
/// background row drawn per permutation; per-instance streams are derived
/// from (seed, instance), so results do not depend on evaluation order).
AttributionReport shapley_attribution(const BlackBoxModel& predictor, const Matrix& x,
                                      const Matrix& background, std::size_t n_samples,
                                      std::uint64_t seed);

/// Forces the Monte-Carlo path regardless of feature count (the exact mode
/// validates it on small problems).
AttributionReport shapley_attribution_monte_carlo(const BlackBoxModel& predictor, const Matrix& x,
                                                  const Matrix& background, std::size_t n_samples,
                                                  std::uint64_t seed);

/// Predictor over the disentangled space (latent columns then protected
/// columns): decodes the latent part with the protected passthrough and
/// applies the target to (reconstruction, p).
BlackBoxModel compose_audit_predictor(const FriedModel& model, const BlackBoxModel& target);

struct AuditConfig {
    std::size_t n_samples = 2000;
    std::size_t n_background = 100;
    std::size_t max_instances = 100;
};

struct InfluenceReport {
    AttributionReport direct;    // target attributed on the raw (features, p) rows
    AttributionReport indirect;  // composed predictor attributed on (latent, p)
};

/// Side-by-side attribution of the target on the raw features and of the
/// decoder-composed predictor on the disentangled representation, over the
/// same audited instances and the same background rows.
InfluenceReport indirect_influence_report(const FriedModel& model, const BlackBoxModel& target,
                                          const Dataset& dataset, const AuditConfig& cfg,
                                          std::uint64_t seed);

}  // namespace fried

#endif
