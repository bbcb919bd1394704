#ifndef FRIED_FAIRNESS_HPP
#define FRIED_FAIRNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fried/classifier.hpp"
#include "fried/dataset.hpp"
#include "fried/model.hpp"
#include "fried/train.hpp"

namespace fried {

/// |P(yhat=1 | group 0) - P(yhat=1 | group 1)|. Throws DataError when a
/// group is empty.
double demographic_parity_difference(const std::vector<int>& yhat,
                                     const std::vector<int>& group);

/// Downstream probe: (32,16) relu MLP, 200 epochs, lr 0.01, batch 64,
/// threshold-0.5 predictions.
BinaryClassifier train_downstream_classifier(const Matrix& features, const std::vector<int>& labels,
                                             std::uint64_t seed);

struct TradeoffPoint {
    double beta = 0.0;
    double lambda = 0.0;
    double delta_dp = 0.0;      // fold mean
    double accuracy = 0.0;      // fold mean
    double delta_dp_std = 0.0;
    double accuracy_std = 0.0;
    std::string error;          // non-empty when the trial failed

    bool failed() const { return !error.empty(); }
};

/// Cross-validated downstream evaluation of a trained representation: per
/// fold, the probe is trained on the latent codes of the training rows and
/// scored (accuracy, demographic parity difference) on the held-out rows.
/// Folds are stratified jointly on (label, protected group); the group for
/// the parity metric is the conjunction of the protected columns.
TradeoffPoint evaluate_representation(const FriedModel& model, const Dataset& dataset,
                                      std::size_t folds, std::uint64_t seed);

/// One independent seeded training run per (beta, lambda) grid cell, each
/// evaluated with evaluate_representation. Output follows the grid's
/// lexicographic order regardless of the worker count; failed trials carry
/// their error message and are otherwise skipped.
std::vector<TradeoffPoint> sweep_tradeoff(const Dataset& dataset,
                                          const std::vector<double>& beta_grid,
                                          const std::vector<double>& lambda_grid,
                                          const TrainConfig& base_config,
                                          std::size_t folds = 5, std::size_t threads = 1);

/// Points not dominated under (minimize delta_dp, maximize accuracy), ties
/// kept, sorted by delta_dp ascending. Failed points never enter the front.
std::vector<TradeoffPoint> pareto_front(const std::vector<TradeoffPoint>& points);

}  // namespace fried

#endif
