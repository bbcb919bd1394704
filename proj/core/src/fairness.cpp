#include "fried/fairness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "fried/errors.hpp"
#include "fried/split.hpp"

namespace fried {

double demographic_parity_difference(const std::vector<int>& yhat,
                                     const std::vector<int>& group) {
    if (yhat.size() != group.size())
        throw DataError("demographic_parity_difference: size mismatch");
    double positives[2] = {0.0, 0.0};
    double counts[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < yhat.size(); ++i) {
        const int g = group[i] ? 1 : 0;
        counts[g] += 1.0;
        positives[g] += yhat[i] ? 1.0 : 0.0;
    }
    if (counts[0] == 0.0 || counts[1] == 0.0)
        throw DataError("demographic_parity_difference: a group is empty");
    return std::abs(positives[0] / counts[0] - positives[1] / counts[1]);
}

BinaryClassifier train_downstream_classifier(const Matrix& features,
                                             const std::vector<int>& labels, std::uint64_t seed) {
    ClassifierConfig cfg;
    cfg.hidden = {32, 16};
    cfg.epochs = 200;
    cfg.batch_size = 64;
    cfg.learning_rate = 0.01;
    Rng rng(seed);
    return train_binary_classifier(features, labels, cfg, rng);
}

TradeoffPoint evaluate_representation(const FriedModel& model, const Dataset& dataset,
                                      std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw ConfigError("evaluate_representation: need at least 2 folds");
    dataset.validate();

    const Matrix xprime = encode(model, dataset.x, dataset.p);
    const std::vector<int> group = protected_group_indicator(dataset);
    const auto fold_idx = kfold_indices(dataset, folds, Rng::mix(seed, 0xf01d));

    std::vector<double> accs, dps;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_rows;
        for (std::size_t g = 0; g < folds; ++g)
            if (g != f) train_rows.insert(train_rows.end(), fold_idx[g].begin(), fold_idx[g].end());
        const auto& test_rows = fold_idx[f];
        if (test_rows.empty()) throw DataError("evaluate_representation: empty fold");

        std::vector<int> y_train, y_test, g_test;
        for (std::size_t i : train_rows) y_train.push_back(dataset.y[i]);
        for (std::size_t i : test_rows) {
            y_test.push_back(dataset.y[i]);
            g_test.push_back(group[i]);
        }

        const BinaryClassifier probe = train_downstream_classifier(
            xprime.take_rows(train_rows), y_train, Rng::mix(seed, f + 1));
        const auto yhat = probe.predict(xprime.take_rows(test_rows));

        std::size_t correct = 0;
        for (std::size_t i = 0; i < yhat.size(); ++i) correct += yhat[i] == y_test[i];
        accs.push_back(static_cast<double>(correct) / static_cast<double>(yhat.size()));
        dps.push_back(demographic_parity_difference(yhat, g_test));
    }

    auto mean_std = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        return std::pair{mean, std::sqrt(var / static_cast<double>(v.size()))};
    };

    TradeoffPoint point;
    point.beta = model.beta;
    point.lambda = model.lambda;
    std::tie(point.delta_dp, point.delta_dp_std) = mean_std(dps);
    std::tie(point.accuracy, point.accuracy_std) = mean_std(accs);
    return point;
}

std::vector<TradeoffPoint> sweep_tradeoff(const Dataset& dataset,
                                          const std::vector<double>& beta_grid,
                                          const std::vector<double>& lambda_grid,
                                          const TrainConfig& base_config, std::size_t folds,
                                          std::size_t threads) {
    if (beta_grid.empty() || lambda_grid.empty())
        throw ConfigError("sweep_tradeoff: empty grid");

    const std::size_t n_trials = beta_grid.size() * lambda_grid.size();
    std::vector<TradeoffPoint> points(n_trials);

    auto run_trial = [&](std::size_t trial) {
        const double beta = beta_grid[trial / lambda_grid.size()];
        const double lambda = lambda_grid[trial % lambda_grid.size()];
        TrainConfig config = base_config;
        config.beta = beta;
        config.lambda = lambda;
        config.seed = Rng::mix(base_config.seed, trial);
        TradeoffPoint point;
        point.beta = beta;
        point.lambda = lambda;
        try {
            const TrainResult run = train(dataset, config);
            point = evaluate_representation(run.model, dataset, folds,
                                            Rng::mix(base_config.seed, 0xe7a1 + trial));
            point.beta = beta;
            point.lambda = lambda;
        } catch (const std::exception& e) {
            point.error = e.what();
        }
        points[trial] = std::move(point);
    };

    if (threads <= 1) {
        for (std::size_t t = 0; t < n_trials; ++t) run_trial(t);
    } else {
        // Trials share nothing mutable; each worker writes its own slots.
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < std::min(threads, n_trials); ++w)
            workers.emplace_back([&next, n_trials, &run_trial] {
                for (std::size_t t = next++; t < n_trials; t = next++) run_trial(t);
            });
        for (auto& worker : workers) worker.join();
    }
    return points;
}

std::vector<TradeoffPoint> pareto_front(const std::vector<TradeoffPoint>& points) {
    auto dominates = [](const TradeoffPoint& a, const TradeoffPoint& b) {
        return a.delta_dp <= b.delta_dp && a.accuracy >= b.accuracy &&
               (a.delta_dp < b.delta_dp || a.accuracy > b.accuracy);
    };
    std::vector<TradeoffPoint> front;
    for (const auto& candidate : points) {
        if (candidate.failed()) continue;
        bool dominated = false;
        for (const auto& other : points) {
            if (other.failed()) continue;
            if (dominates(other, candidate)) { dominated = true; break; }
        }
        if (!dominated) front.push_back(candidate);
    }
    std::stable_sort(front.begin(), front.end(),
                     [](const TradeoffPoint& a, const TradeoffPoint& b) {
                         return a.delta_dp < b.delta_dp;
                     });
    return front;
}

}  // namespace fried
