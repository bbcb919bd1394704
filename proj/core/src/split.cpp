#include "fried/split.hpp"

#include <algorithm>
#include <cmath>

#include "fried/errors.hpp"
#include "fried/rng.hpp"

namespace fried {

namespace {

// Rows grouped by stratum; strata on (y, group) unless that leaves one empty
// while the label alone would not.
std::vector<std::vector<std::size_t>> build_strata(const Dataset& ds, bool* label_only_flag) {
    const std::vector<int> group = protected_group_indicator(ds);
    std::vector<std::vector<std::size_t>> joint(4);
    for (std::size_t i = 0; i < ds.rows(); ++i)
        joint[static_cast<std::size_t>(ds.y[i] * 2 + group[i])].push_back(i);

    const bool any_empty =
        std::any_of(joint.begin(), joint.end(), [](const auto& s) { return s.empty(); });
    if (!any_empty) {
        if (label_only_flag) *label_only_flag = false;
        return joint;
    }

    std::vector<std::vector<std::size_t>> by_label(2);
    for (std::size_t i = 0; i < ds.rows(); ++i)
        by_label[static_cast<std::size_t>(ds.y[i])].push_back(i);
    by_label.erase(std::remove_if(by_label.begin(), by_label.end(),
                                  [](const auto& s) { return s.empty(); }),
                   by_label.end());
    if (label_only_flag) *label_only_flag = true;
    return by_label;
}

}  // namespace

TrainTestSplit train_test_split(const Dataset& ds, double train_ratio, std::uint64_t seed,
                                bool* stratified_on_label_only) {
    if (train_ratio <= 0.0 || train_ratio >= 1.0)
        throw ConfigError("train_test_split: ratio must be in (0,1)");
    if (ds.rows() < 2) throw DataError("train_test_split: need at least 2 rows");

    Rng rng(seed);
    TrainTestSplit split;
    for (auto& stratum : build_strata(ds, stratified_on_label_only)) {
        if (stratum.empty()) continue;
        rng.shuffle(stratum);
        const auto n_train = static_cast<std::size_t>(
            std::round(train_ratio * static_cast<double>(stratum.size())));
        for (std::size_t i = 0; i < stratum.size(); ++i)
            (i < n_train ? split.train : split.test).push_back(stratum[i]);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    if (split.train.empty() || split.test.empty())
        throw DataError("train_test_split: a side came out empty; dataset too small");
    return split;
}

std::vector<std::vector<std::size_t>> kfold_indices(const Dataset& ds, std::size_t folds,
                                                    std::uint64_t seed,
                                                    bool* stratified_on_label_only) {
    if (folds < 2) throw ConfigError("kfold_indices: need at least 2 folds");
    if (ds.rows() < folds) throw DataError("kfold_indices: fewer rows than folds");

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> out(folds);
    for (auto& stratum : build_strata(ds, stratified_on_label_only)) {
        if (stratum.empty()) continue;
        rng.shuffle(stratum);
        for (std::size_t i = 0; i < stratum.size(); ++i)
            out[i % folds].push_back(stratum[i]);
    }
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
}

}  // namespace fried
