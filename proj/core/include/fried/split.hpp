#ifndef FRIED_SPLIT_HPP
#define FRIED_SPLIT_HPP

#include <cstdint>
#include <vector>

#include "fried/dataset.hpp"

namespace fried {

struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Row indices split train/test at the given ratio, stratified jointly on
/// (label, protected group). If some stratum is empty the split falls back
/// to stratifying on the label alone (stratified_on_label_only is set).
TrainTestSplit train_test_split(const Dataset& ds, double train_ratio, std::uint64_t seed,
                                bool* stratified_on_label_only = nullptr);

/// Disjoint, exhaustive folds with the same stratification rules.
std::vector<std::vector<std::size_t>> kfold_indices(const Dataset& ds, std::size_t folds,
                                                    std::uint64_t seed,
                                                    bool* stratified_on_label_only = nullptr);

}  // namespace fried

#endif
