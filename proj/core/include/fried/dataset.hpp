#ifndef FRIED_DATASET_HPP
#define FRIED_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fried/matrix.hpp"

namespace fried {

/// How one output feature column was produced from the source data.
struct ColumnTransform {
    enum class Kind { numeric, onehot, raw };
    Kind kind = Kind::raw;
    std::string source;      // source column name
    std::string level;       // one-hot level, when kind == onehot
    double mean = 0.0;       // standardization parameters, when kind == numeric
    double stddev = 1.0;
};

struct Preprocessing {
    std::vector<ColumnTransform> columns;   // one entry per feature column
    std::size_t rows_dropped = 0;           // rows removed for missing values
    std::map<std::string, double> extra;    // generator-specific ground truth
};

/// Features, binary labels and protected columns with aligned row counts.
struct Dataset {
    Matrix x;
    std::vector<int> y;                     // 0/1 labels
    Matrix p;                               // one column per protected attribute, 0/1
    std::vector<std::string> feature_names;
    std::vector<std::string> protected_names;
    Preprocessing preprocessing;

    std::size_t rows() const { return x.rows(); }
    Dataset take_rows(const std::vector<std::size_t>& indices) const;
    void validate() const;                  // throws DataError on inconsistency
};

/// Inverse of standardization for a single feature column.
double destandardize(const ColumnTransform& t, double value);

/// Conjunction of the protected columns as one 0/1 indicator (the column
/// itself when there is only one).
std::vector<int> protected_group_indicator(const Dataset& ds);

}  // namespace fried

#endif
