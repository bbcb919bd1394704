#include "fried/dataset.hpp"

#include <cmath>

#include "fried/errors.hpp"

namespace fried {

Dataset Dataset::take_rows(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.x = x.take_rows(indices);
    out.p = p.take_rows(indices);
    out.y.reserve(indices.size());
    for (std::size_t i : indices) out.y.push_back(y.at(i));
    out.feature_names = feature_names;
    out.protected_names = protected_names;
    out.preprocessing = preprocessing;
    return out;
}

void Dataset::validate() const {
    if (y.size() != x.rows() || p.rows() != x.rows())
        throw DataError("dataset: row counts of x, y, p disagree");
    if (!feature_names.empty() && feature_names.size() != x.cols())
        throw DataError("dataset: feature name count does not match x");
    if (!protected_names.empty() && protected_names.size() != p.cols())
        throw DataError("dataset: protected name count does not match p");
    if (!x.all_finite() || !p.all_finite())
        throw DataError("dataset: non-finite values");
    for (int v : y)
        if (v != 0 && v != 1) throw DataError("dataset: labels must be 0/1");
}

double destandardize(const ColumnTransform& t, double value) {
    if (t.kind != ColumnTransform::Kind::numeric) return value;
    return value * t.stddev + t.mean;
}

std::vector<int> protected_group_indicator(const Dataset& ds) {
    std::vector<int> g(ds.rows(), 1);
    for (std::size_t r = 0; r < ds.rows(); ++r)
        for (std::size_t c = 0; c < ds.p.cols(); ++c)
            if (ds.p(r, c) < 0.5) { g[r] = 0; break; }
    return g;
}

}  // namespace fried
