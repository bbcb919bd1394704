#ifndef FRIED_CSV_HPP
#define FRIED_CSV_HPP

#include <string>
#include <vector>

#include "fried/dataset.hpp"

namespace fried {

/// Column roles for loading a labeled CSV. Values are compared after
/// trimming surrounding whitespace on both sides.
struct SchemaConfig {
    std::string label_column;
    std::string label_positive;
    std::vector<std::string> protected_columns;
    std::vector<std::string> protected_positive;  // one per protected column
    std::vector<std::string> categorical_columns;
    std::vector<std::string> drop_columns;
};

/// Shortest decimal form that round-trips the exact double value.
std::string format_number(double v);

/// RFC-4180-style CSV: quoted fields may contain commas, doubled quotes and
/// newlines. Returns rows of raw string fields.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Loads and preprocesses a CSV per the schema: rows with missing values
/// ("" or "?") are dropped and counted, categoricals are one-hot encoded in
/// first-occurrence level order, numerics are standardized, label and
/// protected columns are binarized against their positive value.
Dataset load_csv(const std::string& path, const SchemaConfig& schema);

/// Writes a dataset back out with standardization undone, so the file can be
/// reloaded through load_csv. One-hot columns are emitted as-is.
void export_dataset_csv(const Dataset& ds, const std::string& path);

/// Schema matching the layout produced by export_dataset_csv.
SchemaConfig exported_dataset_schema(const Dataset& ds);

}  // namespace fried

#endif
