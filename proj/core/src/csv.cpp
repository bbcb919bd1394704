#include "fried/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "fried/errors.hpp"

namespace fried {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool is_missing(const std::string& field) {
    const std::string t = trim(field);
    return t.empty() || t == "?";
}

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote(const std::string& field) {
    if (!needs_quoting(field)) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;
    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') { in.get(); field += '"'; }
                else in_quotes = false;
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_started = true;
                break;
            case ',':
                row.push_back(field);
                field.clear();
                row_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_started || !field.empty() || !row.empty()) {
                    row.push_back(field);
                    rows.push_back(std::move(row));
                    row.clear();
                    field.clear();
                    row_started = false;
                }
                break;
            default:
                field += c;
                row_started = true;
        }
    }
    if (in_quotes) throw DataError("'" + path + "': unterminated quoted field");
    if (row_started || !field.empty() || !row.empty()) {
        row.push_back(field);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    auto emit = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << quote(fields[i]);
        }
        out << '\n';
    };
    emit(header);
    for (const auto& r : rows) emit(r);
}

namespace {

double parse_number(const std::string& raw, std::size_t row, const std::string& col) {
    const std::string t = trim(raw);
    double value = 0.0;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw DataError("row " + std::to_string(row) + ", column '" + col +
                        "': cannot parse '" + t + "' as a number");
    return value;
}

}  // namespace

std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

Dataset load_csv(const std::string& path, const SchemaConfig& schema) {
    if (schema.protected_columns.size() != schema.protected_positive.size())
        throw ConfigError("schema: protected_columns and protected_positive sizes differ");

    const auto rows = read_csv(path);
    if (rows.empty()) throw DataError("'" + path + "': empty file");
    const auto& header = rows.front();

    auto column_index = [&header](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return i;
        throw DataError("schema: column '" + name + "' not found in header");
    };

    const std::size_t label_idx = column_index(schema.label_column);
    std::vector<std::size_t> protected_idx;
    for (const auto& name : schema.protected_columns) protected_idx.push_back(column_index(name));

    auto contains = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };

    // Feature columns keep the header order; protected/label/dropped are excluded.
    struct SourceColumn { std::size_t idx; std::string name; bool categorical; };
    std::vector<SourceColumn> sources;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (i == label_idx) continue;
        if (std::find(protected_idx.begin(), protected_idx.end(), i) != protected_idx.end())
            continue;
        if (contains(schema.drop_columns, name)) continue;
        sources.push_back({i, name, contains(schema.categorical_columns, name)});
    }

    // First pass: keep complete rows only.
    std::vector<std::size_t> kept;
    std::size_t dropped = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size())
            throw DataError("row " + std::to_string(r) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(rows[r].size()));
        bool missing = false;
        for (const auto& f : rows[r])
            if (is_missing(f)) { missing = true; break; }
        if (missing) ++dropped;
        else kept.push_back(r);
    }
    if (kept.empty()) throw DataError("'" + path + "': no complete rows");

    // Discover categorical levels in first-occurrence order.
    std::unordered_map<std::string, std::vector<std::string>> levels;
    for (const auto& src : sources) {
        if (!src.categorical) continue;
        auto& lv = levels[src.name];
        for (std::size_t r : kept) {
            const std::string v = trim(rows[r][src.idx]);
            if (std::find(lv.begin(), lv.end(), v) == lv.end()) lv.push_back(v);
        }
    }

    Dataset ds;
    std::vector<ColumnTransform> transforms;
    for (const auto& src : sources) {
        if (src.categorical) {
            for (const auto& lv : levels[src.name]) {
                ColumnTransform t;
                t.kind = ColumnTransform::Kind::onehot;
                t.source = src.name;
                t.level = lv;
                transforms.push_back(t);
                ds.feature_names.push_back(src.name + "=" + lv);
            }
        } else {
            ColumnTransform t;
            t.kind = ColumnTransform::Kind::numeric;
            t.source = src.name;
            transforms.push_back(t);
            ds.feature_names.push_back(src.name);
        }
    }

    const std::size_t n = kept.size();
    ds.x = Matrix(n, transforms.size());
    ds.p = Matrix(n, protected_idx.size());
    ds.y.resize(n);

    for (std::size_t out_r = 0; out_r < n; ++out_r) {
        const auto& row = rows[kept[out_r]];
        std::size_t out_c = 0;
        for (const auto& src : sources) {
            if (src.categorical) {
                const std::string v = trim(row[src.idx]);
                for (const auto& lv : levels[src.name])
                    ds.x(out_r, out_c++) = (v == lv) ? 1.0 : 0.0;
            } else {
                ds.x(out_r, out_c++) = parse_number(row[src.idx], kept[out_r], src.name);
            }
        }
        ds.y[out_r] = (trim(row[label_idx]) == trim(schema.label_positive)) ? 1 : 0;
        for (std::size_t pc = 0; pc < protected_idx.size(); ++pc)
            ds.p(out_r, pc) =
                (trim(row[protected_idx[pc]]) == trim(schema.protected_positive[pc])) ? 1.0 : 0.0;
    }

    // Standardize the numeric columns; constant columns become all zeros.
    for (std::size_t c = 0; c < transforms.size(); ++c) {
        if (transforms[c].kind != ColumnTransform::Kind::numeric) continue;
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += ds.x(r, c);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = ds.x(r, c) - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        transforms[c].mean = mean;
        transforms[c].stddev = sd > 0.0 ? sd : 1.0;
        for (std::size_t r = 0; r < n; ++r)
            ds.x(r, c) = sd > 0.0 ? (ds.x(r, c) - mean) / sd : 0.0;
    }

    ds.protected_names = schema.protected_columns;
    ds.preprocessing.columns = std::move(transforms);
    ds.preprocessing.rows_dropped = dropped;
    ds.validate();
    return ds;
}

void export_dataset_csv(const Dataset& ds, const std::string& path) {
    std::vector<std::string> header = ds.feature_names;
    if (header.size() != ds.x.cols()) {
        header.clear();
        for (std::size_t c = 0; c < ds.x.cols(); ++c) header.push_back("f" + std::to_string(c));
    }
    for (std::size_t c = 0; c < ds.p.cols(); ++c)
        header.push_back(c < ds.protected_names.size() ? ds.protected_names[c]
                                                       : "protected" + std::to_string(c));
    header.push_back("label");

    const bool has_transforms = ds.preprocessing.columns.size() == ds.x.cols();
    std::vector<std::vector<std::string>> rows;
    rows.reserve(ds.rows());
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        std::vector<std::string> row;
        row.reserve(header.size());
        for (std::size_t c = 0; c < ds.x.cols(); ++c) {
            const double v = has_transforms ? destandardize(ds.preprocessing.columns[c], ds.x(r, c))
                                            : ds.x(r, c);
            row.push_back(format_number(v));
        }
        for (std::size_t c = 0; c < ds.p.cols(); ++c)
            row.push_back(ds.p(r, c) > 0.5 ? "1" : "0");
        row.push_back(ds.y[r] ? "1" : "0");
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

SchemaConfig exported_dataset_schema(const Dataset& ds) {
    SchemaConfig schema;
    schema.label_column = "label";
    schema.label_positive = "1";
    for (std::size_t c = 0; c < ds.p.cols(); ++c) {
        schema.protected_columns.push_back(c < ds.protected_names.size()
                                               ? ds.protected_names[c]
                                               : "protected" + std::to_string(c));
        schema.protected_positive.push_back("1");
    }
    return schema;
}

}  // namespace fried
