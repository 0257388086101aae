#include "rlf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rlf {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Shortest representation that round-trips the exact double.
std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    RawTable t;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    t.header = split_fields(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != t.header.size())
            throw DataError(path + ": row " + std::to_string(lineno) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(t.header.size()));
        t.rows.push_back(std::move(fields));
    }
    if (t.rows.empty()) throw DataError(path + ": no data rows");
    return t;
}

// A column is numeric iff every cell parses as a finite real. Cells that
// parse to nan/inf are treated as missing values, which we reject outright.
ColumnKind classify_column(const RawTable& t, std::size_t col, const std::string& path) {
    bool numeric = true;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& cell = t.rows[r][col];
        if (cell.empty())
            throw DataError(path + ": empty cell at row " + std::to_string(r + 2) +
                            ", column '" + t.header[col] + "'");
        double v;
        if (parse_double(cell, v)) {
            if (!std::isfinite(v))
                throw DataError(path + ": non-finite value at row " + std::to_string(r + 2) +
                                ", column '" + t.header[col] + "'");
        } else {
            numeric = false;
        }
    }
    return numeric ? ColumnKind::Numeric : ColumnKind::Categorical;
}

}  // namespace

Dataset::Dataset(std::vector<double> columns, std::vector<double> target,
                 std::vector<ColumnInfo> schema, std::size_t n, std::size_t d)
    : columns_(std::move(columns)),
      target_(std::move(target)),
      schema_(std::move(schema)),
      n_(n),
      d_(d) {
    if (n_ == 0) throw DataError("dataset has no rows");
    if (d_ == 0) throw DataError("dataset has no feature columns");
    if (columns_.size() != n_ * d_ || target_.size() != n_)
        throw DataError("dataset shape mismatch");
    for (double v : columns_)
        if (!std::isfinite(v)) throw DataError("non-finite feature value");
    for (double v : target_)
        if (!std::isfinite(v)) throw DataError("non-finite target value");
}

std::vector<double> Dataset::row(std::size_t i) const {
    std::vector<double> r(d_);
    for (std::size_t j = 0; j < d_; ++j) r[j] = x(i, j);
    return r;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    std::vector<double> cols(rows.size() * d_);
    std::vector<double> tgt(rows.size());
    for (std::size_t j = 0; j < d_; ++j)
        for (std::size_t i = 0; i < rows.size(); ++i)
            cols[j * rows.size() + i] = x(rows[i], j);
    for (std::size_t i = 0; i < rows.size(); ++i) tgt[i] = y(rows[i]);
    return Dataset(std::move(cols), std::move(tgt), schema_, rows.size(), d_);
}

std::vector<std::size_t> FoldAssignment::fold_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldAssignment::complement_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] != fold) out.push_back(i);
    return out;
}

std::string fold_assignment_to_json(const FoldAssignment& folds) {
    nlohmann::json j;
    j["V"] = folds.V;
    j["fold_of"] = folds.fold_of;
    return j.dump();
}

Dataset load_csv(const std::string& path, const std::string& target_column,
                 bool log_transform) {
    RawTable t = read_table(path);

    auto target_it = std::find(t.header.begin(), t.header.end(), target_column);
    if (target_it == t.header.end())
        throw DataError(path + ": target column '" + target_column + "' not in header");
    std::size_t target_col = static_cast<std::size_t>(target_it - t.header.begin());

    const std::size_t n = t.rows.size();
    std::vector<double> target(n);
    for (std::size_t r = 0; r < n; ++r) {
        double v;
        if (!parse_double(t.rows[r][target_col], v) || !std::isfinite(v))
            throw DataError(path + ": unparseable target at row " + std::to_string(r + 2) +
                            ", column '" + target_column + "'");
        if (log_transform) {
            if (v <= 0.0)
                throw DataError(path + ": non-positive target under log transform at row " +
                                std::to_string(r + 2));
            v = std::log(v);
        }
        target[r] = v;
    }

    std::vector<double> columns;
    std::vector<ColumnInfo> schema;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c == target_col) continue;
        ColumnKind kind = classify_column(t, c, path);
        if (kind == ColumnKind::Numeric) {
            std::size_t base = columns.size();
            columns.resize(base + n);
            for (std::size_t r = 0; r < n; ++r) {
                double v;
                parse_double(t.rows[r][c], v);
                columns[base + r] = v;
            }
            schema.push_back({t.header[c], t.header[c], ColumnKind::Numeric});
        } else {
            // One indicator column per level, levels in sorted order.
            std::map<std::string, std::size_t> levels;
            for (const auto& row : t.rows) levels.emplace(row[c], 0);
            std::size_t idx = 0;
            for (auto& [level, pos] : levels) pos = idx++;
            std::size_t base = columns.size();
            columns.resize(base + levels.size() * n, 0.0);
            for (std::size_t r = 0; r < n; ++r)
                columns[base + levels.at(t.rows[r][c]) * n + r] = 1.0;
            for (const auto& [level, pos] : levels) {
                (void)pos;
                schema.push_back({t.header[c] + "=" + level, t.header[c],
                                  ColumnKind::Categorical});
            }
        }
    }
    if (schema.empty()) throw DataError(path + ": no feature columns besides target");
    return Dataset(std::move(columns), std::move(target), std::move(schema), n,
                   schema.size());
}

std::vector<std::vector<double>> load_feature_rows(const std::string& path,
                                                   const std::vector<std::string>& drop) {
    RawTable t = read_table(path);
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (std::find(drop.begin(), drop.end(), t.header[c]) == drop.end())
            keep.push_back(c);
    if (keep.empty()) throw DataError(path + ": no feature columns");

    const std::size_t n = t.rows.size();
    std::vector<std::vector<double>> rows(n);
    for (std::size_t c : keep) {
        ColumnKind kind = classify_column(t, c, path);
        if (kind == ColumnKind::Numeric) {
            for (std::size_t r = 0; r < n; ++r) {
                double v;
                parse_double(t.rows[r][c], v);
                rows[r].push_back(v);
            }
        } else {
            std::map<std::string, std::size_t> levels;
            for (const auto& row : t.rows) levels.emplace(row[c], 0);
            std::size_t idx = 0;
            for (auto& [level, pos] : levels) pos = idx++;
            for (std::size_t r = 0; r < n; ++r) {
                std::vector<double> indicator(levels.size(), 0.0);
                indicator[levels.at(t.rows[r][c])] = 1.0;
                rows[r].insert(rows[r].end(), indicator.begin(), indicator.end());
            }
        }
    }
    return rows;
}

FoldAssignment stratified_folds(const Dataset& ds, std::size_t V, std::uint64_t seed) {
    const std::size_t n = ds.n();
    if (V < 2) throw std::invalid_argument("stratified_folds: V must be >= 2");
    if (V > n) throw std::invalid_argument("stratified_folds: V exceeds sample count");

    // Rank rows by response, ties broken by row index.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ds.y(a) < ds.y(b); });

    std::size_t bins = std::min<std::size_t>(10, n / V);
    bins = std::max<std::size_t>(2, bins);

    FoldAssignment fa;
    fa.V = V;
    fa.fold_of.assign(n, 0);

    RandomState rng(seed);
    // The round-robin position carries across bins; with n >= V every fold
    // receives at least one row.
    std::size_t next_fold = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        std::size_t lo = b * n / bins;
        std::size_t hi = (b + 1) * n / bins;
        std::vector<std::size_t> bin(order.begin() + lo, order.begin() + hi);
        RandomState bin_rng = rng.child(b);
        bin_rng.shuffle(bin);
        for (std::size_t row : bin) {
            fa.fold_of[row] = next_fold;
            next_fold = (next_fold + 1) % V;
        }
    }
    return fa;
}

std::vector<std::size_t> subsample_without_replacement(std::size_t n, std::size_t k,
                                                       RandomState& rng) {
    if (k == 0) throw std::invalid_argument("subsample: k must be positive");
    if (k > n) throw std::invalid_argument("subsample: k exceeds population");
    // Partial Fisher-Yates over an index pool.
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::string dataset_to_csv(const Dataset& ds) {
    std::string out;
    for (const auto& col : ds.schema()) {
        out += col.name;
        out += ',';
    }
    out += "y\n";
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t j = 0; j < ds.d(); ++j) {
            out += format_double(ds.x(i, j));
            out += ',';
        }
        out += format_double(ds.y(i));
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::string body = dataset_to_csv(ds);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << body;
    if (!out) throw DataError("write failed: " + path);
}

}  // namespace rlf
