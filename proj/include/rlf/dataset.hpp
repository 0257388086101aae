#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlf/random.hpp"

namespace rlf {

// Raised for malformed input files and shape mismatches. The CLI maps it to
// a dedicated exit code, distinct from usage and internal errors.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

enum class ColumnKind { Numeric, Categorical };

struct ColumnInfo {
    std::string name;      // encoded column name ("x3" or "color=red")
    std::string source;    // original CSV column
    ColumnKind kind = ColumnKind::Numeric;
};

// Immutable tabular regression data. Features are stored column-major since
// the split search walks one feature across many rows.
class Dataset {
public:
    Dataset(std::vector<double> columns, std::vector<double> target,
            std::vector<ColumnInfo> schema, std::size_t n, std::size_t d);

    std::size_t n() const { return n_; }
    std::size_t d() const { return d_; }

    double x(std::size_t row, std::size_t col) const { return columns_[col * n_ + row]; }
    double y(std::size_t row) const { return target_[row]; }

    std::span<const double> column(std::size_t col) const {
        return {columns_.data() + col * n_, n_};
    }
    std::span<const double> target() const { return target_; }
    const std::vector<ColumnInfo>& schema() const { return schema_; }

    std::vector<double> row(std::size_t i) const;

    // New dataset holding the given rows, in order. Schema is shared.
    Dataset subset(std::span<const std::size_t> rows) const;

private:
    std::vector<double> columns_;  // d blocks of n values
    std::vector<double> target_;
    std::vector<ColumnInfo> schema_;
    std::size_t n_ = 0;
    std::size_t d_ = 0;
};

struct FoldAssignment {
    std::vector<std::size_t> fold_of;  // values in [0, V)
    std::size_t V = 0;

    std::vector<std::size_t> fold_rows(std::size_t fold) const;
    std::vector<std::size_t> complement_rows(std::size_t fold) const;
};

std::string fold_assignment_to_json(const FoldAssignment& folds);

// Loads a strict CSV: comma separated, one header row, '.' decimal point,
// no quoting. Columns where every cell parses as a finite real stay numeric;
// all other columns are one-hot encoded, one {0,1} column per distinct level.
// Empty cells and non-finite numerics are hard errors.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 bool log_transform = false);

// Same parsing and encoding, but the whole file is features (prediction
// input). Columns named in `drop` are ignored.
std::vector<std::vector<double>> load_feature_rows(
    const std::string& path, const std::vector<std::string>& drop = {});

// Equal-frequency response bins dealt round-robin, so each fold sees the
// same response distribution. Deterministic in (ds, V, seed).
FoldAssignment stratified_folds(const Dataset& ds, std::size_t V, std::uint64_t seed);

// k distinct indices from [0, n), uniform over all size-k subsets. Sorted.
std::vector<std::size_t> subsample_without_replacement(std::size_t n, std::size_t k,
                                                       RandomState& rng);

void write_csv(const Dataset& ds, const std::string& path);
std::string dataset_to_csv(const Dataset& ds);

}  // namespace rlf
