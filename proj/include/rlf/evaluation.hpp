#pragma once

#include <string>

#include "rlf/forest.hpp"
#include "rlf/synthgen.hpp"

namespace rlf {

struct TTestResult {
    double t = 0.0;
    std::size_t V = 0;
    double n1 = 0.0;           // training size
    double n2 = 0.0;           // testing size
    double sigma_hat = 0.0;    // sample sd of the differences
    bool significant = false;  // two-sided 5%, Student-t with V-1 df
    bool degenerate = false;   // zero sd with nonzero mean
};

// Corrected resampled t-test on per-fold performance differences:
//   t = mean(r) / sqrt((1/V + n2/n1) * sigma^2)
TTestResult corrected_t(std::span<const double> r, double n1, double n2);

struct CvReport {
    std::vector<double> per_fold_mse_a;
    std::vector<double> per_fold_mse_b;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double margin_a = 0.0;  // 1.96 * sd / sqrt(V)
    double margin_b = 0.0;
    TTestResult ttest;
};

// Stratified V-fold comparison of two forest configurations on identical
// fold assignments. Differences r_t = mse_a - mse_b feed the corrected
// t-test with n2/n1 = 1/(V-1).
CvReport run_cv_comparison(const Dataset& ds, std::size_t V, const ForestParams& params_a,
                           const ForestParams& params_b, std::uint64_t seed,
                           std::size_t threads = 1);

struct TuneGrid {
    std::vector<double> rlf_p;              // fixed split-control values
    std::vector<std::size_t> rlf_m_local;
    std::vector<std::size_t> rf_m_trees;
    std::vector<std::size_t> rf_min_node;
    std::vector<double> rf_alpha;
    double train_ratio = 0.6;
    double val_ratio = 0.2;
    double test_ratio = 0.2;
};

// The tuning grids used for the two bundled one-dimensional studies.
TuneGrid example_tune_grid();

struct TuneCell {
    double p = 0.0;               // RLF cells
    std::size_t m_local = 0;
    std::size_t m_trees = 0;      // RF cells
    std::size_t min_node = 0;
    double alpha = 0.0;
    double val_mse = 0.0;
};

struct TuneReport {
    std::vector<TuneCell> rlf_table;  // ascending validation MSE
    std::vector<TuneCell> rf_table;
    ForestParams best_rlf;
    ForestParams best_rf;
    double val_mse_rlf = 0.0;
    double val_mse_rf = 0.0;
    double test_mse_rlf = 0.0;
    double test_mse_rf = 0.0;
    std::size_t n_train = 0;
    std::size_t n_val = 0;
    std::size_t n_test = 0;
};

// Exhaustive grid evaluation with a seeded train/validation/test split.
// Winners are picked by validation MSE (grid order breaks ties) and scored
// once on the held-out test rows.
TuneReport tune(const Dataset& ds, const TuneGrid& grid, std::uint64_t seed,
                std::size_t threads = 1);

// One-command reproduction: 3000 draws of the sine (1) or mixture (2)
// study, tuned on the bundled grids.
TuneReport tune_example(int example, std::uint64_t seed, std::size_t threads = 1);

struct BenchRow {
    std::size_t n = 0;
    double fit_seconds = 0.0;
    double predict_seconds = 0.0;
};

// Wall-clock fit/predict timings on sparse-model data of each size.
std::vector<BenchRow> bench_scaling(const std::vector<std::size_t>& sizes,
                                    const ForestParams& params, std::uint64_t seed,
                                    std::size_t threads = 1);

std::string bench_to_csv(const std::vector<BenchRow>& rows);
nlohmann::json cv_report_to_json(const CvReport& report);
nlohmann::json tune_report_to_json(const TuneReport& report);

}  // namespace rlf
