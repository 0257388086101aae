#include "rlf/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace rlf {

namespace {

double vector_mean(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (double x : v) {
        const double d = x - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

ForestParams with_seed(ForestParams p, std::uint64_t seed) {
    p.seed = seed;
    return p;
}

double fit_and_score(const Dataset& train, const Dataset& eval, const ForestParams& params,
                     std::size_t threads) {
    TrainedForest forest = fit_forest(train, params, threads);
    return mse(forest.predict_batch(eval), eval.target());
}

}  // namespace

TTestResult corrected_t(std::span<const double> r, double n1, double n2) {
    if (r.size() < 2) throw std::invalid_argument("corrected_t: need at least 2 folds");
    if (n1 < 1.0 || n2 < 1.0) throw std::invalid_argument("corrected_t: sizes must be >= 1");

    TTestResult out;
    out.V = r.size();
    out.n1 = n1;
    out.n2 = n2;

    const double mean = vector_mean(r);
    out.sigma_hat = sample_sd(r, mean);

    if (out.sigma_hat == 0.0) {
        if (mean == 0.0) {
            out.t = 0.0;
            out.significant = false;
        } else {
            out.degenerate = true;
            out.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
            out.significant = true;
        }
        return out;
    }

    const double factor = 1.0 / static_cast<double>(out.V) + n2 / n1;
    out.t = mean / std::sqrt(factor * out.sigma_hat * out.sigma_hat);

    boost::math::students_t dist(static_cast<double>(out.V - 1));
    const double critical = boost::math::quantile(dist, 0.975);
    out.significant = std::abs(out.t) > critical;
    return out;
}

CvReport run_cv_comparison(const Dataset& ds, std::size_t V, const ForestParams& params_a,
                           const ForestParams& params_b, std::uint64_t seed,
                           std::size_t threads) {
    FoldAssignment folds = stratified_folds(ds, V, seed);

    CvReport report;
    report.per_fold_mse_a.resize(V);
    report.per_fold_mse_b.resize(V);
    for (std::size_t f = 0; f < V; ++f) {
        Dataset train = ds.subset(folds.complement_rows(f));
        Dataset test = ds.subset(folds.fold_rows(f));
        report.per_fold_mse_a[f] = fit_and_score(
            train, test, with_seed(params_a, derive_seed(params_a.seed, f)), threads);
        report.per_fold_mse_b[f] = fit_and_score(
            train, test, with_seed(params_b, derive_seed(params_b.seed, f)), threads);
    }

    report.mean_a = vector_mean(report.per_fold_mse_a);
    report.mean_b = vector_mean(report.per_fold_mse_b);
    const double root_v = std::sqrt(static_cast<double>(V));
    report.margin_a = 1.96 * sample_sd(report.per_fold_mse_a, report.mean_a) / root_v;
    report.margin_b = 1.96 * sample_sd(report.per_fold_mse_b, report.mean_b) / root_v;

    std::vector<double> diffs(V);
    for (std::size_t f = 0; f < V; ++f)
        diffs[f] = report.per_fold_mse_a[f] - report.per_fold_mse_b[f];
    // Representative sizes with the exact 1/(V-1) train/test ratio.
    const double fold_size = static_cast<double>(ds.n() / V);
    report.ttest = corrected_t(diffs, fold_size * static_cast<double>(V - 1), fold_size);
    return report;
}

TuneGrid example_tune_grid() {
    TuneGrid grid;
    grid.rlf_p = {0.2, 0.4, 0.6, 0.8};
    grid.rlf_m_local = {10, 20, 50};
    grid.rf_m_trees = {50, 100, 150, 200};
    grid.rf_min_node = {5, 10, 15};
    grid.rf_alpha = {0.5, 0.63, 0.8};
    return grid;
}

TuneReport tune(const Dataset& ds, const TuneGrid& grid, std::uint64_t seed,
                std::size_t threads) {
    if (grid.rlf_p.empty() || grid.rlf_m_local.empty() || grid.rf_m_trees.empty() ||
        grid.rf_min_node.empty() || grid.rf_alpha.empty())
        throw std::invalid_argument("tune: empty grid");
    if (std::abs(grid.train_ratio + grid.val_ratio + grid.test_ratio - 1.0) > 1e-9)
        throw std::invalid_argument("tune: split ratios must sum to 1");

    const std::size_t n = ds.n();
    const auto n_train = static_cast<std::size_t>(grid.train_ratio * static_cast<double>(n));
    const auto n_val = static_cast<std::size_t>(grid.val_ratio * static_cast<double>(n));
    const std::size_t n_test = n - n_train - n_val;
    if (n_train < 2 || n_val < 1 || n_test < 1)
        throw std::invalid_argument("tune: dataset too small for the 6:2:2 split");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    RandomState split_rng = RandomState(seed).child(0);
    split_rng.shuffle(perm);
    Dataset train = ds.subset({perm.data(), n_train});
    Dataset val = ds.subset({perm.data() + n_train, n_val});
    Dataset test = ds.subset({perm.data() + n_train + n_val, n_test});

    TuneReport report;
    report.n_train = n_train;
    report.n_val = n_val;
    report.n_test = n_test;

    // Common derived seeds across cells, so grid comparisons share their
    // subsample draws.
    const std::uint64_t rlf_seed = derive_seed(seed, 1);
    const std::uint64_t rf_seed = derive_seed(seed, 2);

    std::optional<TrainedForest> best_rlf_model;
    for (double p : grid.rlf_p) {
        for (std::size_t m_local : grid.rlf_m_local) {
            ForestParams params;
            params.m_trees = 100;
            params.alpha = 0.632;
            params.seed = rlf_seed;
            params.tree.m_local = m_local;
            params.tree.p_mode = PMode::Fixed;
            params.tree.p_fixed = p;
            TrainedForest model = fit_forest(train, params, threads);
            const double v = mse(model.predict_batch(val), val.target());
            report.rlf_table.push_back({p, m_local, 0, 0, 0.0, v});
            if (!best_rlf_model || v < report.val_mse_rlf) {
                report.val_mse_rlf = v;
                report.best_rlf = params;
                best_rlf_model = std::move(model);
            }
        }
    }

    std::optional<TrainedForest> best_rf_model;
    for (double alpha : grid.rf_alpha) {
        for (std::size_t min_node : grid.rf_min_node) {
            for (std::size_t m_trees : grid.rf_m_trees) {
                ForestParams params;
                params.m_trees = m_trees;
                params.alpha = alpha;
                params.seed = rf_seed;
                params.tree.min_node = min_node;
                params.tree.p_mode = PMode::Fixed;
                params.tree.p_fixed = 1.0;
                TrainedForest model = fit_forest(train, params, threads);
                const double v = mse(model.predict_batch(val), val.target());
                report.rf_table.push_back({0.0, 0, m_trees, min_node, alpha, v});
                if (!best_rf_model || v < report.val_mse_rf) {
                    report.val_mse_rf = v;
                    report.best_rf = params;
                    best_rf_model = std::move(model);
                }
            }
        }
    }

    auto by_val = [](const TuneCell& a, const TuneCell& b) { return a.val_mse < b.val_mse; };
    std::stable_sort(report.rlf_table.begin(), report.rlf_table.end(), by_val);
    std::stable_sort(report.rf_table.begin(), report.rf_table.end(), by_val);

    report.test_mse_rlf = mse(best_rlf_model->predict_batch(test), test.target());
    report.test_mse_rf = mse(best_rf_model->predict_batch(test), test.target());
    return report;
}

TuneReport tune_example(int example, std::uint64_t seed, std::size_t threads) {
    if (example != 1 && example != 2)
        throw std::invalid_argument("tune_example: example must be 1 or 2");
    SyntheticSpec spec;
    spec.model = example == 1 ? SyntheticModel::Sine : SyntheticModel::Mixture;
    spec.n = 3000;
    spec.seed = derive_seed(seed, 100 + static_cast<std::uint64_t>(example));
    return tune(generate(spec), example_tune_grid(), seed, threads);
}

std::vector<BenchRow> bench_scaling(const std::vector<std::size_t>& sizes,
                                    const ForestParams& params, std::uint64_t seed,
                                    std::size_t threads) {
    if (sizes.empty()) throw std::invalid_argument("bench: no sizes");
    if (!std::is_sorted(sizes.begin(), sizes.end()))
        throw std::invalid_argument("bench: sizes must be ascending");

    using clock = std::chrono::steady_clock;
    std::vector<BenchRow> rows;
    for (std::size_t n : sizes) {
        SyntheticSpec spec;
        spec.model = SyntheticModel::Sparse;
        spec.n = n;
        spec.seed = derive_seed(seed, n);
        Dataset ds = gen_sparse(spec);

        const auto t0 = clock::now();
        TrainedForest forest = fit_forest(ds, with_seed(params, derive_seed(seed, n + 1)),
                                          threads);
        const auto t1 = clock::now();
        volatile double sink = 0.0;
        auto preds = forest.predict_batch(ds);
        for (double p : preds) sink += p;
        const auto t2 = clock::now();
        (void)sink;

        rows.push_back({n, std::chrono::duration<double>(t1 - t0).count(),
                        std::chrono::duration<double>(t2 - t1).count()});
    }
    return rows;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
    std::string out = "n,fit_seconds,predict_seconds\n";
    for (const auto& r : rows)
        out += std::to_string(r.n) + "," + std::to_string(r.fit_seconds) + "," +
               std::to_string(r.predict_seconds) + "\n";
    return out;
}

nlohmann::json cv_report_to_json(const CvReport& report) {
    return {{"per_fold_mse_a", report.per_fold_mse_a},
            {"per_fold_mse_b", report.per_fold_mse_b},
            {"mean_a", report.mean_a},
            {"mean_b", report.mean_b},
            {"margin_a", report.margin_a},
            {"margin_b", report.margin_b},
            {"ttest",
             {{"t", report.ttest.t},
              {"V", report.ttest.V},
              {"n1", report.ttest.n1},
              {"n2", report.ttest.n2},
              {"sigma_hat", report.ttest.sigma_hat},
              {"significant", report.ttest.significant},
              {"degenerate", report.ttest.degenerate}}}};
}

nlohmann::json tune_report_to_json(const TuneReport& report) {
    nlohmann::json rlf_cells = nlohmann::json::array();
    for (const auto& c : report.rlf_table)
        rlf_cells.push_back({{"p", c.p}, {"m_local", c.m_local}, {"val_mse", c.val_mse}});
    nlohmann::json rf_cells = nlohmann::json::array();
    for (const auto& c : report.rf_table)
        rf_cells.push_back({{"m_trees", c.m_trees},
                            {"min_node", c.min_node},
                            {"alpha", c.alpha},
                            {"val_mse", c.val_mse}});
    return {{"split", {{"train", report.n_train}, {"val", report.n_val}, {"test", report.n_test}}},
            {"rlf",
             {{"table", std::move(rlf_cells)},
              {"best", {{"p", report.best_rlf.tree.p_fixed},
                        {"m_local", report.best_rlf.tree.m_local}}},
              {"val_mse", report.val_mse_rlf},
              {"test_mse", report.test_mse_rlf}}},
            {"rf",
             {{"table", std::move(rf_cells)},
              {"best", {{"m_trees", report.best_rf.m_trees},
                        {"min_node", report.best_rf.tree.min_node},
                        {"alpha", report.best_rf.alpha}}},
              {"val_mse", report.val_mse_rf},
              {"test_mse", report.test_mse_rf}}}};
}

}  // namespace rlf
