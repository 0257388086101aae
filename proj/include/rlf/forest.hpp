#pragma once

#include <string>

#include "rlf/tree.hpp"

namespace rlf {

struct ForestParams {
    std::size_t m_trees = 100;
    double alpha = 0.632;       // subagging ratio; each tree sees ceil(alpha*n) rows
    TreeParams tree;
    std::uint64_t seed = 0;

    void validate(std::size_t n, std::size_t d) const;
    std::size_t subsample_size(std::size_t n) const;
};

class TrainedForest {
public:
    TrainedForest(std::vector<TreePtr> trees, ForestParams params, std::size_t d);

    double predict(std::span<const double> x) const;
    std::vector<double> predict_batch(const Dataset& ds) const;

    const std::vector<TreePtr>& trees() const { return trees_; }
    const ForestParams& params() const { return params_; }
    std::size_t d() const { return d_; }

    // Node census summed over the ensemble.
    TreeStats stats() const;

private:
    std::vector<TreePtr> trees_;
    ForestParams params_;
    std::size_t d_;
};

// The deterministic per-tree row draw used by fit_forest; exposed so the
// subagging contract is directly testable.
std::vector<std::size_t> forest_tree_sample(std::size_t n, const ForestParams& params,
                                            std::size_t tree_index);

// Trains m_trees Riemann-Lebesgue trees, each on its own subsample, with
// per-tree derived rng streams. `threads` = 0 means one worker per core;
// the result is identical for any thread count.
TrainedForest fit_forest(const Dataset& ds, const ForestParams& params,
                         std::size_t threads = 1);

double mse(std::span<const double> predictions, std::span<const double> targets);

nlohmann::json forest_to_json(const TrainedForest& forest);
std::string forest_to_string(const TrainedForest& forest);
void save_forest(const TrainedForest& forest, const std::string& path);
TrainedForest forest_from_json(const nlohmann::json& j);
TrainedForest load_forest(const std::string& path);

}  // namespace rlf
