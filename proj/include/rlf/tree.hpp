#pragma once

#include <memory>
#include <variant>

#include <nlohmann/json.hpp>

#include "rlf/dataset.hpp"
#include "rlf/random.hpp"
#include "rlf/splitters.hpp"

namespace rlf {

enum class PMode { DataDriven, Fixed };

struct TreeParams {
    std::size_t min_node = 5;   // stop splitting once N(A) <= min_node
    std::size_t mtry = 0;       // features sampled per node; 0 = max(1, d/3)
    std::size_t m_local = 10;   // trees per local forest
    PMode p_mode = PMode::DataDriven;
    double p_fixed = 1.0;       // used only in Fixed mode

    std::size_t resolved_mtry(std::size_t d) const;
    void validate(std::size_t d) const;
};

struct TreeNode;
using TreePtr = std::unique_ptr<TreeNode>;

// Small CART ensemble fit on a response-split node; estimates y at
// prediction time to decide the branch.
struct LocalForest {
    std::vector<TreePtr> trees;
    double predict(std::span<const double> x) const;
};

struct RiemannNode {
    std::size_t feature = 0;
    double threshold = 0.0;
    TreePtr left;   // x[feature] < threshold
    TreePtr right;
};

struct LebesgueNode {
    double y_threshold = 0.0;
    LocalForest local;
    TreePtr down;   // y < y_threshold
    TreePtr up;
};

struct LeafNode {
    double mean = 0.0;
};

struct TreeNode {
    std::variant<RiemannNode, LebesgueNode, LeafNode> value;
};

struct TreeStats {
    std::size_t leaf_count = 0;
    std::size_t riemann_count = 0;
    std::size_t lebesgue_count = 0;
    std::size_t depth = 0;
};

// Receives each internal node's split evaluation during a build. In fixed
// p modes only the searches the builder actually ran are populated.
struct SplitObserver {
    virtual ~SplitObserver() = default;
    virtual void on_node(const SplitEvaluation& eval, std::size_t node_size) = 0;
};

// Grows one Riemann-Lebesgue tree over the given rows. Per node: bag mtry
// features, evaluate both split types, flip B ~ Bernoulli(p~) and cut
// feature-space on B = 1, response-space (plus a local forest) on B = 0.
// A drawn type with no positive-gain split falls back to the other type,
// except at fixed p~ = 1 which stays a pure CART tree by contract.
TreePtr fit_rl_tree(const Dataset& ds, std::span<const std::size_t> sample,
                    const TreeParams& params, const RandomState& rng,
                    SplitObserver* observer = nullptr);

// Plain CART tree with the same feature bagging and stream layout; the
// building block of local forests and the reference for the fixed p~ = 1
// degeneration.
TreePtr fit_cart_tree(const Dataset& ds, std::span<const std::size_t> sample,
                      std::size_t mtry, std::size_t min_node, const RandomState& rng);

double predict_tree(const TreeNode& tree, std::span<const double> x);

TreeStats tree_stats(const TreeNode& tree);

nlohmann::json tree_to_json(const TreeNode& tree);
TreePtr tree_from_json(const nlohmann::json& j);

}  // namespace rlf
