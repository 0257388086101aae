#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rlf/dataset.hpp"

namespace rlf {

// Count, sum and sum of squares of the responses inside a node.
struct NodeStats {
    std::size_t count = 0;
    double sum = 0.0;
    double sumsq = 0.0;

    double mean() const { return sum / static_cast<double>(count); }
};

// A set of rows forming one tree node, with cached response stats.
struct NodeView {
    std::span<const std::size_t> indices;
    NodeStats stats;
};

NodeStats compute_stats(const Dataset& ds, std::span<const std::size_t> indices);
NodeView make_node(const Dataset& ds, std::span<const std::size_t> indices);

// Mean squared deviation of the node responses (SSE / N), via an exact
// two-pass sweep. Upper bound for any split gain.
double node_msd(const Dataset& ds, const NodeView& node);

// Feature-space cut: x^(j) < z goes left.
struct RiemannSplit {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t left_count = 0;
    std::size_t right_count = 0;
};

// Response-space cut: y < z goes down.
struct LebesgueSplit {
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t down_count = 0;
    std::size_t up_count = 0;
};

struct SplitEvaluation {
    std::optional<RiemannSplit> riemann;
    std::optional<LebesgueSplit> lebesgue;
    std::optional<double> p_tilde;
};

// Best (feature, threshold) over the selected features. Thresholds are the
// midpoints between consecutive distinct sorted feature values inside the
// node; gain is the decrease in SSE/N. Ties (within 1e-12) go to the
// smallest feature index, then the smallest threshold. Absent when every
// selected feature is constant on the node.
std::optional<RiemannSplit> best_riemann_split(const Dataset& ds, const NodeView& node,
                                               std::span<const std::size_t> selected_features);

// Best response threshold, same candidate grid and gain normalization on
// the response axis. Absent when all responses are equal.
std::optional<LebesgueSplit> best_lebesgue_split(const Dataset& ds, const NodeView& node);

// The split-type control probability L~ / (L + L~); absent when both gains
// vanish. Inputs must be nonnegative.
std::optional<double> compute_p_tilde(double riemann_gain, double lebesgue_gain);

// Both searches plus the control probability. When the two computed gains
// tie to rounding error, p_tilde is snapped to exactly 1/2 so the dominance
// bound survives floating point.
SplitEvaluation evaluate_node(const Dataset& ds, const NodeView& node,
                              std::span<const std::size_t> selected_features);

// Exhaustive quadratic oracles: every candidate threshold evaluated with a
// fresh two-pass SSE computation, no incremental state. Node capped at 200
// rows. Test reference for the scanning implementations above.
std::optional<RiemannSplit> oracle_best_split_riemann(
    const Dataset& ds, const NodeView& node, std::span<const std::size_t> selected_features);
std::optional<LebesgueSplit> oracle_best_split_lebesgue(const Dataset& ds,
                                                        const NodeView& node);

}  // namespace rlf
