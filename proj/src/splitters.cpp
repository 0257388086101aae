#include "rlf/splitters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlf {

namespace {

constexpr double kTieEps = 1e-12;

// Neumaier-compensated accumulator.
struct CompSum {
    double s = 0.0;
    double c = 0.0;
    void add(double v) {
        double t = s + v;
        if (std::abs(s) >= std::abs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

// Midpoint between consecutive distinct values; nudged up if rounding lands
// on the lower value, so the "< z" partition never produces an empty child.
double midpoint(double lo, double hi) {
    double z = 0.5 * (lo + hi);
    if (z <= lo) z = hi;
    return z;
}

struct ScanResult {
    bool found = false;
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t left_count = 0;
};

// Best threshold over a value axis. `values` sorted ascending, `centered`
// the node responses minus the node mean, in the same order. The gain of a
// prefix split reduces to (S_L^2/n_L + S_R^2/n_R)/N on centered responses,
// which is nonnegative by construction and free of cancellation.
ScanResult best_prefix_split(std::span<const double> values,
                             std::span<const double> centered) {
    const std::size_t n = values.size();
    CompSum total;
    for (double v : centered) total.add(v);
    const double sum_all = total.value();

    ScanResult best;
    CompSum prefix;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        prefix.add(centered[k]);
        if (!(values[k] < values[k + 1])) continue;
        const double nl = static_cast<double>(k + 1);
        const double nr = static_cast<double>(n - k - 1);
        const double sl = prefix.value();
        const double sr = sum_all - sl;
        const double gain = (sl * sl / nl + sr * sr / nr) / static_cast<double>(n);
        if (!best.found || gain > best.gain + kTieEps) {
            best.found = true;
            best.threshold = midpoint(values[k], values[k + 1]);
            best.gain = gain;
            best.left_count = k + 1;
        }
    }
    return best;
}

double sse_two_pass(const Dataset& ds, std::span<const std::size_t> rows) {
    double sum = 0.0;
    for (std::size_t i : rows) sum += ds.y(i);
    const double mean = sum / static_cast<double>(rows.size());
    double sse = 0.0;
    for (std::size_t i : rows) {
        const double d = ds.y(i) - mean;
        sse += d * d;
    }
    return sse;
}

}  // namespace

NodeStats compute_stats(const Dataset& ds, std::span<const std::size_t> indices) {
    CompSum sum, sumsq;
    for (std::size_t i : indices) {
        const double y = ds.y(i);
        sum.add(y);
        sumsq.add(y * y);
    }
    return {indices.size(), sum.value(), sumsq.value()};
}

NodeView make_node(const Dataset& ds, std::span<const std::size_t> indices) {
    return {indices, compute_stats(ds, indices)};
}

double node_msd(const Dataset& ds, const NodeView& node) {
    return sse_two_pass(ds, node.indices) / static_cast<double>(node.indices.size());
}

std::optional<RiemannSplit> best_riemann_split(const Dataset& ds, const NodeView& node,
                                               std::span<const std::size_t> selected_features) {
    const std::size_t n = node.indices.size();
    if (selected_features.empty())
        throw std::invalid_argument("best_riemann_split: empty feature set");
    if (n < 2) throw std::invalid_argument("best_riemann_split: node has < 2 points");
    for (std::size_t j : selected_features)
        if (j >= ds.d()) throw std::invalid_argument("best_riemann_split: feature out of range");

    std::vector<std::size_t> features(selected_features.begin(), selected_features.end());
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()), features.end());

    const double mean = node.stats.mean();

    std::vector<std::pair<double, double>> pairs(n);  // (x, centered y)
    std::vector<double> values(n), centered(n);

    std::optional<RiemannSplit> best;
    for (std::size_t j : features) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = node.indices[k];
            pairs[k] = {ds.x(i, j), ds.y(i) - mean};
        }
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; k < n; ++k) {
            values[k] = pairs[k].first;
            centered[k] = pairs[k].second;
        }
        ScanResult r = best_prefix_split(values, centered);
        if (!r.found) continue;
        if (!best || r.gain > best->gain + kTieEps)
            best = RiemannSplit{j, r.threshold, r.gain, r.left_count, n - r.left_count};
    }
    return best;
}

std::optional<LebesgueSplit> best_lebesgue_split(const Dataset& ds, const NodeView& node) {
    const std::size_t n = node.indices.size();
    if (n < 2) throw std::invalid_argument("best_lebesgue_split: node has < 2 points");

    const double mean = node.stats.mean();
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) values[k] = ds.y(node.indices[k]);
    std::sort(values.begin(), values.end());
    std::vector<double> centered(n);
    for (std::size_t k = 0; k < n; ++k) centered[k] = values[k] - mean;

    ScanResult r = best_prefix_split(values, centered);
    if (!r.found) return std::nullopt;
    return LebesgueSplit{r.threshold, r.gain, r.left_count, n - r.left_count};
}

std::optional<double> compute_p_tilde(double riemann_gain, double lebesgue_gain) {
    if (riemann_gain < 0.0 || lebesgue_gain < 0.0)
        throw std::invalid_argument("compute_p_tilde: negative gain");
    const double total = riemann_gain + lebesgue_gain;
    if (total == 0.0) return std::nullopt;
    return lebesgue_gain / total;
}

SplitEvaluation evaluate_node(const Dataset& ds, const NodeView& node,
                              std::span<const std::size_t> selected_features) {
    SplitEvaluation eval;
    eval.riemann = best_riemann_split(ds, node, selected_features);
    eval.lebesgue = best_lebesgue_split(ds, node);
    const double rg = eval.riemann ? eval.riemann->gain : 0.0;
    const double lg = eval.lebesgue ? eval.lebesgue->gain : 0.0;
    eval.p_tilde = compute_p_tilde(rg, lg);
    // The response split dominates any feature split exactly; when the two
    // scans land within rounding error of each other the quotient may dip a
    // hair under 1/2, so snap it back to the true tie value.
    if (eval.p_tilde && *eval.p_tilde < 0.5 && rg - lg <= kTieEps * std::max(1.0, rg))
        eval.p_tilde = 0.5;
    return eval;
}

std::optional<RiemannSplit> oracle_best_split_riemann(
    const Dataset& ds, const NodeView& node, std::span<const std::size_t> selected_features) {
    const std::size_t n = node.indices.size();
    if (n > 200) throw std::invalid_argument("oracle: node too large");
    if (selected_features.empty())
        throw std::invalid_argument("oracle_best_split_riemann: empty feature set");
    if (n < 2) throw std::invalid_argument("oracle_best_split_riemann: node has < 2 points");

    std::vector<std::size_t> features(selected_features.begin(), selected_features.end());
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()), features.end());

    const double parent_sse = sse_two_pass(ds, node.indices);

    std::optional<RiemannSplit> best;
    std::vector<double> sorted(n);
    std::vector<std::size_t> left, right;
    for (std::size_t j : features) {
        for (std::size_t k = 0; k < n; ++k) sorted[k] = ds.x(node.indices[k], j);
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (!(sorted[k] < sorted[k + 1])) continue;
            double z = 0.5 * (sorted[k] + sorted[k + 1]);
            if (z <= sorted[k]) z = sorted[k + 1];
            left.clear();
            right.clear();
            for (std::size_t i : node.indices)
                (ds.x(i, j) < z ? left : right).push_back(i);
            const double gain =
                (parent_sse - sse_two_pass(ds, left) - sse_two_pass(ds, right)) /
                static_cast<double>(n);
            if (!best || gain > best->gain + kTieEps)
                best = RiemannSplit{j, z, gain, left.size(), right.size()};
        }
    }
    return best;
}

std::optional<LebesgueSplit> oracle_best_split_lebesgue(const Dataset& ds,
                                                        const NodeView& node) {
    const std::size_t n = node.indices.size();
    if (n > 200) throw std::invalid_argument("oracle: node too large");
    if (n < 2) throw std::invalid_argument("oracle_best_split_lebesgue: node has < 2 points");

    const double parent_sse = sse_two_pass(ds, node.indices);

    std::vector<double> sorted(n);
    for (std::size_t k = 0; k < n; ++k) sorted[k] = ds.y(node.indices[k]);
    std::sort(sorted.begin(), sorted.end());

    std::optional<LebesgueSplit> best;
    std::vector<std::size_t> down, up;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (!(sorted[k] < sorted[k + 1])) continue;
        double z = 0.5 * (sorted[k] + sorted[k + 1]);
        if (z <= sorted[k]) z = sorted[k + 1];
        down.clear();
        up.clear();
        for (std::size_t i : node.indices) (ds.y(i) < z ? down : up).push_back(i);
        const double gain = (parent_sse - sse_two_pass(ds, down) - sse_two_pass(ds, up)) /
                            static_cast<double>(n);
        if (!best || gain > best->gain + kTieEps)
            best = LebesgueSplit{z, gain, down.size(), up.size()};
    }
    return best;
}

}  // namespace rlf
