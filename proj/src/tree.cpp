#include "rlf/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace rlf {

namespace {

std::size_t default_mtry(std::size_t d) { return std::max<std::size_t>(1, d / 3); }

bool responses_constant(const Dataset& ds, std::span<const std::size_t> rows) {
    const double first = ds.y(rows.front());
    for (std::size_t i : rows)
        if (ds.y(i) != first) return false;
    return true;
}

std::vector<std::size_t> draw_features(std::size_t d, std::size_t mtry, RandomState rng) {
    std::vector<std::size_t> pool(d);
    for (std::size_t j = 0; j < d; ++j) pool[j] = j;
    for (std::size_t i = 0; i < mtry; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(d - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(mtry);
    return pool;
}

// Stable partition keyed by a row predicate; keeps relative order so that
// downstream draws are identical no matter which builder produced the node.
template <typename Pred>
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition_rows(
    std::span<const std::size_t> rows, Pred pred) {
    std::vector<std::size_t> in, out;
    for (std::size_t i : rows) (pred(i) ? in : out).push_back(i);
    return {std::move(in), std::move(out)};
}

struct CartBuilder {
    const Dataset& ds;
    std::size_t mtry;
    std::size_t min_node;

    TreePtr build(std::vector<std::size_t> rows, const RandomState& rng) const {
        NodeStats stats = compute_stats(ds, rows);
        if (rows.size() <= min_node || responses_constant(ds, rows))
            return std::make_unique<TreeNode>(TreeNode{LeafNode{stats.mean()}});

        auto features = draw_features(ds.d(), mtry, rng.child(stream::kFeatures));
        NodeView node{rows, stats};
        auto split = best_riemann_split(ds, node, features);
        if (!split || !(split->gain > 0.0))
            return std::make_unique<TreeNode>(TreeNode{LeafNode{stats.mean()}});

        auto [left_rows, right_rows] = partition_rows(
            rows, [&](std::size_t i) { return ds.x(i, split->feature) < split->threshold; });
        RiemannNode out;
        out.feature = split->feature;
        out.threshold = split->threshold;
        out.left = build(std::move(left_rows), rng.child(stream::kLeft));
        out.right = build(std::move(right_rows), rng.child(stream::kRight));
        return std::make_unique<TreeNode>(TreeNode{std::move(out)});
    }
};

struct RlTreeBuilder {
    const Dataset& ds;
    const TreeParams& params;
    std::size_t mtry;
    SplitObserver* observer;

    LocalForest fit_local_forest(std::span<const std::size_t> rows,
                                 const RandomState& rng) const {
        CartBuilder cart{ds, default_mtry(ds.d()), 5};
        LocalForest forest;
        forest.trees.reserve(params.m_local);
        for (std::size_t t = 0; t < params.m_local; ++t) {
            RandomState tree_rng = rng.child(t);
            RandomState boot = tree_rng.child(stream::kSample);
            std::vector<std::size_t> resample(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                resample[i] = rows[boot.uniform_index(rows.size())];
            forest.trees.push_back(cart.build(std::move(resample),
                                              tree_rng.child(stream::kTree)));
        }
        return forest;
    }

    TreePtr build(std::vector<std::size_t> rows, const RandomState& rng) const {
        NodeStats stats = compute_stats(ds, rows);
        if (rows.size() <= params.min_node || responses_constant(ds, rows))
            return std::make_unique<TreeNode>(TreeNode{LeafNode{stats.mean()}});

        auto features = draw_features(ds.d(), mtry, rng.child(stream::kFeatures));
        NodeView node{rows, stats};

        // A fixed p~ of exactly 1 is the classical-forest baseline: it must
        // never grow a response split, so the usual fallback is disabled.
        const bool pure_riemann = params.p_mode == PMode::Fixed && params.p_fixed >= 1.0;

        SplitEvaluation eval;
        double p_tilde;
        if (params.p_mode == PMode::DataDriven) {
            eval = evaluate_node(ds, node, features);
            // Non-constant responses give a positive response-split gain, so
            // p~ is defined here; the fallback value only guards rounding
            // corner cases and leads straight to a leaf below.
            p_tilde = eval.p_tilde.value_or(1.0);
        } else {
            p_tilde = params.p_fixed;
            if (pure_riemann) {
                eval.riemann = best_riemann_split(ds, node, features);
            } else {
                eval = evaluate_node(ds, node, features);
            }
        }
        if (observer) observer->on_node(eval, rows.size());

        const bool riemann_usable = eval.riemann && eval.riemann->gain > 0.0;
        const bool lebesgue_usable = eval.lebesgue && eval.lebesgue->gain > 0.0;

        bool coin = rng.child(stream::kBernoulli).bernoulli(p_tilde);
        bool use_riemann;
        if (coin) {
            if (riemann_usable)
                use_riemann = true;
            else if (lebesgue_usable && !pure_riemann)
                use_riemann = false;
            else
                return std::make_unique<TreeNode>(TreeNode{LeafNode{stats.mean()}});
        } else {
            if (lebesgue_usable)
                use_riemann = false;
            else if (riemann_usable)
                use_riemann = true;
            else
                return std::make_unique<TreeNode>(TreeNode{LeafNode{stats.mean()}});
        }

        if (use_riemann) {
            const RiemannSplit& split = *eval.riemann;
            auto [left_rows, right_rows] = partition_rows(
                rows, [&](std::size_t i) { return ds.x(i, split.feature) < split.threshold; });
            RiemannNode out;
            out.feature = split.feature;
            out.threshold = split.threshold;
            out.left = build(std::move(left_rows), rng.child(stream::kLeft));
            out.right = build(std::move(right_rows), rng.child(stream::kRight));
            return std::make_unique<TreeNode>(TreeNode{std::move(out)});
        }

        const LebesgueSplit& split = *eval.lebesgue;
        auto [down_rows, up_rows] =
            partition_rows(rows, [&](std::size_t i) { return ds.y(i) < split.threshold; });
        LebesgueNode out;
        out.y_threshold = split.threshold;
        out.local = fit_local_forest(rows, rng.child(stream::kLocal));
        out.down = build(std::move(down_rows), rng.child(stream::kLeft));
        out.up = build(std::move(up_rows), rng.child(stream::kRight));
        return std::make_unique<TreeNode>(TreeNode{std::move(out)});
    }
};

}  // namespace

std::size_t TreeParams::resolved_mtry(std::size_t d) const {
    return mtry == 0 ? default_mtry(d) : mtry;
}

void TreeParams::validate(std::size_t d) const {
    if (min_node < 1) throw std::invalid_argument("min_node must be >= 1");
    if (m_local < 1) throw std::invalid_argument("m_local must be >= 1");
    std::size_t m = resolved_mtry(d);
    if (m < 1 || m > d) throw std::invalid_argument("mtry must be in [1, d]");
    if (p_mode == PMode::Fixed && (p_fixed < 0.0 || p_fixed > 1.0))
        throw std::invalid_argument("fixed p must be in [0, 1]");
}

double LocalForest::predict(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& t : trees) sum += predict_tree(*t, x);
    return sum / static_cast<double>(trees.size());
}

TreePtr fit_rl_tree(const Dataset& ds, std::span<const std::size_t> sample,
                    const TreeParams& params, const RandomState& rng,
                    SplitObserver* observer) {
    if (sample.empty()) throw std::invalid_argument("fit_rl_tree: empty sample");
    params.validate(ds.d());
    RlTreeBuilder builder{ds, params, params.resolved_mtry(ds.d()), observer};
    return builder.build(std::vector<std::size_t>(sample.begin(), sample.end()), rng);
}

TreePtr fit_cart_tree(const Dataset& ds, std::span<const std::size_t> sample,
                      std::size_t mtry, std::size_t min_node, const RandomState& rng) {
    if (sample.empty()) throw std::invalid_argument("fit_cart_tree: empty sample");
    if (mtry < 1 || mtry > ds.d()) throw std::invalid_argument("fit_cart_tree: bad mtry");
    CartBuilder builder{ds, mtry, min_node};
    return builder.build(std::vector<std::size_t>(sample.begin(), sample.end()), rng);
}

double predict_tree(const TreeNode& tree, std::span<const double> x) {
    const TreeNode* cur = &tree;
    while (true) {
        if (const auto* leaf = std::get_if<LeafNode>(&cur->value)) return leaf->mean;
        if (const auto* r = std::get_if<RiemannNode>(&cur->value)) {
            if (r->feature >= x.size())
                throw DataError("predict: feature dimension mismatch");
            cur = x[r->feature] < r->threshold ? r->left.get() : r->right.get();
            continue;
        }
        const auto& l = std::get<LebesgueNode>(cur->value);
        const double y_hat = l.local.predict(x);
        cur = y_hat < l.y_threshold ? l.down.get() : l.up.get();
    }
}

TreeStats tree_stats(const TreeNode& tree) {
    TreeStats s;
    if (std::holds_alternative<LeafNode>(tree.value)) {
        s.leaf_count = 1;
        return s;
    }
    const TreeNode* a = nullptr;
    const TreeNode* b = nullptr;
    if (const auto* r = std::get_if<RiemannNode>(&tree.value)) {
        s.riemann_count = 1;
        a = r->left.get();
        b = r->right.get();
    } else {
        const auto& l = std::get<LebesgueNode>(tree.value);
        s.lebesgue_count = 1;
        a = l.down.get();
        b = l.up.get();
    }
    TreeStats sa = tree_stats(*a);
    TreeStats sb = tree_stats(*b);
    s.leaf_count += sa.leaf_count + sb.leaf_count;
    s.riemann_count += sa.riemann_count + sb.riemann_count;
    s.lebesgue_count += sa.lebesgue_count + sb.lebesgue_count;
    s.depth = 1 + std::max(sa.depth, sb.depth);
    return s;
}

nlohmann::json tree_to_json(const TreeNode& tree) {
    if (const auto* leaf = std::get_if<LeafNode>(&tree.value))
        return {{"kind", "leaf"}, {"mean", leaf->mean}};
    if (const auto* r = std::get_if<RiemannNode>(&tree.value))
        return {{"kind", "riemann"},
                {"j", r->feature},
                {"z", r->threshold},
                {"left", tree_to_json(*r->left)},
                {"right", tree_to_json(*r->right)}};
    const auto& l = std::get<LebesgueNode>(tree.value);
    nlohmann::json local = nlohmann::json::array();
    for (const auto& t : l.local.trees) local.push_back(tree_to_json(*t));
    return {{"kind", "lebesgue"},
            {"zl", l.y_threshold},
            {"local", {{"trees", std::move(local)}}},
            {"down", tree_to_json(*l.down)},
            {"up", tree_to_json(*l.up)}};
}

TreePtr tree_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw DataError("tree json: missing kind");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "leaf")
        return std::make_unique<TreeNode>(TreeNode{LeafNode{j.at("mean").get<double>()}});
    if (kind == "riemann") {
        RiemannNode r;
        r.feature = j.at("j").get<std::size_t>();
        r.threshold = j.at("z").get<double>();
        r.left = tree_from_json(j.at("left"));
        r.right = tree_from_json(j.at("right"));
        return std::make_unique<TreeNode>(TreeNode{std::move(r)});
    }
    if (kind == "lebesgue") {
        LebesgueNode l;
        l.y_threshold = j.at("zl").get<double>();
        const auto& trees = j.at("local").at("trees");
        if (!trees.is_array() || trees.empty())
            throw DataError("tree json: empty local forest");
        for (const auto& t : trees) l.local.trees.push_back(tree_from_json(t));
        l.down = tree_from_json(j.at("down"));
        l.up = tree_from_json(j.at("up"));
        return std::make_unique<TreeNode>(TreeNode{std::move(l)});
    }
    throw DataError("tree json: unknown kind '" + kind + "'");
}

}  // namespace rlf
