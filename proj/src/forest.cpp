#include "rlf/forest.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

namespace rlf {

void ForestParams::validate(std::size_t n, std::size_t d) const {
    if (m_trees < 1) throw std::invalid_argument("m_trees must be >= 1");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("alpha must be in (0, 1]");
    if (n < 2 || subsample_size(n) < 2)
        throw std::invalid_argument("dataset too small for subagging");
    tree.validate(d);
}

std::size_t ForestParams::subsample_size(std::size_t n) const {
    auto k = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
    return std::min(k, n);
}

TrainedForest::TrainedForest(std::vector<TreePtr> trees, ForestParams params, std::size_t d)
    : trees_(std::move(trees)), params_(std::move(params)), d_(d) {
    if (trees_.empty()) throw std::invalid_argument("forest has no trees");
}

double TrainedForest::predict(std::span<const double> x) const {
    if (x.size() != d_) throw DataError("predict: expected " + std::to_string(d_) +
                                        " features, got " + std::to_string(x.size()));
    double sum = 0.0;
    for (const auto& t : trees_) sum += predict_tree(*t, x);
    return sum / static_cast<double>(trees_.size());
}

std::vector<double> TrainedForest::predict_batch(const Dataset& ds) const {
    if (ds.d() != d_) throw DataError("predict_batch: feature dimension mismatch");
    std::vector<double> out(ds.n());
    std::vector<double> row(d_);
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t j = 0; j < d_; ++j) row[j] = ds.x(i, j);
        out[i] = predict(row);
    }
    return out;
}

TreeStats TrainedForest::stats() const {
    TreeStats total;
    for (const auto& t : trees_) {
        TreeStats s = tree_stats(*t);
        total.leaf_count += s.leaf_count;
        total.riemann_count += s.riemann_count;
        total.lebesgue_count += s.lebesgue_count;
        total.depth = std::max(total.depth, s.depth);
    }
    return total;
}

std::vector<std::size_t> forest_tree_sample(std::size_t n, const ForestParams& params,
                                            std::size_t tree_index) {
    RandomState rng = RandomState(params.seed).child(tree_index).child(stream::kSample);
    return subsample_without_replacement(n, params.subsample_size(n), rng);
}

TrainedForest fit_forest(const Dataset& ds, const ForestParams& params, std::size_t threads) {
    params.validate(ds.n(), ds.d());
    const std::size_t m = params.m_trees;
    std::vector<TreePtr> trees(m);

    auto fit_one = [&](std::size_t i) {
        auto sample = forest_tree_sample(ds.n(), params, i);
        RandomState tree_rng = RandomState(params.seed).child(i).child(stream::kTree);
        trees[i] = fit_rl_tree(ds, sample, params.tree, tree_rng);
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, m);
    if (threads <= 1) {
        for (std::size_t i = 0; i < m; ++i) fit_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < m; i = next.fetch_add(1))
                    fit_one(i);
            });
        for (auto& w : workers) w.join();
    }
    return TrainedForest(std::move(trees), params, ds.d());
}

double mse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size() || predictions.empty())
        throw std::invalid_argument("mse: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double r = predictions[i] - targets[i];
        sum += r * r;
    }
    return sum / static_cast<double>(predictions.size());
}

namespace {

nlohmann::json params_to_json(const ForestParams& p) {
    nlohmann::json t;
    t["min_node"] = p.tree.min_node;
    t["mtry"] = p.tree.mtry;
    t["m_local"] = p.tree.m_local;
    t["p_mode"] = p.tree.p_mode == PMode::DataDriven ? "data" : "fixed";
    if (p.tree.p_mode == PMode::Fixed) t["p"] = p.tree.p_fixed;
    return {{"m_trees", p.m_trees}, {"alpha", p.alpha}, {"seed", p.seed}, {"tree", t}};
}

ForestParams params_from_json(const nlohmann::json& j) {
    ForestParams p;
    p.m_trees = j.at("m_trees").get<std::size_t>();
    p.alpha = j.at("alpha").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    const auto& t = j.at("tree");
    p.tree.min_node = t.at("min_node").get<std::size_t>();
    p.tree.mtry = t.at("mtry").get<std::size_t>();
    p.tree.m_local = t.at("m_local").get<std::size_t>();
    const std::string mode = t.at("p_mode").get<std::string>();
    if (mode == "data") {
        p.tree.p_mode = PMode::DataDriven;
    } else if (mode == "fixed") {
        p.tree.p_mode = PMode::Fixed;
        p.tree.p_fixed = t.at("p").get<double>();
    } else {
        throw DataError("model json: unknown p_mode '" + mode + "'");
    }
    return p;
}

}  // namespace

nlohmann::json forest_to_json(const TrainedForest& forest) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : forest.trees()) trees.push_back(tree_to_json(*t));
    return {{"format_version", 1},
            {"params", params_to_json(forest.params())},
            {"d", forest.d()},
            {"trees", std::move(trees)}};
}

std::string forest_to_string(const TrainedForest& forest) {
    return forest_to_json(forest).dump();
}

void save_forest(const TrainedForest& forest, const std::string& path) {
    std::string body = forest_to_string(forest);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out << body << '\n';
    if (!out) throw DataError("write failed: " + path);
}

TrainedForest forest_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("format_version"))
        throw DataError("model json: missing format_version");
    const int version = j.at("format_version").get<int>();
    if (version != 1)
        throw DataError("model json: unsupported format_version " + std::to_string(version));
    ForestParams params = params_from_json(j.at("params"));
    const auto d = j.at("d").get<std::size_t>();
    const auto& trees_json = j.at("trees");
    if (!trees_json.is_array() || trees_json.empty())
        throw DataError("model json: no trees");
    std::vector<TreePtr> trees;
    trees.reserve(trees_json.size());
    for (const auto& t : trees_json) trees.push_back(tree_from_json(t));
    return TrainedForest(std::move(trees), std::move(params), d);
}

TrainedForest load_forest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed model file " + path + ": " + e.what());
    }
    return forest_from_json(j);
}

}  // namespace rlf
