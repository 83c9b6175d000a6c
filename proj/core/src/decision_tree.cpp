#include "flare/decision_tree.hpp"

#include "flare/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <random>

namespace flare {

namespace {

double gini(const std::vector<int>& y, const std::vector<std::size_t>& indices) {
    std::map<int, std::size_t> counts;
    for (std::size_t i : indices) ++counts[y[i]];
    const double n = static_cast<double>(indices.size());
    double sum_sq = 0.0;
    for (const auto& [label, count] : counts) {
        const double p = static_cast<double>(count) / n;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

int majority_label(const std::vector<int>& y, const std::vector<std::size_t>& indices) {
    std::map<int, std::size_t> counts;
    for (std::size_t i : indices) ++counts[y[i]];
    int best = 0;
    std::size_t best_count = 0;
    for (const auto& [label, count] : counts) {  // map order makes ties pick the lowest label
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

bool all_same_label(const std::vector<int>& y, const std::vector<std::size_t>& indices) {
    for (std::size_t i : indices) {
        if (y[i] != y[indices.front()]) return false;
    }
    return true;
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

Split best_split(const linalg::Matrix& x, const std::vector<int>& y,
                 const std::vector<std::size_t>& indices, std::size_t n_features) {
    const double parent = gini(y, indices);
    const double n = static_cast<double>(indices.size());
    Split best;
    for (std::size_t f = 0; f < n_features; ++f) {
        std::vector<double> values;
        values.reserve(indices.size());
        for (std::size_t i : indices) values.push_back(x[i][f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t v = 0; v + 1 < values.size(); ++v) {
            const double threshold = (values[v] + values[v + 1]) / 2.0;
            std::vector<std::size_t> left;
            std::vector<std::size_t> right;
            for (std::size_t i : indices) {
                (x[i][f] < threshold ? left : right).push_back(i);
            }
            const double weighted = (static_cast<double>(left.size()) / n) * gini(y, left) +
                                    (static_cast<double>(right.size()) / n) * gini(y, right);
            const double gain = parent - weighted;
            if (gain > best.gain + 1e-12) {
                best.feature = static_cast<int>(f);
                best.threshold = threshold;
                best.gain = gain;
            }
        }
    }
    return best;
}

int grow(DecisionTree& tree, const linalg::Matrix& x, const std::vector<int>& y,
         const std::vector<std::size_t>& indices, std::size_t depth, const TreeConfig& config) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[node_id].label = majority_label(y, indices);

    if (depth >= config.max_depth || indices.size() < config.min_samples_split ||
        all_same_label(y, indices)) {
        return node_id;
    }
    const Split split = best_split(x, y, indices, tree.n_features);
    if (split.feature < 0) return node_id;

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (std::size_t i : indices) {
        (x[i][static_cast<std::size_t>(split.feature)] < split.threshold ? left_idx : right_idx)
            .push_back(i);
    }
    tree.nodes[node_id].feature = split.feature;
    tree.nodes[node_id].threshold = split.threshold;
    const int left = grow(tree, x, y, left_idx, depth + 1, config);
    tree.nodes[node_id].left = left;
    const int right = grow(tree, x, y, right_idx, depth + 1, config);
    tree.nodes[node_id].right = right;
    return node_id;
}

}  // namespace

int DecisionTree::predict(const linalg::Vector& features) const {
    if (nodes.empty()) throw EmptyTrainingSet();
    if (features.size() != n_features) throw DimensionMismatch(n_features, features.size());
    std::size_t node = 0;
    while (nodes[node].feature >= 0) {
        const TreeNode& n = nodes[node];
        node = static_cast<std::size_t>(features[static_cast<std::size_t>(n.feature)] < n.threshold
                                            ? n.left
                                            : n.right);
    }
    return nodes[node].label;
}

std::size_t DecisionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<std::size_t> depth_of(nodes.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {  // parents precede children
        const TreeNode& n = nodes[i];
        if (n.feature < 0) continue;
        depth_of[static_cast<std::size_t>(n.left)] = depth_of[i] + 1;
        depth_of[static_cast<std::size_t>(n.right)] = depth_of[i] + 1;
        deepest = std::max(deepest, depth_of[i] + 1);
    }
    return deepest;
}

DecisionTree fit_tree(const linalg::Matrix& x, const std::vector<int>& y,
                      const TreeConfig& config) {
    if (x.empty()) throw EmptyTrainingSet();
    if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
    const std::size_t p = x.front().size();
    for (const linalg::Vector& row : x) {
        if (row.size() != p) throw DimensionMismatch(p, row.size());
    }
    DecisionTree tree;
    tree.max_depth = config.max_depth;
    tree.n_features = p;
    std::vector<std::size_t> indices(x.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    grow(tree, x, y, indices, 0, config);
    return tree;
}

namespace {

nlohmann::json tree_json(const DecisionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes) {
        if (n.feature < 0) {
            nodes.push_back({{"label", n.label}});
        } else {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"label", n.label},
                             {"left", n.left},
                             {"right", n.right}});
        }
    }
    return {{"v", 1},
            {"max_depth", tree.max_depth},
            {"n_features", tree.n_features},
            {"nodes", std::move(nodes)}};
}

DecisionTree tree_from(const nlohmann::json& doc) {
    if (doc.value("v", 0) != 1) throw ConfigInvalid("unsupported tree serialization version");
    DecisionTree tree;
    tree.max_depth = doc.at("max_depth").get<std::size_t>();
    tree.n_features = doc.at("n_features").get<std::size_t>();
    for (const nlohmann::json& item : doc.at("nodes")) {
        TreeNode n;
        n.label = item.at("label").get<int>();
        if (item.contains("feature")) {
            n.feature = item.at("feature").get<int>();
            n.threshold = item.at("threshold").get<double>();
            n.left = item.at("left").get<int>();
            n.right = item.at("right").get<int>();
        }
        tree.nodes.push_back(n);
    }
    return tree;
}

}  // namespace

std::string tree_to_json(const DecisionTree& tree) { return tree_json(tree).dump(2) + "\n"; }

DecisionTree tree_from_json(const std::string& text) {
    try {
        return tree_from(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("tree serialization: ") + e.what());
    }
}

int RandomForest::predict(const linalg::Vector& features) const {
    if (trees.empty()) throw EmptyTrainingSet();
    std::map<int, std::size_t> votes;
    for (const DecisionTree& tree : trees) ++votes[tree.predict(features)];
    int best = 0;
    std::size_t best_count = 0;
    for (const auto& [label, count] : votes) {
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

RandomForest fit_forest(const linalg::Matrix& x, const std::vector<int>& y, std::size_t n_trees,
                        std::uint64_t seed, const TreeConfig& config) {
    if (x.empty()) throw EmptyTrainingSet();
    if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
    if (n_trees == 0) throw ConfigInvalid("forest needs at least one tree");
    RandomForest forest;
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < n_trees; ++t) {
        linalg::Matrix bag_x;
        std::vector<int> bag_y;
        bag_x.reserve(x.size());
        bag_y.reserve(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::size_t pick = static_cast<std::size_t>(rng() % x.size());
            bag_x.push_back(x[pick]);
            bag_y.push_back(y[pick]);
        }
        forest.trees.push_back(fit_tree(bag_x, bag_y, config));
    }
    return forest;
}

std::string forest_to_json(const RandomForest& forest) {
    nlohmann::json trees = nlohmann::json::array();
    for (const DecisionTree& tree : forest.trees) trees.push_back(tree_json(tree));
    nlohmann::json doc = {{"v", 1}, {"trees", std::move(trees)}};
    return doc.dump(2) + "\n";
}

RandomForest forest_from_json(const std::string& text) {
    try {
        const nlohmann::json doc = nlohmann::json::parse(text);
        if (doc.value("v", 0) != 1) throw ConfigInvalid("unsupported forest serialization version");
        RandomForest forest;
        for (const nlohmann::json& tree : doc.at("trees")) forest.trees.push_back(tree_from(tree));
        return forest;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("forest serialization: ") + e.what());
    }
}

}  // namespace flare
