#pragma once

#include "flare/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flare {

struct TreeConfig {
    std::size_t max_depth = 10;
    std::size_t min_samples_split = 2;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int label = 0;  // majority label, meaningful at leaves
    int left = -1;
    int right = -1;
};

/// Greedy Gini-impurity CART tree. Rows with feature < threshold go left.
struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t max_depth = 10;
    std::size_t n_features = 0;

    int predict(const linalg::Vector& features) const;
    /// Longest root-to-leaf edge count; a lone leaf has depth 0.
    std::size_t depth() const;
};

/// Deterministic induction: splits scan features in index order and
/// thresholds ascending (midpoints of consecutive distinct values), keeping
/// the first best split; leaves take the lowest majority label on ties.
DecisionTree fit_tree(const linalg::Matrix& x, const std::vector<int>& y,
                      const TreeConfig& config = {});

std::string tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const std::string& text);

/// Bagged trees over the same inducer; majority vote with lowest-label ties.
struct RandomForest {
    std::vector<DecisionTree> trees;

    int predict(const linalg::Vector& features) const;
};

RandomForest fit_forest(const linalg::Matrix& x, const std::vector<int>& y, std::size_t n_trees,
                        std::uint64_t seed, const TreeConfig& config = {});

std::string forest_to_json(const RandomForest& forest);
RandomForest forest_from_json(const std::string& text);

}  // namespace flare
