#pragma once

#include "flare/decision_tree.hpp"
#include "flare/variable_selection.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace flare {

/// One threat-indicator x risk-indicator reasoning configuration. Ids are
/// fixed: (Injury,Home)=0, (Injury,Neighborhood)=1, (Death,Home)=2,
/// (Death,Neighborhood)=3.
struct ReasoningPattern {
    int id = 0;
    VariableSubset threat_subset;
    VariableSubset risk_subset;

    const PerceptionIndicator& threat() const { return threat_subset.indicator; }
    const PerceptionIndicator& risk() const { return risk_subset.indicator; }
};

/// Builds the four patterns from one subset per indicator kind (any input
/// order). Throws MissingSubset when a kind is absent.
std::vector<ReasoningPattern> enumerate_patterns(const std::vector<VariableSubset>& subsets);

struct PatternLabel {
    int id = 0;
    bool low_confidence = false;  // every trial failed on every pattern
};

/// Argmax over the four success rates, ties to the lowest id.
PatternLabel label_most_probable(const std::array<double, 4>& rates);

struct PatternTrialReport {
    std::string record_id;
    std::array<double, 4> rates{};
    std::size_t trials = 0;
    int label = 0;
    bool low_confidence = false;
};

enum class ClassifierKind { Tree, Forest };

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::Tree;
    TreeConfig tree;  // depth cap 10 per the pattern-classifier contract
    std::size_t n_trees = 15;
    std::uint64_t seed = 0;
};

struct PatternClassifier {
    std::vector<std::string> feature_names;
    ClassifierKind kind = ClassifierKind::Tree;
    DecisionTree tree;
    RandomForest forest;

    int classify(const linalg::Vector& features) const;
};

PatternClassifier train_pattern_classifier(const linalg::Matrix& features,
                                           const std::vector<int>& labels,
                                           const std::vector<std::string>& feature_names,
                                           const ClassifierConfig& config = {});

std::string classifier_to_json(const PatternClassifier& classifier);
PatternClassifier classifier_from_json(const std::string& text);

/// Classifier inputs: the union of the four subsets' variables plus every
/// socio_demographic- or order_awareness-tagged feature variable, in schema
/// order.
std::vector<std::string> classifier_feature_names(const SurveySchema& schema,
                                                  const std::vector<ReasoningPattern>& patterns);

/// Picks the named entries out of a full schema-ordered feature vector.
linalg::Vector project_features(const FeatureVector& full, const SurveySchema& schema,
                                const std::vector<std::string>& names);

}  // namespace flare
