#pragma once

#include "flare/dataset.hpp"
#include "flare/decision_tree.hpp"
#include "flare/llm_ops.hpp"
#include "flare/logistic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flare {

/// Logistic-regression baseline over the encoded survey features,
/// standardized with training-partition statistics. Single-class training
/// data degrades to a constant predictor (flagged, not fatal).
struct LogisticBaseline {
    LogisticModel model;
    EncodingStats stats;
    std::vector<double> center;  // standardization, per feature
    std::vector<double> scale;
    bool degenerate = false;
    DecisionValue constant_value = DecisionValue::Stay;
};

LogisticBaseline fit_logistic_baseline(const Dataset& train, const LogisticConfig& config = {});
std::vector<DecisionValue> predict_logistic_baseline(const LogisticBaseline& baseline,
                                                     const Dataset& test);

struct TreeBaseline {
    DecisionTree tree;
    EncodingStats stats;
};

TreeBaseline fit_tree_baseline(const Dataset& train, const TreeConfig& config = {});
std::vector<DecisionValue> predict_tree_baseline(const TreeBaseline& baseline,
                                                 const Dataset& test);

struct ForestBaseline {
    RandomForest forest;
    EncodingStats stats;
};

ForestBaseline fit_forest_baseline(const Dataset& train, std::size_t n_trees, std::uint64_t seed,
                                   const TreeConfig& config = {});
std::vector<DecisionValue> predict_forest_baseline(const ForestBaseline& baseline,
                                                   const Dataset& test);

/// Direct inference: one prompt holding every survey answer except the
/// decision itself — no perceptions, no examples, no reasoning scaffold.
Decision direct_llm_baseline(const SurveyRecord& record, const SurveySchema& schema,
                             const CoTTemplate& direct_template, LlmClient& llm,
                             const std::string& request_id);

}  // namespace flare
