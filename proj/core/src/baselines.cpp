#include "flare/baselines.hpp"

#include "flare/errors.hpp"
#include "flare/perception.hpp"

#include <cmath>

namespace flare {

namespace {

linalg::Matrix encode_all(const Dataset& dataset, const EncodingStats& stats) {
    linalg::Matrix x;
    x.reserve(dataset.size());
    for (const SurveyRecord& record : dataset.records)
        x.push_back(encode_record(record, dataset.schema, stats).values);
    return x;
}

std::vector<int> labels_of(const Dataset& dataset) {
    std::vector<int> y;
    y.reserve(dataset.size());
    for (const SurveyRecord& record : dataset.records)
        y.push_back(record.decision == DecisionValue::Evacuate ? 1 : 0);
    return y;
}

}  // namespace

LogisticBaseline fit_logistic_baseline(const Dataset& train, const LogisticConfig& config) {
    if (train.empty()) throw EmptyDataset();
    LogisticBaseline baseline;
    baseline.stats = compute_stats(train);
    linalg::Matrix x = encode_all(train, baseline.stats);
    const std::vector<int> y = labels_of(train);

    const std::size_t p = x.front().size();
    baseline.center.assign(p, 0.0);
    baseline.scale.assign(p, 1.0);
    for (std::size_t c = 0; c < p; ++c) {
        double mean = 0.0;
        for (const linalg::Vector& row : x) mean += row[c];
        mean /= static_cast<double>(x.size());
        double var = 0.0;
        for (const linalg::Vector& row : x) var += (row[c] - mean) * (row[c] - mean);
        var /= static_cast<double>(x.size());
        baseline.center[c] = mean;
        baseline.scale[c] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    for (linalg::Vector& row : x) {
        for (std::size_t c = 0; c < p; ++c) row[c] = (row[c] - baseline.center[c]) / baseline.scale[c];
    }

    bool any_pos = false;
    bool any_neg = false;
    for (int label : y) (label == 1 ? any_pos : any_neg) = true;
    if (!any_pos || !any_neg) {
        baseline.degenerate = true;
        baseline.constant_value = any_pos ? DecisionValue::Evacuate : DecisionValue::Stay;
        baseline.model.weights.assign(p, 0.0);
        return baseline;
    }

    baseline.model = fit_logistic(x, y, config);
    return baseline;
}

std::vector<DecisionValue> predict_logistic_baseline(const LogisticBaseline& baseline,
                                                     const Dataset& test) {
    std::vector<DecisionValue> out;
    out.reserve(test.size());
    for (const SurveyRecord& record : test.records) {
        if (baseline.degenerate) {
            out.push_back(baseline.constant_value);
            continue;
        }
        linalg::Vector features = encode_record(record, test.schema, baseline.stats).values;
        for (std::size_t c = 0; c < features.size(); ++c)
            features[c] = (features[c] - baseline.center[c]) / baseline.scale[c];
        const double p = predict_logistic_prob(baseline.model, features);
        out.push_back(p >= 0.5 ? DecisionValue::Evacuate : DecisionValue::Stay);
    }
    return out;
}

TreeBaseline fit_tree_baseline(const Dataset& train, const TreeConfig& config) {
    if (train.empty()) throw EmptyDataset();
    TreeBaseline baseline;
    baseline.stats = compute_stats(train);
    baseline.tree = fit_tree(encode_all(train, baseline.stats), labels_of(train), config);
    return baseline;
}

std::vector<DecisionValue> predict_tree_baseline(const TreeBaseline& baseline,
                                                 const Dataset& test) {
    std::vector<DecisionValue> out;
    out.reserve(test.size());
    for (const SurveyRecord& record : test.records) {
        const int label =
            baseline.tree.predict(encode_record(record, test.schema, baseline.stats).values);
        out.push_back(label == 1 ? DecisionValue::Evacuate : DecisionValue::Stay);
    }
    return out;
}

ForestBaseline fit_forest_baseline(const Dataset& train, std::size_t n_trees, std::uint64_t seed,
                                   const TreeConfig& config) {
    if (train.empty()) throw EmptyDataset();
    ForestBaseline baseline;
    baseline.stats = compute_stats(train);
    baseline.forest =
        fit_forest(encode_all(train, baseline.stats), labels_of(train), n_trees, seed, config);
    return baseline;
}

std::vector<DecisionValue> predict_forest_baseline(const ForestBaseline& baseline,
                                                   const Dataset& test) {
    std::vector<DecisionValue> out;
    out.reserve(test.size());
    for (const SurveyRecord& record : test.records) {
        const int label =
            baseline.forest.predict(encode_record(record, test.schema, baseline.stats).values);
        out.push_back(label == 1 ? DecisionValue::Evacuate : DecisionValue::Stay);
    }
    return out;
}

Decision direct_llm_baseline(const SurveyRecord& record, const SurveySchema& schema,
                             const CoTTemplate& direct_template, LlmClient& llm,
                             const std::string& request_id) {
    std::vector<std::string> variables;
    for (const VariableSpec& spec : schema.variables) {
        if (spec.name != schema.decision_column) variables.push_back(spec.name);
    }
    const RenderedPrompt prompt = render_template(
        direct_template, {{"Survey", render_survey_block(record, schema, variables)}});
    return query_decision(llm, prompt, request_id);
}

}  // namespace flare
