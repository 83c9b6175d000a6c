#include "flare/patterns.hpp"

#include "flare/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace flare {

std::vector<ReasoningPattern> enumerate_patterns(const std::vector<VariableSubset>& subsets) {
    const VariableSubset* by_kind[4] = {nullptr, nullptr, nullptr, nullptr};
    for (const VariableSubset& subset : subsets) {
        const auto slot = static_cast<std::size_t>(subset.indicator.kind);
        if (by_kind[slot] != nullptr)
            throw ConfigInvalid("duplicate subset for indicator " +
                                indicator_name(subset.indicator.kind));
        by_kind[slot] = &subset;
    }
    for (IndicatorKind kind : {IndicatorKind::ThreatInjury, IndicatorKind::ThreatDeath,
                               IndicatorKind::RiskHome, IndicatorKind::RiskNeighborhood}) {
        if (by_kind[static_cast<std::size_t>(kind)] == nullptr)
            throw MissingSubset(indicator_name(kind));
    }

    const VariableSubset& injury = *by_kind[static_cast<std::size_t>(IndicatorKind::ThreatInjury)];
    const VariableSubset& death = *by_kind[static_cast<std::size_t>(IndicatorKind::ThreatDeath)];
    const VariableSubset& home = *by_kind[static_cast<std::size_t>(IndicatorKind::RiskHome)];
    const VariableSubset& hood =
        *by_kind[static_cast<std::size_t>(IndicatorKind::RiskNeighborhood)];

    std::vector<ReasoningPattern> patterns(4);
    patterns[0] = {0, injury, home};
    patterns[1] = {1, injury, hood};
    patterns[2] = {2, death, home};
    patterns[3] = {3, death, hood};
    return patterns;
}

PatternLabel label_most_probable(const std::array<double, 4>& rates) {
    PatternLabel label;
    double best = rates[0];
    for (int i = 1; i < 4; ++i) {
        if (rates[static_cast<std::size_t>(i)] > best) {
            best = rates[static_cast<std::size_t>(i)];
            label.id = i;
        }
    }
    label.low_confidence = best <= 0.0;
    return label;
}

int PatternClassifier::classify(const linalg::Vector& features) const {
    return kind == ClassifierKind::Tree ? tree.predict(features) : forest.predict(features);
}

PatternClassifier train_pattern_classifier(const linalg::Matrix& features,
                                           const std::vector<int>& labels,
                                           const std::vector<std::string>& feature_names,
                                           const ClassifierConfig& config) {
    if (features.empty()) throw EmptyTrainingSet();
    if (features.size() != labels.size()) throw LengthMismatch(features.size(), labels.size());
    for (const linalg::Vector& row : features) {
        if (row.size() != feature_names.size())
            throw DimensionMismatch(feature_names.size(), row.size());
    }
    for (int label : labels) {
        if (label < 0 || label > 3) throw ConfigInvalid("pattern labels must lie in 0..3");
    }

    PatternClassifier classifier;
    classifier.feature_names = feature_names;
    classifier.kind = config.kind;
    if (config.kind == ClassifierKind::Tree) {
        classifier.tree = fit_tree(features, labels, config.tree);
    } else {
        classifier.forest = fit_forest(features, labels, config.n_trees, config.seed, config.tree);
    }
    return classifier;
}

std::string classifier_to_json(const PatternClassifier& classifier) {
    nlohmann::json doc = {
        {"v", 1},
        {"kind", classifier.kind == ClassifierKind::Tree ? "tree" : "forest"},
        {"feature_names", classifier.feature_names},
    };
    if (classifier.kind == ClassifierKind::Tree) {
        doc["model"] = nlohmann::json::parse(tree_to_json(classifier.tree));
    } else {
        doc["model"] = nlohmann::json::parse(forest_to_json(classifier.forest));
    }
    return doc.dump(2) + "\n";
}

PatternClassifier classifier_from_json(const std::string& text) {
    try {
        const nlohmann::json doc = nlohmann::json::parse(text);
        if (doc.value("v", 0) != 1)
            throw ConfigInvalid("unsupported classifier serialization version");
        PatternClassifier classifier;
        classifier.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        const std::string kind = doc.at("kind").get<std::string>();
        const std::string model = doc.at("model").dump();
        if (kind == "tree") {
            classifier.kind = ClassifierKind::Tree;
            classifier.tree = tree_from_json(model);
        } else if (kind == "forest") {
            classifier.kind = ClassifierKind::Forest;
            classifier.forest = forest_from_json(model);
        } else {
            throw ConfigInvalid("unknown classifier kind '" + kind + "'");
        }
        return classifier;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("classifier serialization: ") + e.what());
    }
}

std::vector<std::string> classifier_feature_names(const SurveySchema& schema,
                                                  const std::vector<ReasoningPattern>& patterns) {
    std::set<std::string> wanted;
    for (const ReasoningPattern& pattern : patterns) {
        wanted.insert(pattern.threat_subset.selected.begin(),
                      pattern.threat_subset.selected.end());
        wanted.insert(pattern.risk_subset.selected.begin(), pattern.risk_subset.selected.end());
    }
    std::vector<std::string> names;
    for (const std::string& feature : schema.feature_names()) {
        const VariableSpec& spec = *schema.find(feature);
        if (wanted.count(feature) > 0 || spec.has_tag("socio_demographic") ||
            spec.has_tag("order_awareness"))
            names.push_back(feature);
    }
    return names;
}

linalg::Vector project_features(const FeatureVector& full, const SurveySchema& schema,
                                const std::vector<std::string>& names) {
    const std::vector<std::string> all = schema.feature_names();
    if (full.values.size() != all.size()) throw DimensionMismatch(all.size(), full.values.size());
    linalg::Vector out;
    out.reserve(names.size());
    for (const std::string& name : names) {
        const auto it = std::find(all.begin(), all.end(), name);
        if (it == all.end()) throw MissingColumn(name);
        out.push_back(full.values[static_cast<std::size_t>(it - all.begin())]);
    }
    return out;
}

}  // namespace flare
