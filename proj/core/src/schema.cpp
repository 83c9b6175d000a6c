#include "flare/schema.hpp"

#include "flare/errors.hpp"
#include "flare/util.hpp"
#include "flare/variable_selection.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace flare {

std::string kind_name(VariableKind kind) {
    switch (kind) {
        case VariableKind::Binary: return "binary";
        case VariableKind::Ordinal: return "ordinal";
        case VariableKind::Categorical: return "categorical";
        case VariableKind::Count: return "count";
        case VariableKind::FreeText: return "free_text";
    }
    throw Error("unreachable variable kind");
}

VariableKind kind_from_name(std::string_view name) {
    if (name == "binary") return VariableKind::Binary;
    if (name == "ordinal") return VariableKind::Ordinal;
    if (name == "categorical") return VariableKind::Categorical;
    if (name == "count") return VariableKind::Count;
    if (name == "free_text") return VariableKind::FreeText;
    throw ConfigInvalid("unknown variable kind '" + std::string(name) + "'");
}

bool VariableSpec::has_tag(std::string_view tag) const {
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

const VariableSpec* SurveySchema::find(std::string_view name) const {
    for (const VariableSpec& v : variables) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

std::size_t SurveySchema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (variables[i].name == name) return i;
    }
    throw MissingColumn(std::string(name));
}

std::vector<std::string> SurveySchema::feature_names() const {
    std::vector<std::string> names;
    for (const VariableSpec& v : variables) {
        if (v.kind == VariableKind::FreeText) continue;
        if (v.name == decision_column) continue;
        names.push_back(v.name);
    }
    return names;
}

std::string SurveySchema::indicator_source(std::string_view indicator) const {
    for (const VariableSpec& v : variables) {
        if (v.indicator == indicator) return v.name;
    }
    throw ConfigInvalid("schema declares no source variable for indicator '" +
                        std::string(indicator) + "'");
}

SurveySchema parse_schema(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("schema is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigInvalid("schema root must be an object");

    SurveySchema schema;
    try {
        schema.event_name = doc.at("event_name").get<std::string>();
        schema.decision_column = doc.at("decision_column").get<std::string>();
        if (!doc.at("variables").is_array()) throw ConfigInvalid("'variables' must be an array");
        for (const nlohmann::json& item : doc.at("variables")) {
            VariableSpec spec;
            spec.name = item.at("name").get<std::string>();
            spec.kind = kind_from_name(item.at("kind").get<std::string>());
            if (spec.kind == VariableKind::Ordinal) {
                spec.min = item.at("min").get<int>();
                spec.max = item.at("max").get<int>();
                if (spec.min >= spec.max)
                    throw ConfigInvalid("ordinal variable '" + spec.name + "' needs min < max");
            }
            if (spec.kind == VariableKind::Categorical) {
                for (const nlohmann::json& level : item.at("levels"))
                    spec.levels.push_back(level.get<std::string>());
                if (spec.levels.empty())
                    throw ConfigInvalid("categorical variable '" + spec.name + "' has no levels");
            }
            if (item.contains("question")) spec.question = item.at("question").get<std::string>();
            if (item.contains("tags")) {
                for (const nlohmann::json& tag : item.at("tags"))
                    spec.tags.push_back(tag.get<std::string>());
            }
            if (item.contains("indicator")) {
                spec.indicator = item.at("indicator").get<std::string>();
                if (spec.kind != VariableKind::Ordinal || spec.min != 1 || spec.max != 5)
                    throw ConfigInvalid("indicator variable '" + spec.name +
                                        "' must be ordinal with range 1..5");
            }
            schema.variables.push_back(std::move(spec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("schema structure: ") + e.what());
    }

    if (schema.variables.empty()) throw ConfigInvalid("schema declares no variables");
    std::set<std::string> seen;
    for (const VariableSpec& v : schema.variables) {
        if (!seen.insert(v.name).second)
            throw ConfigInvalid("duplicate variable name '" + v.name + "'");
    }
    std::set<std::string> indicators;
    for (const VariableSpec& v : schema.variables) {
        if (v.indicator.empty()) continue;
        indicator_from_name(v.indicator);  // rejects unknown indicator names
        if (!indicators.insert(v.indicator).second)
            throw ConfigInvalid("indicator '" + v.indicator +
                                "' is claimed by more than one variable");
    }
    const VariableSpec* decision = schema.find(schema.decision_column);
    if (decision == nullptr)
        throw ConfigInvalid("decision_column '" + schema.decision_column +
                            "' is not a declared variable");
    if (decision->kind != VariableKind::Binary)
        throw ConfigInvalid("decision_column '" + schema.decision_column + "' must be binary");
    return schema;
}

SurveySchema load_schema(const std::string& path) {
    return parse_schema(util::read_file(path));
}

}  // namespace flare
