#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace flare {

enum class VariableKind { Binary, Ordinal, Categorical, Count, FreeText };

std::string kind_name(VariableKind kind);
VariableKind kind_from_name(std::string_view name);

struct VariableSpec {
    std::string name;
    VariableKind kind = VariableKind::Binary;
    int min = 0;  // ordinal lower bound
    int max = 0;  // ordinal upper bound
    std::vector<std::string> levels;  // categorical levels, order defines encoding
    std::string question;             // survey wording; falls back to name in prompts
    std::vector<std::string> tags;
    std::string indicator;  // perception indicator this variable measures, if any

    bool has_tag(std::string_view tag) const;
    const std::string& prompt_text() const { return question.empty() ? name : question; }
};

/// Ordered description of one survey instrument.
struct SurveySchema {
    std::string event_name;
    std::string decision_column;
    std::vector<VariableSpec> variables;

    const VariableSpec* find(std::string_view name) const;
    /// Index into `variables`; throws MissingColumn when absent.
    std::size_t index_of(std::string_view name) const;

    /// Variables that feed feature vectors: every non-free-text variable
    /// except the decision answer itself, in schema order. The decision is
    /// what the pipeline predicts, so it never appears as an input.
    std::vector<std::string> feature_names() const;

    /// Name of the variable declared as the source of the given perception
    /// indicator; throws ConfigInvalid when the schema declares none.
    std::string indicator_source(std::string_view indicator) const;
};

/// Parses the schema JSON document; throws ConfigInvalid on structural
/// problems (duplicate names, missing decision column, bad kinds/bounds).
SurveySchema parse_schema(const std::string& json_text);
SurveySchema load_schema(const std::string& path);

}  // namespace flare
