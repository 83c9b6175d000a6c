#pragma once

#include "flare/dataset.hpp"

#include <map>
#include <string>
#include <vector>

namespace flare {

/// A prompt template stored as a versioned text file:
///
///   template_id: decision_v1
///   placeholders: Examples, Risk, Extras
///   --- system ---
///   <system text>
///   --- user ---
///   <user text with {Name} slots>
///
/// Every {Name} slot must be declared and every declared name must occur.
struct CoTTemplate {
    std::string template_id;
    std::vector<std::string> placeholders;
    std::string system_text;
    std::string user_text;
};

CoTTemplate parse_template(const std::string& file_text);
CoTTemplate load_template(const std::string& path);

/// All {Name} occurrences in `text`, in order, duplicates preserved.
std::vector<std::string> find_placeholders(const std::string& text);

struct RenderedPrompt {
    std::string system_text;
    std::string user_text;
};

/// Single-pass substitution of {Name} slots; substituted values are not
/// rescanned. Throws MissingPlaceholderValue / UnknownPlaceholder.
RenderedPrompt render_template(const CoTTemplate& tmpl,
                               const std::map<std::string, std::string>& values);

/// The assembled per-record reasoning prompt plus the blocks it was built
/// from, kept for audits and memory entries.
struct CoTInstance {
    std::string record_id;
    std::string rendered_system;
    std::string rendered_user;
    std::string risk_block;
    std::string examples_block;
    std::string extras_block;
};

CoTInstance assemble_cot(const CoTTemplate& tmpl, const std::string& record_id,
                         const std::string& risk_block, const std::string& examples_block,
                         const std::string& extras_block);

/// Extras slot: the record's situational statements plus any run-level
/// inputs; "None" when empty.
std::string render_extras_block(const std::vector<std::string>& context_notes,
                                const std::vector<std::string>& user_inputs);

struct Decision {
    DecisionValue value = DecisionValue::Stay;
    std::string rationale_text;
};

/// Scans the last 200 characters for a standalone, case-insensitive YES or
/// NO. Exactly one side may appear (any number of times); both or neither
/// raise AmbiguousDecision.
Decision parse_decision(const std::string& response_text);

}  // namespace flare
