#include "flare/cot.hpp"

#include "flare/errors.hpp"
#include "flare/util.hpp"

#include <algorithm>
#include <cctype>

namespace flare {

namespace {

constexpr const char* kSystemMarker = "--- system ---";
constexpr const char* kUserMarker = "--- user ---";

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    lines.push_back(current);
    return lines;
}

std::string join_lines(const std::vector<std::string>& lines, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) out.push_back('\n');
        out += lines[i];
    }
    return out;
}

bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<std::string> find_placeholders(const std::string& text) {
    std::vector<std::string> names;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && is_name_char(text[j])) ++j;
        if (j > i + 1 && j < text.size() && text[j] == '}') {
            names.push_back(text.substr(i + 1, j - i - 1));
            i = j + 1;
        } else {
            ++i;
        }
    }
    return names;
}

CoTTemplate parse_template(const std::string& file_text) {
    const std::vector<std::string> lines = split_lines(file_text);
    std::size_t system_at = lines.size();
    std::size_t user_at = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i] == kSystemMarker && system_at == lines.size()) system_at = i;
        if (lines[i] == kUserMarker && user_at == lines.size()) user_at = i;
    }
    if (system_at >= user_at || user_at == lines.size())
        throw ConfigInvalid("template needs '--- system ---' then '--- user ---' sections");

    CoTTemplate tmpl;
    for (std::size_t i = 0; i < system_at; ++i) {
        const std::string line = util::trim(lines[i]);
        if (line.empty()) continue;
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos)
            throw ConfigInvalid("template front matter line lacks ':': " + line);
        const std::string key = util::trim(line.substr(0, colon));
        const std::string value = util::trim(line.substr(colon + 1));
        if (key == "template_id") {
            tmpl.template_id = value;
        } else if (key == "placeholders") {
            std::string name;
            for (char c : value + ",") {
                if (c == ',') {
                    const std::string trimmed = util::trim(name);
                    if (!trimmed.empty()) tmpl.placeholders.push_back(trimmed);
                    name.clear();
                } else {
                    name.push_back(c);
                }
            }
        } else {
            throw ConfigInvalid("unknown template front matter key '" + key + "'");
        }
    }
    if (tmpl.template_id.empty()) throw ConfigInvalid("template lacks a template_id");

    std::size_t user_end = lines.size();
    if (user_end > user_at + 1 && lines.back().empty()) --user_end;  // file's final newline
    tmpl.system_text = join_lines(lines, system_at + 1, user_at);
    tmpl.user_text = join_lines(lines, user_at + 1, user_end);

    std::vector<std::string> used = find_placeholders(tmpl.system_text);
    const std::vector<std::string> in_user = find_placeholders(tmpl.user_text);
    used.insert(used.end(), in_user.begin(), in_user.end());
    for (const std::string& name : used) {
        if (std::find(tmpl.placeholders.begin(), tmpl.placeholders.end(), name) ==
            tmpl.placeholders.end())
            throw UnknownPlaceholder(name);
    }
    for (const std::string& name : tmpl.placeholders) {
        if (std::find(used.begin(), used.end(), name) == used.end())
            throw ConfigInvalid("declared placeholder {" + name + "} never occurs in template '" +
                                tmpl.template_id + "'");
    }
    return tmpl;
}

CoTTemplate load_template(const std::string& path) { return parse_template(util::read_file(path)); }

namespace {

std::string substitute(const std::string& text, const CoTTemplate& tmpl,
                       const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{') {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && is_name_char(text[j])) ++j;
        if (j > i + 1 && j < text.size() && text[j] == '}') {
            const std::string name = text.substr(i + 1, j - i - 1);
            if (std::find(tmpl.placeholders.begin(), tmpl.placeholders.end(), name) ==
                tmpl.placeholders.end())
                throw UnknownPlaceholder(name);
            const auto it = values.find(name);
            if (it == values.end() || it->second.empty()) throw MissingPlaceholderValue(name);
            out += it->second;
            i = j + 1;
        } else {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

}  // namespace

RenderedPrompt render_template(const CoTTemplate& tmpl,
                               const std::map<std::string, std::string>& values) {
    RenderedPrompt prompt;
    prompt.system_text = substitute(tmpl.system_text, tmpl, values);
    prompt.user_text = substitute(tmpl.user_text, tmpl, values);
    return prompt;
}

CoTInstance assemble_cot(const CoTTemplate& tmpl, const std::string& record_id,
                         const std::string& risk_block, const std::string& examples_block,
                         const std::string& extras_block) {
    const RenderedPrompt prompt = render_template(tmpl, {{"Examples", examples_block},
                                                         {"Risk", risk_block},
                                                         {"Extras", extras_block}});
    CoTInstance instance;
    instance.record_id = record_id;
    instance.rendered_system = prompt.system_text;
    instance.rendered_user = prompt.user_text;
    instance.risk_block = risk_block;
    instance.examples_block = examples_block;
    instance.extras_block = extras_block;
    return instance;
}

std::string render_extras_block(const std::vector<std::string>& context_notes,
                                const std::vector<std::string>& user_inputs) {
    std::string out;
    for (const std::string& note : context_notes) {
        if (!out.empty()) out.push_back('\n');
        out += note;
    }
    for (const std::string& input : user_inputs) {
        if (!out.empty()) out.push_back('\n');
        out += input;
    }
    return out.empty() ? "None" : out;
}

namespace {

/// Counts standalone case-insensitive occurrences of `word` in `text`.
std::size_t count_standalone(const std::string& text, const std::string& word) {
    std::size_t count = 0;
    const std::string lower = util::to_lower(text);
    std::size_t pos = 0;
    while ((pos = lower.find(word, pos)) != std::string::npos) {
        const bool left_ok =
            pos == 0 || !std::isalnum(static_cast<unsigned char>(lower[pos - 1]));
        const std::size_t end = pos + word.size();
        const bool right_ok =
            end >= lower.size() || !std::isalnum(static_cast<unsigned char>(lower[end]));
        if (left_ok && right_ok) ++count;
        pos = end;
    }
    return count;
}

}  // namespace

Decision parse_decision(const std::string& response_text) {
    if (response_text.empty()) throw EmptyInput("response");
    const std::string tail =
        response_text.size() > 200 ? response_text.substr(response_text.size() - 200)
                                   : response_text;
    const std::size_t yes = count_standalone(tail, "yes");
    const std::size_t no = count_standalone(tail, "no");
    if ((yes > 0) == (no > 0)) throw AmbiguousDecision(tail.substr(0, 120));
    Decision decision;
    decision.value = yes > 0 ? DecisionValue::Evacuate : DecisionValue::Stay;
    decision.rationale_text = response_text;
    return decision;
}

}  // namespace flare
