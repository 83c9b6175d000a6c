#include "flare/llm_ops.hpp"

#include "flare/errors.hpp"
#include "flare/util.hpp"

#include <cctype>

namespace flare {

std::optional<ScoredText> parse_score(const std::string& response_text) {
    const std::string lower = util::to_lower(response_text);
    std::size_t best = std::string::npos;
    int best_score = 0;
    std::size_t pos = 0;
    while ((pos = lower.find("score:", pos)) != std::string::npos) {
        std::size_t cursor = pos + 6;
        while (cursor < lower.size() && (lower[cursor] == ' ' || lower[cursor] == '\t')) ++cursor;
        if (cursor < lower.size() && lower[cursor] >= '1' && lower[cursor] <= '5') {
            const bool bounded = cursor + 1 >= lower.size() ||
                                 !std::isdigit(static_cast<unsigned char>(lower[cursor + 1]));
            if (bounded) {
                best = pos;
                best_score = lower[cursor] - '0';
            }
        }
        pos += 6;
    }
    if (best == std::string::npos) return std::nullopt;

    // Drop the marker through the end of its line, keeping any prose that
    // precedes it on the same line.
    std::size_t line_end = response_text.find('\n', best);
    line_end = line_end == std::string::npos ? response_text.size() : line_end + 1;
    std::string text = response_text.substr(0, best) + response_text.substr(line_end);
    while (!text.empty() &&
           (text.back() == '\n' || text.back() == ' ' || text.back() == '\t'))
        text.pop_back();

    return ScoredText{text, best_score};
}

ScoredText query_scored(LlmClient& llm, const RenderedPrompt& prompt,
                        const std::string& request_id) {
    ChatRequest request;
    request.system_text = prompt.system_text;
    request.user_text = prompt.user_text;
    request.request_id = request_id;
    const ChatResponse first = llm.complete(request);
    if (std::optional<ScoredText> scored = parse_score(first.content)) return *scored;

    request.user_text += "\n\nYour previous reply lacked the required score line. Conclude with "
                         "\"Score: N\" where N is an integer from 1 to 5.";
    request.request_id = request_id + "/retry";
    const ChatResponse second = llm.complete(request);
    if (std::optional<ScoredText> scored = parse_score(second.content)) return *scored;
    const std::string& tail =
        second.content.size() > 80 ? second.content.substr(second.content.size() - 80)
                                   : second.content;
    throw ScoreParseFailure(tail);
}

Decision query_decision(LlmClient& llm, const RenderedPrompt& prompt,
                        const std::string& request_id) {
    ChatRequest request;
    request.system_text = prompt.system_text;
    request.user_text = prompt.user_text;
    request.request_id = request_id;
    const ChatResponse first = llm.complete(request);
    try {
        return parse_decision(first.content);
    } catch (const AmbiguousDecision&) {
        request.user_text += "\n\nYour previous reply was ambiguous; answer only YES or NO.";
        request.request_id = request_id + "/retry";
        const ChatResponse second = llm.complete(request);
        return parse_decision(second.content);
    }
}

}  // namespace flare
