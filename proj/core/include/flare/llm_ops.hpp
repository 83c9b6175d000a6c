#pragma once

#include "flare/cot.hpp"
#include "flare/llm_client.hpp"

#include <optional>
#include <string>

namespace flare {

struct ScoredText {
    std::string text;  // response with the score line removed
    int score = 0;     // 1..5
};

/// Finds the last "Score: N" marker (case-insensitive, N in 1..5) and strips
/// its line from the text. nullopt when no marker exists.
std::optional<ScoredText> parse_score(const std::string& response_text);

/// Asks for a scored perception; when the reply lacks a score marker, retries
/// once with an appended format reminder, then throws ScoreParseFailure.
ScoredText query_scored(LlmClient& llm, const RenderedPrompt& prompt,
                        const std::string& request_id);

/// Asks for a YES/NO decision; on an ambiguous reply retries once with an
/// appended "answer only YES or NO" follow-up, then rethrows
/// AmbiguousDecision.
Decision query_decision(LlmClient& llm, const RenderedPrompt& prompt,
                        const std::string& request_id);

}  // namespace flare
