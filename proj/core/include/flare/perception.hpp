#pragma once

#include "flare/llm_ops.hpp"
#include "flare/patterns.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace flare {

struct PerceptionResult {
    PerceptionIndicator indicator;
    std::string text;
    int raw_score = 0;
    int calibrated_score = 0;
    std::vector<std::int64_t> retrieved_ids;
};

struct CalibrationEntry {
    std::int64_t entry_id = 0;
    std::string perception_text;
    linalg::Vector embedding;
    int survey_score = 0;  // 1..5, read from the indicator's survey answer
};

struct KnowledgeBase {
    std::string provider_id;
    std::size_t embed_dim = 0;
    std::vector<CalibrationEntry> entries;
};

/// "question: answer" lines for the given variables, in schema order. Every
/// variable appears; unanswered ones read "(no answer)".
std::string render_survey_block(const SurveyRecord& record, const SurveySchema& schema,
                                const std::vector<std::string>& variables);

/// Threat assessment: renders the threat template over the pattern's
/// threat-subset answers and parses a scored reply. calibrated_score starts
/// equal to raw_score until calibrate_score runs.
PerceptionResult infer_threat(const SurveyRecord& record, const ReasoningPattern& pattern,
                              const SurveySchema& schema, const CoTTemplate& threat_template,
                              LlmClient& llm, const std::string& request_id);

/// Risk perception, conditioned on the threat result (two-stage order).
/// Throws StageOrderViolation when the threat result is empty.
PerceptionResult infer_risk(const SurveyRecord& record, const ReasoningPattern& pattern,
                            const PerceptionResult& threat, const SurveySchema& schema,
                            const CoTTemplate& risk_template, LlmClient& llm,
                            const std::string& request_id);

/// Top-2 cosine retrieval over the knowledge base (ties by entry_id), then
/// round-half-up mean of the raw and retrieved scores, clamped to [1,5]. An
/// empty knowledge base leaves the raw score unchanged.
std::pair<int, std::vector<std::int64_t>> calibrate_raw(const std::string& text, int raw_score,
                                                        const KnowledgeBase& kb,
                                                        LlmClient& embedder);

void calibrate_score(PerceptionResult& result, const KnowledgeBase& kb, LlmClient& embedder);

/// One calibration entry per (record, indicator) over the partition in
/// stored order, using each record's assigned pattern's two indicators.
/// Records missing an indicator's survey answer are skipped for that
/// indicator only.
KnowledgeBase build_knowledge_base(const Dataset& first70,
                                   const std::map<std::string, int>& pattern_of_record,
                                   const std::vector<ReasoningPattern>& patterns,
                                   const CoTTemplate& threat_template,
                                   const CoTTemplate& risk_template, LlmClient& llm);

std::string kb_to_json(const KnowledgeBase& kb, const std::string& config_hash);
KnowledgeBase kb_from_json(const std::string& text);

}  // namespace flare
