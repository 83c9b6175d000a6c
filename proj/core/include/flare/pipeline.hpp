#pragma once

#include "flare/config.hpp"
#include "flare/cot.hpp"
#include "flare/memory.hpp"
#include "flare/metrics.hpp"
#include "flare/perception.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flare {

/// Everything a per-record prediction needs once the training artifacts
/// exist. Stages load the artifacts and hand this around by reference.
struct PipelineContext {
    SurveySchema schema;
    EncodingStats stats;  // training-partition feature statistics
    std::vector<ReasoningPattern> patterns;
    PatternClassifier classifier;
    KnowledgeBase kb;
    CoTTemplate threat_template;
    CoTTemplate risk_template;
    CoTTemplate decision_template;         // step-by-step reasoning preamble
    CoTTemplate decision_direct_template;  // same blocks, no reasoning scaffold
    CoTTemplate reflection_template;
    AblationFlags ablation;
    std::size_t k = 2;
    std::vector<std::string> user_inputs;

    const CoTTemplate& active_decision_template() const {
        return ablation.no_cot ? decision_direct_template : decision_template;
    }
};

/// Variables of the pattern's two subsets, deduplicated, in schema order.
std::vector<std::string> pattern_union_vars(const ReasoningPattern& pattern,
                                            const SurveySchema& schema);

/// "name: answer" lines for the given variables — the memory-key text. Uses
/// variable names (not question wording) so keys survive template edits.
std::string render_key_text(const SurveyRecord& record, const SurveySchema& schema,
                            const std::vector<std::string>& variables);

/// {Risk} slot content: the risk summary followed by both perception scores.
std::string render_risk_block(const PerceptionResult& threat, const PerceptionResult& risk);

/// {Risk} slot content when perception inference is ablated: the raw survey
/// answers behind the pattern's two subsets.
std::string render_risk_block_no_perception(const SurveyRecord& record,
                                            const SurveySchema& schema,
                                            const ReasoningPattern& pattern);

struct RecordOutcome {
    std::string record_id;
    bool failed = false;
    std::string error_text;
    DecisionValue predicted = DecisionValue::Stay;
    int pattern_id = 0;
    PerceptionResult threat;  // empty when perception is ablated
    PerceptionResult risk;
    std::vector<std::int64_t> retrieved_ids;
    std::string rationale_text;
    CoTInstance cot;
};

/// Full single-record pass: classify the reasoning pattern, infer and
/// calibrate both perceptions, retrieve similar memories, assemble the
/// prompt, query the decision. Throws on LLM trouble — callers own the
/// per-record failure policy.
RecordOutcome run_record(const PipelineContext& ctx, const SurveyRecord& record,
                         const MemoryStore& memory, LlmClient& llm,
                         const std::string& id_prefix);

/// Per-pattern success rates for one training record: perceptions are
/// inferred once per pattern, then `trials` decision queries are scored
/// against the recorded decision. A reply that stays ambiguous after the
/// retry counts as a failed trial.
PatternTrialReport estimate_pattern_success(const PipelineContext& ctx,
                                            const SurveyRecord& record, std::size_t trials,
                                            LlmClient& llm);

/// Self-reflection text for a logged error.
std::string reflect(const PipelineContext& ctx, const MemoryEntry& entry, LlmClient& llm,
                    const std::string& request_id);

struct TrainOutcome {
    std::string record_id;
    bool failed = false;
    std::string error_text;
    DecisionValue predicted = DecisionValue::Stay;
    DecisionValue actual = DecisionValue::Stay;
    bool correct = false;
    int pattern_id = 0;
    PerceptionResult threat;
    PerceptionResult risk;
    std::vector<std::int64_t> retrieved_ids;
    std::optional<std::int64_t> memory_entry_id;  // set when an error was logged
};

/// One sequential pass over the training partition: predict each record,
/// log every miss into the store with a self-reflection. LLM failures mark
/// the record failed and the epoch continues.
std::vector<TrainOutcome> train_epoch(const PipelineContext& ctx, const Dataset& train,
                                      MemoryStore& memory, LlmClient& llm,
                                      const std::string& id_prefix);

/// Fan-out prediction over a partition with at most `concurrency` records in
/// flight; results keep dataset order. Record-scoped LLM failures are
/// captured as failed outcomes; anything else propagates.
std::vector<RecordOutcome> predict_partition(const PipelineContext& ctx, const Dataset& test,
                                             const MemoryStore& memory, LlmClient& llm,
                                             std::size_t concurrency,
                                             const std::string& id_prefix);

}  // namespace flare
