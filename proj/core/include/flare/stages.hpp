#pragma once

#include "flare/config.hpp"
#include "flare/pipeline.hpp"

#include <map>
#include <string>
#include <vector>

namespace flare {

struct LedgerEntry {
    std::string path;  // relative to the output directory
    std::string config_hash;
    std::string written_at;
};

/// Per-output-directory record of which stage wrote what under which config.
/// Later stages look their inputs up here; a missing entry is a stage-order
/// violation, not a filesystem accident.
struct RunLedger {
    std::string config_hash;
    std::string stub_transcript_hash;
    std::map<std::string, LedgerEntry> artifacts;

    static RunLedger load(const std::string& out_dir);  // absent file -> empty ledger
    void save(const std::string& out_dir) const;
};

struct StageResult {
    std::vector<std::string> written;  // artifact names, in write order
    std::string message;
};

// --- artifact formats, shared with tooling and tests ---

std::string weights_to_json(const std::vector<WeightVector>& weights,
                            const std::string& config_hash, RegressionFamily family,
                            double reg_strength);
std::vector<WeightVector> weights_from_json(const std::string& text);

std::string subsets_to_json(const std::vector<VariableSubset>& subsets,
                            const std::string& config_hash, const std::string& theta_mode);
std::vector<VariableSubset> subsets_from_json(const std::string& text);

std::string trial_reports_to_jsonl(const std::vector<PatternTrialReport>& reports,
                                   const std::string& config_hash);
std::vector<PatternTrialReport> trial_reports_from_jsonl(const std::string& text);

struct PredictionRow {
    std::string record_id;
    bool failed = false;
    std::string error_text;
    DecisionValue predicted = DecisionValue::Stay;
    DecisionValue actual = DecisionValue::Stay;
    int pattern_id = 0;
    int threat_raw = 0;
    int threat_calibrated = 0;
    int risk_raw = 0;
    int risk_calibrated = 0;
    std::vector<std::int64_t> retrieved_ids;
    std::string rationale_text;
};

std::string predictions_to_jsonl(const std::vector<PredictionRow>& rows,
                                 const std::string& config_hash);
std::vector<PredictionRow> predictions_from_jsonl(const std::string& text);

// --- stages ---

StageResult stage_ingest(const RunConfig& cfg);
StageResult stage_select_vars(const RunConfig& cfg);
StageResult stage_label_patterns(const RunConfig& cfg);
StageResult stage_train_classifier(const RunConfig& cfg);
StageResult stage_build_kb(const RunConfig& cfg);
StageResult stage_train_memory(const RunConfig& cfg);
StageResult stage_predict(const RunConfig& cfg);
StageResult stage_evaluate(const RunConfig& cfg);
StageResult stage_cross_eval(const RunConfig& cfg);
StageResult stage_ablate(const RunConfig& cfg);
StageResult stage_compact_memory(const RunConfig& cfg);

/// Dispatches one CLI command name to its stage.
StageResult run_stage(const std::string& command, const RunConfig& cfg);

/// The command names run_stage accepts, in pipeline order.
const std::vector<std::string>& stage_names();

}  // namespace flare
