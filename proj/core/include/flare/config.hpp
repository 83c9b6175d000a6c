#pragma once

#include "flare/llm_client.hpp"
#include "flare/patterns.hpp"
#include "flare/variable_selection.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flare {

struct AblationFlags {
    bool no_cot = false;
    bool no_rl = false;
    bool no_perception = false;

    /// Report row label: "FLARE", "FLARE w/o RL", "FLARE w/o CoT and RL", ...
    std::string label() const;
    /// Directory-safe slug: "full", "no_rl", "no_cot_no_rl", ...
    std::string slug() const;
};

enum class ThetaMode { Elbow, Fixed, All };

struct ThetaConfig {
    ThetaMode mode = ThetaMode::Elbow;
    double value = 0.0;  // Fixed mode only
};

struct RunConfig {
    std::string dataset_path;
    std::string schema_path;
    std::string cross_dataset_path;  // cross-eval test event
    std::string cross_schema_path;
    std::string out_dir = "out";
    std::string templates_dir;

    std::uint64_t seed = 7;
    double train_frac = 0.8;
    double kb_frac = 0.7;
    ThetaConfig theta;
    std::size_t trials = 5;
    std::size_t k = 2;
    std::size_t epochs = 1;
    double reg_strength = 1e-3;
    RegressionFamily family = RegressionFamily::Ridge;
    ClassifierKind classifier = ClassifierKind::Tree;
    std::size_t n_trees = 15;
    AblationFlags ablation;
    std::vector<std::string> user_inputs;
    bool heatmap_svg = false;
    bool with_baselines = true;
    bool direct_baseline = false;  // needs LLM budget, so opt-in
    LlmConfig llm;

    /// Throws ConfigInvalid on inconsistent values or missing files.
    void validate() const;

    /// Hash of everything that shapes training artifacts: input file
    /// contents, split/selection/loop parameters, provider identity. Output
    /// locations never contribute, so equal configs in different directories
    /// produce byte-identical artifacts. Cross-event test inputs never
    /// contribute either: training provenance derives from training data
    /// alone.
    std::string config_hash() const;

    /// Provenance hash for cross-event test-phase artifacts: config_hash
    /// extended with the cross dataset and schema contents.
    std::string cross_hash() const;
};

/// Parses the run-config JSON; relative paths resolve against base_dir.
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir);
RunConfig load_run_config(const std::string& path);

/// Parses a --theta flag value ("elbow", "all", or a number).
ThetaConfig theta_from_flag(const std::string& text);

}  // namespace flare
