#include "flare/config.hpp"

#include "flare/errors.hpp"
#include "flare/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>

namespace flare {

std::string AblationFlags::label() const {
    if (no_cot && no_rl) return "FLARE w/o CoT and RL";
    if (no_rl) return "FLARE w/o RL";
    if (no_cot) return "FLARE w/o CoT";
    if (no_perception) return "FLARE w/o perception";
    return "FLARE";
}

std::string AblationFlags::slug() const {
    if (no_cot && no_rl) return "no_cot_no_rl";
    if (no_rl) return "no_rl";
    if (no_cot) return "no_cot";
    if (no_perception) return "no_perception";
    return "full";
}

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& rel) {
    if (rel.empty()) return rel;
    std::filesystem::path p(rel);
    if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

ThetaConfig parse_theta(const nlohmann::json& value) {
    ThetaConfig theta;
    if (value.is_number()) {
        theta.mode = ThetaMode::Fixed;
        theta.value = value.get<double>();
        return theta;
    }
    if (value.is_string()) {
        const std::string text = util::to_lower(value.get<std::string>());
        if (text == "elbow") return theta;
        if (text == "all") {
            theta.mode = ThetaMode::All;
            return theta;
        }
        auto parsed = util::parse_double(text);
        if (parsed) {
            theta.mode = ThetaMode::Fixed;
            theta.value = *parsed;
            return theta;
        }
    }
    throw ConfigInvalid("theta must be \"elbow\", \"all\", or a number");
}

}  // namespace

ThetaConfig theta_from_flag(const std::string& text) {
    return parse_theta(nlohmann::json(text));
}

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("run config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigInvalid("run config must be a JSON object");

    RunConfig cfg;
    try {
        if (doc.contains("dataset")) cfg.dataset_path = resolve_path(base_dir, doc["dataset"].get<std::string>());
        if (doc.contains("schema")) cfg.schema_path = resolve_path(base_dir, doc["schema"].get<std::string>());
        if (doc.contains("cross_dataset"))
            cfg.cross_dataset_path = resolve_path(base_dir, doc["cross_dataset"].get<std::string>());
        if (doc.contains("cross_schema"))
            cfg.cross_schema_path = resolve_path(base_dir, doc["cross_schema"].get<std::string>());
        if (doc.contains("out_dir")) cfg.out_dir = resolve_path(base_dir, doc["out_dir"].get<std::string>());
        if (doc.contains("templates_dir"))
            cfg.templates_dir = resolve_path(base_dir, doc["templates_dir"].get<std::string>());
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("train_frac")) cfg.train_frac = doc["train_frac"].get<double>();
        if (doc.contains("kb_frac")) cfg.kb_frac = doc["kb_frac"].get<double>();
        if (doc.contains("theta")) cfg.theta = parse_theta(doc["theta"]);
        if (doc.contains("trials")) cfg.trials = doc["trials"].get<std::size_t>();
        if (doc.contains("k")) cfg.k = doc["k"].get<std::size_t>();
        if (doc.contains("epochs")) cfg.epochs = doc["epochs"].get<std::size_t>();
        if (doc.contains("reg_strength")) cfg.reg_strength = doc["reg_strength"].get<double>();
        if (doc.contains("regression_family")) {
            const std::string family = util::to_lower(doc["regression_family"].get<std::string>());
            if (family == "ridge") {
                cfg.family = RegressionFamily::Ridge;
            } else if (family == "logistic") {
                cfg.family = RegressionFamily::Logistic;
            } else {
                throw ConfigInvalid("regression_family must be \"ridge\" or \"logistic\"");
            }
        }
        if (doc.contains("classifier")) {
            const std::string kind = util::to_lower(doc["classifier"].get<std::string>());
            if (kind == "tree") {
                cfg.classifier = ClassifierKind::Tree;
            } else if (kind == "forest") {
                cfg.classifier = ClassifierKind::Forest;
            } else {
                throw ConfigInvalid("classifier must be \"tree\" or \"forest\"");
            }
        }
        if (doc.contains("n_trees")) cfg.n_trees = doc["n_trees"].get<std::size_t>();
        if (doc.contains("ablation")) {
            const auto& ab = doc["ablation"];
            if (!ab.is_object()) throw ConfigInvalid("ablation must be an object");
            if (ab.contains("no_cot")) cfg.ablation.no_cot = ab["no_cot"].get<bool>();
            if (ab.contains("no_rl")) cfg.ablation.no_rl = ab["no_rl"].get<bool>();
            if (ab.contains("no_perception")) cfg.ablation.no_perception = ab["no_perception"].get<bool>();
            if (ab.contains("no_cot_no_rl") && ab["no_cot_no_rl"].get<bool>()) {
                cfg.ablation.no_cot = true;
                cfg.ablation.no_rl = true;
            }
        }
        if (doc.contains("user_inputs")) {
            for (const auto& item : doc["user_inputs"]) cfg.user_inputs.push_back(item.get<std::string>());
        }
        if (doc.contains("heatmap_svg")) cfg.heatmap_svg = doc["heatmap_svg"].get<bool>();
        if (doc.contains("with_baselines")) cfg.with_baselines = doc["with_baselines"].get<bool>();
        if (doc.contains("direct_baseline")) cfg.direct_baseline = doc["direct_baseline"].get<bool>();
        if (doc.contains("llm")) {
            const auto& llm = doc["llm"];
            if (!llm.is_object()) throw ConfigInvalid("llm must be an object");
            if (llm.contains("provider")) {
                const std::string provider = util::to_lower(llm["provider"].get<std::string>());
                if (provider == "remote") {
                    cfg.llm.provider = ProviderKind::Remote;
                } else if (provider == "stub" || provider == "scripted-stub") {
                    cfg.llm.provider = ProviderKind::ScriptedStub;
                } else {
                    throw ConfigInvalid("llm.provider must be \"remote\" or \"stub\"");
                }
            }
            if (llm.contains("endpoint")) cfg.llm.endpoint = llm["endpoint"].get<std::string>();
            if (llm.contains("api_key_env")) cfg.llm.api_key_env = llm["api_key_env"].get<std::string>();
            if (llm.contains("model")) cfg.llm.model_name = llm["model"].get<std::string>();
            if (llm.contains("embed_model")) cfg.llm.embed_model_name = llm["embed_model"].get<std::string>();
            if (llm.contains("embed_dim")) cfg.llm.embed_dim = llm["embed_dim"].get<std::size_t>();
            if (llm.contains("max_attempts")) cfg.llm.retry.max_attempts = llm["max_attempts"].get<int>();
            if (llm.contains("base_backoff_ms"))
                cfg.llm.retry.base_backoff = std::chrono::milliseconds(llm["base_backoff_ms"].get<long>());
            if (llm.contains("concurrency")) cfg.llm.concurrency_bound = llm["concurrency"].get<std::size_t>();
            if (llm.contains("stub_transcript"))
                cfg.llm.stub_transcript_path = resolve_path(base_dir, llm["stub_transcript"].get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("run config field has wrong type: ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    const std::string text = util::read_file(path);
    return parse_run_config(text, std::filesystem::path(path).parent_path().string());
}

void RunConfig::validate() const {
    if (dataset_path.empty()) throw ConfigInvalid("dataset path is required");
    if (schema_path.empty()) throw ConfigInvalid("schema path is required");
    if (templates_dir.empty()) throw ConfigInvalid("templates_dir is required");
    if (out_dir.empty()) throw ConfigInvalid("out_dir is required");
    if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigInvalid("train_frac must lie in (0, 1)");
    if (!(kb_frac > 0.0 && kb_frac <= 1.0)) throw ConfigInvalid("kb_frac must lie in (0, 1]");
    if (theta.mode == ThetaMode::Fixed && !(theta.value > 0.0 && theta.value <= 1.0))
        throw ConfigInvalid("fixed theta must lie in (0, 1]");
    if (trials == 0) throw ZeroTrials();
    if (epochs == 0) throw ConfigInvalid("epochs must be at least 1");
    if (reg_strength < 0.0) throw ConfigInvalid("reg_strength must be non-negative");
    if (n_trees == 0) throw ConfigInvalid("n_trees must be at least 1");
    if (llm.retry.max_attempts < 1) throw ConfigInvalid("llm.max_attempts must be at least 1");
    if (llm.provider == ProviderKind::ScriptedStub && llm.stub_transcript_path.empty())
        throw ConfigInvalid("stub provider requires a stub_transcript path");
    if (!util::file_exists(dataset_path)) throw ConfigInvalid("dataset file not found: " + dataset_path);
    if (!util::file_exists(schema_path)) throw ConfigInvalid("schema file not found: " + schema_path);
    if (!cross_dataset_path.empty() && !util::file_exists(cross_dataset_path))
        throw ConfigInvalid("cross_dataset file not found: " + cross_dataset_path);
    if (!cross_schema_path.empty() && !util::file_exists(cross_schema_path))
        throw ConfigInvalid("cross_schema file not found: " + cross_schema_path);
    if (!llm.stub_transcript_path.empty() && !util::file_exists(llm.stub_transcript_path))
        throw ConfigInvalid("stub transcript not found: " + llm.stub_transcript_path);
}

namespace {

std::string content_hash(const std::string& path) {
    if (path.empty()) return "";
    return util::fnv1a_hex(util::read_file(path));
}

}  // namespace

std::string RunConfig::config_hash() const {
    nlohmann::json semantic;
    semantic["dataset"] = content_hash(dataset_path);
    semantic["schema"] = content_hash(schema_path);

    nlohmann::json templates = nlohmann::json::object();
    namespace fs = std::filesystem;
    if (!templates_dir.empty() && fs::is_directory(templates_dir)) {
        std::vector<std::string> names;
        for (const auto& entry : fs::directory_iterator(templates_dir)) {
            if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
        }
        std::sort(names.begin(), names.end());
        for (const auto& name : names) templates[name] = content_hash((fs::path(templates_dir) / name).string());
    }
    semantic["templates"] = templates;

    semantic["seed"] = seed;
    semantic["train_frac"] = train_frac;
    semantic["kb_frac"] = kb_frac;
    semantic["theta_mode"] =
        theta.mode == ThetaMode::Elbow ? "elbow" : (theta.mode == ThetaMode::All ? "all" : "fixed");
    semantic["theta_value"] = theta.value;
    semantic["trials"] = trials;
    semantic["k"] = k;
    semantic["epochs"] = epochs;
    semantic["reg_strength"] = reg_strength;
    semantic["regression_family"] = family == RegressionFamily::Ridge ? "ridge" : "logistic";
    semantic["classifier"] = classifier == ClassifierKind::Tree ? "tree" : "forest";
    semantic["n_trees"] = n_trees;
    semantic["no_cot"] = ablation.no_cot;
    semantic["no_rl"] = ablation.no_rl;
    semantic["no_perception"] = ablation.no_perception;
    semantic["user_inputs"] = user_inputs;
    semantic["provider"] = llm.provider == ProviderKind::Remote ? "remote" : "stub";
    semantic["model"] = llm.model_name;
    semantic["embed_model"] = llm.embed_model_name;
    semantic["embed_dim"] = llm.embed_dim;
    semantic["stub_transcript"] = content_hash(llm.stub_transcript_path);
    return util::fnv1a_hex(semantic.dump());
}

std::string RunConfig::cross_hash() const {
    nlohmann::json semantic;
    semantic["train"] = config_hash();
    semantic["cross_dataset"] = content_hash(cross_dataset_path);
    semantic["cross_schema"] = content_hash(cross_schema_path);
    return util::fnv1a_hex(semantic.dump());
}

}  // namespace flare
