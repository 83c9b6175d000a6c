#include "flare/stages.hpp"

#include "flare/baselines.hpp"
#include "flare/errors.hpp"
#include "flare/util.hpp"

#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <memory>
#include <set>
#include <sstream>

namespace flare {

namespace {

std::string now_iso8601() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

/// One command at a time per output directory.
struct OutDirLock {
    explicit OutDirLock(const std::string& out_dir) : path(out_dir + "/.flare.lock") {
        std::filesystem::create_directories(out_dir);
        const int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0) {
            if (errno == EEXIST)
                throw ConfigInvalid("output directory is locked by another command (remove " +
                                    path + " if that command crashed)");
            throw Error("cannot create lock file " + path);
        }
        ::close(fd);
    }
    ~OutDirLock() { ::unlink(path.c_str()); }
    OutDirLock(const OutDirLock&) = delete;
    OutDirLock& operator=(const OutDirLock&) = delete;
    std::string path;
};

/// Ledger-aware artifact writing for one stage invocation.
struct StageIo {
    explicit StageIo(const RunConfig& cfg)
        : cfg(cfg), hash(cfg.config_hash()), lock(cfg.out_dir), ledger(RunLedger::load(cfg.out_dir)) {
        ledger.config_hash = hash;
        ledger.stub_transcript_hash = cfg.llm.stub_transcript_path.empty()
                                          ? ""
                                          : util::fnv1a_hex(util::read_file(cfg.llm.stub_transcript_path));
    }

    void write(const std::string& name, const std::string& content) {
        write_with_hash(name, content, hash);
    }

    void write_with_hash(const std::string& name, const std::string& content,
                         const std::string& producing_hash) {
        util::write_file(cfg.out_dir + "/" + name, content);
        ledger.artifacts[name] = LedgerEntry{name, producing_hash, now_iso8601()};
        result.written.push_back(name);
    }

    /// Path of an upstream artifact; MissingUpstreamArtifact names the stage
    /// that should have produced it.
    std::string require(const std::string& name, const std::string& stage) const {
        const auto it = ledger.artifacts.find(name);
        const std::string path = cfg.out_dir + "/" + name;
        if (it == ledger.artifacts.end() || !util::file_exists(path))
            throw MissingUpstreamArtifact(stage);
        return path;
    }

    StageResult finish(std::string message) {
        ledger.save(cfg.out_dir);
        result.message = std::move(message);
        return std::move(result);
    }

    const RunConfig& cfg;
    std::string hash;
    OutDirLock lock;
    RunLedger ledger;
    StageResult result;
};

struct Templates {
    CoTTemplate threat;
    CoTTemplate risk;
    CoTTemplate decision;
    CoTTemplate decision_direct;
    CoTTemplate reflection;
};

Templates load_templates_bundle(const std::string& dir) {
    Templates t;
    t.threat = load_template(dir + "/threat.txt");
    t.risk = load_template(dir + "/risk.txt");
    t.decision = load_template(dir + "/decision.txt");
    t.decision_direct = load_template(dir + "/decision_direct.txt");
    t.reflection = load_template(dir + "/reflection.txt");
    return t;
}

PipelineContext make_context(const RunConfig& cfg, SurveySchema schema, EncodingStats stats,
                             std::vector<ReasoningPattern> patterns, PatternClassifier classifier,
                             KnowledgeBase kb) {
    PipelineContext ctx;
    ctx.schema = std::move(schema);
    ctx.stats = std::move(stats);
    ctx.patterns = std::move(patterns);
    ctx.classifier = std::move(classifier);
    ctx.kb = std::move(kb);
    Templates t = load_templates_bundle(cfg.templates_dir);
    ctx.threat_template = std::move(t.threat);
    ctx.risk_template = std::move(t.risk);
    ctx.decision_template = std::move(t.decision);
    ctx.decision_direct_template = std::move(t.decision_direct);
    ctx.reflection_template = std::move(t.reflection);
    ctx.ablation = cfg.ablation;
    ctx.k = cfg.k;
    ctx.user_inputs = cfg.user_inputs;
    return ctx;
}

std::vector<PerceptionIndicator> schema_indicators(const SurveySchema& schema) {
    std::vector<PerceptionIndicator> indicators;
    for (const IndicatorKind kind :
         {IndicatorKind::ThreatInjury, IndicatorKind::ThreatDeath, IndicatorKind::RiskHome,
          IndicatorKind::RiskNeighborhood}) {
        indicators.push_back({kind, schema.indicator_source(indicator_name(kind))});
    }
    return indicators;
}

double theta_for(const RunConfig& cfg, const WeightVector& weights) {
    switch (cfg.theta.mode) {
        case ThetaMode::Elbow: return detect_elbow(weights);
        case ThetaMode::Fixed: return cfg.theta.value;
        case ThetaMode::All: return 1.0;
    }
    throw ConfigInvalid("unreachable theta mode");
}

std::string theta_mode_name(const ThetaConfig& theta) {
    switch (theta.mode) {
        case ThetaMode::Elbow: return "elbow";
        case ThetaMode::Fixed: return "fixed";
        case ThetaMode::All: return "all";
    }
    return "elbow";
}

/// Captured stub traffic from the given onsets, as audit JSONL. Concurrent
/// phases record requests in arrival order, which depends on thread
/// scheduling, so the snapshot is sorted (chats by request id, embeds by
/// text) to keep the artifact byte-stable across runs.
std::string requests_jsonl(const ScriptedStubClient& stub, std::size_t chat_from,
                           std::size_t embed_from, const std::string& config_hash) {
    nlohmann::json header = {{"v", 1}, {"config_hash", config_hash}};
    std::string out = header.dump() + "\n";
    const auto all_chats = stub.captured_requests();
    std::vector<ChatRequest> chats(all_chats.begin() + static_cast<std::ptrdiff_t>(chat_from),
                                   all_chats.end());
    std::sort(chats.begin(), chats.end(),
              [](const ChatRequest& a, const ChatRequest& b) { return a.request_id < b.request_id; });
    for (const auto& chat : chats) {
        nlohmann::json line = {{"kind", "chat"},
                               {"request_id", chat.request_id},
                               {"system", chat.system_text},
                               {"user", chat.user_text}};
        out += line.dump() + "\n";
    }
    const auto all_embeds = stub.captured_embed_texts();
    std::vector<std::string> embeds(all_embeds.begin() + static_cast<std::ptrdiff_t>(embed_from),
                                    all_embeds.end());
    std::sort(embeds.begin(), embeds.end());
    for (const auto& text : embeds) {
        nlohmann::json line = {{"kind", "embed"}, {"text", text}};
        out += line.dump() + "\n";
    }
    return out;
}

std::string train_outcomes_to_jsonl(const std::vector<TrainOutcome>& outcomes,
                                    const std::string& config_hash) {
    nlohmann::json header = {{"v", 1}, {"config_hash", config_hash}};
    std::string out = header.dump() + "\n";
    for (const TrainOutcome& o : outcomes) {
        nlohmann::json line = {{"record_id", o.record_id},
                               {"failed", o.failed},
                               {"error", o.error_text},
                               {"predicted", decision_name(o.predicted)},
                               {"actual", decision_name(o.actual)},
                               {"correct", o.correct},
                               {"pattern_id", o.pattern_id},
                               {"threat_raw", o.threat.raw_score},
                               {"threat_calibrated", o.threat.calibrated_score},
                               {"risk_raw", o.risk.raw_score},
                               {"risk_calibrated", o.risk.calibrated_score},
                               {"retrieved_ids", o.retrieved_ids}};
        if (o.memory_entry_id) {
            line["memory_entry_id"] = *o.memory_entry_id;
        } else {
            line["memory_entry_id"] = nullptr;
        }
        out += line.dump() + "\n";
    }
    return out;
}

std::vector<PredictionRow> rows_from_outcomes(const std::vector<RecordOutcome>& outcomes,
                                              const Dataset& test) {
    std::vector<PredictionRow> rows;
    rows.reserve(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const RecordOutcome& o = outcomes[i];
        PredictionRow row;
        row.record_id = o.record_id;
        row.failed = o.failed;
        row.error_text = o.error_text;
        row.predicted = o.predicted;
        row.actual = test.records[i].decision;
        row.pattern_id = o.pattern_id;
        row.threat_raw = o.threat.raw_score;
        row.threat_calibrated = o.threat.calibrated_score;
        row.risk_raw = o.risk.raw_score;
        row.risk_calibrated = o.risk.calibrated_score;
        row.retrieved_ids = o.retrieved_ids;
        row.rationale_text = o.rationale_text;
        rows.push_back(std::move(row));
    }
    return rows;
}

MetricsReport report_from_rows(const std::vector<PredictionRow>& rows) {
    std::vector<DecisionValue> predicted;
    std::vector<DecisionValue> actual;
    for (const PredictionRow& row : rows) {
        if (row.failed) continue;
        predicted.push_back(row.predicted);
        actual.push_back(row.actual);
    }
    return compute_metrics(predicted, actual);
}

std::size_t count_failed(const std::vector<PredictionRow>& rows) {
    std::size_t failed = 0;
    for (const PredictionRow& row : rows)
        if (row.failed) ++failed;
    return failed;
}

/// Survey score behind an indicator answer: 1..5, or 0 when missing/unusable.
int survey_score_of(const SurveyRecord& record, const std::string& variable) {
    const std::string* raw = record.answer(variable);
    if (raw == nullptr) return 0;
    const auto parsed = util::parse_long(*raw);
    if (!parsed || *parsed < 1 || *parsed > 5) return 0;
    return static_cast<int>(*parsed);
}

struct ScorePairs {
    std::vector<int> threat_predicted, threat_actual;
    std::vector<int> risk_predicted, risk_actual;

    std::optional<double> mse() const {
        std::vector<double> predicted, actual;
        for (std::size_t i = 0; i < threat_predicted.size(); ++i) {
            predicted.push_back(threat_predicted[i]);
            actual.push_back(threat_actual[i]);
        }
        for (std::size_t i = 0; i < risk_predicted.size(); ++i) {
            predicted.push_back(risk_predicted[i]);
            actual.push_back(risk_actual[i]);
        }
        if (predicted.empty()) return std::nullopt;
        return compute_mse(predicted, actual);
    }
};

ScorePairs collect_score_pairs(const std::vector<PredictionRow>& rows, const Dataset& test,
                               const std::vector<ReasoningPattern>& patterns) {
    std::map<std::string, const SurveyRecord*> by_id;
    for (const SurveyRecord& r : test.records) by_id[r.record_id] = &r;
    ScorePairs pairs;
    for (const PredictionRow& row : rows) {
        if (row.failed) continue;
        const auto it = by_id.find(row.record_id);
        if (it == by_id.end()) continue;
        if (row.pattern_id < 0 || static_cast<std::size_t>(row.pattern_id) >= patterns.size())
            continue;
        const ReasoningPattern& pattern = patterns[static_cast<std::size_t>(row.pattern_id)];
        if (row.threat_calibrated >= 1 && row.threat_calibrated <= 5) {
            const int actual = survey_score_of(*it->second, pattern.threat().source_variable);
            if (actual != 0) {
                pairs.threat_predicted.push_back(row.threat_calibrated);
                pairs.threat_actual.push_back(actual);
            }
        }
        if (row.risk_calibrated >= 1 && row.risk_calibrated <= 5) {
            const int actual = survey_score_of(*it->second, pattern.risk().source_variable);
            if (actual != 0) {
                pairs.risk_predicted.push_back(row.risk_calibrated);
                pairs.risk_actual.push_back(actual);
            }
        }
    }
    return pairs;
}

std::vector<ReportRow> baseline_rows(const Dataset& train, const Dataset& test,
                                     const RunConfig& cfg) {
    std::vector<DecisionValue> actual;
    for (const SurveyRecord& r : test.records) actual.push_back(r.decision);

    std::vector<ReportRow> rows;
    const LogisticBaseline lr = fit_logistic_baseline(train);
    rows.push_back({"Logistic Regression", compute_metrics(predict_logistic_baseline(lr, test), actual)});
    const TreeBaseline tree = fit_tree_baseline(train);
    rows.push_back({"Decision Tree", compute_metrics(predict_tree_baseline(tree, test), actual)});
    const ForestBaseline forest = fit_forest_baseline(train, cfg.n_trees, cfg.seed);
    rows.push_back({"Random Forest", compute_metrics(predict_forest_baseline(forest, test), actual)});
    return rows;
}

nlohmann::json report_as_json(const MetricsReport& report) {
    return nlohmann::json::parse(metrics_to_json(report));
}

const ScriptedStubClient* as_stub(const LlmClient& client) {
    return dynamic_cast<const ScriptedStubClient*>(&client);
}

/// Trains the memory store in place; returns the per-record outcomes of the
/// final epoch prefixed run. Skipped entirely (empty store) when RL is
/// ablated.
std::vector<TrainOutcome> run_memory_training(const PipelineContext& ctx, const RunConfig& cfg,
                                              const Dataset& train, MemoryStore& memory,
                                              LlmClient& llm) {
    std::vector<TrainOutcome> outcomes;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::string prefix = epoch == 0 ? "train" : "train/e" + std::to_string(epoch);
        std::vector<TrainOutcome> epoch_outcomes = train_epoch(ctx, train, memory, llm, prefix);
        outcomes.insert(outcomes.end(), epoch_outcomes.begin(), epoch_outcomes.end());
    }
    return outcomes;
}

}  // namespace

// --- ledger ---

RunLedger RunLedger::load(const std::string& out_dir) {
    RunLedger ledger;
    const std::string path = out_dir + "/ledger.json";
    if (!util::file_exists(path)) return ledger;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(util::read_file(path));
        ledger.config_hash = doc.value("config_hash", "");
        ledger.stub_transcript_hash = doc.value("stub_transcript_hash", "");
        if (doc.contains("artifacts")) {
            for (const auto& [name, entry] : doc["artifacts"].items()) {
                ledger.artifacts[name] = LedgerEntry{entry.value("path", name),
                                                     entry.value("config_hash", ""),
                                                     entry.value("written_at", "")};
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("ledger.json is corrupt: ") + e.what());
    }
    return ledger;
}

void RunLedger::save(const std::string& out_dir) const {
    nlohmann::json doc;
    doc["config_hash"] = config_hash;
    doc["stub_transcript_hash"] = stub_transcript_hash;
    nlohmann::json arts = nlohmann::json::object();
    for (const auto& [name, entry] : artifacts) {
        arts[name] = {{"path", entry.path},
                      {"config_hash", entry.config_hash},
                      {"written_at", entry.written_at}};
    }
    doc["artifacts"] = arts;
    util::write_file(out_dir + "/ledger.json", doc.dump(2) + "\n");
}

// --- artifact formats ---

std::string weights_to_json(const std::vector<WeightVector>& weights,
                            const std::string& config_hash, RegressionFamily family,
                            double reg_strength) {
    nlohmann::json doc;
    doc["config_hash"] = config_hash;
    doc["family"] = family == RegressionFamily::Ridge ? "ridge" : "logistic";
    doc["reg_strength"] = reg_strength;
    nlohmann::json items = nlohmann::json::array();
    for (const WeightVector& w : weights) {
        items.push_back({{"indicator", indicator_name(w.indicator.kind)},
                         {"source_variable", w.indicator.source_variable},
                         {"names", w.names},
                         {"weights", w.weights},
                         {"intercept", w.intercept},
                         {"residual_norm", w.residual_norm}});
    }
    doc["indicators"] = items;
    return doc.dump(2) + "\n";
}

std::vector<WeightVector> weights_from_json(const std::string& text) {
    std::vector<WeightVector> weights;
    try {
        const nlohmann::json doc = nlohmann::json::parse(text);
        for (const nlohmann::json& item : doc.at("indicators")) {
            WeightVector w;
            w.indicator.kind = indicator_from_name(item.at("indicator").get<std::string>());
            w.indicator.source_variable = item.at("source_variable").get<std::string>();
            w.names = item.at("names").get<std::vector<std::string>>();
            w.weights = item.at("weights").get<std::vector<double>>();
            w.intercept = item.at("intercept").get<double>();
            w.residual_norm = item.at("residual_norm").get<double>();
            weights.push_back(std::move(w));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("weights artifact is corrupt: ") + e.what());
    }
    return weights;
}

std::string subsets_to_json(const std::vector<VariableSubset>& subsets,
                            const std::string& config_hash, const std::string& theta_mode) {
    nlohmann::json doc;
    doc["config_hash"] = config_hash;
    doc["theta_mode"] = theta_mode;
    nlohmann::json items = nlohmann::json::array();
    for (const VariableSubset& s : subsets) {
        items.push_back({{"indicator", indicator_name(s.indicator.kind)},
                         {"source_variable", s.indicator.source_variable},
                         {"theta", s.theta},
                         {"coverage", s.coverage},
                         {"selected", s.selected}});
    }
    doc["subsets"] = items;
    return doc.dump(2) + "\n";
}

std::vector<VariableSubset> subsets_from_json(const std::string& text) {
    std::vector<VariableSubset> subsets;
    try {
        const nlohmann::json doc = nlohmann::json::parse(text);
        for (const nlohmann::json& item : doc.at("subsets")) {
            VariableSubset s;
            s.indicator.kind = indicator_from_name(item.at("indicator").get<std::string>());
            s.indicator.source_variable = item.at("source_variable").get<std::string>();
            s.theta = item.at("theta").get<double>();
            s.coverage = item.at("coverage").get<double>();
            s.selected = item.at("selected").get<std::vector<std::string>>();
            subsets.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("subsets artifact is corrupt: ") + e.what());
    }
    return subsets;
}

std::string trial_reports_to_jsonl(const std::vector<PatternTrialReport>& reports,
                                   const std::string& config_hash) {
    nlohmann::json header = {{"v", 1}, {"config_hash", config_hash}};
    std::string out = header.dump() + "\n";
    for (const PatternTrialReport& r : reports) {
        nlohmann::json line = {{"record_id", r.record_id},
                               {"rates", r.rates},
                               {"trials", r.trials},
                               {"label", r.label},
                               {"low_confidence", r.low_confidence}};
        out += line.dump() + "\n";
    }
    return out;
}

std::vector<PatternTrialReport> trial_reports_from_jsonl(const std::string& text) {
    std::vector<PatternTrialReport> reports;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    try {
        while (std::getline(in, line)) {
            if (util::trim(line).empty()) continue;
            const nlohmann::json doc = nlohmann::json::parse(line);
            if (!header_seen) {
                header_seen = true;
                if (doc.value("v", 0) != 1)
                    throw ConfigInvalid("pattern-labels artifact has unknown version");
                continue;
            }
            PatternTrialReport r;
            r.record_id = doc.at("record_id").get<std::string>();
            const auto rates = doc.at("rates").get<std::vector<double>>();
            if (rates.size() != 4) throw ConfigInvalid("pattern-labels line needs 4 rates");
            std::copy(rates.begin(), rates.end(), r.rates.begin());
            r.trials = doc.at("trials").get<std::size_t>();
            r.label = doc.at("label").get<int>();
            r.low_confidence = doc.at("low_confidence").get<bool>();
            reports.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("pattern-labels artifact is corrupt: ") + e.what());
    }
    return reports;
}

std::string predictions_to_jsonl(const std::vector<PredictionRow>& rows,
                                 const std::string& config_hash) {
    nlohmann::json header = {{"v", 1}, {"config_hash", config_hash}};
    std::string out = header.dump() + "\n";
    for (const PredictionRow& row : rows) {
        nlohmann::json line = {{"record_id", row.record_id},
                               {"failed", row.failed},
                               {"error", row.error_text},
                               {"predicted", decision_name(row.predicted)},
                               {"actual", decision_name(row.actual)},
                               {"pattern_id", row.pattern_id},
                               {"threat_raw", row.threat_raw},
                               {"threat_calibrated", row.threat_calibrated},
                               {"risk_raw", row.risk_raw},
                               {"risk_calibrated", row.risk_calibrated},
                               {"retrieved_ids", row.retrieved_ids},
                               {"rationale", row.rationale_text}};
        out += line.dump() + "\n";
    }
    return out;
}

std::vector<PredictionRow> predictions_from_jsonl(const std::string& text) {
    std::vector<PredictionRow> rows;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    try {
        while (std::getline(in, line)) {
            if (util::trim(line).empty()) continue;
            const nlohmann::json doc = nlohmann::json::parse(line);
            if (!header_seen) {
                header_seen = true;
                if (doc.value("v", 0) != 1)
                    throw ConfigInvalid("predictions artifact has unknown version");
                continue;
            }
            PredictionRow row;
            row.record_id = doc.at("record_id").get<std::string>();
            row.failed = doc.at("failed").get<bool>();
            row.error_text = doc.at("error").get<std::string>();
            const auto predicted = decision_from_answer(doc.at("predicted").get<std::string>());
            const auto actual = decision_from_answer(doc.at("actual").get<std::string>());
            if (!predicted || !actual)
                throw ConfigInvalid("predictions line has an unreadable decision");
            row.predicted = *predicted;
            row.actual = *actual;
            row.pattern_id = doc.at("pattern_id").get<int>();
            row.threat_raw = doc.at("threat_raw").get<int>();
            row.threat_calibrated = doc.at("threat_calibrated").get<int>();
            row.risk_raw = doc.at("risk_raw").get<int>();
            row.risk_calibrated = doc.at("risk_calibrated").get<int>();
            row.retrieved_ids = doc.at("retrieved_ids").get<std::vector<std::int64_t>>();
            row.rationale_text = doc.at("rationale").get<std::string>();
            rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("predictions artifact is corrupt: ") + e.what());
    }
    return rows;
}

// --- stages ---

StageResult stage_ingest(const RunConfig& cfg) {
    cfg.validate();
    StageIo io(cfg);
    const SurveySchema schema = load_schema(cfg.schema_path);
    const Dataset dataset = load_dataset(cfg.dataset_path, schema);
    schema_indicators(schema);  // fail fast when indicator declarations are missing

    const std::vector<Dataset> parts =
        split_dataset(dataset, {cfg.train_frac, 1.0 - cfg.train_frac}, cfg.seed);
    const Dataset& train = parts[0];
    const Dataset& test = parts[1];
    if (train.empty() || test.empty())
        throw ConfigInvalid("train/test split leaves an empty partition; adjust train_frac");

    const DatasetManifest m = manifest(dataset);
    nlohmann::json doc;
    doc["config_hash"] = io.hash;
    doc["event_name"] = m.event_name;
    doc["n_records"] = m.n_records;
    doc["evacuation_rate"] = m.evacuation_rate;
    doc["n_train"] = train.size();
    doc["n_test"] = test.size();
    doc["seed"] = cfg.seed;
    io.write("manifest.json", doc.dump(2) + "\n");

    {
        std::filesystem::create_directories(cfg.out_dir);
        write_dataset(cfg.out_dir + "/train.csv", train);
        io.ledger.artifacts["train.csv"] = LedgerEntry{"train.csv", io.hash, now_iso8601()};
        io.result.written.push_back("train.csv");
        write_dataset(cfg.out_dir + "/test.csv", test);
        io.ledger.artifacts["test.csv"] = LedgerEntry{"test.csv", io.hash, now_iso8601()};
        io.result.written.push_back("test.csv");
    }
    return io.finish("ingested " + std::to_string(dataset.size()) + " records (" +
                     std::to_string(train.size()) + " train, " + std::to_string(test.size()) +
                     " test)");
}

StageResult stage_select_vars(const RunConfig& cfg) {
    cfg.validate();
    StageIo io(cfg);
    const SurveySchema schema = load_schema(cfg.schema_path);
    const Dataset train = load_dataset(io.require("train.csv", "ingest"), schema);

    std::vector<WeightVector> weights;
    std::vector<VariableSubset> subsets;
    for (const PerceptionIndicator& indicator : schema_indicators(schema)) {
        WeightVector w = fit_indicator_weights(train, indicator, cfg.reg_strength, cfg.family);
        const double theta = theta_for(cfg, w);
        subsets.push_back(select_variables(w, theta));
        weights.push_back(std::move(w));
    }
    io.write("weights.json", weights_to_json(weights, io.hash, cfg.family, cfg.reg_strength));
    io.write("subsets.json", subsets_to_json(subsets, io.hash, theta_mode_name(cfg.theta)));

    std::string sizes;
    for (const VariableSubset& s : subsets) {
        if (!sizes.empty()) sizes += ", ";
        sizes += indicator_name(s.indicator.kind) + ":" + std::to_string(s.selected.size());
    }
    return io.finish("selected variable subsets (" + sizes + ")");
}

StageResult stage_label_patterns(const RunConfig& cfg) {
    cfg.validate();
    StageIo io(cfg);
    const SurveySchema schema = load_schema(cfg.schema_path);
    const Dataset train = load_dataset(io.require("train.csv", "ingest"), schema);
    const std::vector<VariableSubset> subsets =
        subsets_from_json(util::read_file(io.require("subsets.json", "select-vars")));

    PipelineContext ctx = make_context(cfg, schema, compute_stats(train),
                                       enumerate_patterns(subsets), PatternClassifier{},
                                       KnowledgeBase{});
    const std::unique_ptr<LlmClient> llm = make_client(cfg.llm);

    std::vector<PatternTrialReport> reports;
    reports.reserve(train.size());
    for (const SurveyRecord& record : train.records)
        reports.push_back(estimate_pattern_success(ctx, record, cfg.trials, *llm));

    io.write("pattern_labels.jsonl", trial_reports_to_jsonl(reports, io.hash));
    if (const ScriptedStubClient* stub = as_stub(*llm))
        io.write("requests/label_patterns.jsonl", requests_jsonl(*stub, 0, 0, io.hash));
    return io.finish("labeled " + std::to_string(reports.size()) + " training records over 4 patterns");
}

StageResult stage_train_classifier(const RunConfig& cfg) {
    cfg.validate();
    StageIo io(cfg);
    const SurveySchema schema = load_schema(cfg.schema_path);
    const Dataset train = load_dataset(io.require("train.csv", "ingest"), schema);
    const std::vector<VariableSubset> subsets =
        subsets_from_json(util::read_file(io.require("subsets.json", "select-vars")));
    const std::vector<PatternTrialReport> reports = trial_reports_from_jsonl(
        util::read_file(io.require("pattern_labels.jsonl", "label-patterns")));

    std::map<std::string, int> label_of;
    for (const PatternTrialReport& r : reports) label_of[r.record_id] = r.label;

    const std::vector<ReasoningPattern> patterns = enumerate_patterns(subsets);
    const std::vector<std::string> names = classifier_feature_names(schema, patterns);
    const EncodingStats stats = compute_stats(train);

    linalg::Matrix features;
    std::vector<int> labels;
    for (const SurveyRecord& record : train.records) {
        const auto it = label_of.find(record.record_id);
        if (it == label_of.end()) throw MissingUpstreamArtifact("label-patterns");
        features.push_back(project_features(encode_record(record, schema, stats), schema, names));
        labels.push_back(it->second);
    }

    ClassifierConfig classifier_config;
    classifier_config.kind = cfg.classifier;
    classifier_config.n_trees = cfg.n_trees;
    classifier_config.seed = cfg.seed;
    const PatternClassifier classifier =
        train_pattern_classifier(features, labels, names, classifier_config);

    std::size_t correct = 0;
    for (std::size_t i = 0; i < features.size(); ++i)
        if (classifier.classify(features[i]) == labels[i]) ++correct;

    nlohmann::json doc = nlohmann::json::parse(classifier_to_json(classifier));
    doc["config_hash"] = io.hash;
    io.write("classifier.json", doc.dump(2) + "\n");
    return io.finish("trained pattern classifier; training accuracy " +
                     util::format_fixed(static_cast<double>(correct) /
                                            static_cast<double>(features.empty() ? 1 : features.size()),
                                        3));
}

StageResult stage_build_kb(const RunConfig& cfg) {
    cfg.validate();
    StageIo io(cfg);
    const SurveySchema schema = load_schema(cfg.schema_path);
    const Dataset train = load_dataset(io.require("train.csv", "ingest"), schema);
    const std::vector<VariableSubset> subsets =
        subsets_from_json(util::read_file(io.require("subsets.json", "select-vars")));
    const std::vector<PatternTrialReport> reports = trial_reports_from_jsonl(
        util::read_file(io.require("pattern_labels.jsonl", "label-patterns")));

    std::map<std::string, int> pattern_of;
    for (const PatternTrialReport& r : reports) pattern_of[r.record_id] = r.label;

    // The calibration partition: the leading kb_frac of the training
    // records, in stored order.
    std::size_t kb_count = static_cast<std::size_t>(cfg.kb_frac * static_cast<double>(train.size()));
    kb_count = std::max<std::size_t>(std::min(kb_count, train.size()), train.empty() ? 0 : 1);
    Dataset first_part;
    first_part.schema = schema;
    first_part.records.assign(train.records.begin(),
                              train.records.begin() + static_cast<std::ptrdiff_t>(kb_count));

    const Templates templates = load_templates_bundle(cfg.templates_dir);
    const std::unique_ptr<LlmClient> llm = make_client(cfg.llm);
    const KnowledgeBase kb =
        build_knowledge_base(first_part, pattern_of, enumerate_patterns(subsets),
                             templates.threat, templates.risk, *llm);

    io.write("kb.json", kb_to_json(kb, io.hash));
    if (const ScriptedStubClient* stub = as_stub(*llm))
        io.write("requests/build_kb.jsonl", requests_jsonl(*stub, 0, 0, io.hash));
    return io.finish("built knowledge base with " + std::to_string(kb.entries.size()) +
                     " calibration entries from " + std::to_string(kb_count) + " records");
}

StageResult stage_train_memory(const RunConfig& cfg) {
    cfg.validate();
    StageIo io(cfg);
    const SurveySchema schema = load_schema(cfg.schema_path);
    const Dataset train = load_dataset(io.require("train.csv", "ingest"), schema);
    const std::vector<VariableSubset> subsets =
        subsets_from_json(util::read_file(io.require("subsets.json", "select-vars")));
    const PatternClassifier classifier =
        classifier_from_json(util::read_file(io.require("classifier.json", "train-classifier")));
    const KnowledgeBase kb = kb_from_json(util::read_file(io.require("kb.json", "build-kb")));

    if (cfg.ablation.no_rl) {
        MemoryStore memory(cfg.llm.embed_dim, StoreMode::Training);
        io.write("memory.jsonl", memory.to_jsonl(io.hash));
        io.write("train_outcomes.jsonl", train_outcomes_to_jsonl({}, io.hash));
        return io.finish("memory training skipped (no_rl): wrote an empty store");
    }

    PipelineContext ctx = make_context(cfg, schema, compute_stats(train),
                                       enumerate_patterns(subsets), classifier, kb);
    const std::unique_ptr<LlmClient> llm = make_client(cfg.llm);
    MemoryStore memory(llm->embed_dim(), StoreMode::Training);
    const std::vector<TrainOutcome> outcomes = run_memory_training(ctx, cfg, train, memory, *llm);

    io.write("memory.jsonl", memory.to_jsonl(io.hash));
    io.write("train_outcomes.jsonl", train_outcomes_to_jsonl(outcomes, io.hash));
    if (const ScriptedStubClient* stub = as_stub(*llm))
        io.write("requests/train_memory.jsonl", requests_jsonl(*stub, 0, 0, io.hash));

    std::size_t errors = 0;
    for (const TrainOutcome& o : outcomes)
        if (o.memory_entry_id) ++errors;
    return io.finish("trained memory over " + std::to_string(outcomes.size()) + " record passes; " +
                     std::to_string(errors) + " errors logged");
}

StageResult stage_predict(const RunConfig& cfg) {
    cfg.validate();
    StageIo io(cfg);
    const SurveySchema schema = load_schema(cfg.schema_path);
    const Dataset train = load_dataset(io.require("train.csv", "ingest"), schema);
    const Dataset test = load_dataset(io.require("test.csv", "ingest"), schema);
    const std::vector<VariableSubset> subsets =
        subsets_from_json(util::read_file(io.require("subsets.json", "select-vars")));
    const PatternClassifier classifier =
        classifier_from_json(util::read_file(io.require("classifier.json", "train-classifier")));
    const KnowledgeBase kb = kb_from_json(util::read_file(io.require("kb.json", "build-kb")));
    MemoryStore memory = MemoryStore::load(io.require("memory.jsonl", "train-memory"));
    memory.set_mode(StoreMode::Inference);

    PipelineContext ctx = make_context(cfg, schema, compute_stats(train),
                                       enumerate_patterns(subsets), classifier, kb);
    const std::unique_ptr<LlmClient> llm = make_client(cfg.llm);
    const std::vector<RecordOutcome> outcomes =
        predict_partition(ctx, test, memory, *llm, cfg.llm.concurrency_bound, "test");
    const std::vector<PredictionRow> rows = rows_from_outcomes(outcomes, test);

    io.write("predictions.jsonl", predictions_to_jsonl(rows, io.hash));
    if (const ScriptedStubClient* stub = as_stub(*llm))
        io.write("requests/predict.jsonl", requests_jsonl(*stub, 0, 0, io.hash));
    return io.finish("predicted " + std::to_string(rows.size()) + " test records (" +
                     std::to_string(count_failed(rows)) + " failed)");
}

StageResult stage_evaluate(const RunConfig& cfg) {
    cfg.validate();
    StageIo io(cfg);
    const SurveySchema schema = load_schema(cfg.schema_path);
    const Dataset train = load_dataset(io.require("train.csv", "ingest"), schema);
    const Dataset test = load_dataset(io.require("test.csv", "ingest"), schema);
    const std::vector<VariableSubset> subsets =
        subsets_from_json(util::read_file(io.require("subsets.json", "select-vars")));
    const std::vector<PredictionRow> rows =
        predictions_from_jsonl(util::read_file(io.require("predictions.jsonl", "predict")));

    const std::vector<ReasoningPattern> patterns = enumerate_patterns(subsets);
    MetricsReport report = report_from_rows(rows);
    const ScorePairs pairs = collect_score_pairs(rows, test, patterns);
    report.mse = pairs.mse();

    io.write("metrics.json", metrics_to_json(report));

    std::vector<ReportRow> table_rows;
    if (cfg.with_baselines) {
        table_rows = baseline_rows(train, test, cfg);
        nlohmann::json doc;
        doc["config_hash"] = io.hash;
        nlohmann::json methods = nlohmann::json::object();
        methods["logistic_regression"] = report_as_json(table_rows[0].metrics);
        methods["decision_tree"] = report_as_json(table_rows[1].metrics);
        methods["random_forest"] = report_as_json(table_rows[2].metrics);
        doc["methods"] = methods;
        io.write("baselines.json", doc.dump(2) + "\n");
    }
    if (cfg.direct_baseline) {
        const CoTTemplate direct_template =
            load_template(cfg.templates_dir + "/direct_baseline.txt");
        const std::unique_ptr<LlmClient> llm = make_client(cfg.llm);
        std::vector<DecisionValue> predicted, actual;
        std::size_t failed = 0;
        for (const SurveyRecord& record : test.records) {
            try {
                const Decision d = direct_llm_baseline(record, schema, direct_template, *llm,
                                                       "direct/" + record.record_id);
                predicted.push_back(d.value);
                actual.push_back(record.decision);
            } catch (const Error&) {
                ++failed;
            }
        }
        if (!predicted.empty())
            table_rows.push_back({"Direct LLM Inference", compute_metrics(predicted, actual)});
        if (const ScriptedStubClient* stub = as_stub(*llm))
            io.write("requests/direct_baseline.jsonl", requests_jsonl(*stub, 0, 0, io.hash));
        (void)failed;
    }
    table_rows.push_back({cfg.ablation.label(), report});
    const std::string table = render_report_table(table_rows);
    io.write("metrics.txt", table);

    const ScoreConfusion threat_conf = score_confusion(pairs.threat_predicted, pairs.threat_actual);
    const ScoreConfusion risk_conf = score_confusion(pairs.risk_predicted, pairs.risk_actual);
    io.write("threat_scores.csv", score_confusion_csv(threat_conf, false));
    io.write("threat_scores_normalized.csv", score_confusion_csv(threat_conf, true));
    io.write("risk_scores.csv", score_confusion_csv(risk_conf, false));
    io.write("risk_scores_normalized.csv", score_confusion_csv(risk_conf, true));
    if (cfg.heatmap_svg) {
        io.write("threat_scores.svg", score_confusion_svg(threat_conf, "Threat assessment"));
        io.write("risk_scores.svg", score_confusion_svg(risk_conf, "Risk perception"));
    }

    return io.finish("evaluated " + std::to_string(rows.size()) + " predictions (" +
                     std::to_string(count_failed(rows)) + " failed, excluded)\n\n" + table);
}

StageResult stage_cross_eval(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.cross_dataset_path.empty() || cfg.cross_schema_path.empty())
        throw ConfigInvalid("cross-eval needs cross_dataset and cross_schema");
    StageIo io(cfg);
    const std::string train_hash = io.hash;         // training provenance: training inputs only
    const std::string test_hash = cfg.cross_hash();  // test artifacts: + cross inputs

    const SurveySchema schema = load_schema(cfg.schema_path);
    const SurveySchema cross_schema = load_schema(cfg.cross_schema_path);
    const Dataset train = load_dataset(cfg.dataset_path, schema);
    const Dataset cross = load_dataset(cfg.cross_dataset_path, cross_schema);

    {
        const std::vector<std::string> a = schema.feature_names();
        const std::vector<std::string> b = cross_schema.feature_names();
        const std::set<std::string> b_set(b.begin(), b.end());
        bool shared = false;
        for (const std::string& name : a)
            if (b_set.count(name) != 0) shared = true;
        if (!shared) throw SchemaMismatch();
    }

    // --- training phase: artifacts derive from the training event only ---
    const EncodingStats stats = compute_stats(train);
    std::vector<WeightVector> weights;
    std::vector<VariableSubset> subsets;
    for (const PerceptionIndicator& indicator : schema_indicators(schema)) {
        WeightVector w = fit_indicator_weights(train, indicator, cfg.reg_strength, cfg.family);
        const double theta = theta_for(cfg, w);
        subsets.push_back(select_variables(w, theta));
        weights.push_back(std::move(w));
    }
    io.write_with_hash("cross/weights.json",
                       weights_to_json(weights, train_hash, cfg.family, cfg.reg_strength), train_hash);
    io.write_with_hash("cross/subsets.json",
                       subsets_to_json(subsets, train_hash, theta_mode_name(cfg.theta)), train_hash);

    const std::vector<ReasoningPattern> patterns = enumerate_patterns(subsets);
    const std::unique_ptr<LlmClient> llm = make_client(cfg.llm);

    PipelineContext label_ctx =
        make_context(cfg, schema, stats, patterns, PatternClassifier{}, KnowledgeBase{});
    std::vector<PatternTrialReport> reports;
    for (const SurveyRecord& record : train.records)
        reports.push_back(estimate_pattern_success(label_ctx, record, cfg.trials, *llm));
    io.write_with_hash("cross/pattern_labels.jsonl", trial_reports_to_jsonl(reports, train_hash),
                       train_hash);

    std::map<std::string, int> label_of;
    for (const PatternTrialReport& r : reports) label_of[r.record_id] = r.label;
    const std::vector<std::string> names = classifier_feature_names(schema, patterns);
    linalg::Matrix features;
    std::vector<int> labels;
    for (const SurveyRecord& record : train.records) {
        features.push_back(project_features(encode_record(record, schema, stats), schema, names));
        labels.push_back(label_of.at(record.record_id));
    }
    ClassifierConfig classifier_config;
    classifier_config.kind = cfg.classifier;
    classifier_config.n_trees = cfg.n_trees;
    classifier_config.seed = cfg.seed;
    const PatternClassifier classifier =
        train_pattern_classifier(features, labels, names, classifier_config);
    {
        nlohmann::json doc = nlohmann::json::parse(classifier_to_json(classifier));
        doc["config_hash"] = train_hash;
        io.write_with_hash("cross/classifier.json", doc.dump(2) + "\n", train_hash);
    }

    std::size_t kb_count = static_cast<std::size_t>(cfg.kb_frac * static_cast<double>(train.size()));
    kb_count = std::max<std::size_t>(std::min(kb_count, train.size()), train.empty() ? 0 : 1);
    Dataset first_part;
    first_part.schema = schema;
    first_part.records.assign(train.records.begin(),
                              train.records.begin() + static_cast<std::ptrdiff_t>(kb_count));
    const Templates templates = load_templates_bundle(cfg.templates_dir);
    const KnowledgeBase kb = build_knowledge_base(first_part, label_of, patterns, templates.threat,
                                                  templates.risk, *llm);
    io.write_with_hash("cross/kb.json", kb_to_json(kb, train_hash), train_hash);

    PipelineContext ctx = make_context(cfg, schema, stats, patterns, classifier, kb);
    MemoryStore memory(llm->embed_dim(), StoreMode::Training);
    std::vector<TrainOutcome> outcomes;
    if (!cfg.ablation.no_rl) outcomes = run_memory_training(ctx, cfg, train, memory, *llm);
    io.write_with_hash("cross/memory.jsonl", memory.to_jsonl(train_hash), train_hash);
    io.write_with_hash("cross/train_outcomes.jsonl", train_outcomes_to_jsonl(outcomes, train_hash),
                       train_hash);

    std::size_t chat_mark = 0;
    std::size_t embed_mark = 0;
    if (const ScriptedStubClient* stub = as_stub(*llm)) {
        io.write_with_hash("cross/requests/train_phase.jsonl", requests_jsonl(*stub, 0, 0, train_hash),
                           train_hash);
        chat_mark = stub->captured_requests().size();
        embed_mark = stub->captured_embed_texts().size();
    }

    // --- test phase: the cross event becomes visible only now ---
    Dataset cross_as_train;
    cross_as_train.schema = schema;  // encode/prompt through the training-event schema
    cross_as_train.records = cross.records;

    memory.set_mode(StoreMode::Inference);
    const std::vector<RecordOutcome> predicted =
        predict_partition(ctx, cross_as_train, memory, *llm, cfg.llm.concurrency_bound, "test");
    const std::vector<PredictionRow> rows = rows_from_outcomes(predicted, cross_as_train);
    io.write_with_hash("cross/predictions.jsonl", predictions_to_jsonl(rows, test_hash), test_hash);

    MetricsReport report = report_from_rows(rows);
    const ScorePairs pairs = collect_score_pairs(rows, cross_as_train, patterns);
    report.mse = pairs.mse();
    io.write_with_hash("cross/metrics.json", metrics_to_json(report), test_hash);

    std::vector<ReportRow> table_rows;
    if (cfg.with_baselines) table_rows = baseline_rows(train, cross_as_train, cfg);
    table_rows.push_back({cfg.ablation.label(), report});
    io.write_with_hash("cross/metrics.txt", render_report_table(table_rows), test_hash);

    if (const ScriptedStubClient* stub = as_stub(*llm))
        io.write_with_hash("cross/requests/test_phase.jsonl",
                           requests_jsonl(*stub, chat_mark, embed_mark, test_hash), test_hash);

    return io.finish("cross-event: trained on " + std::to_string(train.size()) + " " +
                     schema.event_name + " records, evaluated on " + std::to_string(cross.size()) +
                     " " + cross_schema.event_name + " records; accuracy " +
                     util::format_fixed(report.accuracy, 3));
}

StageResult stage_ablate(const RunConfig& cfg) {
    cfg.validate();
    StageIo io(cfg);
    const SurveySchema schema = load_schema(cfg.schema_path);
    const Dataset train = load_dataset(io.require("train.csv", "ingest"), schema);
    const Dataset test = load_dataset(io.require("test.csv", "ingest"), schema);
    const std::vector<VariableSubset> subsets =
        subsets_from_json(util::read_file(io.require("subsets.json", "select-vars")));
    const PatternClassifier classifier =
        classifier_from_json(util::read_file(io.require("classifier.json", "train-classifier")));
    const KnowledgeBase kb = kb_from_json(util::read_file(io.require("kb.json", "build-kb")));
    const std::vector<ReasoningPattern> patterns = enumerate_patterns(subsets);
    const EncodingStats stats = compute_stats(train);

    std::vector<AblationFlags> configs;
    const bool filtered = cfg.ablation.no_cot || cfg.ablation.no_rl || cfg.ablation.no_perception;
    if (filtered) {
        configs.push_back(cfg.ablation);
    } else {
        configs.push_back({true, true, false});    // w/o CoT and RL
        configs.push_back({false, true, false});   // w/o RL
        configs.push_back({false, false, true});   // w/o perception
        configs.push_back({true, false, false});   // w/o CoT
        configs.push_back({false, false, false});  // full pipeline
    }

    std::vector<ReportRow> table_rows;
    for (const AblationFlags& flags : configs) {
        RunConfig sub = cfg;
        sub.ablation = flags;
        const std::string sub_hash = sub.config_hash();
        const std::string dir = "ablate/" + flags.slug();

        PipelineContext ctx = make_context(sub, schema, stats, patterns, classifier, kb);
        const std::unique_ptr<LlmClient> llm = make_client(sub.llm);

        MemoryStore memory(llm->embed_dim(), StoreMode::Training);
        std::vector<TrainOutcome> outcomes;
        if (!flags.no_rl) outcomes = run_memory_training(ctx, sub, train, memory, *llm);
        io.write_with_hash(dir + "/memory.jsonl", memory.to_jsonl(sub_hash), sub_hash);
        io.write_with_hash(dir + "/train_outcomes.jsonl", train_outcomes_to_jsonl(outcomes, sub_hash),
                           sub_hash);

        std::size_t chat_mark = 0;
        std::size_t embed_mark = 0;
        if (const ScriptedStubClient* stub = as_stub(*llm)) {
            io.write_with_hash(dir + "/requests/train_phase.jsonl",
                               requests_jsonl(*stub, 0, 0, sub_hash), sub_hash);
            chat_mark = stub->captured_requests().size();
            embed_mark = stub->captured_embed_texts().size();
        }

        memory.set_mode(StoreMode::Inference);
        const std::vector<RecordOutcome> predicted =
            predict_partition(ctx, test, memory, *llm, sub.llm.concurrency_bound, "test");
        const std::vector<PredictionRow> rows = rows_from_outcomes(predicted, test);
        io.write_with_hash(dir + "/predictions.jsonl", predictions_to_jsonl(rows, sub_hash), sub_hash);
        if (const ScriptedStubClient* stub = as_stub(*llm))
            io.write_with_hash(dir + "/requests/test_phase.jsonl",
                               requests_jsonl(*stub, chat_mark, embed_mark, sub_hash), sub_hash);

        const MetricsReport report = report_from_rows(rows);
        io.write_with_hash(dir + "/metrics.json", metrics_to_json(report), sub_hash);
        table_rows.push_back({flags.label(), report});
    }

    const std::string table = render_report_table(table_rows);
    io.write("ablate/report.txt", table);
    return io.finish("ablation harness ran " + std::to_string(configs.size()) + " configuration" +
                     (configs.size() == 1 ? "" : "s") + "\n\n" + table);
}

StageResult stage_compact_memory(const RunConfig& cfg) {
    cfg.validate();
    StageIo io(cfg);
    MemoryStore store = MemoryStore::load(io.require("memory.jsonl", "train-memory"));

    // Keep only the newest entry per record (later epochs supersede earlier
    // ones), preserving relative order and renumbering ids contiguously.
    std::map<std::string, std::size_t> last_index;
    for (std::size_t i = 0; i < store.entries().size(); ++i)
        last_index[store.entries()[i].record_id] = i;
    MemoryStore compacted(store.embed_dim(), StoreMode::Training);
    for (std::size_t i = 0; i < store.entries().size(); ++i) {
        if (last_index[store.entries()[i].record_id] != i) continue;
        MemoryEntry entry = store.entries()[i];
        compacted.append(std::move(entry));
    }
    io.write("memory.jsonl", compacted.to_jsonl(io.hash));
    return io.finish("compacted memory store from " + std::to_string(store.size()) + " to " +
                     std::to_string(compacted.size()) + " entries");
}

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = {
        "ingest",      "select-vars", "label-patterns", "train-classifier",
        "build-kb",    "train-memory", "predict",       "evaluate",
        "cross-eval",  "ablate",       "compact-memory"};
    return names;
}

StageResult run_stage(const std::string& command, const RunConfig& cfg) {
    if (command == "ingest") return stage_ingest(cfg);
    if (command == "select-vars") return stage_select_vars(cfg);
    if (command == "label-patterns") return stage_label_patterns(cfg);
    if (command == "train-classifier") return stage_train_classifier(cfg);
    if (command == "build-kb") return stage_build_kb(cfg);
    if (command == "train-memory") return stage_train_memory(cfg);
    if (command == "predict") return stage_predict(cfg);
    if (command == "evaluate") return stage_evaluate(cfg);
    if (command == "cross-eval") return stage_cross_eval(cfg);
    if (command == "ablate") return stage_ablate(cfg);
    if (command == "compact-memory") return stage_compact_memory(cfg);
    throw ConfigInvalid("unknown command '" + command + "'");
}

}  // namespace flare
