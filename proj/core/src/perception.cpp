#include "flare/perception.hpp"

#include "flare/errors.hpp"
#include "flare/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace flare {

std::string render_survey_block(const SurveyRecord& record, const SurveySchema& schema,
                                const std::vector<std::string>& variables) {
    std::string out;
    for (const VariableSpec& spec : schema.variables) {
        if (std::find(variables.begin(), variables.end(), spec.name) == variables.end()) continue;
        if (!out.empty()) out.push_back('\n');
        const std::string* raw = record.answer(spec.name);
        out += spec.prompt_text() + ": " + (raw ? *raw : "(no answer)");
    }
    return out;
}

PerceptionResult infer_threat(const SurveyRecord& record, const ReasoningPattern& pattern,
                              const SurveySchema& schema, const CoTTemplate& threat_template,
                              LlmClient& llm, const std::string& request_id) {
    if (pattern.threat_subset.selected.empty()) throw EmptyInput("threat subset");
    const RenderedPrompt prompt = render_template(
        threat_template,
        {{"Survey", render_survey_block(record, schema, pattern.threat_subset.selected)}});
    const ScoredText scored = query_scored(llm, prompt, request_id);

    PerceptionResult result;
    result.indicator = pattern.threat();
    result.text = scored.text;
    result.raw_score = scored.score;
    result.calibrated_score = scored.score;
    return result;
}

PerceptionResult infer_risk(const SurveyRecord& record, const ReasoningPattern& pattern,
                            const PerceptionResult& threat, const SurveySchema& schema,
                            const CoTTemplate& risk_template, LlmClient& llm,
                            const std::string& request_id) {
    if (threat.text.empty() || threat.raw_score == 0) throw StageOrderViolation();
    if (pattern.risk_subset.selected.empty()) throw EmptyInput("risk subset");
    const RenderedPrompt prompt = render_template(
        risk_template,
        {{"Perception", threat.text},
         {"Survey", render_survey_block(record, schema, pattern.risk_subset.selected)}});
    const ScoredText scored = query_scored(llm, prompt, request_id);

    PerceptionResult result;
    result.indicator = pattern.risk();
    result.text = scored.text;
    result.raw_score = scored.score;
    result.calibrated_score = scored.score;
    return result;
}

std::pair<int, std::vector<std::int64_t>> calibrate_raw(const std::string& text, int raw_score,
                                                        const KnowledgeBase& kb,
                                                        LlmClient& embedder) {
    if (raw_score < 1 || raw_score > 5) throw OutOfRangeScore(raw_score);
    if (kb.entries.empty()) return {raw_score, {}};

    const linalg::Vector query = embedder.embed(text);
    if (query.size() != kb.embed_dim) throw DimensionMismatch(kb.embed_dim, query.size());

    std::vector<std::size_t> order(kb.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> similarity(kb.entries.size());
    for (std::size_t i = 0; i < kb.entries.size(); ++i)
        similarity[i] = linalg::cosine(query, kb.entries[i].embedding);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (similarity[a] != similarity[b]) return similarity[a] > similarity[b];
        return kb.entries[a].entry_id < kb.entries[b].entry_id;
    });

    std::vector<std::int64_t> retrieved;
    double sum = raw_score;
    double n = 1.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(2, order.size()); ++i) {
        const CalibrationEntry& entry = kb.entries[order[i]];
        retrieved.push_back(entry.entry_id);
        sum += entry.survey_score;
        n += 1.0;
    }
    const int calibrated = std::clamp(static_cast<int>(std::floor(sum / n + 0.5)), 1, 5);
    return {calibrated, retrieved};
}

void calibrate_score(PerceptionResult& result, const KnowledgeBase& kb, LlmClient& embedder) {
    auto [score, ids] = calibrate_raw(result.text, result.raw_score, kb, embedder);
    result.calibrated_score = score;
    result.retrieved_ids = std::move(ids);
}

KnowledgeBase build_knowledge_base(const Dataset& first70,
                                   const std::map<std::string, int>& pattern_of_record,
                                   const std::vector<ReasoningPattern>& patterns,
                                   const CoTTemplate& threat_template,
                                   const CoTTemplate& risk_template, LlmClient& llm) {
    KnowledgeBase kb;
    kb.provider_id = llm.provider_id();
    kb.embed_dim = llm.embed_dim();

    auto survey_score_of = [](const SurveyRecord& record, const std::string& variable) {
        const std::string* raw = record.answer(variable);
        if (raw == nullptr) return 0L;
        const std::optional<long> value = util::parse_long(*raw);
        return value && *value >= 1 && *value <= 5 ? *value : 0L;
    };

    for (const SurveyRecord& record : first70.records) {
        const auto assignment = pattern_of_record.find(record.record_id);
        if (assignment == pattern_of_record.end()) throw MissingUpstreamArtifact("label-patterns");
        const ReasoningPattern& pattern = patterns.at(static_cast<std::size_t>(assignment->second));

        const PerceptionResult threat = infer_threat(record, pattern, first70.schema,
                                                     threat_template, llm,
                                                     "kb/" + record.record_id + "/threat");
        if (const long score = survey_score_of(record, pattern.threat().source_variable)) {
            CalibrationEntry entry;
            entry.entry_id = static_cast<std::int64_t>(kb.entries.size());
            entry.perception_text = threat.text;
            entry.embedding = llm.embed(threat.text);
            entry.survey_score = static_cast<int>(score);
            kb.entries.push_back(std::move(entry));
        }

        const PerceptionResult risk = infer_risk(record, pattern, threat, first70.schema,
                                                 risk_template, llm,
                                                 "kb/" + record.record_id + "/risk");
        if (const long score = survey_score_of(record, pattern.risk().source_variable)) {
            CalibrationEntry entry;
            entry.entry_id = static_cast<std::int64_t>(kb.entries.size());
            entry.perception_text = risk.text;
            entry.embedding = llm.embed(risk.text);
            entry.survey_score = static_cast<int>(score);
            kb.entries.push_back(std::move(entry));
        }
    }
    return kb;
}

std::string kb_to_json(const KnowledgeBase& kb, const std::string& config_hash) {
    nlohmann::json entries = nlohmann::json::array();
    for (const CalibrationEntry& entry : kb.entries) {
        entries.push_back({{"entry_id", entry.entry_id},
                           {"text", entry.perception_text},
                           {"score", entry.survey_score},
                           {"embedding", entry.embedding}});
    }
    nlohmann::json doc = {{"config_hash", config_hash},
                          {"provider_id", kb.provider_id},
                          {"embed_dim", kb.embed_dim},
                          {"entries", std::move(entries)}};
    return doc.dump(2) + "\n";
}

KnowledgeBase kb_from_json(const std::string& text) {
    try {
        const nlohmann::json doc = nlohmann::json::parse(text);
        KnowledgeBase kb;
        kb.provider_id = doc.at("provider_id").get<std::string>();
        kb.embed_dim = doc.at("embed_dim").get<std::size_t>();
        for (const nlohmann::json& item : doc.at("entries")) {
            CalibrationEntry entry;
            entry.entry_id = item.at("entry_id").get<std::int64_t>();
            entry.perception_text = item.at("text").get<std::string>();
            entry.survey_score = item.at("score").get<int>();
            entry.embedding = item.at("embedding").get<linalg::Vector>();
            if (entry.embedding.size() != kb.embed_dim)
                throw DimensionMismatch(kb.embed_dim, entry.embedding.size());
            kb.entries.push_back(std::move(entry));
        }
        return kb;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("knowledge base file: ") + e.what());
    }
}

}  // namespace flare
