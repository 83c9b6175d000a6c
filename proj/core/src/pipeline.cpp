#include "flare/pipeline.hpp"

#include "flare/errors.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <thread>

namespace flare {

std::vector<std::string> pattern_union_vars(const ReasoningPattern& pattern,
                                            const SurveySchema& schema) {
    std::set<std::string> wanted(pattern.threat_subset.selected.begin(),
                                 pattern.threat_subset.selected.end());
    wanted.insert(pattern.risk_subset.selected.begin(), pattern.risk_subset.selected.end());
    std::vector<std::string> ordered;
    for (const VariableSpec& v : schema.variables) {
        if (wanted.count(v.name) != 0) ordered.push_back(v.name);
    }
    return ordered;
}

std::string render_key_text(const SurveyRecord& record, const SurveySchema& schema,
                            const std::vector<std::string>& variables) {
    std::string text;
    for (const std::string& name : variables) {
        schema.index_of(name);  // unknown names are a bug, not missing data
        const std::string* answer = record.answer(name);
        if (!text.empty()) text += "\n";
        text += name + ": " + (answer != nullptr ? *answer : "(no answer)");
    }
    return text;
}

std::string render_risk_block(const PerceptionResult& threat, const PerceptionResult& risk) {
    return risk.text + "\nThreat assessment score: " + std::to_string(threat.calibrated_score) +
           "/5. Risk perception score: " + std::to_string(risk.calibrated_score) + "/5.";
}

std::string render_risk_block_no_perception(const SurveyRecord& record,
                                            const SurveySchema& schema,
                                            const ReasoningPattern& pattern) {
    return "Survey answers:\n" +
           render_survey_block(record, schema, pattern_union_vars(pattern, schema));
}

namespace {

int classify_pattern(const PipelineContext& ctx, const SurveyRecord& record) {
    const FeatureVector full = encode_record(record, ctx.schema, ctx.stats);
    const linalg::Vector projected =
        project_features(full, ctx.schema, ctx.classifier.feature_names);
    const int id = ctx.classifier.classify(projected);
    if (id < 0 || static_cast<std::size_t>(id) >= ctx.patterns.size())
        throw Error("classifier produced pattern id " + std::to_string(id) +
                    " outside the enumerated patterns");
    return id;
}

/// Record-scoped trouble: the record fails, the run continues.
bool record_scoped(const Error& e) {
    return dynamic_cast<const AmbiguousDecision*>(&e) != nullptr ||
           dynamic_cast<const ScoreParseFailure*>(&e) != nullptr ||
           dynamic_cast<const EmbedFailure*>(&e) != nullptr ||
           dynamic_cast<const LlmFailure*>(&e) != nullptr ||
           dynamic_cast<const RateLimited*>(&e) != nullptr ||
           dynamic_cast<const TransportFailure*>(&e) != nullptr ||
           dynamic_cast<const MalformedProviderResponse*>(&e) != nullptr ||
           dynamic_cast<const StubExhausted*>(&e) != nullptr;
}

}  // namespace

RecordOutcome run_record(const PipelineContext& ctx, const SurveyRecord& record,
                         const MemoryStore& memory, LlmClient& llm,
                         const std::string& id_prefix) {
    RecordOutcome outcome;
    outcome.record_id = record.record_id;
    outcome.pattern_id = classify_pattern(ctx, record);
    const ReasoningPattern& pattern = ctx.patterns[static_cast<std::size_t>(outcome.pattern_id)];

    std::string risk_block;
    if (ctx.ablation.no_perception) {
        risk_block = render_risk_block_no_perception(record, ctx.schema, pattern);
    } else {
        outcome.threat =
            infer_threat(record, pattern, ctx.schema, ctx.threat_template, llm, id_prefix + "/threat");
        calibrate_score(outcome.threat, ctx.kb, llm);
        outcome.risk = infer_risk(record, pattern, outcome.threat, ctx.schema, ctx.risk_template,
                                  llm, id_prefix + "/risk");
        calibrate_score(outcome.risk, ctx.kb, llm);
        risk_block = render_risk_block(outcome.threat, outcome.risk);
    }

    std::string examples_block = "None available";
    if (!ctx.ablation.no_rl && memory.size() > 0) {
        const std::string key_text =
            render_key_text(record, ctx.schema, pattern_union_vars(pattern, ctx.schema));
        const linalg::Vector key = llm.embed(key_text);
        const std::vector<MemoryEntry> similar = memory.retrieve_similar(key, ctx.k);
        for (const MemoryEntry& entry : similar) outcome.retrieved_ids.push_back(entry.entry_id);
        examples_block = render_examples_block(similar);
    }

    const std::string extras_block =
        render_extras_block(record.context_notes, ctx.user_inputs);
    outcome.cot = assemble_cot(ctx.active_decision_template(), record.record_id, risk_block,
                               examples_block, extras_block);

    const Decision decision =
        query_decision(llm, {outcome.cot.rendered_system, outcome.cot.rendered_user},
                       id_prefix + "/decision");
    outcome.predicted = decision.value;
    outcome.rationale_text = decision.rationale_text;
    return outcome;
}

PatternTrialReport estimate_pattern_success(const PipelineContext& ctx,
                                            const SurveyRecord& record, std::size_t trials,
                                            LlmClient& llm) {
    if (trials == 0) throw ZeroTrials();
    PatternTrialReport report;
    report.record_id = record.record_id;
    report.trials = trials;

    const std::string extras_block =
        render_extras_block(record.context_notes, ctx.user_inputs);
    for (const ReasoningPattern& pattern : ctx.patterns) {
        const std::string prefix = "label/" + record.record_id + "/p" + std::to_string(pattern.id);
        std::string risk_block;
        if (ctx.ablation.no_perception) {
            risk_block = render_risk_block_no_perception(record, ctx.schema, pattern);
        } else {
            PerceptionResult threat = infer_threat(record, pattern, ctx.schema,
                                                   ctx.threat_template, llm, prefix + "/threat");
            calibrate_score(threat, ctx.kb, llm);
            PerceptionResult risk = infer_risk(record, pattern, threat, ctx.schema,
                                               ctx.risk_template, llm, prefix + "/risk");
            calibrate_score(risk, ctx.kb, llm);
            risk_block = render_risk_block(threat, risk);
        }
        const CoTInstance cot = assemble_cot(ctx.active_decision_template(), record.record_id,
                                             risk_block, "None available", extras_block);

        std::size_t correct = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            try {
                const Decision decision =
                    query_decision(llm, {cot.rendered_system, cot.rendered_user},
                                   prefix + "/t" + std::to_string(t));
                if (decision.value == record.decision) ++correct;
            } catch (const AmbiguousDecision&) {
                // still ambiguous after the retry: a failed trial, not a failed record
            }
        }
        report.rates[static_cast<std::size_t>(pattern.id)] =
            static_cast<double>(correct) / static_cast<double>(trials);
    }

    const PatternLabel label = label_most_probable(report.rates);
    report.label = label.id;
    report.low_confidence = label.low_confidence;
    return report;
}

std::string reflect(const PipelineContext& ctx, const MemoryEntry& entry, LlmClient& llm,
                    const std::string& request_id) {
    const std::string label_word =
        entry.correct_decision == DecisionValue::Evacuate ? "evacuated" : "stayed";
    const RenderedPrompt rendered =
        render_template(ctx.reflection_template, {{"Label", label_word}});
    ChatRequest request;
    request.system_text = rendered.system_text;
    request.user_text = entry.cot_text + "\n\n" + rendered.user_text;
    request.request_id = request_id;
    return llm.complete(request).content;
}

std::vector<TrainOutcome> train_epoch(const PipelineContext& ctx, const Dataset& train,
                                      MemoryStore& memory, LlmClient& llm,
                                      const std::string& id_prefix) {
    if (train.records.empty()) throw EmptyTrainingSet();
    std::vector<TrainOutcome> outcomes;
    outcomes.reserve(train.records.size());
    for (const SurveyRecord& record : train.records) {
        TrainOutcome out;
        out.record_id = record.record_id;
        out.actual = record.decision;
        try {
            const RecordOutcome run =
                run_record(ctx, record, memory, llm, id_prefix + "/" + record.record_id);
            out.predicted = run.predicted;
            out.correct = run.predicted == record.decision;
            out.pattern_id = run.pattern_id;
            out.threat = run.threat;
            out.risk = run.risk;
            out.retrieved_ids = run.retrieved_ids;
            if (!out.correct) {
                const ReasoningPattern& pattern =
                    ctx.patterns[static_cast<std::size_t>(run.pattern_id)];
                MemoryEntry entry;
                entry.record_id = record.record_id;
                entry.cot_text = run.cot.rendered_user;
                entry.context_text = run.cot.extras_block;
                entry.rationale_text = run.rationale_text;
                entry.correct_decision = record.decision;
                entry.key_embedding = llm.embed(
                    render_key_text(record, ctx.schema, pattern_union_vars(pattern, ctx.schema)));
                const std::int64_t entry_id = memory.append(entry);
                entry.entry_id = entry_id;
                const std::string reflection =
                    reflect(ctx, entry, llm, id_prefix + "/" + record.record_id + "/reflect");
                memory.set_reflection(entry_id, reflection);
                out.memory_entry_id = entry_id;
            }
        } catch (const Error& e) {
            if (!record_scoped(e)) throw;
            out.failed = true;
            out.error_text = e.what();
        }
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

std::vector<RecordOutcome> predict_partition(const PipelineContext& ctx, const Dataset& test,
                                             const MemoryStore& memory, LlmClient& llm,
                                             std::size_t concurrency,
                                             const std::string& id_prefix) {
    const std::size_t n = test.records.size();
    std::vector<RecordOutcome> results(n);
    if (n == 0) return results;
    const std::size_t workers = std::min(std::max<std::size_t>(concurrency, 1), n);

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        while (true) {
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            const SurveyRecord& record = test.records[i];
            try {
                results[i] =
                    run_record(ctx, record, memory, llm, id_prefix + "/" + record.record_id);
            } catch (const Error& e) {
                if (record_scoped(e)) {
                    results[i].record_id = record.record_id;
                    results[i].failed = true;
                    results[i].error_text = e.what();
                } else {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

}  // namespace flare
