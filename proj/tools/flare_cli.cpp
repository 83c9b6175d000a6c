// Command-line front end: each pipeline stage is a subcommand operating on a
// shared output directory, so a full run is a sequence of small, resumable
// steps. Errors leave as single-line JSON on stderr with a nonzero exit.

#include "flare/errors.hpp"
#include "flare/stages.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <string>

namespace {

std::string error_kind(const flare::Error& e) {
    using namespace flare;
    if (dynamic_cast<const ConfigInvalid*>(&e)) return "config_invalid";
    if (dynamic_cast<const MissingUpstreamArtifact*>(&e)) return "missing_upstream_artifact";
    if (dynamic_cast<const SchemaMismatch*>(&e)) return "schema_mismatch";
    if (dynamic_cast<const StubExhausted*>(&e)) return "stub_exhausted";
    if (dynamic_cast<const RateLimited*>(&e)) return "rate_limited";
    if (dynamic_cast<const TransportFailure*>(&e)) return "transport_failure";
    if (dynamic_cast<const MalformedProviderResponse*>(&e)) return "malformed_provider_response";
    if (dynamic_cast<const LlmFailure*>(&e)) return "llm_failure";
    if (dynamic_cast<const AmbiguousDecision*>(&e)) return "ambiguous_decision";
    if (dynamic_cast<const ScoreParseFailure*>(&e)) return "score_parse_failure";
    if (dynamic_cast<const EmbedFailure*>(&e)) return "embed_failure";
    if (dynamic_cast<const EmptyTrainingSet*>(&e)) return "empty_training_set";
    if (dynamic_cast<const ZeroTrials*>(&e)) return "zero_trials";
    if (dynamic_cast<const EmptyDataset*>(&e)) return "empty_dataset";
    if (dynamic_cast<const MissingColumn*>(&e)) return "missing_column";
    if (dynamic_cast<const StoreModeViolation*>(&e)) return "store_mode_violation";
    return "error";
}

int fail(const std::string& kind, const std::string& message) {
    nlohmann::json doc = {{"error", {{"type", kind}, {"message", message}}}};
    std::fprintf(stderr, "%s\n", doc.dump().c_str());
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flare: behavioral-theory-guided evacuation decision pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string theta_text;
    std::string transcript_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    std::size_t k = 0;
    bool no_cot = false;
    bool no_rl = false;
    bool no_perception = false;

    CLI::Option* opt_config = app.add_option("--config", config_path, "Run-config JSON file");
    CLI::Option* opt_seed = app.add_option("--seed", seed, "Deterministic RNG seed");
    CLI::Option* opt_theta =
        app.add_option("--theta", theta_text, "Coverage threshold: elbow, all, or a number in (0,1]");
    CLI::Option* opt_trials = app.add_option("--trials", trials, "Pattern-labeling trials per record");
    CLI::Option* opt_k = app.add_option("--k", k, "Memories retrieved per prediction");
    CLI::Option* opt_no_cot = app.add_flag("--no-cot", no_cot, "Ablate the reasoning scaffold");
    CLI::Option* opt_no_rl = app.add_flag("--no-rl", no_rl, "Ablate memory retrieval and training");
    CLI::Option* opt_no_perception =
        app.add_flag("--no-perception", no_perception, "Ablate perception inference");
    CLI::Option* opt_transcript =
        app.add_option("--stub-transcript", transcript_path, "Scripted-stub transcript (forces the stub provider)");
    CLI::Option* opt_out = app.add_option("--out", out_dir, "Output directory");

    for (const std::string& name : flare::stage_names()) {
        CLI::App* sub = app.add_subcommand(name, "");
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("usage", e.what());
    }

    try {
        flare::RunConfig cfg;
        if (opt_config->count() > 0) {
            cfg = flare::load_run_config(config_path);
        } else {
            throw flare::ConfigInvalid("pass --config with a run-config JSON file");
        }
        if (opt_seed->count() > 0) cfg.seed = seed;
        if (opt_theta->count() > 0) cfg.theta = flare::theta_from_flag(theta_text);
        if (opt_trials->count() > 0) cfg.trials = trials;
        if (opt_k->count() > 0) cfg.k = k;
        if (opt_no_cot->count() > 0) cfg.ablation.no_cot = true;
        if (opt_no_rl->count() > 0) cfg.ablation.no_rl = true;
        if (opt_no_perception->count() > 0) cfg.ablation.no_perception = true;
        if (opt_transcript->count() > 0) {
            cfg.llm.provider = flare::ProviderKind::ScriptedStub;
            cfg.llm.stub_transcript_path = transcript_path;
        }
        if (opt_out->count() > 0) cfg.out_dir = out_dir;

        const std::string command = app.get_subcommands().at(0)->get_name();
        const flare::StageResult result = flare::run_stage(command, cfg);
        std::printf("%s\n", result.message.c_str());
        for (const std::string& name : result.written)
            std::printf("  wrote %s/%s\n", cfg.out_dir.c_str(), name.c_str());
        return 0;
    } catch (const flare::Error& e) {
        return fail(error_kind(e), e.what());
    } catch (const std::exception& e) {
        return fail("unexpected", e.what());
    }
}
