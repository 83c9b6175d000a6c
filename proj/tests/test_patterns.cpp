#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flare/errors.hpp"
#include "flare/patterns.hpp"
#include "flare/pipeline.hpp"
#include "support/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <random>

using namespace flare;

namespace {

VariableSubset subset_of(IndicatorKind kind, const std::string& source,
                         std::vector<std::string> selected) {
    VariableSubset subset;
    subset.indicator = {kind, source};
    subset.selected = std::move(selected);
    subset.theta = 0.8;
    subset.coverage = 0.85;
    return subset;
}

std::vector<VariableSubset> tiny_subsets() {
    return {
        subset_of(IndicatorKind::ThreatInjury, "threat_injury", {"neighbors_left"}),
        subset_of(IndicatorKind::ThreatDeath, "threat_death", {"official_order"}),
        subset_of(IndicatorKind::RiskHome, "risk_home", {"neighbors_left", "household_size"}),
        subset_of(IndicatorKind::RiskNeighborhood, "risk_neighborhood",
                  {"risk_home", "neighbors_left"}),
    };
}

PipelineContext tiny_context() {
    PipelineContext ctx;
    ctx.schema = testsup::tiny_schema();
    ctx.patterns = enumerate_patterns(tiny_subsets());
    ctx.threat_template = load_template(testsup::data_path("templates/threat.txt"));
    ctx.risk_template = load_template(testsup::data_path("templates/risk.txt"));
    ctx.decision_template = load_template(testsup::data_path("templates/decision.txt"));
    ctx.decision_direct_template =
        load_template(testsup::data_path("templates/decision_direct.txt"));
    ctx.reflection_template = load_template(testsup::data_path("templates/reflection.txt"));
    ctx.k = 2;
    return ctx;
}

}  // namespace

TEST_CASE("exactly four patterns with fixed threat x risk ids") {
    const std::vector<ReasoningPattern> patterns = enumerate_patterns(tiny_subsets());
    REQUIRE(patterns.size() == 4);
    CHECK(patterns[0].id == 0);
    CHECK(patterns[0].threat().kind == IndicatorKind::ThreatInjury);
    CHECK(patterns[0].risk().kind == IndicatorKind::RiskHome);
    CHECK(patterns[1].id == 1);
    CHECK(patterns[1].threat().kind == IndicatorKind::ThreatInjury);
    CHECK(patterns[1].risk().kind == IndicatorKind::RiskNeighborhood);
    CHECK(patterns[2].id == 2);
    CHECK(patterns[2].threat().kind == IndicatorKind::ThreatDeath);
    CHECK(patterns[2].risk().kind == IndicatorKind::RiskHome);
    CHECK(patterns[3].id == 3);
    CHECK(patterns[3].threat().kind == IndicatorKind::ThreatDeath);
    CHECK(patterns[3].risk().kind == IndicatorKind::RiskNeighborhood);
}

TEST_CASE("pattern enumeration is input-order independent and total") {
    std::vector<VariableSubset> shuffled = tiny_subsets();
    std::reverse(shuffled.begin(), shuffled.end());
    const auto patterns = enumerate_patterns(shuffled);
    REQUIRE(patterns.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(patterns[static_cast<std::size_t>(i)].id == i);

    std::vector<VariableSubset> missing = tiny_subsets();
    missing.erase(missing.begin() + 1);  // drop ThreatDeath
    CHECK_THROWS_AS(enumerate_patterns(missing), MissingSubset);
}

TEST_CASE("argmax labeling breaks ties toward the lowest id, exhaustively") {
    const std::array<double, 5> levels{0.0, 0.25, 0.5, 0.75, 1.0};
    for (double a : levels)
        for (double b : levels)
            for (double c : levels)
                for (double d : levels) {
                    const std::array<double, 4> rates{a, b, c, d};
                    const PatternLabel label = label_most_probable(rates);
                    int expected = 0;
                    for (int i = 1; i < 4; ++i)
                        if (rates[static_cast<std::size_t>(i)] >
                            rates[static_cast<std::size_t>(expected)])
                            expected = i;
                    CHECK(label.id == expected);
                    CHECK(label.low_confidence == (a == 0.0 && b == 0.0 && c == 0.0 && d == 0.0));
                }
}

TEST_CASE("classifier features are the subset union plus tagged demographics") {
    const SurveySchema schema = testsup::tiny_schema();
    const auto patterns = enumerate_patterns(tiny_subsets());
    const std::vector<std::string> names = classifier_feature_names(schema, patterns);
    // Union of subsets: neighbors_left, official_order, household_size, risk_home.
    // Tagged extras: official_order (order_awareness), household_size
    // (socio_demographic). Deduplicated, in schema order.
    CHECK(names == std::vector<std::string>{"risk_home", "neighbors_left", "official_order",
                                            "household_size"});
}

TEST_CASE("project_features picks named entries from the full vector") {
    const SurveySchema schema = testsup::tiny_schema();
    const Dataset ds = testsup::tiny_dataset(5);
    const EncodingStats stats = compute_stats(ds);
    const FeatureVector full = encode_record(ds.records[2], schema, stats);
    const linalg::Vector projected =
        project_features(full, schema, {"household_size", "risk_home"});
    REQUIRE(projected.size() == 2);
    CHECK(projected[0] == encode_answer(*schema.find("household_size"),
                                        *ds.records[2].answer("household_size")));
    CHECK(projected[1] ==
          encode_answer(*schema.find("risk_home"), *ds.records[2].answer("risk_home")));
}

TEST_CASE("tree classifier learns a separable labeling perfectly") {
    const SurveySchema schema = testsup::tiny_schema();
    const Dataset ds = testsup::tiny_dataset(40);
    const EncodingStats stats = compute_stats(ds);
    const std::vector<std::string> names{"risk_home", "neighbors_left"};

    linalg::Matrix x;
    std::vector<int> y;
    for (const SurveyRecord& r : ds.records) {
        const linalg::Vector row = project_features(encode_record(r, schema, stats), schema, names);
        // Separable rule on the two projected answers.
        const int label = (row[0] >= 3.0 ? 2 : 0) + (row[1] >= 3.0 ? 1 : 0);
        x.push_back(row);
        y.push_back(label);
    }
    const PatternClassifier clf = train_pattern_classifier(x, y, names, {});
    CHECK(clf.tree.depth() <= 10);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(clf.classify(x[i]) == y[i]);
}

TEST_CASE("classifier JSON round-trip preserves predictions, both kinds") {
    const std::vector<std::string> names{"a", "b", "c"};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> value(0.0, 5.0);
    std::uniform_int_distribution<int> label(0, 3);
    linalg::Matrix x(60, linalg::Vector(3));
    std::vector<int> y(60);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (double& v : x[i]) v = value(rng);
        y[i] = label(rng);
    }
    for (ClassifierKind kind : {ClassifierKind::Tree, ClassifierKind::Forest}) {
        ClassifierConfig config;
        config.kind = kind;
        config.n_trees = 7;
        config.seed = 11;
        const PatternClassifier clf = train_pattern_classifier(x, y, names, config);
        const PatternClassifier back = classifier_from_json(classifier_to_json(clf));
        CHECK(back.feature_names == names);
        CHECK(back.kind == kind);
        for (const auto& row : x) CHECK(back.classify(row) == clf.classify(row));
    }
}

TEST_CASE("trial rates are exact multiples of 1/trials and pick the argmax label") {
    PipelineContext ctx = tiny_context();
    const SurveyRecord record = testsup::make_record(
        "r0",
        {{"threat_injury", "4"}, {"threat_death", "3"}, {"risk_home", "5"},
         {"risk_neighborhood", "2"}, {"neighbors_left", "4"}, {"official_order", "yes"},
         {"household_size", "3"}, {"notes", "We loaded the truck at dusk."}},
        DecisionValue::Evacuate);

    std::vector<StubEntry> entries;
    entries.push_back(
        testsup::stub_match("summary of the resident's threat assessment", "Severe danger. Score: 4"));
    entries.push_back(
        testsup::stub_match("summarize the resident's Risk Perception", "High exposure. Score: 4"));
    // Pattern 0: two of four trials correct; pattern 1: all four; pattern 2:
    // none (one trial stays ambiguous through the retry); pattern 3: three.
    auto decide = [&](const std::string& id, const std::string& reply) {
        entries.push_back(testsup::stub_id(id, reply));
    };
    decide("label/r0/p0/t0", "Final answer: YES");
    decide("label/r0/p0/t1", "Final answer: NO");
    decide("label/r0/p0/t2", "Final answer: YES");
    decide("label/r0/p0/t3", "Final answer: NO");
    for (int t = 0; t < 4; ++t)
        decide("label/r0/p1/t" + std::to_string(t), "Final answer: YES");
    decide("label/r0/p2/t0", "Final answer: NO");
    decide("label/r0/p2/t1", "it could go either way");
    decide("label/r0/p2/t1/retry", "still unsure");
    decide("label/r0/p2/t2", "Final answer: NO");
    decide("label/r0/p2/t3", "Final answer: NO");
    decide("label/r0/p3/t0", "Final answer: YES");
    decide("label/r0/p3/t1", "Final answer: YES");
    decide("label/r0/p3/t2", "Final answer: NO");
    decide("label/r0/p3/t3", "Final answer: YES");

    ScriptedStubClient llm(entries, 16);
    const PatternTrialReport report = estimate_pattern_success(ctx, record, 4, llm);
    CHECK(report.record_id == "r0");
    CHECK(report.trials == 4);
    CHECK(report.rates == std::array<double, 4>{0.5, 1.0, 0.0, 0.75});
    for (double rate : report.rates) {
        const auto k = static_cast<std::size_t>(rate * 4.0 + 0.5);
        CHECK(rate == static_cast<double>(k) / 4.0);
    }
    CHECK(report.label == 1);
    CHECK_FALSE(report.low_confidence);

    // The labeling prompts never smuggle in memory examples.
    for (const ChatRequest& req : llm.captured_requests()) {
        const std::size_t t_at = req.request_id.find("/t");
        if (t_at == std::string::npos || t_at + 2 >= req.request_id.size() ||
            !std::isdigit(static_cast<unsigned char>(req.request_id[t_at + 2])))
            continue;
        CHECK(req.user_text.find("Previous Examples:\nNone available") != std::string::npos);
    }
}

TEST_CASE("a record failing every trial on every pattern is low confidence") {
    PipelineContext ctx = tiny_context();
    const SurveyRecord record = testsup::make_record(
        "r9",
        {{"threat_injury", "1"}, {"threat_death", "1"}, {"risk_home", "1"},
         {"risk_neighborhood", "1"}, {"neighbors_left", "1"}, {"official_order", "no"},
         {"household_size", "1"}, {"notes", "Quiet night."}},
        DecisionValue::Evacuate);
    std::vector<StubEntry> entries;
    entries.push_back(
        testsup::stub_match("summary of the resident's threat assessment", "Low. Score: 1"));
    entries.push_back(
        testsup::stub_match("summarize the resident's Risk Perception", "Low. Score: 1"));
    entries.push_back(testsup::stub_match("", "Final answer: NO"));  // always wrong
    ScriptedStubClient llm(entries, 16);
    const PatternTrialReport report = estimate_pattern_success(ctx, record, 2, llm);
    CHECK(report.rates == std::array<double, 4>{0.0, 0.0, 0.0, 0.0});
    CHECK(report.label == 0);
    CHECK(report.low_confidence);
}

TEST_CASE("zero trials are rejected") {
    PipelineContext ctx = tiny_context();
    const SurveyRecord record = testsup::tiny_dataset(1).records[0];
    ScriptedStubClient llm({testsup::stub_match("", "Score: 3")}, 16);
    CHECK_THROWS_AS(estimate_pattern_success(ctx, record, 0, llm), ZeroTrials);
}
