#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flare/csv.hpp"
#include "flare/dataset.hpp"
#include "flare/errors.hpp"
#include "flare/util.hpp"
#include "support/fixtures.hpp"

#include <algorithm>
#include <set>

using namespace flare;

TEST_CASE("schema parses with indicators, tags and questions intact") {
    const SurveySchema schema = testsup::tiny_schema();
    CHECK(schema.event_name == "Tinyville Fire");
    CHECK(schema.decision_column == "evacuated");
    CHECK(schema.variables.size() == 9);
    CHECK(schema.indicator_source("ThreatInjury") == "threat_injury");
    CHECK(schema.indicator_source("RiskNeighborhood") == "risk_neighborhood");
    CHECK(schema.find("neighbors_left")->has_tag("social_cue"));
    CHECK(schema.find("notes")->kind == VariableKind::FreeText);
}

TEST_CASE("feature names exclude the decision and free text, in schema order") {
    const SurveySchema schema = testsup::tiny_schema();
    const std::vector<std::string> features = schema.feature_names();
    CHECK(features == std::vector<std::string>{"threat_injury", "threat_death", "risk_home",
                                               "risk_neighborhood", "neighbors_left",
                                               "official_order", "household_size"});
}

TEST_CASE("schema validation rejects structural problems") {
    CHECK_THROWS_AS(parse_schema("{"), ConfigInvalid);
    CHECK_THROWS_AS(parse_schema(R"({"event_name":"x","decision_column":"gone","variables":[
        {"name":"a","kind":"binary"}]})"),
                    ConfigInvalid);  // decision column not among the variables
    CHECK_THROWS_AS(parse_schema(R"({"event_name":"x","decision_column":"a","variables":[
        {"name":"a","kind":"binary"},{"name":"a","kind":"binary"}]})"),
                    ConfigInvalid);  // duplicate name
    CHECK_THROWS_AS(parse_schema(R"({"event_name":"x","decision_column":"a","variables":[
        {"name":"a","kind":"binary"},
        {"name":"b","kind":"binary","indicator":"ThreatInjury"}]})"),
                    ConfigInvalid);  // indicator must be a 1-5 ordinal
    CHECK_THROWS_AS(parse_schema(R"({"event_name":"x","decision_column":"a","variables":[
        {"name":"a","kind":"binary"},
        {"name":"b","kind":"ordinal","min":1,"max":5,"indicator":"ThreatInjury"},
        {"name":"c","kind":"ordinal","min":1,"max":5,"indicator":"ThreatInjury"}]})"),
                    ConfigInvalid);  // two variables claim the same indicator
}

TEST_CASE("decision and binary answers accept the documented spellings") {
    CHECK(decision_from_answer("YES") == DecisionValue::Evacuate);
    CHECK(decision_from_answer("no") == DecisionValue::Stay);
    CHECK(decision_from_answer("1") == DecisionValue::Evacuate);
    CHECK(decision_from_answer("evacuated") == DecisionValue::Evacuate);
    CHECK(decision_from_answer("Stayed") == DecisionValue::Stay);
    CHECK_FALSE(decision_from_answer("maybe").has_value());
    CHECK(binary_from_answer("y") == true);
    CHECK(binary_from_answer("FALSE") == false);
    CHECK_FALSE(binary_from_answer("2").has_value());
}

TEST_CASE("CSV loader round-trips through write_dataset") {
    const Dataset original = testsup::tiny_dataset(9);
    testsup::TempDir tmp;
    const std::string path = tmp.file("round.csv");
    write_dataset(path, original);
    const Dataset reloaded = load_dataset(path, original.schema);
    REQUIRE(reloaded.size() == original.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        CHECK(reloaded.records[i].record_id == original.records[i].record_id);
        CHECK(reloaded.records[i].answers == original.records[i].answers);
        CHECK(reloaded.records[i].decision == original.records[i].decision);
        CHECK(reloaded.records[i].context_notes == original.records[i].context_notes);
    }
}

TEST_CASE("CSV loader validates rows with 1-based indices in errors") {
    const SurveySchema schema = testsup::tiny_schema();
    testsup::TempDir tmp;
    const std::string header =
        "record_id,evacuated,threat_injury,threat_death,risk_home,risk_neighborhood,"
        "neighbors_left,official_order,household_size,notes\n";

    SUBCASE("ordinal answer outside its bounds") {
        const std::string path = tmp.file("bad.csv");
        util::write_file(path, header + "r1,yes,9,2,3,4,5,no,2,fine\n");
        CHECK_THROWS_WITH_AS(load_dataset(path, schema),
                             doctest::Contains("row 1"), Error);
    }
    SUBCASE("unparseable decision answer") {
        const std::string path = tmp.file("bad2.csv");
        util::write_file(path, header + "r1,possibly,1,2,3,4,5,no,2,fine\n");
        CHECK_THROWS_AS(load_dataset(path, schema), Error);
    }
    SUBCASE("missing schema column in the header") {
        const std::string path = tmp.file("bad3.csv");
        util::write_file(path, "record_id,evacuated\nr1,yes\n");
        CHECK_THROWS_AS(load_dataset(path, schema), MissingColumn);
    }
}

TEST_CASE("blank cells become missing answers, not empty strings") {
    const SurveySchema schema = testsup::tiny_schema();
    testsup::TempDir tmp;
    const std::string path = tmp.file("gaps.csv");
    util::write_file(path,
                     "record_id,evacuated,threat_injury,threat_death,risk_home,"
                     "risk_neighborhood,neighbors_left,official_order,household_size,notes\n"
                     "r1,yes,,2,3,4,5,no,2,\n");
    const Dataset ds = load_dataset(path, schema);
    REQUIRE(ds.size() == 1);
    CHECK(ds.records[0].answer("threat_injury") == nullptr);
    CHECK(ds.records[0].answer("risk_home") != nullptr);
    CHECK(ds.records[0].context_notes.empty());
}

TEST_CASE("free-text answers feed context notes and never the feature vector") {
    const Dataset ds = testsup::tiny_dataset(3);
    CHECK(ds.records[0].context_notes ==
          std::vector<std::string>{"Household 0 remembers the smoke rolling in."});
    const EncodingStats stats = compute_stats(ds);
    const FeatureVector vec = encode_record(ds.records[0], ds.schema, stats);
    CHECK(vec.values.size() == ds.schema.feature_names().size());
}

TEST_CASE("encoding maps binary, ordinal and count answers numerically") {
    const SurveySchema schema = testsup::tiny_schema();
    CHECK(encode_answer(*schema.find("official_order"), "yes") == 1.0);
    CHECK(encode_answer(*schema.find("official_order"), "no") == 0.0);
    CHECK(encode_answer(*schema.find("risk_home"), "4") == 4.0);
    CHECK(encode_answer(*schema.find("household_size"), "6") == 6.0);
}

TEST_CASE("missing answers are imputed from training means and flagged") {
    Dataset ds = testsup::tiny_dataset(4);
    ds.records[1].answers.erase("risk_home");
    const EncodingStats stats = compute_stats(ds);
    const std::vector<std::string> features = ds.schema.feature_names();
    const std::size_t col = static_cast<std::size_t>(
        std::find(features.begin(), features.end(), "risk_home") - features.begin());

    double mean = 0.0;
    for (std::size_t i : {0UL, 2UL, 3UL})
        mean += encode_answer(*ds.schema.find("risk_home"), *ds.records[i].answer("risk_home"));
    mean /= 3.0;
    CHECK(stats.means[col] == doctest::Approx(mean));

    const FeatureVector vec = encode_record(ds.records[1], ds.schema, stats);
    CHECK(vec.values[col] == doctest::Approx(mean));
    CHECK_FALSE(vec.observed[col]);
    CHECK(vec.observed[col + 1]);
}

TEST_CASE("split sizes follow floor(fraction*n) with the remainder at the end") {
    const Dataset ds = testsup::tiny_dataset(10);
    const std::vector<Dataset> parts = split_dataset(ds, {0.8, 0.2}, 7);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].size() == 8);
    CHECK(parts[1].size() == 2);

    const std::vector<Dataset> thirds = split_dataset(ds, {0.3, 0.3, 0.4}, 7);
    REQUIRE(thirds.size() == 3);
    CHECK(thirds[0].size() == 3);
    CHECK(thirds[1].size() == 3);
    CHECK(thirds[2].size() == 4);  // floor remainder joins the last partition

    Dataset large = testsup::tiny_dataset(334);
    const std::vector<Dataset> ratio = split_dataset(large, {0.7, 0.3}, 1, SplitMode::InOrder);
    CHECK(ratio[0].size() == 233);
    CHECK(ratio[1].size() == 101);
}

TEST_CASE("splits are exhaustive, disjoint and seed-deterministic") {
    const Dataset ds = testsup::tiny_dataset(23);
    const auto a = split_dataset(ds, {0.7, 0.3}, 99);
    const auto b = split_dataset(ds, {0.7, 0.3}, 99);
    for (std::size_t p = 0; p < 2; ++p) {
        REQUIRE(a[p].size() == b[p].size());
        for (std::size_t i = 0; i < a[p].size(); ++i)
            CHECK(a[p].records[i].record_id == b[p].records[i].record_id);
    }

    std::set<std::string> seen;
    for (const auto& part : a)
        for (const auto& r : part.records) CHECK(seen.insert(r.record_id).second);
    CHECK(seen.size() == 23);

    const auto c = split_dataset(ds, {0.7, 0.3}, 100);
    bool any_difference = false;
    for (std::size_t i = 0; i < a[0].size(); ++i)
        any_difference |= a[0].records[i].record_id != c[0].records[i].record_id;
    CHECK(any_difference);
}

TEST_CASE("shuffled partitions keep the stored record order") {
    const Dataset ds = testsup::tiny_dataset(17);
    std::vector<std::size_t> position;
    for (const auto& r : ds.records)
        position.push_back(static_cast<std::size_t>(&r - ds.records.data()));
    const auto parts = split_dataset(ds, {0.6, 0.4}, 5);
    for (const auto& part : parts) {
        std::vector<std::string> ids;
        for (const auto& r : part.records) ids.push_back(r.record_id);
        std::vector<std::string> sorted_by_origin = ids;
        std::sort(sorted_by_origin.begin(), sorted_by_origin.end(),
                  [&](const std::string& x, const std::string& y) {
                      auto index = [&](const std::string& id) {
                          for (std::size_t i = 0; i < ds.records.size(); ++i)
                              if (ds.records[i].record_id == id) return i;
                          return ds.records.size();
                      };
                      return index(x) < index(y);
                  });
        CHECK(ids == sorted_by_origin);
    }
}

TEST_CASE("in-order split takes consecutive runs") {
    const Dataset ds = testsup::tiny_dataset(10);
    const auto parts = split_dataset(ds, {0.5, 0.5}, 1, SplitMode::InOrder);
    CHECK(parts[0].records.front().record_id == "t0");
    CHECK(parts[0].records.back().record_id == "t4");
    CHECK(parts[1].records.front().record_id == "t5");
}

TEST_CASE("split rejects bad fractions") {
    const Dataset ds = testsup::tiny_dataset(6);
    CHECK_THROWS_AS(split_dataset(ds, {0.9, 0.3}, 1), BadFractions);
    CHECK_THROWS_AS(split_dataset(ds, {-0.1, 1.1}, 1), BadFractions);
    CHECK_THROWS_AS(split_dataset(ds, {}, 1), BadFractions);
}

TEST_CASE("manifest counts records and the evacuation rate") {
    const Dataset ds = testsup::tiny_dataset(10);
    std::size_t evacuated = 0;
    for (const auto& r : ds.records)
        if (r.decision == DecisionValue::Evacuate) ++evacuated;
    const DatasetManifest m = manifest(ds);
    CHECK(m.n_records == 10);
    CHECK(m.event_name == "Tinyville Fire");
    CHECK(m.evacuation_rate ==
          doctest::Approx(static_cast<double>(evacuated) / 10.0));
}

TEST_CASE("csv parser handles quotes, embedded commas and newlines") {
    const auto rows = csv::parse("a,b\n\"1,5\",\"line\nbreak\"\n\"he said \"\"hi\"\"\",2\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "1,5");
    CHECK(rows[1][1] == "line\nbreak");
    CHECK(rows[2][0] == "he said \"hi\"");
    const std::string again = csv::serialize(rows);
    CHECK(csv::parse(again) == rows);
}

TEST_CASE("bundled event datasets load against their schemas") {
    const SurveySchema cedarville =
        load_schema(testsup::data_path("schema/cedarville.json"));
    const Dataset ds =
        load_dataset(testsup::data_path("datasets/cedarville.csv"), cedarville);
    CHECK(ds.size() >= 60);
    const DatasetManifest m = manifest(ds);
    CHECK(m.evacuation_rate > 0.0);
    CHECK(m.evacuation_rate < 1.0);  // both classes present

    const SurveySchema pinecrest = load_schema(testsup::data_path("schema/pinecrest.json"));
    const Dataset cross = load_dataset(testsup::data_path("datasets/pinecrest.csv"), pinecrest);
    CHECK(cross.size() >= 30);
}
