#include "support/fixtures.hpp"

#include "flare/util.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace testsup {

std::string data_dir() { return FLARE_DATA_DIR; }

std::string data_path(const std::string& relative) { return data_dir() + "/" + relative; }

TempDir::TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "flare-test-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr)
        throw std::runtime_error("mkdtemp failed for " + tmpl);
    path_ = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);  // best effort; leaks stay in /tmp
}

flare::SurveySchema tiny_schema() {
    static const char* json = R"schema({
  "event_name": "Tinyville Fire",
  "decision_column": "evacuated",
  "variables": [
    {"name": "evacuated", "kind": "binary", "question": "Did you evacuate during the wildfire?"},
    {"name": "threat_injury", "kind": "ordinal", "min": 1, "max": 5, "indicator": "ThreatInjury",
     "question": "How likely did you think it was that you or a family member would be injured by the fire? (1 = not at all, 5 = certain)",
     "tags": ["perception", "threat"]},
    {"name": "threat_death", "kind": "ordinal", "min": 1, "max": 5, "indicator": "ThreatDeath",
     "question": "How likely did you think it was that someone in your household could die because of the fire? (1 = not at all, 5 = certain)",
     "tags": ["perception", "threat"]},
    {"name": "risk_home", "kind": "ordinal", "min": 1, "max": 5, "indicator": "RiskHome",
     "question": "How much danger did you believe your home was in? (1 = none, 5 = certain destruction)",
     "tags": ["perception", "risk"]},
    {"name": "risk_neighborhood", "kind": "ordinal", "min": 1, "max": 5, "indicator": "RiskNeighborhood",
     "question": "How much danger did you believe the fire posed to your neighborhood as a whole? (1 = none, 5 = certain destruction)",
     "tags": ["perception", "risk"]},
    {"name": "neighbors_left", "kind": "ordinal", "min": 1, "max": 5,
     "question": "How many of your immediate neighbors left before or around the time you decided? (1 = none, 5 = all of them)",
     "tags": ["social_cue"]},
    {"name": "official_order", "kind": "binary",
     "question": "Did you receive an official evacuation order?",
     "tags": ["order_awareness"]},
    {"name": "household_size", "kind": "count",
     "question": "How many people live in your household?",
     "tags": ["socio_demographic"]},
    {"name": "notes", "kind": "free_text",
     "question": "Anything else about that night you want to share?",
     "tags": ["narrative"]}
  ]
})schema";
    return flare::parse_schema(json);
}

flare::SurveyRecord make_record(const std::string& id,
                                const std::vector<std::pair<std::string, std::string>>& answers,
                                flare::DecisionValue decision) {
    const flare::SurveySchema schema = tiny_schema();
    flare::SurveyRecord record;
    record.record_id = id;
    record.decision = decision;
    record.answers[schema.decision_column] =
        decision == flare::DecisionValue::Evacuate ? "yes" : "no";
    for (const auto& [name, raw] : answers) {
        record.answers[name] = raw;
    }
    for (const flare::VariableSpec& spec : schema.variables) {
        if (spec.kind != flare::VariableKind::FreeText) continue;
        const std::string* raw = record.answer(spec.name);
        if (raw != nullptr && !raw->empty()) record.context_notes.push_back(*raw);
    }
    return record;
}

flare::Dataset tiny_dataset(std::size_t n) {
    flare::Dataset dataset;
    dataset.schema = tiny_schema();
    for (std::size_t i = 0; i < n; ++i) {
        const int ti = 1 + static_cast<int>((i * 2) % 5);
        const int td = 1 + static_cast<int>((i * 3) % 5);
        const int rh = 1 + static_cast<int>(i % 5);
        const int rn = 1 + static_cast<int>((i * 7) % 5);
        const int nl = 1 + static_cast<int>((i + 2) % 5);
        const bool evac = ti + nl >= 6;
        std::ostringstream note;
        note << "Household " << i << " remembers the smoke rolling in.";
        dataset.records.push_back(make_record(
            "t" + std::to_string(i),
            {{"threat_injury", std::to_string(ti)},
             {"threat_death", std::to_string(td)},
             {"risk_home", std::to_string(rh)},
             {"risk_neighborhood", std::to_string(rn)},
             {"neighbors_left", std::to_string(nl)},
             {"official_order", i % 2 == 0 ? "no" : "yes"},
             {"household_size", std::to_string(1 + i % 6)},
             {"notes", note.str()}},
            evac ? flare::DecisionValue::Evacuate : flare::DecisionValue::Stay));
    }
    return dataset;
}

flare::StubEntry stub_match(const std::string& match, const std::string& response, long times) {
    flare::StubEntry entry;
    entry.match = match;
    entry.response = response;
    entry.times = times;
    return entry;
}

flare::StubEntry stub_id(const std::string& id, const std::string& response, long times) {
    flare::StubEntry entry;
    entry.id = id;
    entry.response = response;
    entry.times = times;
    return entry;
}

std::optional<std::string> golden_diff(const std::string& relative, const std::string& actual) {
    const std::string path = data_path(relative);
    if (std::getenv("FLARE_REGEN_GOLDEN") != nullptr) {
        std::filesystem::create_directories(std::filesystem::path(path).parent_path());
        flare::util::write_file(path, actual);
        return std::nullopt;
    }
    if (!flare::util::file_exists(path))
        return "golden file missing: " + path + " (set FLARE_REGEN_GOLDEN=1 to create it)";
    const std::string expected = flare::util::read_file(path);
    if (expected == actual) return std::nullopt;
    std::size_t at = 0;
    while (at < expected.size() && at < actual.size() && expected[at] == actual[at]) ++at;
    std::ostringstream msg;
    msg << relative << " differs from rendered output at byte " << at << " (golden "
        << expected.size() << " bytes, actual " << actual.size() << " bytes); context: \""
        << actual.substr(at > 30 ? at - 30 : 0, 60) << "\"";
    return msg.str();
}

}  // namespace testsup
