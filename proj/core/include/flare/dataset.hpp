#pragma once

#include "flare/schema.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flare {

enum class DecisionValue { Evacuate, Stay };

std::string decision_name(DecisionValue value);  // "Evacuate" / "Stay"

/// Interprets a raw survey answer as a decision. Accepts yes/no, true/false,
/// 1/0 and the words evacuate(d)/stay(ed), case-insensitively.
std::optional<DecisionValue> decision_from_answer(std::string_view raw);

/// Parses a binary answer (yes/no, true/false, 1/0, y/n). nullopt when the
/// text matches neither side.
std::optional<bool> binary_from_answer(std::string_view raw);

struct SurveyRecord {
    std::string record_id;
    /// Raw answer text per variable; missing answers have no entry.
    std::map<std::string, std::string> answers;
    DecisionValue decision = DecisionValue::Stay;
    /// Free-text answers in schema order; fed to prompts, never to vectors.
    std::vector<std::string> context_notes;

    /// Pointer to the raw answer, or nullptr when missing.
    const std::string* answer(std::string_view variable) const;
};

struct Dataset {
    SurveySchema schema;
    std::vector<SurveyRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

struct FeatureVector {
    std::vector<double> values;
    /// Parallel to values; false marks an entry imputed from training means.
    std::vector<bool> observed;
};

struct DatasetManifest {
    std::size_t n_records = 0;
    double evacuation_rate = 0.0;
    std::string event_name;
};

/// Per-feature imputation means, aligned with schema.feature_names().
struct EncodingStats {
    std::vector<double> means;
};

/// Loads a survey CSV. The header must list every schema variable (an extra
/// leading record_id column is honored); rows are validated against variable
/// kinds and the decision answer, with 1-based data-row indices in errors.
Dataset load_dataset(const std::string& path, const SurveySchema& schema);

/// Writes records back to CSV (record_id first, then schema order). Loading
/// the result reproduces the records exactly.
void write_dataset(const std::string& path, const Dataset& dataset);

/// Numeric encoding of one observed answer: binary -> {0,1}, ordinal/count ->
/// value, categorical -> level index.
double encode_answer(const VariableSpec& spec, const std::string& raw);

/// Means of the observed encoded values per feature variable; variables with
/// no observed values get mean 0.
EncodingStats compute_stats(const Dataset& train);

FeatureVector encode_record(const SurveyRecord& record, const SurveySchema& schema,
                            const EncodingStats& stats);

enum class SplitMode {
    Shuffled,  // seeded shuffle decides membership; partitions keep stored order
    InOrder,   // partitions are consecutive runs of the stored order
};

/// Splits into len(fractions) partitions of floor(fraction*n) records each,
/// remainder going to the last. The same seed always reproduces the same
/// partitions.
std::vector<Dataset> split_dataset(const Dataset& dataset, const std::vector<double>& fractions,
                                   std::uint64_t seed, SplitMode mode = SplitMode::Shuffled);

DatasetManifest manifest(const Dataset& dataset);

}  // namespace flare
