#include "flare/dataset.hpp"

#include "flare/csv.hpp"
#include "flare/errors.hpp"
#include "flare/util.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace flare {

std::string decision_name(DecisionValue value) {
    return value == DecisionValue::Evacuate ? "Evacuate" : "Stay";
}

std::optional<bool> binary_from_answer(std::string_view raw) {
    const std::string t = util::to_lower(util::trim(raw));
    if (t == "yes" || t == "y" || t == "true" || t == "1") return true;
    if (t == "no" || t == "n" || t == "false" || t == "0") return false;
    return std::nullopt;
}

std::optional<DecisionValue> decision_from_answer(std::string_view raw) {
    if (std::optional<bool> b = binary_from_answer(raw))
        return *b ? DecisionValue::Evacuate : DecisionValue::Stay;
    const std::string t = util::to_lower(util::trim(raw));
    if (t == "evacuate" || t == "evacuated") return DecisionValue::Evacuate;
    if (t == "stay" || t == "stayed") return DecisionValue::Stay;
    return std::nullopt;
}

const std::string* SurveyRecord::answer(std::string_view variable) const {
    auto it = answers.find(std::string(variable));
    return it == answers.end() ? nullptr : &it->second;
}

namespace {

void validate_answer(std::size_t row, const VariableSpec& spec, const std::string& raw) {
    switch (spec.kind) {
        case VariableKind::Binary:
            if (!binary_from_answer(raw)) throw OutOfRangeAnswer(row, spec.name, raw);
            return;
        case VariableKind::Ordinal: {
            std::optional<long> v = util::parse_long(raw);
            if (!v || *v < spec.min || *v > spec.max) throw OutOfRangeAnswer(row, spec.name, raw);
            return;
        }
        case VariableKind::Count: {
            std::optional<long> v = util::parse_long(raw);
            if (!v || *v < 0) throw OutOfRangeAnswer(row, spec.name, raw);
            return;
        }
        case VariableKind::Categorical:
        case VariableKind::FreeText:
            return;  // level membership is checked at encode time
    }
}

}  // namespace

Dataset load_dataset(const std::string& path, const SurveySchema& schema) {
    const std::vector<csv::Row> rows = csv::read_file(path);
    if (rows.empty()) throw Error("survey file '" + path + "' has no header row");

    const csv::Row& header = rows.front();
    std::vector<long> column_of(schema.variables.size(), -1);
    long id_column = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = util::trim(header[c]);
        if (name == "record_id") {
            id_column = static_cast<long>(c);
            continue;
        }
        const VariableSpec* spec = schema.find(name);
        if (spec == nullptr)
            throw Error("survey file column '" + name + "' is not a schema variable");
        column_of[schema.index_of(name)] = static_cast<long>(c);
    }
    for (std::size_t i = 0; i < schema.variables.size(); ++i) {
        if (column_of[i] < 0) throw MissingColumn(schema.variables[i].name);
    }

    Dataset dataset;
    dataset.schema = schema;
    std::set<std::string> seen_ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const csv::Row& cells = rows[r];
        if (cells.size() != header.size())
            throw Error("row " + std::to_string(r) + " has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(header.size()));

        SurveyRecord record;
        record.record_id =
            id_column >= 0 ? util::trim(cells[static_cast<std::size_t>(id_column)])
                           : "r" + std::to_string(r - 1);
        if (record.record_id.empty() || !seen_ids.insert(record.record_id).second)
            throw Error("row " + std::to_string(r) + ": empty or duplicate record_id '" +
                        record.record_id + "'");

        for (std::size_t i = 0; i < schema.variables.size(); ++i) {
            const std::string& raw = cells[static_cast<std::size_t>(column_of[i])];
            if (util::trim(raw).empty()) continue;  // missing answer
            validate_answer(r, schema.variables[i], raw);
            record.answers[schema.variables[i].name] = raw;
        }

        const std::string* decision_raw = record.answer(schema.decision_column);
        std::optional<DecisionValue> decision =
            decision_raw ? decision_from_answer(*decision_raw) : std::nullopt;
        if (!decision) throw UnparseableDecision(r, decision_raw ? *decision_raw : "");
        record.decision = *decision;

        for (const VariableSpec& v : schema.variables) {
            if (v.kind != VariableKind::FreeText) continue;
            if (const std::string* note = record.answer(v.name)) record.context_notes.push_back(*note);
        }
        dataset.records.push_back(std::move(record));
    }
    return dataset;
}

void write_dataset(const std::string& path, const Dataset& dataset) {
    std::vector<csv::Row> rows;
    csv::Row header;
    header.push_back("record_id");
    for (const VariableSpec& v : dataset.schema.variables) header.push_back(v.name);
    rows.push_back(std::move(header));
    for (const SurveyRecord& record : dataset.records) {
        csv::Row row;
        row.push_back(record.record_id);
        for (const VariableSpec& v : dataset.schema.variables) {
            const std::string* raw = record.answer(v.name);
            row.push_back(raw ? *raw : "");
        }
        rows.push_back(std::move(row));
    }
    csv::write_file(path, rows);
}

double encode_answer(const VariableSpec& spec, const std::string& raw) {
    switch (spec.kind) {
        case VariableKind::Binary: {
            std::optional<bool> b = binary_from_answer(raw);
            if (!b) throw OutOfRangeAnswer(spec.name, raw);
            return *b ? 1.0 : 0.0;
        }
        case VariableKind::Ordinal:
        case VariableKind::Count: {
            std::optional<double> v = util::parse_double(raw);
            if (!v) throw OutOfRangeAnswer(spec.name, raw);
            return *v;
        }
        case VariableKind::Categorical: {
            const std::string t = util::trim(raw);
            for (std::size_t i = 0; i < spec.levels.size(); ++i) {
                if (spec.levels[i] == t) return static_cast<double>(i);
            }
            throw UnknownCategoricalLevel(spec.name, raw);
        }
        case VariableKind::FreeText:
            throw Error("free-text variable '" + spec.name + "' has no numeric encoding");
    }
    throw Error("unreachable variable kind");
}

EncodingStats compute_stats(const Dataset& train) {
    const std::vector<std::string> features = train.schema.feature_names();
    EncodingStats stats;
    stats.means.assign(features.size(), 0.0);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const VariableSpec& spec = *train.schema.find(features[i]);
        double sum = 0.0;
        std::size_t n = 0;
        for (const SurveyRecord& record : train.records) {
            if (const std::string* raw = record.answer(spec.name)) {
                sum += encode_answer(spec, *raw);
                ++n;
            }
        }
        stats.means[i] = n > 0 ? sum / static_cast<double>(n) : 0.0;
    }
    return stats;
}

FeatureVector encode_record(const SurveyRecord& record, const SurveySchema& schema,
                            const EncodingStats& stats) {
    const std::vector<std::string> features = schema.feature_names();
    if (stats.means.size() != features.size())
        throw LengthMismatch(stats.means.size(), features.size());
    FeatureVector vec;
    vec.values.reserve(features.size());
    vec.observed.reserve(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        const VariableSpec& spec = *schema.find(features[i]);
        if (const std::string* raw = record.answer(spec.name)) {
            vec.values.push_back(encode_answer(spec, *raw));
            vec.observed.push_back(true);
        } else {
            vec.values.push_back(stats.means[i]);
            vec.observed.push_back(false);
        }
    }
    return vec;
}

std::vector<Dataset> split_dataset(const Dataset& dataset, const std::vector<double>& fractions,
                                   std::uint64_t seed, SplitMode mode) {
    if (fractions.empty()) throw BadFractions("no fractions given");
    double sum = 0.0;
    for (double f : fractions) {
        if (f <= 0.0) throw BadFractions("fractions must be positive");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw BadFractions("fractions sum to " + std::to_string(sum));

    const std::size_t n = dataset.size();
    std::vector<std::size_t> sizes(fractions.size());
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        sizes[i] = static_cast<std::size_t>(std::floor(fractions[i] * static_cast<double>(n)));
        assigned += sizes[i];
    }
    sizes.back() += n - assigned;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    if (mode == SplitMode::Shuffled && n > 1) {
        std::mt19937_64 rng(seed);
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
            std::swap(order[i], order[j]);
        }
    }

    std::vector<Dataset> partitions;
    std::size_t cursor = 0;
    for (std::size_t size : sizes) {
        std::vector<std::size_t> members(order.begin() + static_cast<long>(cursor),
                                         order.begin() + static_cast<long>(cursor + size));
        cursor += size;
        // Membership comes from the shuffle; presentation keeps stored order.
        std::sort(members.begin(), members.end());
        Dataset part;
        part.schema = dataset.schema;
        part.records.reserve(size);
        for (std::size_t idx : members) part.records.push_back(dataset.records[idx]);
        partitions.push_back(std::move(part));
    }
    return partitions;
}

DatasetManifest manifest(const Dataset& dataset) {
    if (dataset.empty()) throw EmptyDataset();
    std::size_t evacuees = 0;
    for (const SurveyRecord& record : dataset.records) {
        if (record.decision == DecisionValue::Evacuate) ++evacuees;
    }
    DatasetManifest m;
    m.n_records = dataset.size();
    m.evacuation_rate = static_cast<double>(evacuees) / static_cast<double>(dataset.size());
    m.event_name = dataset.schema.event_name;
    return m;
}

}  // namespace flare
