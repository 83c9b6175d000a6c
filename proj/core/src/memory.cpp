#include "flare/memory.hpp"

#include "flare/errors.hpp"
#include "flare/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace flare {

std::int64_t MemoryStore::append(MemoryEntry entry) {
    if (mode_ != StoreMode::Training)
        throw StoreModeViolation("cannot append to a memory store in inference mode");
    if (entry.key_embedding.size() != embed_dim_)
        throw DimensionMismatch(embed_dim_, entry.key_embedding.size());
    entry.entry_id = entries_.empty() ? 0 : entries_.back().entry_id + 1;
    entries_.push_back(std::move(entry));
    return entries_.back().entry_id;
}

void MemoryStore::set_reflection(std::int64_t entry_id, const std::string& reflection_text) {
    if (mode_ != StoreMode::Training)
        throw StoreModeViolation("cannot reflect on a memory store in inference mode");
    for (MemoryEntry& entry : entries_) {
        if (entry.entry_id != entry_id) continue;
        if (!entry.reflection_text.empty()) throw AlreadyReflected(std::to_string(entry_id));
        entry.reflection_text = reflection_text;
        return;
    }
    throw Error("no memory entry with id " + std::to_string(entry_id));
}

std::vector<MemoryEntry> MemoryStore::retrieve_similar(const linalg::Vector& query,
                                                       std::size_t k) const {
    if (query.size() != embed_dim_) throw DimensionMismatch(embed_dim_, query.size());
    std::vector<std::size_t> order(entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> similarity(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i)
        similarity[i] = linalg::cosine(query, entries_[i].key_embedding);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return similarity[a] > similarity[b];  // stability keeps insertion order on ties
    });
    std::vector<MemoryEntry> result;
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i)
        result.push_back(entries_[order[i]]);
    return result;
}

std::string MemoryStore::to_jsonl(const std::string& config_hash) const {
    nlohmann::json header = {{"v", 1},
                             {"embed_dim", embed_dim_},
                             {"config_hash", config_hash}};
    std::string out = header.dump() + "\n";
    for (const MemoryEntry& entry : entries_) {
        nlohmann::json line = {{"entry_id", entry.entry_id},
                               {"record_id", entry.record_id},
                               {"cot_text", entry.cot_text},
                               {"context_text", entry.context_text},
                               {"rationale_text", entry.rationale_text},
                               {"correct_decision", decision_name(entry.correct_decision)},
                               {"reflection_text", entry.reflection_text},
                               {"key_embedding", entry.key_embedding}};
        out += line.dump() + "\n";
    }
    return out;
}

MemoryStore MemoryStore::from_jsonl(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') {
            if (!current.empty()) lines.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) lines.push_back(current);
    if (lines.empty()) throw ConfigInvalid("memory store file lacks a header line");

    try {
        const nlohmann::json header = nlohmann::json::parse(lines.front());
        if (header.value("v", 0) != 1)
            throw ConfigInvalid("unsupported memory store version");
        MemoryStore store(header.at("embed_dim").get<std::size_t>(), StoreMode::Training);
        std::int64_t last_id = -1;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const nlohmann::json item = nlohmann::json::parse(lines[i]);
            MemoryEntry entry;
            entry.entry_id = item.at("entry_id").get<std::int64_t>();
            entry.record_id = item.at("record_id").get<std::string>();
            entry.cot_text = item.at("cot_text").get<std::string>();
            entry.context_text = item.at("context_text").get<std::string>();
            entry.rationale_text = item.at("rationale_text").get<std::string>();
            const std::string decision = item.at("correct_decision").get<std::string>();
            const std::optional<DecisionValue> value = decision_from_answer(decision);
            if (!value) throw ConfigInvalid("bad correct_decision '" + decision + "'");
            entry.correct_decision = *value;
            entry.reflection_text = item.at("reflection_text").get<std::string>();
            entry.key_embedding = item.at("key_embedding").get<linalg::Vector>();
            if (entry.key_embedding.size() != store.embed_dim())
                throw DimensionMismatch(store.embed_dim(), entry.key_embedding.size());
            if (entry.entry_id <= last_id)
                throw ConfigInvalid("memory entry ids must be strictly increasing");
            last_id = entry.entry_id;
            store.entries_.push_back(std::move(entry));
        }
        return store;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("memory store file: ") + e.what());
    }
}

void MemoryStore::save(const std::string& path, const std::string& config_hash) const {
    util::write_file(path, to_jsonl(config_hash));
}

MemoryStore MemoryStore::load(const std::string& path) {
    return from_jsonl(util::read_file(path));
}

std::string render_examples_block(const std::vector<MemoryEntry>& entries) {
    if (entries.empty()) return "None available";
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const MemoryEntry& entry = entries[i];
        if (i > 0) out += "\n\n";
        out += "Example " + std::to_string(i + 1) + ":\n";
        out += "Context: " + entry.context_text + "\n";
        out += "Rationale: " + entry.rationale_text + "\n";
        out += "Correct decision: " +
               std::string(entry.correct_decision == DecisionValue::Evacuate ? "evacuated"
                                                                             : "stayed");
        if (!entry.reflection_text.empty()) out += "\nReflection: " + entry.reflection_text;
    }
    return out;
}

}  // namespace flare
