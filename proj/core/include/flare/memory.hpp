#pragma once

#include "flare/dataset.hpp"
#include "flare/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flare {

/// One logged prediction error: what the pipeline reasoned, what it should
/// have answered, and the later self-reflection.
struct MemoryEntry {
    std::int64_t entry_id = 0;
    std::string record_id;
    std::string cot_text;
    std::string context_text;
    std::string rationale_text;
    DecisionValue correct_decision = DecisionValue::Stay;
    std::string reflection_text;
    linalg::Vector key_embedding;
};

enum class StoreMode { Training, Inference };

/// Append-only error log with similarity retrieval. Inference mode freezes
/// the contents.
class MemoryStore {
public:
    MemoryStore() = default;
    MemoryStore(std::size_t embed_dim, StoreMode mode) : embed_dim_(embed_dim), mode_(mode) {}

    StoreMode mode() const { return mode_; }
    void set_mode(StoreMode mode) { mode_ = mode; }
    std::size_t embed_dim() const { return embed_dim_; }
    const std::vector<MemoryEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// Assigns the next entry_id and appends. Training mode only.
    std::int64_t append(MemoryEntry entry);

    /// Fills the reflection of an unreflected entry. Training mode only;
    /// throws AlreadyReflected when the entry already has one.
    void set_reflection(std::int64_t entry_id, const std::string& reflection_text);

    /// Entries sorted by cosine similarity to the query (descending), ties
    /// by insertion order; at most k results.
    std::vector<MemoryEntry> retrieve_similar(const linalg::Vector& query, std::size_t k) const;

    std::string to_jsonl(const std::string& config_hash) const;
    static MemoryStore from_jsonl(const std::string& text);
    void save(const std::string& path, const std::string& config_hash) const;
    static MemoryStore load(const std::string& path);

private:
    std::vector<MemoryEntry> entries_;
    std::size_t embed_dim_ = 0;
    StoreMode mode_ = StoreMode::Training;
};

/// {Examples} block: numbered context/rationale/correct-decision/reflection
/// stanzas, or "None available".
std::string render_examples_block(const std::vector<MemoryEntry>& entries);

}  // namespace flare
