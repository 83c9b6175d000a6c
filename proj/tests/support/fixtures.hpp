#pragma once

// Shared test scaffolding: bundled-data paths, throwaway directories,
// in-memory schema/dataset builders, stub-transcript shorthand, and
// golden-file comparison.

#include "flare/dataset.hpp"
#include "flare/llm_client.hpp"
#include "flare/schema.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace testsup {

/// Root of the repository's bundled data tree (schemas, datasets, templates,
/// transcripts, goldens).
std::string data_dir();
std::string data_path(const std::string& relative);

/// mkdtemp-backed scratch directory, removed recursively on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

/// Nine-variable instrument: the decision answer, the four 1-5 indicator
/// answers, two extra cues, a count, and a free-text note.
flare::SurveySchema tiny_schema();

/// Builds one record over tiny_schema(); `answers` lists {variable, raw}
/// pairs, free-text answers land in context_notes like the CSV loader does.
flare::SurveyRecord make_record(const std::string& id,
                                const std::vector<std::pair<std::string, std::string>>& answers,
                                flare::DecisionValue decision);

/// n deterministic records over tiny_schema(), both classes present for
/// n >= 2, every answer populated.
flare::Dataset tiny_dataset(std::size_t n);

flare::StubEntry stub_match(const std::string& match, const std::string& response,
                            long times = -1);
flare::StubEntry stub_id(const std::string& id, const std::string& response, long times = 1);

/// Compares `actual` against the committed golden file (path relative to the
/// data directory). When FLARE_REGEN_GOLDEN is set the golden is rewritten
/// and the comparison passes. Returns nullopt on match, otherwise a short
/// description with the first differing byte.
std::optional<std::string> golden_diff(const std::string& relative, const std::string& actual);

}  // namespace testsup
