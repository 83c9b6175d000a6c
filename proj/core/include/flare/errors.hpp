#pragma once

#include <stdexcept>
#include <string>

namespace flare {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- dataset ---

struct MissingColumn : Error {
    explicit MissingColumn(const std::string& column)
        : Error("missing column: " + column) {}
};

struct OutOfRangeAnswer : Error {
    OutOfRangeAnswer(std::size_t row, const std::string& variable, const std::string& value)
        : Error("row " + std::to_string(row) + ": answer '" + value + "' out of range for variable '" +
                variable + "'"),
          row(row), variable(variable) {}
    OutOfRangeAnswer(const std::string& variable, const std::string& value)
        : Error("answer '" + value + "' out of range for variable '" + variable + "'"),
          row(0), variable(variable) {}
    std::size_t row;
    std::string variable;
};

struct UnparseableDecision : Error {
    UnparseableDecision(std::size_t row, const std::string& value)
        : Error("row " + std::to_string(row) + ": cannot parse decision from '" + value + "'"), row(row) {}
    std::size_t row;
};

struct UnknownCategoricalLevel : Error {
    UnknownCategoricalLevel(const std::string& variable, const std::string& value)
        : Error("unknown level '" + value + "' for categorical variable '" + variable + "'"),
          variable(variable), value(value) {}
    std::string variable;
    std::string value;
};

struct BadFractions : Error {
    explicit BadFractions(const std::string& why) : Error("bad split fractions: " + why) {}
};

struct EmptyDataset : Error {
    EmptyDataset() : Error("dataset has no records") {}
};

// --- variable selection ---

struct SingularFit : Error {
    SingularFit() : Error("design matrix is rank-deficient and no regularization was requested") {}
};

struct TooFewRecords : Error {
    TooFewRecords(std::size_t records, std::size_t variables)
        : Error("unregularized fit needs at least as many records (" + std::to_string(records) +
                ") as variables (" + std::to_string(variables) + ")") {}
};

struct BadTheta : Error {
    explicit BadTheta(double theta)
        : Error("theta must lie in (0, 1], got " + std::to_string(theta)) {}
};

struct AllZeroWeights : Error {
    AllZeroWeights() : Error("all weights are zero; nothing to select") {}
};

struct TooFewVariables : Error {
    explicit TooFewVariables(std::size_t n)
        : Error("elbow detection needs at least 3 variables, got " + std::to_string(n)) {}
};

// --- reasoning patterns ---

struct MissingSubset : Error {
    explicit MissingSubset(const std::string& kind)
        : Error("no variable subset supplied for indicator " + kind) {}
};

struct ZeroTrials : Error {
    ZeroTrials() : Error("trial count must be at least 1") {}
};

struct EmptyTrainingSet : Error {
    EmptyTrainingSet() : Error("training set is empty") {}
};

struct LengthMismatch : Error {
    LengthMismatch(std::size_t a, std::size_t b)
        : Error("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct DimensionMismatch : Error {
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(got)) {}
};

// --- perception ---

struct ScoreParseFailure : Error {
    explicit ScoreParseFailure(const std::string& tail)
        : Error("no 'Score: N' marker (N in 1..5) found in response: ..." + tail) {}
};

struct EmbedFailure : Error {
    explicit EmbedFailure(const std::string& why) : Error("embedding failed: " + why) {}
};

struct MissingIndicatorAnswer : Error {
    MissingIndicatorAnswer(const std::string& record_id, const std::string& variable)
        : Error("record " + record_id + " has no usable answer for indicator variable '" + variable + "'"),
          record_id(record_id) {}
    std::string record_id;
};

struct StageOrderViolation : Error {
    StageOrderViolation() : Error("risk perception requested before threat assessment was produced") {}
};

// --- chain-of-thought ---

struct MissingPlaceholderValue : Error {
    explicit MissingPlaceholderValue(const std::string& name)
        : Error("no value supplied for placeholder {" + name + "}"), name(name) {}
    std::string name;
};

struct UnknownPlaceholder : Error {
    explicit UnknownPlaceholder(const std::string& name)
        : Error("template declares unknown placeholder {" + name + "}"), name(name) {}
    std::string name;
};

struct AmbiguousDecision : Error {
    explicit AmbiguousDecision(const std::string& tail)
        : Error("response tail does not contain exactly one standalone YES or NO: ..." + tail) {}
};

// --- memory ---

struct StoreModeViolation : Error {
    explicit StoreModeViolation(const std::string& what) : Error(what) {}
};

struct AlreadyReflected : Error {
    explicit AlreadyReflected(const std::string& entry_id)
        : Error("entry " + entry_id + " already carries a reflection") {}
};

// --- llm client ---

struct LlmFailure : Error {
    explicit LlmFailure(const std::string& why) : Error("llm call failed: " + why) {}
};

struct RateLimited : Error {
    explicit RateLimited(const std::string& why) : Error("rate limited after retries: " + why) {}
};

struct TransportFailure : Error {
    explicit TransportFailure(const std::string& why) : Error("transport failure: " + why) {}
};

struct MalformedProviderResponse : Error {
    explicit MalformedProviderResponse(const std::string& why)
        : Error("malformed provider response: " + why) {}
};

struct StubExhausted : Error {
    explicit StubExhausted(const std::string& why) : Error("stub transcript exhausted: " + why) {}
};

struct DimensionDrift : Error {
    DimensionDrift(std::size_t expected, std::size_t got)
        : Error("provider returned embedding of dimension " + std::to_string(got) + ", expected " +
                std::to_string(expected)) {}
};

// --- evaluation ---

struct EmptyInput : Error {
    explicit EmptyInput(const std::string& what) : Error(what + " must not be empty") {}
};

struct OutOfRangeScore : Error {
    explicit OutOfRangeScore(int score)
        : Error("score " + std::to_string(score) + " outside 1..5") {}
};

struct SchemaMismatch : Error {
    SchemaMismatch() : Error("train and test schemas share no variables") {}
};

// --- cli / stages ---

struct ConfigInvalid : Error {
    explicit ConfigInvalid(const std::string& why) : Error("invalid config: " + why) {}
};

struct MissingUpstreamArtifact : Error {
    explicit MissingUpstreamArtifact(const std::string& stage)
        : Error("missing upstream artifact; run '" + stage + "' first"), stage(stage) {}
    std::string stage;
};

}  // namespace flare
