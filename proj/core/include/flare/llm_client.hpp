#pragma once

#include "flare/linalg.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace flare {

struct ChatRequest {
    std::string system_text;
    std::string user_text;
    double temperature = 0.0;
    std::size_t max_tokens = 1024;
    /// Caller-supplied trace id (e.g. "train/r3/decision/0"); the scripted
    /// stub can key on it and audits group by it.
    std::string request_id;
};

struct TokenUsage {
    std::size_t prompt = 0;
    std::size_t completion = 0;
};

struct ChatResponse {
    std::string content;
    TokenUsage usage;
    std::chrono::milliseconds latency{0};
};

struct RetryPolicy {
    std::size_t max_attempts = 3;
    std::chrono::milliseconds base_backoff{250};
};

enum class ProviderKind { Remote, ScriptedStub };

struct LlmConfig {
    ProviderKind provider = ProviderKind::ScriptedStub;
    std::string endpoint = "https://api.openai.com";
    std::string api_key_env = "FLARE_API_KEY";  // name of the env var, never the key
    std::string model_name = "gpt-4o";
    std::string embed_model_name = "text-embedding-3-small";
    RetryPolicy retry;
    std::size_t concurrency_bound = 4;
    std::size_t embed_dim = 64;  // stub embedder dimension; 0 = accept provider's
    std::string stub_transcript_path;
};

/// Uniform provider interface; every chat or embedding call in the pipeline
/// goes through one of these.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    virtual linalg::Vector embed(const std::string& text) = 0;
    virtual std::size_t embed_dim() const = 0;
    virtual std::string provider_id() const = 0;
};

/// Chat-completions request body with stable key order, shared by the remote
/// client and the wire-format tests.
std::string chat_body_json(const ChatRequest& request, const std::string& model_name);
std::string embed_body_json(const std::string& text, const std::string& model_name);

/// Deterministic test embedding: each lowercase alphanumeric token seeds a
/// splitmix64 stream whose values accumulate into a dim-sized vector, which
/// is then L2-normalized. Same text, same vector — on any platform.
linalg::Vector hash_embed(const std::string& text, std::size_t dim);

/// One scripted exchange. `id` (when set) must equal the request_id and
/// `match` (when set) must occur in system_text + "\n" + user_text; `times`
/// is the number of uses, -1 for unlimited.
struct StubEntry {
    std::string id;
    std::string match;
    std::string response;
    long times = 1;
};

/// Transcript-driven stand-in for the remote provider. complete() walks the
/// transcript from the front and consumes the first unconsumed entry whose
/// guards match; every request is captured for later audits.
class ScriptedStubClient : public LlmClient {
public:
    ScriptedStubClient(std::vector<StubEntry> entries, std::size_t embed_dim);

    static std::vector<StubEntry> parse_transcript(const std::string& json_text);
    static std::vector<StubEntry> load_transcript(const std::string& path);

    ChatResponse complete(const ChatRequest& request) override;
    linalg::Vector embed(const std::string& text) override;
    std::size_t embed_dim() const override { return dim_; }
    std::string provider_id() const override { return "scripted-stub"; }

    std::vector<ChatRequest> captured_requests() const;
    std::vector<std::string> captured_embed_texts() const;

private:
    mutable std::mutex mutex_;
    std::vector<StubEntry> entries_;
    std::vector<long> remaining_;
    std::vector<ChatRequest> captured_;
    std::vector<std::string> embedded_;
    std::size_t dim_;
};

/// OpenAI-compatible HTTP client with bounded concurrency and exponential
/// backoff on 429/5xx.
class RemoteClient : public LlmClient {
public:
    explicit RemoteClient(LlmConfig config);
    ~RemoteClient() override;

    ChatResponse complete(const ChatRequest& request) override;
    linalg::Vector embed(const std::string& text) override;
    std::size_t embed_dim() const override;
    std::string provider_id() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<LlmClient> make_client(const LlmConfig& config);

}  // namespace flare
