#include "flare/llm_client.hpp"

#include "flare/errors.hpp"
#include "flare/util.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <semaphore>
#include <thread>

namespace flare {

std::string chat_body_json(const ChatRequest& request, const std::string& model_name) {
    nlohmann::json body = {
        {"model", model_name},
        {"messages",
         {{{"role", "system"}, {"content", request.system_text}},
          {{"role", "user"}, {"content", request.user_text}}}},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    return body.dump();  // nlohmann keeps keys sorted, so bytes are stable
}

std::string embed_body_json(const std::string& text, const std::string& model_name) {
    nlohmann::json body = {{"model", model_name}, {"input", text}};
    return body.dump();
}

linalg::Vector hash_embed(const std::string& text, std::size_t dim) {
    if (dim == 0) throw EmbedFailure("embedding dimension must be positive");
    const std::vector<std::string> tokens = util::tokenize(text);
    if (tokens.empty()) throw EmbedFailure("text has no alphanumeric tokens");

    linalg::Vector acc(dim, 0.0);
    for (const std::string& token : tokens) {
        std::uint64_t state = util::fnv1a(token);
        for (std::size_t d = 0; d < dim; ++d) {
            const std::uint64_t bits = util::splitmix64(state);
            // Top 53 bits -> [0,1), then shift to [-1,1).
            const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;
            acc[d] += 2.0 * unit - 1.0;
        }
    }
    const double n = linalg::norm(acc);
    if (n < 1e-12) throw EmbedFailure("degenerate embedding for text");
    for (double& v : acc) v /= n;
    return acc;
}

// --- scripted stub ---

ScriptedStubClient::ScriptedStubClient(std::vector<StubEntry> entries, std::size_t embed_dim)
    : entries_(std::move(entries)), dim_(embed_dim) {
    if (dim_ == 0) throw ConfigInvalid("stub embed_dim must be positive");
    remaining_.reserve(entries_.size());
    for (const StubEntry& entry : entries_) {
        if (entry.times == 0 || entry.times < -1)
            throw ConfigInvalid("stub entry times must be positive or -1");
        remaining_.push_back(entry.times);
    }
}

std::vector<StubEntry> ScriptedStubClient::parse_transcript(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("stub transcript is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ConfigInvalid("stub transcript must be a JSON array");
    std::vector<StubEntry> entries;
    for (const nlohmann::json& item : doc) {
        try {
            StubEntry entry;
            entry.response = item.at("response").get<std::string>();
            if (item.contains("id")) entry.id = item.at("id").get<std::string>();
            if (item.contains("match")) entry.match = item.at("match").get<std::string>();
            if (item.contains("times")) entry.times = item.at("times").get<long>();
            entries.push_back(std::move(entry));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigInvalid(std::string("stub transcript entry ") +
                                std::to_string(entries.size()) + " is invalid: " + e.what());
        }
    }
    return entries;
}

std::vector<StubEntry> ScriptedStubClient::load_transcript(const std::string& path) {
    return parse_transcript(util::read_file(path));
}

ChatResponse ScriptedStubClient::complete(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    captured_.push_back(request);
    const std::string haystack = request.system_text + "\n" + request.user_text;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (remaining_[i] == 0) continue;
        const StubEntry& entry = entries_[i];
        if (!entry.id.empty() && entry.id != request.request_id) continue;
        if (!entry.match.empty() && haystack.find(entry.match) == std::string::npos) continue;
        if (remaining_[i] > 0) --remaining_[i];
        ChatResponse response;
        response.content = entry.response;
        response.usage.prompt = util::tokenize(haystack).size();
        response.usage.completion = util::tokenize(entry.response).size();
        return response;
    }
    throw StubExhausted("no entry matches request '" + request.request_id + "' (user text: " +
                        request.user_text.substr(0, 120) + "...)");
}

linalg::Vector ScriptedStubClient::embed(const std::string& text) {
    {
        std::lock_guard lock(mutex_);
        embedded_.push_back(text);
    }
    return hash_embed(text, dim_);
}

std::vector<ChatRequest> ScriptedStubClient::captured_requests() const {
    std::lock_guard lock(mutex_);
    return captured_;
}

std::vector<std::string> ScriptedStubClient::captured_embed_texts() const {
    std::lock_guard lock(mutex_);
    return embedded_;
}

// --- remote client ---

struct RemoteClient::Impl {
    LlmConfig config;
    std::string api_key;
    std::string host;  // scheme://host[:port]
    std::counting_semaphore<> slots;
    std::mutex dim_mutex;
    std::size_t seen_dim = 0;

    explicit Impl(LlmConfig cfg)
        : config(std::move(cfg)),
          slots(static_cast<std::ptrdiff_t>(std::max<std::size_t>(config.concurrency_bound, 1))) {
        const char* key = std::getenv(config.api_key_env.c_str());
        if (key == nullptr || *key == '\0')
            throw ConfigInvalid("environment variable " + config.api_key_env +
                                " must hold the API key");
        api_key = key;
        host = config.endpoint;
        while (!host.empty() && host.back() == '/') host.pop_back();
        if (host.empty()) throw ConfigInvalid("remote endpoint must not be empty");
    }

    /// POSTs with retries on 429/5xx/transport errors; returns the 200 body.
    std::string post(const std::string& path, const std::string& body) {
        slots.acquire();
        struct Release {
            std::counting_semaphore<>* s;
            ~Release() { s->release(); }
        } release{&slots};

        std::string last_error;
        bool last_was_rate_limit = false;
        for (std::size_t attempt = 1; attempt <= config.retry.max_attempts; ++attempt) {
            if (attempt > 1) {
                const auto backoff = config.retry.base_backoff * (1L << (attempt - 2));
                std::this_thread::sleep_for(backoff);
            }
            httplib::Client client(host);
            client.set_connection_timeout(10, 0);
            client.set_read_timeout(120, 0);
            httplib::Headers headers = {{"Authorization", "Bearer " + api_key}};
            httplib::Result result = client.Post(path, headers, body, "application/json");
            if (!result) {
                last_error = "transport: " + httplib::to_string(result.error());
                last_was_rate_limit = false;
                continue;
            }
            if (result->status == 200) return result->body;
            if (result->status == 429 || result->status >= 500) {
                last_error = "HTTP " + std::to_string(result->status);
                last_was_rate_limit = result->status == 429;
                continue;
            }
            throw TransportFailure("HTTP " + std::to_string(result->status) + " from " + host +
                                   path + ": " + result->body.substr(0, 200));
        }
        if (last_was_rate_limit)
            throw RateLimited(last_error + " after " + std::to_string(config.retry.max_attempts) +
                              " attempts");
        throw TransportFailure(last_error + " after " + std::to_string(config.retry.max_attempts) +
                               " attempts");
    }
};

RemoteClient::RemoteClient(LlmConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

RemoteClient::~RemoteClient() = default;

ChatResponse RemoteClient::complete(const ChatRequest& request) {
    if (request.system_text.empty() || request.user_text.empty())
        throw LlmFailure("chat request texts must be nonempty");
    const auto start = std::chrono::steady_clock::now();
    const std::string body =
        impl_->post("/v1/chat/completions", chat_body_json(request, impl_->config.model_name));
    const auto elapsed = std::chrono::steady_clock::now() - start;

    try {
        const nlohmann::json doc = nlohmann::json::parse(body);
        ChatResponse response;
        response.content = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        if (doc.contains("usage")) {
            response.usage.prompt = doc["usage"].value("prompt_tokens", 0);
            response.usage.completion = doc["usage"].value("completion_tokens", 0);
        }
        response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed);
        return response;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedProviderResponse(std::string("chat response: ") + e.what());
    }
}

linalg::Vector RemoteClient::embed(const std::string& text) {
    if (text.empty()) throw EmbedFailure("text must be nonempty");
    const std::string body =
        impl_->post("/v1/embeddings", embed_body_json(text, impl_->config.embed_model_name));
    linalg::Vector vec;
    try {
        const nlohmann::json doc = nlohmann::json::parse(body);
        for (const nlohmann::json& v : doc.at("data").at(0).at("embedding"))
            vec.push_back(v.get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw MalformedProviderResponse(std::string("embedding response: ") + e.what());
    }

    std::lock_guard lock(impl_->dim_mutex);
    const std::size_t expected =
        impl_->config.embed_dim > 0 ? impl_->config.embed_dim : impl_->seen_dim;
    if (expected > 0 && vec.size() != expected) throw DimensionDrift(expected, vec.size());
    impl_->seen_dim = vec.size();
    return vec;
}

std::size_t RemoteClient::embed_dim() const {
    if (impl_->config.embed_dim > 0) return impl_->config.embed_dim;
    std::lock_guard lock(impl_->dim_mutex);
    return impl_->seen_dim;
}

std::string RemoteClient::provider_id() const {
    return "remote:" + impl_->config.model_name + "+" + impl_->config.embed_model_name;
}

std::unique_ptr<LlmClient> make_client(const LlmConfig& config) {
    if (config.provider == ProviderKind::Remote)
        return std::make_unique<RemoteClient>(config);
    std::vector<StubEntry> entries;
    if (!config.stub_transcript_path.empty())
        entries = ScriptedStubClient::load_transcript(config.stub_transcript_path);
    return std::make_unique<ScriptedStubClient>(std::move(entries), config.embed_dim);
}

}  // namespace flare
