#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "glow/error.hpp"

namespace glow::llm {

struct ChatRequest {
    std::string system_text;
    std::string user_text;
    std::string model_id;
    double temperature = 0.0;
    int max_tokens = 256;
    std::optional<std::int64_t> seed;
};

struct Prompt {
    std::string system_text;
    std::string user_text;
};

/// Per-role decoding settings (answering model, judge model, ...).
struct ModelSettings {
    std::string model_id;
    double temperature = 0.0;
    int max_tokens = 256;
    std::optional<std::int64_t> seed;

    ChatRequest request(std::string system_text, std::string user_text) const {
        return {std::move(system_text), std::move(user_text), model_id, temperature, max_tokens, seed};
    }
    ChatRequest request(const Prompt& p) const { return request(p.system_text, p.user_text); }
};

struct ChatResponse {
    std::string text;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    /// True when the provider omitted usage and the counts come from estimate_tokens.
    bool usage_estimated = false;
    std::chrono::milliseconds latency{0};
    int retries = 0;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class ProviderError : public Error {
public:
    ProviderError(int status, const std::string& message);
    int status() const { return status_; }

private:
    int status_;
};

/// ceil(code points / 4). Used only when a provider does not report usage.
std::int64_t estimate_tokens(std::string_view text);

/// Stable key for exact-match mock rules: FNV-1a over system + "\n\n" + user.
std::string prompt_hash(const ChatRequest& req);

class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual ChatResponse complete(const ChatRequest& req) = 0;
};

struct HttpClientOptions {
    /// Full chat-completions URL, e.g. https://api.openai.com/v1/chat/completions.
    std::string endpoint;
    std::string api_key;
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double backoff_multiplier = 2.0;
    std::chrono::milliseconds timeout{120'000};
    int max_in_flight = 4;

    /// GLOW_LLM_URL and GLOW_LLM_API_KEY (falls back to OPENAI_API_KEY).
    static HttpClientOptions from_env();
};

/// OpenAI-style chat-completion client. Transport failures, 429 and 5xx are
/// retried with exponential backoff up to `max_attempts` total attempts.
class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(HttpClientOptions options);
    ChatResponse complete(const ChatRequest& req) override;

private:
    HttpClientOptions options_;
    std::counting_semaphore<1024> in_flight_;
};

struct Exchange {
    std::string hash;
    ChatRequest request;
    std::string response;
};

/// Deterministic offline client. Resolution order: exact prompt hash, then
/// the first substring rule whose needles all occur in system + user text,
/// then the fallback text ("UNKNOWN").
class MockChatClient : public ChatClient {
public:
    struct Rule {
        std::vector<std::string> needles;
        std::string response;
    };

    explicit MockChatClient(std::string fallback = "UNKNOWN");

    void add_exact(std::string hash, std::string response);
    void add_rule(std::vector<std::string> needles, std::string response);

    /// Transcript: JSON array of {"hash": h, "response": r} or
    /// {"contains": "s" | ["s", ...], "response": r}.
    static std::unique_ptr<MockChatClient> from_transcript(std::string_view json_text, std::string fallback = "UNKNOWN");
    static std::unique_ptr<MockChatClient> from_transcript_file(const std::string& path, std::string fallback = "UNKNOWN");

    ChatResponse complete(const ChatRequest& req) override;

    std::vector<Exchange> exchanges() const;

private:
    std::string fallback_;
    std::vector<std::pair<std::string, std::string>> exact_;
    std::vector<Rule> rules_;
    mutable std::mutex mu_;
    std::vector<Exchange> log_;
};

/// Forwards to another client and keeps every exchange for replay.
class RecordingChatClient : public ChatClient {
public:
    explicit RecordingChatClient(ChatClient& inner) : inner_(inner) {}
    ChatResponse complete(const ChatRequest& req) override;
    std::vector<Exchange> exchanges() const;

private:
    ChatClient& inner_;
    mutable std::mutex mu_;
    std::vector<Exchange> log_;
};

/// Hash-keyed transcript that MockChatClient replays byte-identically.
std::string to_transcript(const std::vector<Exchange>& exchanges);

}  // namespace glow::llm
