#include "glow/llm_gateway.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "glow/text.hpp"
#include "http.hpp"

namespace glow::llm {

using json = nlohmann::json;

ProviderError::ProviderError(int status, const std::string& message)
    : Error("LLM provider error" + (status ? " (status " + std::to_string(status) + ")" : std::string()) + ": " +
            message),
      status_(status) {}

std::int64_t estimate_tokens(std::string_view text) {
    auto n = static_cast<std::int64_t>(text::utf8_length(text));
    return (n + 3) / 4;
}

std::string prompt_hash(const ChatRequest& req) {
    return text::fnv1a_hex(req.system_text + "\n\n" + req.user_text);
}

namespace {

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

std::string error_message(const std::string& body) {
    try {
        auto doc = json::parse(body);
        if (doc.contains("error")) {
            const auto& e = doc["error"];
            if (e.is_string()) return e.get<std::string>();
            if (e.is_object() && e.contains("message")) return e["message"].get<std::string>();
            return e.dump();
        }
    } catch (const json::exception&) {
    }
    return body.substr(0, 300);
}

bool transient_status(int status) { return status == 429 || status >= 500; }

ChatResponse estimated(std::string text, const ChatRequest& req) {
    ChatResponse r;
    r.prompt_tokens = estimate_tokens(req.system_text) + estimate_tokens(req.user_text);
    r.completion_tokens = estimate_tokens(text);
    r.usage_estimated = true;
    r.text = std::move(text);
    return r;
}

}  // namespace

HttpClientOptions HttpClientOptions::from_env() {
    HttpClientOptions o;
    o.endpoint = env_or_empty("GLOW_LLM_URL");
    o.api_key = env_or_empty("GLOW_LLM_API_KEY");
    if (o.api_key.empty()) o.api_key = env_or_empty("OPENAI_API_KEY");
    return o;
}

HttpChatClient::HttpChatClient(HttpClientOptions options)
    : options_(std::move(options)), in_flight_(std::max(1, std::min(options_.max_in_flight, 1024))) {
    if (options_.endpoint.empty()) throw Error("LLM endpoint URL is not configured");
    if (options_.max_attempts < 1) options_.max_attempts = 1;
}

ChatResponse HttpChatClient::complete(const ChatRequest& req) {
    if (req.user_text.empty()) throw Error("chat request has empty user text");
    json body = {
        {"model", req.model_id},
        {"messages", json::array({{{"role", "system"}, {"content", req.system_text}},
                                  {{"role", "user"}, {"content", req.user_text}}})},
        {"temperature", req.temperature},
        {"max_tokens", req.max_tokens},
    };
    if (req.seed) body["seed"] = *req.seed;
    const auto payload = body.dump();

    http::Headers headers;
    if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);

    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{in_flight_};

    const auto start = std::chrono::steady_clock::now();
    auto backoff = options_.initial_backoff;
    std::string last_failure;
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
        if (attempt > 1) {
            spdlog::warn("LLM request attempt {}/{} after: {}", attempt, options_.max_attempts, last_failure);
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(backoff.count()) * options_.backoff_multiplier));
        }
        http::Response res;
        try {
            res = http::post(options_.endpoint, payload, "application/json", headers, options_.timeout);
        } catch (const http::TransportError& e) {
            last_failure = e.what();
            continue;
        }
        if (transient_status(res.status)) {
            last_failure = "status " + std::to_string(res.status) + ": " + error_message(res.body);
            continue;
        }
        if (res.status != 200) throw ProviderError(res.status, error_message(res.body));

        json doc;
        try {
            doc = json::parse(res.body);
        } catch (const json::exception& e) {
            throw ProviderError(res.status, std::string("unparseable response: ") + e.what());
        }
        if (doc.contains("error")) throw ProviderError(res.status, error_message(res.body));
        ChatResponse out;
        try {
            out.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw ProviderError(res.status, std::string("response has no message content: ") + e.what());
        }
        if (doc.contains("usage") && doc["usage"].is_object()) {
            const auto& u = doc["usage"];
            out.prompt_tokens = u.value("prompt_tokens", std::int64_t{0});
            out.completion_tokens = u.value("completion_tokens", std::int64_t{0});
        } else {
            auto e = estimated(out.text, req);
            out.prompt_tokens = e.prompt_tokens;
            out.completion_tokens = e.completion_tokens;
            out.usage_estimated = true;
        }
        out.retries = attempt - 1;
        out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        return out;
    }
    throw TransportError("LLM endpoint " + options_.endpoint + " failed after " +
                         std::to_string(options_.max_attempts) + " attempts: " + last_failure);
}

MockChatClient::MockChatClient(std::string fallback) : fallback_(std::move(fallback)) {}

void MockChatClient::add_exact(std::string hash, std::string response) {
    exact_.emplace_back(std::move(hash), std::move(response));
}

void MockChatClient::add_rule(std::vector<std::string> needles, std::string response) {
    rules_.push_back({std::move(needles), std::move(response)});
}

std::unique_ptr<MockChatClient> MockChatClient::from_transcript(std::string_view json_text, std::string fallback) {
    auto mock = std::make_unique<MockChatClient>(std::move(fallback));
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(std::string("mock transcript is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw Error("mock transcript must be a JSON array of records");
    for (const auto& rec : doc) {
        if (!rec.contains("response")) throw Error("mock transcript record lacks \"response\": " + rec.dump());
        auto response = rec["response"].get<std::string>();
        if (rec.contains("hash")) {
            mock->add_exact(rec["hash"].get<std::string>(), std::move(response));
        } else if (rec.contains("contains")) {
            std::vector<std::string> needles;
            if (rec["contains"].is_string()) {
                needles.push_back(rec["contains"].get<std::string>());
            } else {
                needles = rec["contains"].get<std::vector<std::string>>();
            }
            mock->add_rule(std::move(needles), std::move(response));
        } else {
            throw Error("mock transcript record needs \"hash\" or \"contains\": " + rec.dump());
        }
    }
    return mock;
}

std::unique_ptr<MockChatClient> MockChatClient::from_transcript_file(const std::string& path, std::string fallback) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mock transcript " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_transcript(ss.str(), std::move(fallback));
}

ChatResponse MockChatClient::complete(const ChatRequest& req) {
    if (req.user_text.empty()) throw Error("chat request has empty user text");
    const auto start = std::chrono::steady_clock::now();
    const auto hash = prompt_hash(req);
    const std::string* found = nullptr;
    for (const auto& [h, r] : exact_) {
        if (h == hash) {
            found = &r;
            break;
        }
    }
    if (!found) {
        const auto haystack = req.system_text + "\n\n" + req.user_text;
        for (const auto& rule : rules_) {
            bool all = true;
            for (const auto& n : rule.needles) {
                if (haystack.find(n) == std::string::npos) {
                    all = false;
                    break;
                }
            }
            if (all) {
                found = &rule.response;
                break;
            }
        }
    }
    auto out = estimated(found ? *found : fallback_, req);
    out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    std::lock_guard lock(mu_);
    log_.push_back({hash, req, out.text});
    return out;
}

std::vector<Exchange> MockChatClient::exchanges() const {
    std::lock_guard lock(mu_);
    return log_;
}

ChatResponse RecordingChatClient::complete(const ChatRequest& req) {
    auto res = inner_.complete(req);
    std::lock_guard lock(mu_);
    log_.push_back({prompt_hash(req), req, res.text});
    return res;
}

std::vector<Exchange> RecordingChatClient::exchanges() const {
    std::lock_guard lock(mu_);
    return log_;
}

std::string to_transcript(const std::vector<Exchange>& exchanges) {
    json out = json::array();
    for (const auto& e : exchanges) out.push_back({{"hash", e.hash}, {"response", e.response}});
    return out.dump(2);
}

}  // namespace glow::llm
