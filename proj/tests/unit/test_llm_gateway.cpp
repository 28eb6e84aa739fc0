#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <atomic>

#include "glow/llm_gateway.hpp"
#include "glow/text.hpp"
#include "stub_servers.hpp"

using namespace glow;
using json = nlohmann::json;

namespace {

std::string completion(const std::string& text, bool usage = true) {
    json doc{{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}}};
    if (usage) doc["usage"] = {{"prompt_tokens", 11}, {"completion_tokens", 2}};
    return doc.dump();
}

llm::HttpClientOptions fast(const std::string& url) {
    llm::HttpClientOptions o;
    o.endpoint = url;
    o.initial_backoff = std::chrono::milliseconds(1);
    o.timeout = std::chrono::milliseconds(2000);
    return o;
}

}  // namespace

TEST(Tokens, EstimateIsCeilOfCodePointsOverFour) {
    EXPECT_EQ(llm::estimate_tokens(""), 0);
    EXPECT_EQ(llm::estimate_tokens("abcd"), 1);
    EXPECT_EQ(llm::estimate_tokens("abcde"), 2);
    EXPECT_EQ(llm::estimate_tokens("\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9"), 1);
}

TEST(Mock, HashCoversSystemAndUser) {
    llm::ChatRequest req{"sys", "user", "m"};
    EXPECT_EQ(llm::prompt_hash(req), text::fnv1a_hex("sys\n\nuser"));
    req.model_id = "other";
    EXPECT_EQ(llm::prompt_hash(req), text::fnv1a_hex("sys\n\nuser"));
}

TEST(Mock, ExactBeforeRulesBeforeFallback) {
    llm::MockChatClient mock("NOPE");
    mock.add_rule({"alpha"}, "rule");
    mock.add_rule({"alpha", "beta"}, "second rule");
    mock.add_exact(llm::prompt_hash({"s", "alpha beta"}), "exact");
    EXPECT_EQ(mock.complete({"s", "alpha beta"}).text, "exact");
    EXPECT_EQ(mock.complete({"s", "alpha gamma"}).text, "rule");
    EXPECT_EQ(mock.complete({"s", "gamma"}).text, "NOPE");
    auto r = mock.complete({"abcd", "efgh"});
    EXPECT_TRUE(r.usage_estimated);
    EXPECT_EQ(r.prompt_tokens, 2);
    EXPECT_EQ(mock.exchanges().size(), 4u);
}

TEST(Mock, NeedlesMaySpanSystemText) {
    llm::MockChatClient mock;
    mock.add_rule({"Judge", "pairs"}, "ok");
    EXPECT_EQ(mock.complete({"LLM-as-a-Judge", "list of pairs"}).text, "ok");
}

TEST(Mock, TranscriptFormats) {
    auto mock = llm::MockChatClient::from_transcript(
        R"([{"contains": "one", "response": "1"}, {"contains": ["t", "wo"], "response": "2"},
            {"hash": "0000000000000000", "response": "never"}])");
    EXPECT_EQ(mock->complete({"", "one"}).text, "1");
    EXPECT_EQ(mock->complete({"", "two"}).text, "2");
    EXPECT_THROW(llm::MockChatClient::from_transcript("{}"), Error);
    EXPECT_THROW(llm::MockChatClient::from_transcript(R"([{"response": "x"}])"), Error);
}

TEST(Mock, RecordedTranscriptReplaysByteIdentically) {
    llm::MockChatClient live;
    live.add_rule({"q"}, "answer with \"quotes\"\nand lines");
    llm::RecordingChatClient rec(live);
    rec.complete({"system", "q1"});
    rec.complete({"system", "q2 \xe2\x86\x92"});
    auto replay = llm::MockChatClient::from_transcript(llm::to_transcript(rec.exchanges()), "MISS");
    EXPECT_EQ(replay->complete({"system", "q1"}).text, "answer with \"quotes\"\nand lines");
    EXPECT_EQ(replay->complete({"system", "q2 \xe2\x86\x92"}).text, "answer with \"quotes\"\nand lines");
    EXPECT_EQ(replay->complete({"system", "q3"}).text, "MISS");
}

TEST(HttpChat, RetriesRateLimitsThenSucceeds) {
    std::atomic<int> calls{0};
    json last;
    test::StubServer server([&](httplib::Server& s) {
        s.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
            if (++calls <= 2) {
                res.status = 429;
                res.set_content(R"({"error":{"message":"slow down"}})", "application/json");
                return;
            }
            last = json::parse(req.body);
            EXPECT_EQ(req.get_header_value("Authorization"), "Bearer k");
            res.set_content(completion("Organic"), "application/json");
        });
    });
    auto opts = fast(server.url() + "/v1/chat/completions");
    opts.api_key = "k";
    llm::HttpChatClient client(opts);
    llm::ModelSettings m{"gpt-test", 0.0, 64, 7};
    auto r = client.complete(m.request("sys", "user"));
    EXPECT_EQ(r.text, "Organic");
    EXPECT_EQ(r.retries, 2);
    EXPECT_EQ(calls.load(), 3);
    EXPECT_EQ(r.prompt_tokens, 11);
    EXPECT_FALSE(r.usage_estimated);
    EXPECT_EQ(last["model"], "gpt-test");
    EXPECT_EQ(last["max_tokens"], 64);
    EXPECT_EQ(last["seed"], 7);
    EXPECT_EQ(last["messages"][1]["content"], "user");
}

TEST(HttpChat, GivesUpAfterMaxAttempts) {
    std::atomic<int> calls{0};
    test::StubServer server([&](httplib::Server& s) {
        s.Post("/c", [&](const httplib::Request&, httplib::Response& res) {
            ++calls;
            res.status = 503;
        });
    });
    llm::HttpChatClient client(fast(server.url() + "/c"));
    EXPECT_THROW(client.complete({"s", "u"}), llm::TransportError);
    EXPECT_EQ(calls.load(), 3);
}

TEST(HttpChat, ClientErrorsAreNotRetried) {
    std::atomic<int> calls{0};
    test::StubServer server([&](httplib::Server& s) {
        s.Post("/c", [&](const httplib::Request&, httplib::Response& res) {
            ++calls;
            res.status = 401;
            res.set_content(R"({"error":{"message":"bad key"}})", "application/json");
        });
    });
    llm::HttpChatClient client(fast(server.url() + "/c"));
    try {
        client.complete({"s", "u"});
        FAIL();
    } catch (const llm::ProviderError& e) {
        EXPECT_EQ(e.status(), 401);
        EXPECT_NE(std::string(e.what()).find("bad key"), std::string::npos);
    }
    EXPECT_EQ(calls.load(), 1);
}

TEST(HttpChat, MissingUsageIsEstimated) {
    test::StubServer server([](httplib::Server& s) {
        s.Post("/c", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(completion("abcdefgh", false), "application/json");
        });
    });
    llm::HttpChatClient client(fast(server.url() + "/c"));
    auto r = client.complete({"abcd", "abcd"});
    EXPECT_TRUE(r.usage_estimated);
    EXPECT_EQ(r.prompt_tokens, 2);
    EXPECT_EQ(r.completion_tokens, 2);
}

TEST(HttpChat, UnreachableEndpointIsATransportError) {
    llm::HttpChatClient client(fast(test::closed_url() + "/c"));
    EXPECT_THROW(client.complete({"s", "u"}), llm::TransportError);
    EXPECT_THROW(llm::HttpChatClient(llm::HttpClientOptions{}), Error);
}
