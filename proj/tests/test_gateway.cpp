#include <atomic>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "persuade/gateway.hpp"
#include "persuade/http_backend.hpp"

using namespace persuade;

namespace {

ChatRequest req(std::map<std::string, std::string> tags = {}) {
    auto r = ChatRequest::single_user("m", "hello");
    r.tags = std::move(tags);
    return r;
}

ChatResponse ok(std::string text) {
    ChatResponse r;
    r.text = std::move(text);
    r.usage = {1, 1, 1, false};
    return r;
}

}  // namespace

TEST(Retry, TransientThenSuccessBacksOff) {
    int calls = 0;
    CallbackBackend b([&](const ChatRequest&) {
        if (++calls <= 2) throw GatewayError(GatewayError::Kind::transient, "429");
        return ok("fine");
    });
    std::vector<double> waits;
    RetryPolicy p;
    p.jitter = false;
    auto resp = complete(b, req(), p, [&](double s) { waits.push_back(s); });
    EXPECT_EQ(resp.text, "fine");
    EXPECT_EQ(calls, 3);
    EXPECT_EQ(waits, (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(resp.provider_meta["attempts"], 3);
}

TEST(Retry, GivesUpAfterFiveAttempts) {
    int calls = 0;
    CallbackBackend b([&](const ChatRequest&) -> ChatResponse {
        ++calls;
        throw GatewayError(GatewayError::Kind::transient, "503");
    });
    std::vector<double> waits;
    try {
        complete(b, req(), {}, [&](double s) { waits.push_back(s); });
        FAIL();
    } catch (const GatewayError& e) {
        EXPECT_EQ(e.kind(), GatewayError::Kind::exhausted_retries);
    }
    EXPECT_EQ(calls, 5);
    ASSERT_EQ(waits.size(), 4u);
    for (std::size_t i = 0; i < waits.size(); ++i) {
        double base = std::pow(2.0, static_cast<double>(i));
        EXPECT_GE(waits[i], 0.5 * base);
        EXPECT_LE(waits[i], base);
    }
}

TEST(Retry, BackoffIsCapped) {
    CallbackBackend b([](const ChatRequest&) -> ChatResponse { throw GatewayError(GatewayError::Kind::transient, "x"); });
    RetryPolicy p{10, 1.0, 60.0, false};
    std::vector<double> waits;
    EXPECT_THROW(complete(b, req(), p, [&](double s) { waits.push_back(s); }), GatewayError);
    EXPECT_EQ(waits.back(), 60.0);
}

TEST(Retry, NonTransientErrorsAreNotRetried) {
    for (auto kind : {GatewayError::Kind::auth, GatewayError::Kind::malformed_reply, GatewayError::Kind::provider}) {
        int calls = 0;
        CallbackBackend b([&](const ChatRequest&) -> ChatResponse {
            ++calls;
            throw GatewayError(kind, "no");
        });
        try {
            complete(b, req(), {}, [](double) {});
            FAIL();
        } catch (const GatewayError& e) {
            EXPECT_EQ(e.kind(), kind);
        }
        EXPECT_EQ(calls, 1);
    }
}

TEST(Retry, EmptyRequestRejected) {
    CallbackBackend b([](const ChatRequest&) { return ok("x"); });
    ChatRequest empty;
    EXPECT_THROW(complete(b, empty), std::invalid_argument);
}

TEST(Scripted, UsagePassesThrough) {
    auto b = ScriptedBackend::from_json(json::parse(R"({"rules":[{"replies":[{"text":"Hi","usage":{"input":100,"output":20},"latency":0.5}]}]})"));
    auto r = complete(b, req(), {}, [](double) {});
    EXPECT_EQ(r.text, "Hi");
    EXPECT_EQ(r.usage, (TokenUsage{100, 20, 1, false}));
    EXPECT_EQ(r.latency_seconds, 0.5);
    try {
        b.send(req({{"role", "judge"}}));
        FAIL();
    } catch (const GatewayError& e) {
        EXPECT_EQ(e.kind(), GatewayError::Kind::script_exhausted);
        EXPECT_NE(std::string(e.what()).find("judge"), std::string::npos);
    }
}

TEST(Scripted, TagMatchingAndCycling) {
    auto b = ScriptedBackend::from_json(json::parse(R"({"rules":[
        {"match":{"role":"evaluator"},"replies":["Donation","Donation","Donation","Donation","Donation","Donation","Neutral","Neutral","Neutral","Neutral"]},
        {"match":{"role":"persuadee"},"cycle":true,"replies":["No.","Maybe."]}]})"));
    std::map<std::string, int> counts;
    for (int i = 0; i < 10; ++i) ++counts[b.send(req({{"role", "evaluator"}})).text];
    EXPECT_EQ(counts["Donation"], 6);
    EXPECT_EQ(counts["Neutral"], 4);
    EXPECT_THROW(b.send(req({{"role", "evaluator"}})), GatewayError);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(b.send(req({{"role", "persuadee"}})).text, i % 2 ? "Maybe." : "No.");
}

TEST(Scripted, EstimatedUsageWhenAbsent) {
    auto b = ScriptedBackend::from_json(json::parse(R"({"rules":[{"replies":["abcdefgh"]}]})"));
    auto r = b.send(req());
    EXPECT_EQ(r.usage.input_tokens, 2u);
    EXPECT_EQ(r.usage.output_tokens, 2u);
}

TEST(Pricing, CostOf) {
    PricingTable t;
    t.set("gpt-x", {0.002, 0.008});
    EXPECT_NEAR(cost_of({1000, 1000, 1, false}, "gpt-x", t), 0.010, 1e-12);
    EXPECT_NEAR(cost_of({340, 30, 1, false}, "gpt-x", t), 0.00068 + 0.00024, 1e-12);
    try {
        cost_of({1, 1, 1, false}, "other", t);
        FAIL();
    } catch (const GatewayError& e) {
        EXPECT_EQ(e.kind(), GatewayError::Kind::unknown_model);
    }
    EXPECT_THROW(t.set("bad", {-1.0, 0.0}), std::invalid_argument);
    auto j = PricingTable::from_json(json::parse(R"({"m":{"input":0.5,"output":1.5}})"));
    EXPECT_DOUBLE_EQ(j.get("m").output_per_1k, 1.5);
}

class HttpBackendTest : public ::testing::Test {
protected:
    void SetUp() override {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& rq, httplib::Response& rs) {
            last_body_ = rq.body;
            last_auth_ = rq.get_header_value("Authorization");
            int n = ++hits_;
            if (mode_ == "flaky" && n == 1) {
                rs.status = 429;
                return;
            }
            if (mode_ == "auth") {
                rs.status = 401;
                return;
            }
            if (mode_ == "malformed") {
                rs.set_content("not json", "text/plain");
                return;
            }
            if (mode_ == "bad_request") {
                rs.status = 400;
                rs.set_content("nope", "text/plain");
                return;
            }
            rs.set_content(
                R"({"id":"c1","model":"m","choices":[{"message":{"role":"assistant","content":"hi there"},"finish_reason":"stop"}],"usage":{"prompt_tokens":12,"completion_tokens":3}})",
                "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    void TearDown() override {
        server_.stop();
        thread_.join();
    }
    HttpChatBackend backend() {
        return HttpChatBackend({"http://127.0.0.1:" + std::to_string(port_) + "/v1", "sk-test", 5.0});
    }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> hits_{0};
    std::string mode_ = "ok";
    std::string last_body_, last_auth_;
};

TEST_F(HttpBackendTest, Success) {
    auto b = backend();
    auto rq = req();
    rq.temperature = 0.0;
    rq.reasoning_effort = "low";
    auto r = complete(b, rq, {}, [](double) {});
    EXPECT_EQ(r.text, "hi there");
    EXPECT_EQ(r.usage, (TokenUsage{12, 3, 1, false}));
    EXPECT_EQ(r.provider_meta["finish_reason"], "stop");
    auto body = json::parse(last_body_);
    EXPECT_EQ(body["messages"][0]["content"], "hello");
    EXPECT_EQ(body["reasoning_effort"], "low");
    EXPECT_FALSE(body.contains("tags"));
    EXPECT_EQ(last_auth_, "Bearer sk-test");
    EXPECT_GE(r.latency_seconds, 0.0);
}

TEST_F(HttpBackendTest, RateLimitIsRetried) {
    mode_ = "flaky";
    auto b = backend();
    int sleeps = 0;
    auto r = complete(b, req(), {}, [&](double) { ++sleeps; });
    EXPECT_EQ(r.text, "hi there");
    EXPECT_EQ(hits_, 2);
    EXPECT_EQ(sleeps, 1);
}

TEST_F(HttpBackendTest, ErrorKinds) {
    auto b = backend();
    auto kind_of = [&](const std::string& mode) {
        mode_ = mode;
        try {
            complete(b, req(), {}, [](double) {});
        } catch (const GatewayError& e) {
            return e.kind();
        }
        return GatewayError::Kind::transient;
    };
    EXPECT_EQ(kind_of("auth"), GatewayError::Kind::auth);
    EXPECT_EQ(kind_of("malformed"), GatewayError::Kind::malformed_reply);
    EXPECT_EQ(kind_of("bad_request"), GatewayError::Kind::provider);
}

TEST(HttpBackend, UnreachableHostExhaustsRetries) {
    HttpChatBackend b({"http://127.0.0.1:1/v1", "", 1.0});
    RetryPolicy p{2, 0.0, 0.0, false};
    try {
        complete(b, req(), p, [](double) {});
        FAIL();
    } catch (const GatewayError& e) {
        EXPECT_EQ(e.kind(), GatewayError::Kind::exhausted_retries);
    }
}
