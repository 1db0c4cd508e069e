#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "core.hpp"
#include "hashing.hpp"

namespace persuade {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string text;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    std::optional<double> temperature;
    std::optional<int> max_output_tokens;
    std::optional<std::int64_t> seed_hint;
    std::optional<std::string> reasoning_effort;
    /// Routing labels (role, dialogue, turn, ...). Used by the scripted backend
    /// and logs; never sent to a provider.
    std::map<std::string, std::string> tags;

    static ChatRequest single_user(std::string model, std::string prompt) {
        ChatRequest r;
        r.model = std::move(model);
        r.messages.push_back({"user", std::move(prompt)});
        return r;
    }
};

struct ChatResponse {
    std::string text;
    TokenUsage usage;
    double latency_seconds = 0.0;
    json provider_meta = json::object();
};

class GatewayError : public std::runtime_error {
public:
    enum class Kind { transient, exhausted_retries, auth, malformed_reply, provider, script_exhausted, unknown_model };

    GatewayError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] std::string_view kind_name() const {
        switch (kind_) {
            case Kind::transient: return "Transient";
            case Kind::exhausted_retries: return "ExhaustedRetries";
            case Kind::auth: return "AuthError";
            case Kind::malformed_reply: return "MalformedProviderReply";
            case Kind::provider: return "ProviderError";
            case Kind::script_exhausted: return "ScriptExhausted";
            case Kind::unknown_model: return "UnknownModel";
        }
        return "GatewayError";
    }

private:
    Kind kind_;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    /// One attempt, no retry. Throws GatewayError.
    virtual ChatResponse send(const ChatRequest& request) = 0;
    [[nodiscard]] virtual std::string name() const = 0;
    /// True when latency comes from the backend itself rather than the wall clock.
    [[nodiscard]] virtual bool virtual_time() const { return false; }
};

struct RetryPolicy {
    int max_attempts = 5;
    double base_delay_seconds = 1.0;
    double max_delay_seconds = 60.0;
    bool jitter = true;
};

using Sleeper = std::function<void(double seconds)>;

inline Sleeper real_sleeper() {
    return [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
}

/// Sends with exponential backoff on transient failures. Auth, malformed and
/// provider errors are not retried. Latency covers every attempt and wait.
inline ChatResponse complete(ChatBackend& backend, const ChatRequest& request, const RetryPolicy& policy = {},
                             const Sleeper& sleep = real_sleeper()) {
    if (request.messages.empty()) throw std::invalid_argument("chat request has no messages");
    Rng jitter(static_cast<std::uint64_t>(request.seed_hint.value_or(0)), "retry-jitter");
    const auto start = std::chrono::steady_clock::now();
    std::string last_cause;
    const int attempts = std::max(1, policy.max_attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        try {
            ChatResponse resp = backend.send(request);
            resp.usage.calls = 1;
            if (!backend.virtual_time()) {
                resp.latency_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            }
            if (attempt > 1) resp.provider_meta["attempts"] = attempt;
            return resp;
        } catch (const GatewayError& e) {
            if (e.kind() != GatewayError::Kind::transient) throw;
            last_cause = e.what();
        }
        if (attempt == attempts) break;
        double delay = std::min(policy.max_delay_seconds, policy.base_delay_seconds * std::pow(2.0, attempt - 1));
        if (policy.jitter) delay *= 0.5 + 0.5 * jitter.uniform_real();
        if (delay > 0) sleep(delay);
    }
    throw GatewayError(GatewayError::Kind::exhausted_retries,
                       "gave up after " + std::to_string(attempts) + " attempts: " + last_cause);
}

/// Replies from an ordered rule list. A call is served by the first rule
/// whose tags all match and which still has replies left; cycling rules
/// never run dry. Consumption is serialized so a single-worker replay always
/// sees the same sequence.
class ScriptedBackend : public ChatBackend {
public:
    struct Reply {
        std::string text;
        std::optional<TokenUsage> usage;
        double latency_seconds = 0.0;
    };
    struct Rule {
        std::map<std::string, std::string> match;
        std::vector<Reply> replies;
        bool cycle = false;
    };

    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<Rule> rules) : rules_(std::move(rules)), cursor_(rules_.size(), 0) {}
    ScriptedBackend(ScriptedBackend&& other) noexcept
        : rules_(std::move(other.rules_)), cursor_(std::move(other.cursor_)) {}

    static ScriptedBackend from_json(const json& script) {
        std::vector<Rule> rules;
        for (const auto& r : script.at("rules")) {
            Rule rule;
            if (auto m = r.find("match"); m != r.end()) {
                for (auto& [k, v] : m->items()) rule.match[k] = v.is_string() ? v.get<std::string>() : v.dump();
            }
            rule.cycle = r.value("cycle", false);
            for (const auto& rep : r.at("replies")) {
                Reply reply;
                if (rep.is_string()) {
                    reply.text = rep.get<std::string>();
                } else {
                    reply.text = rep.at("text").get<std::string>();
                    if (auto u = rep.find("usage"); u != rep.end()) {
                        TokenUsage usage;
                        usage.input_tokens = u->value("input", std::uint64_t{0});
                        usage.output_tokens = u->value("output", std::uint64_t{0});
                        reply.usage = usage;
                    }
                    reply.latency_seconds = rep.value("latency", 0.0);
                }
                rule.replies.push_back(std::move(reply));
            }
            rules.push_back(std::move(rule));
        }
        return ScriptedBackend(std::move(rules));
    }

    static ScriptedBackend from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("script: not found: " + path);
        return from_json(json::parse(in));
    }

    ChatResponse send(const ChatRequest& request) override {
        std::lock_guard lock(mu_);
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            const Rule& rule = rules_[i];
            if (rule.replies.empty() || !matches(rule, request)) continue;
            if (!rule.cycle && cursor_[i] >= rule.replies.size()) continue;
            const Reply& r = rule.replies[cursor_[i] % rule.replies.size()];
            ++cursor_[i];
            ChatResponse resp;
            resp.text = r.text;
            resp.usage = r.usage.value_or(estimate_usage(request, r.text));
            resp.usage.calls = 1;
            resp.latency_seconds = r.latency_seconds;
            resp.provider_meta = json{{"backend", "scripted"}, {"rule", i}};
            return resp;
        }
        throw GatewayError(GatewayError::Kind::script_exhausted, "script exhausted for call " + describe(request));
    }

    [[nodiscard]] std::string name() const override { return "scripted"; }
    [[nodiscard]] bool virtual_time() const override { return true; }

    /// Rough 4-bytes-per-token count, used when a reply carries no usage.
    static TokenUsage estimate_usage(const ChatRequest& request, const std::string& reply) {
        std::size_t in = 0;
        for (const auto& m : request.messages) in += m.text.size();
        return TokenUsage{(in + 3) / 4, (reply.size() + 3) / 4, 1, false};
    }

private:
    static bool matches(const Rule& rule, const ChatRequest& req) {
        for (const auto& [k, v] : rule.match) {
            auto it = req.tags.find(k);
            if (it == req.tags.end() || it->second != v) return false;
        }
        return true;
    }

    static std::string describe(const ChatRequest& req) {
        json tags = req.tags;
        return tags.dump();
    }

    std::mutex mu_;
    std::vector<Rule> rules_;
    std::vector<std::size_t> cursor_;
};

/// Backend driven by a callable; handy for fault injection and synthetic simulators.
class CallbackBackend : public ChatBackend {
public:
    using Fn = std::function<ChatResponse(const ChatRequest&)>;
    explicit CallbackBackend(Fn fn, std::string name = "callback", bool virtual_time = true)
        : fn_(std::move(fn)), name_(std::move(name)), virtual_time_(virtual_time) {}

    ChatResponse send(const ChatRequest& request) override { return fn_(request); }
    [[nodiscard]] std::string name() const override { return name_; }
    [[nodiscard]] bool virtual_time() const override { return virtual_time_; }

private:
    Fn fn_;
    std::string name_;
    bool virtual_time_;
};

struct ModelPrice {
    double input_per_1k = 0.0;
    double output_per_1k = 0.0;
};

class PricingTable {
public:
    PricingTable() = default;

    void set(const std::string& model, ModelPrice price) {
        if (price.input_per_1k < 0 || price.output_per_1k < 0) throw std::invalid_argument("negative price for " + model);
        prices_[model] = price;
    }

    [[nodiscard]] bool has(const std::string& model) const { return prices_.count(model) > 0; }
    [[nodiscard]] const std::map<std::string, ModelPrice>& prices() const { return prices_; }

    [[nodiscard]] ModelPrice get(const std::string& model) const {
        auto it = prices_.find(model);
        if (it == prices_.end()) throw GatewayError(GatewayError::Kind::unknown_model, "no price for model " + model);
        return it->second;
    }

    /// {"model": {"input": x, "output": y}, ...}
    static PricingTable from_json(const json& j) {
        PricingTable t;
        for (auto& [model, p] : j.items())
            t.set(model, {p.at("input").get<double>(), p.at("output").get<double>()});
        return t;
    }

private:
    std::map<std::string, ModelPrice> prices_;
};

inline double cost_of(const TokenUsage& usage, const std::string& model, const PricingTable& pricing) {
    ModelPrice p = pricing.get(model);
    return static_cast<double>(usage.input_tokens) / 1000.0 * p.input_per_1k +
           static_cast<double>(usage.output_tokens) / 1000.0 * p.output_per_1k;
}

}  // namespace persuade
