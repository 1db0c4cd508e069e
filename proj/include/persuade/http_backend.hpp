#pragma once

#include <cstdlib>
#include <string>

#include <httplib.h>

#include "gateway.hpp"

namespace persuade {

/// Chat-completions client for OpenAI-compatible endpoints.
class HttpChatBackend : public ChatBackend {
public:
    struct Options {
        std::string base_url = "https://api.openai.com/v1";
        std::string api_key;
        double timeout_seconds = 120.0;
    };

    explicit HttpChatBackend(Options opts) : opts_(std::move(opts)) { split_url(); }

    /// Reads OPENAI_BASE_URL and OPENAI_API_KEY, falling back to `fallback_base_url`.
    static HttpChatBackend from_env(const std::string& fallback_base_url = {}) {
        Options o;
        if (const char* url = std::getenv("OPENAI_BASE_URL"); url && *url) o.base_url = url;
        else if (!fallback_base_url.empty()) o.base_url = fallback_base_url;
        if (const char* key = std::getenv("OPENAI_API_KEY")) o.api_key = key;
        return HttpChatBackend(std::move(o));
    }

    static json request_body(const ChatRequest& req) {
        json messages = json::array();
        for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.text}});
        json body{{"model", req.model}, {"messages", messages}};
        if (req.temperature) body["temperature"] = *req.temperature;
        if (req.max_output_tokens) body["max_completion_tokens"] = *req.max_output_tokens;
        if (req.seed_hint) body["seed"] = *req.seed_hint;
        if (req.reasoning_effort) body["reasoning_effort"] = *req.reasoning_effort;
        return body;
    }

    static ChatResponse parse_reply(const std::string& body) {
        json j = json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw GatewayError(GatewayError::Kind::malformed_reply, "provider reply is not a JSON object");
        try {
            const auto& msg = j.at("choices").at(0).at("message");
            ChatResponse resp;
            resp.text = msg.at("content").is_null() ? std::string{} : msg.at("content").get<std::string>();
            if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
                resp.usage.input_tokens = u->value("prompt_tokens", std::uint64_t{0});
                resp.usage.output_tokens = u->value("completion_tokens", std::uint64_t{0});
            }
            resp.usage.calls = 1;
            resp.provider_meta = json{{"backend", "http"}};
            if (auto id = j.find("id"); id != j.end()) resp.provider_meta["id"] = *id;
            if (auto model = j.find("model"); model != j.end()) resp.provider_meta["model"] = *model;
            if (auto fr = j.at("choices").at(0).find("finish_reason"); fr != j.at("choices").at(0).end())
                resp.provider_meta["finish_reason"] = *fr;
            return resp;
        } catch (const json::exception& e) {
            throw GatewayError(GatewayError::Kind::malformed_reply, std::string("provider reply missing fields: ") + e.what());
        }
    }

    ChatResponse send(const ChatRequest& request) override {
        httplib::Client client(origin_);
        auto secs = static_cast<time_t>(opts_.timeout_seconds);
        client.set_connection_timeout(secs, 0);
        client.set_read_timeout(secs, 0);
        client.set_write_timeout(secs, 0);
        httplib::Headers headers;
        if (!opts_.api_key.empty()) headers.emplace("Authorization", "Bearer " + opts_.api_key);
        auto res = client.Post(path_prefix_ + "/chat/completions", headers, request_body(request).dump(),
                               "application/json");
        if (!res) {
            throw GatewayError(GatewayError::Kind::transient, "transport failure: " + httplib::to_string(res.error()));
        }
        const int status = res->status;
        if (status == 401 || status == 403)
            throw GatewayError(GatewayError::Kind::auth, "provider rejected credentials (HTTP " + std::to_string(status) + ")");
        if (status == 408 || status == 429 || status >= 500)
            throw GatewayError(GatewayError::Kind::transient, "HTTP " + std::to_string(status));
        if (status < 200 || status >= 300)
            throw GatewayError(GatewayError::Kind::provider, "HTTP " + std::to_string(status) + ": " + res->body);
        return parse_reply(res->body);
    }

    [[nodiscard]] std::string name() const override { return "http:" + opts_.base_url; }

private:
    void split_url() {
        const std::string& url = opts_.base_url;
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) throw std::invalid_argument("base_url needs a scheme: " + url);
        auto path_start = url.find('/', scheme_end + 3);
        origin_ = url.substr(0, path_start);
        path_prefix_ = path_start == std::string::npos ? std::string{} : url.substr(path_start);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }

    Options opts_;
    std::string origin_;
    std::string path_prefix_;
};

}  // namespace persuade
