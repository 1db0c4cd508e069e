#pragma once

#include <array>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <toml.hpp>

#include "core.hpp"
#include "gateway.hpp"
#include "hashing.hpp"

namespace persuade {

inline constexpr int kSchemaVersion = 1;

enum class RecordKind { dialogue, verdict, judgment, instance, answer, manifest, task, persona };

NLOHMANN_JSON_SERIALIZE_ENUM(RecordKind, {{RecordKind::dialogue, "dialogue"},
                                          {RecordKind::verdict, "verdict"},
                                          {RecordKind::judgment, "judgment"},
                                          {RecordKind::instance, "instance"},
                                          {RecordKind::answer, "answer"},
                                          {RecordKind::manifest, "manifest"},
                                          {RecordKind::task, "task"},
                                          {RecordKind::persona, "persona"}})

class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RecordEnvelope {
    int schema_version = kSchemaVersion;
    RecordKind kind = RecordKind::dialogue;
    json payload = json::object();
    std::string content_hash;
    /// Envelope keys this version does not know; written back unchanged.
    json extras = json::object();

    static RecordEnvelope wrap(RecordKind kind, json payload) {
        RecordEnvelope e;
        e.kind = kind;
        e.payload = std::move(payload);
        e.content_hash = sha256_hex(e.payload.dump());
        return e;
    }

    [[nodiscard]] bool hash_ok() const { return content_hash == sha256_hex(payload.dump()); }

    [[nodiscard]] std::string to_line() const {
        json j = extras.is_object() ? extras : json::object();
        j["schema_version"] = schema_version;
        j["kind"] = kind;
        j["payload"] = payload;
        j["content_hash"] = content_hash;
        return j.dump();
    }

    static RecordEnvelope from_line(std::string_view line, bool verify = true) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw StorageError("record is not a JSON object");
        RecordEnvelope e;
        try {
            e.schema_version = j.at("schema_version").get<int>();
            e.kind = j.at("kind").get<RecordKind>();
            e.payload = j.at("payload");
            e.content_hash = j.at("content_hash").get<std::string>();
        } catch (const json::exception& ex) {
            throw StorageError(std::string("malformed envelope: ") + ex.what());
        }
        for (auto& [k, v] : j.items())
            if (k != "schema_version" && k != "kind" && k != "payload" && k != "content_hash") e.extras[k] = v;
        if (verify && !e.hash_ok()) throw StorageError("content hash mismatch");
        return e;
    }

    /// Replaces the payload with `updated` while keeping payload keys the
    /// caller's type does not model.
    void rewrite(const json& updated) {
        json merged = payload.is_object() ? payload : json::object();
        for (auto& [k, v] : updated.items()) merged[k] = v;
        payload = std::move(merged);
        content_hash = sha256_hex(payload.dump());
    }
};

/// Append-only JSONL file. One envelope per line, flushed per write.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::filesystem::path& path, bool append = false)
        : out_(path, append ? std::ios::app | std::ios::binary : std::ios::trunc | std::ios::binary), path_(path) {
        if (!out_) throw StorageError("cannot open " + path.string() + " for writing");
    }

    void write(const RecordEnvelope& e) {
        std::lock_guard lock(mu_);
        out_ << e.to_line() << '\n';
        out_.flush();
        if (!out_) throw StorageError("write failed: " + path_.string());
    }

    void write(RecordKind kind, const json& payload) { write(RecordEnvelope::wrap(kind, payload)); }

private:
    std::mutex mu_;
    std::ofstream out_;
    std::filesystem::path path_;
};

inline std::vector<RecordEnvelope> read_jsonl(const std::filesystem::path& path, bool verify = true) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError(path.string() + ": not found");
    std::vector<RecordEnvelope> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(RecordEnvelope::from_line(line, verify));
        } catch (const StorageError& e) {
            throw StorageError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

template <typename T>
std::vector<T> read_payloads(const std::filesystem::path& path, RecordKind kind) {
    std::vector<T> out;
    for (const auto& e : read_jsonl(path))
        if (e.kind == kind) out.push_back(e.payload.get<T>());
    return out;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot open " + path.string() + " for writing");
    out << text;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError(path.string() + ": not found");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string file_fingerprint(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

/// UTC timestamp; SOURCE_DATE_EPOCH pins it for reproducible output.
inline std::string timestamp_utc() {
    std::time_t t;
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"); sde && *sde) {
        t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Deterministic id from the manifest's inputs (not its outputs or time).
inline std::string derive_run_id(const RunManifest& m) {
    json basis{{"kind", m.experiment_kind}, {"language", m.language}, {"seed", m.seed},
               {"backends", m.backends},    {"agents", m.agent_ids},  {"datasets", m.dataset_fingerprints},
               {"templates", m.template_hashes}, {"params", m.details.value("params", json::object())}};
    return sha256_hex(basis.dump()).substr(0, 16);
}

// ---------------------------------------------------------------------------
// Config

struct HarnessConfig {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> language;
    std::optional<int> parallelism;
    std::optional<int> max_turns;
    std::optional<int> repeat_evals;

    std::optional<std::string> backend;  // "live" or "scripted:<file>"
    std::optional<std::string> base_url;
    std::optional<std::string> judge_backend;

    std::optional<std::string> persuader_model;
    std::optional<std::string> persuadee_model;
    std::optional<std::string> evaluator_model;
    std::optional<std::string> judge_model;
    std::optional<std::string> judge_reasoning_effort;

    std::optional<double> persuader_temperature;
    std::optional<double> persuadee_temperature;
    std::optional<double> evaluator_temperature;
    std::optional<double> judge_temperature;

    std::optional<RetryPolicy> retry;
    std::optional<std::array<double, 5>> intention_weights;
    PricingTable pricing;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline HarnessConfig parse_config(std::string_view toml_text, const std::string& source = "config") {
    toml::table tbl;
    try {
        tbl = toml::parse(toml_text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << source << ": " << e.description() << " at line " << e.source().begin.line;
        throw ConfigError(msg.str());
    }
    HarnessConfig c;
    if (auto v = tbl["seed"].value<std::int64_t>()) c.seed = static_cast<std::uint64_t>(*v);
    if (auto v = tbl["language"].value<std::string>()) c.language = *v;
    if (auto v = tbl["parallelism"].value<std::int64_t>()) c.parallelism = static_cast<int>(*v);
    if (auto v = tbl["run"]["max_turns"].value<std::int64_t>()) c.max_turns = static_cast<int>(*v);
    if (auto v = tbl["run"]["repeat_evals"].value<std::int64_t>()) c.repeat_evals = static_cast<int>(*v);

    if (auto v = tbl["backend"]["kind"].value<std::string>()) {
        if (*v == "scripted") {
            auto script = tbl["backend"]["script"].value<std::string>();
            if (!script) throw ConfigError(source + ": backend.kind = \"scripted\" needs backend.script");
            c.backend = "scripted:" + *script;
        } else {
            c.backend = *v;
        }
    }
    if (auto v = tbl["backend"]["base_url"].value<std::string>()) c.base_url = *v;
    if (auto v = tbl["backend"]["judge"].value<std::string>()) c.judge_backend = *v;

    auto models = tbl["models"];
    if (auto v = models["persuader"].value<std::string>()) c.persuader_model = *v;
    if (auto v = models["persuadee"].value<std::string>()) c.persuadee_model = *v;
    if (auto v = models["evaluator"].value<std::string>()) c.evaluator_model = *v;
    if (auto v = models["judge"].value<std::string>()) c.judge_model = *v;
    if (auto v = models["judge_reasoning_effort"].value<std::string>()) c.judge_reasoning_effort = *v;

    auto temps = tbl["temperature"];
    if (auto v = temps["persuader"].value<double>()) c.persuader_temperature = *v;
    if (auto v = temps["persuadee"].value<double>()) c.persuadee_temperature = *v;
    if (auto v = temps["evaluator"].value<double>()) c.evaluator_temperature = *v;
    if (auto v = temps["judge"].value<double>()) c.judge_temperature = *v;

    if (auto* retry = tbl["retry"].as_table()) {
        RetryPolicy p;
        if (auto v = (*retry)["max_attempts"].value<std::int64_t>()) p.max_attempts = static_cast<int>(*v);
        if (auto v = (*retry)["base_delay"].value<double>()) p.base_delay_seconds = *v;
        if (auto v = (*retry)["max_delay"].value<double>()) p.max_delay_seconds = *v;
        if (auto v = (*retry)["jitter"].value<bool>()) p.jitter = *v;
        c.retry = p;
    }

    if (auto* w = tbl["intention"]["weights"].as_array()) {
        if (w->size() != 5) throw ConfigError(source + ": intention.weights needs 5 numbers");
        std::array<double, 5> weights{};
        for (std::size_t i = 0; i < 5; ++i) {
            auto v = (*w)[i].value<double>();
            if (!v) throw ConfigError(source + ": intention.weights must be numbers");
            weights[i] = *v;
        }
        c.intention_weights = weights;
    }

    if (auto* pricing = tbl["pricing"].as_table()) {
        for (auto& [model, node] : *pricing) {
            auto* t = node.as_table();
            if (!t) throw ConfigError(source + ": pricing." + std::string(model.str()) + " must be a table");
            auto in = (*t)["input"].value<double>();
            auto out = (*t)["output"].value<double>();
            if (!in || !out) throw ConfigError(source + ": pricing." + std::string(model.str()) + " needs input and output");
            try {
                c.pricing.set(std::string(model.str()), {*in, *out});
            } catch (const std::invalid_argument& e) {
                throw ConfigError(source + ": " + e.what());
            }
        }
    }
    return c;
}

inline HarnessConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const StorageError&) {
        throw ConfigError("config: not found: " + path.string());
    }
    return parse_config(text, path.string());
}

/// Pricing may live in a standalone TOML file with only [pricing.*] tables.
inline PricingTable load_pricing(const std::filesystem::path& path) { return load_config(path).pricing; }

}  // namespace persuade
