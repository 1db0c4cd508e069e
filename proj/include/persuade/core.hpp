#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace persuade {

using json = nlohmann::json;

enum class Language { ja, en };

NLOHMANN_JSON_SERIALIZE_ENUM(Language, {{Language::ja, "ja"}, {Language::en, "en"}})

inline std::string_view to_string(Language lang) { return lang == Language::ja ? "ja" : "en"; }

inline Language parse_language(std::string_view s) {
    if (s == "ja") return Language::ja;
    if (s == "en") return Language::en;
    throw std::invalid_argument("unknown language: " + std::string(s));
}

enum class ScaleKind { initial, per_turn };

NLOHMANN_JSON_SERIALIZE_ENUM(ScaleKind, {{ScaleKind::initial, "initial"}, {ScaleKind::per_turn, "per_turn"}})

/// Five-point donation intention. Lower value means stronger intention.
/// The initial scale seeds the persuadee; the per-turn scale is what the
/// evaluator assigns after each exchange. Both share the numeric axis.
class IntentionLevel {
public:
    static constexpr int kMin = 1;
    static constexpr int kMax = 5;

    constexpr IntentionLevel() = default;
    constexpr IntentionLevel(int value, ScaleKind kind) : value_(value), kind_(kind) {
        if (value < kMin || value > kMax) throw std::out_of_range("intention level must be in [1,5]");
    }

    static constexpr IntentionLevel initial(int v) { return {v, ScaleKind::initial}; }
    static constexpr IntentionLevel per_turn(int v) { return {v, ScaleKind::per_turn}; }

    [[nodiscard]] constexpr int value() const { return value_; }
    [[nodiscard]] constexpr ScaleKind kind() const { return kind_; }

    /// Same level number on the other scale.
    [[nodiscard]] constexpr IntentionLevel as(ScaleKind kind) const { return {value_, kind}; }

    [[nodiscard]] std::string_view label() const;
    [[nodiscard]] std::string_view description() const;

    friend constexpr bool operator==(IntentionLevel, IntentionLevel) = default;
    // a < b iff a is the stronger intention.
    friend constexpr std::weak_ordering operator<=>(IntentionLevel a, IntentionLevel b) {
        return a.value_ <=> b.value_;
    }

private:
    int value_ = 3;
    ScaleKind kind_ = ScaleKind::per_turn;
};

namespace detail {
inline constexpr std::array<std::string_view, 5> kInitialLabels = {
    "Very Keen", "Keen", "Undecided", "Initially Reluctant", "Explicit Non-Donor"};
inline constexpr std::array<std::string_view, 5> kPerTurnLabels = {
    "Donation", "Positive Reaction", "Neutral", "Negative Reaction", "No Donation"};
inline constexpr std::array<std::string_view, 5> kInitialDescriptions = {
    "You are highly enthusiastic about donating and strongly intend to make a donation.",
    "You show interest and approval toward donating but have not yet committed to making a donation.",
    "You are neither interested nor disinterested in donating and remain uncertain about your intention.",
    "You feel hesitant about donating and have doubts or other priorities that make you less inclined to donate.",
    "You are explicitly unwilling to donate and clearly express a lack of intention to contribute.",
};
inline constexpr std::array<std::string_view, 5> kPerTurnDescriptions = {
    "You clearly express your willingness to make a donation to Save the Children.",
    "You convey enthusiasm, approval, or curiosity about donating but do not explicitly commit.",
    "You neither express interest nor disinterest in donating and remain non-committal.",
    "You express reluctance or hesitation toward donating but do not outright refuse to donate.",
    "You explicitly state that you will not donate to Save the Children.",
};
}  // namespace detail

inline std::string_view IntentionLevel::label() const {
    const auto& table = kind_ == ScaleKind::initial ? detail::kInitialLabels : detail::kPerTurnLabels;
    return table[static_cast<std::size_t>(value_ - 1)];
}

inline std::string_view IntentionLevel::description() const {
    const auto& table = kind_ == ScaleKind::initial ? detail::kInitialDescriptions : detail::kPerTurnDescriptions;
    return table[static_cast<std::size_t>(value_ - 1)];
}

inline void to_json(json& j, const IntentionLevel& l) { j = json{{"value", l.value()}, {"scale", l.kind()}}; }
inline void from_json(const json& j, IntentionLevel& l) {
    l = IntentionLevel(j.at("value").get<int>(), j.at("scale").get<ScaleKind>());
}

enum class Speaker { persuader, persuadee, system };

NLOHMANN_JSON_SERIALIZE_ENUM(Speaker, {{Speaker::persuader, "persuader"},
                                       {Speaker::persuadee, "persuadee"},
                                       {Speaker::system, "system"}})

struct Utterance {
    Speaker speaker = Speaker::persuader;
    std::string text;
    int turn_index = 1;
    /// Matched catalog id; only set on ProCoT persuader turns.
    std::optional<std::string> strategy;
    /// Bracketed strategy text as emitted by the model, kept even when unmatched.
    std::optional<std::string> strategy_text;
    std::optional<std::string> raw_model_output;

    friend bool operator==(const Utterance&, const Utterance&) = default;
};

namespace detail {
template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}
template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->template get<T>();
    return std::nullopt;
}
}  // namespace detail

inline void to_json(json& j, const Utterance& u) {
    j = json{{"speaker", u.speaker}, {"text", u.text}, {"turn_index", u.turn_index}};
    detail::put_optional(j, "strategy", u.strategy);
    detail::put_optional(j, "strategy_text", u.strategy_text);
    detail::put_optional(j, "raw_model_output", u.raw_model_output);
}
inline void from_json(const json& j, Utterance& u) {
    u.speaker = j.at("speaker").get<Speaker>();
    u.text = j.at("text").get<std::string>();
    u.turn_index = j.value("turn_index", 1);
    u.strategy = detail::get_optional<std::string>(j, "strategy");
    u.strategy_text = detail::get_optional<std::string>(j, "strategy_text");
    u.raw_model_output = detail::get_optional<std::string>(j, "raw_model_output");
}

struct TokenUsage {
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    std::uint64_t calls = 0;
    /// Set when a merge hit the integer ceiling.
    bool saturated = false;

    friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

namespace detail {
inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b, bool& overflow) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b) {
        overflow = true;
        return std::numeric_limits<std::uint64_t>::max();
    }
    return a + b;
}
}  // namespace detail

inline TokenUsage merge_usage(const TokenUsage& a, const TokenUsage& b) {
    TokenUsage out;
    bool overflow = a.saturated || b.saturated;
    out.input_tokens = detail::saturating_add(a.input_tokens, b.input_tokens, overflow);
    out.output_tokens = detail::saturating_add(a.output_tokens, b.output_tokens, overflow);
    out.calls = detail::saturating_add(a.calls, b.calls, overflow);
    out.saturated = overflow;
    return out;
}

inline TokenUsage& operator+=(TokenUsage& a, const TokenUsage& b) { return a = merge_usage(a, b); }

inline void to_json(json& j, const TokenUsage& u) {
    j = json{{"input_tokens", u.input_tokens}, {"output_tokens", u.output_tokens}, {"calls", u.calls}};
    if (u.saturated) j["saturated"] = true;
}
inline void from_json(const json& j, TokenUsage& u) {
    u.input_tokens = j.value("input_tokens", std::uint64_t{0});
    u.output_tokens = j.value("output_tokens", std::uint64_t{0});
    u.calls = j.value("calls", std::uint64_t{0});
    u.saturated = j.value("saturated", false);
}

/// Ten (by default) evaluator samples for one turn, plus the derived verdict.
struct IntentionEvaluation {
    std::vector<IntentionLevel> samples;
    IntentionLevel aggregated = IntentionLevel::per_turn(3);
    bool success = false;
    int unmatched = 0;

    /// success iff level-1 count is a strict majority; aggregated is the mode,
    /// ties resolved toward the weaker (higher) level.
    static IntentionEvaluation from_samples(std::vector<IntentionLevel> samples, int unmatched = 0) {
        if (samples.empty()) throw std::invalid_argument("intention evaluation needs at least one sample");
        std::array<int, 5> counts{};
        for (const auto& s : samples) ++counts[static_cast<std::size_t>(s.value() - 1)];
        int best = 1;
        for (int level = 1; level <= 5; ++level) {
            if (counts[static_cast<std::size_t>(level - 1)] >= counts[static_cast<std::size_t>(best - 1)]) best = level;
        }
        IntentionEvaluation e;
        e.success = 2 * counts[0] > static_cast<int>(samples.size());
        e.aggregated = IntentionLevel::per_turn(best);
        e.samples = std::move(samples);
        e.unmatched = unmatched;
        return e;
    }

    friend bool operator==(const IntentionEvaluation&, const IntentionEvaluation&) = default;
};

inline void to_json(json& j, const IntentionEvaluation& e) {
    json samples = json::array();
    for (const auto& s : e.samples) samples.push_back(s.value());
    j = json{{"samples", samples}, {"aggregated", e.aggregated.value()}, {"success", e.success}};
    if (e.unmatched) j["unmatched"] = e.unmatched;
}
inline void from_json(const json& j, IntentionEvaluation& e) {
    std::vector<IntentionLevel> samples;
    for (const auto& v : j.at("samples")) samples.push_back(IntentionLevel::per_turn(v.get<int>()));
    e.samples = std::move(samples);
    e.aggregated = IntentionLevel::per_turn(j.at("aggregated").get<int>());
    e.success = j.at("success").get<bool>();
    e.unmatched = j.value("unmatched", 0);
}

struct TurnRecord {
    Utterance persuader;
    Utterance persuadee;
    IntentionEvaluation evaluation;
    bool parse_degraded = false;

    friend bool operator==(const TurnRecord&, const TurnRecord&) = default;
};

inline void to_json(json& j, const TurnRecord& t) {
    j = json{{"persuader", t.persuader}, {"persuadee", t.persuadee}, {"evaluation", t.evaluation}};
    if (t.parse_degraded) j["parse_degraded"] = true;
}
inline void from_json(const json& j, TurnRecord& t) {
    t.persuader = j.at("persuader").get<Utterance>();
    t.persuadee = j.at("persuadee").get<Utterance>();
    t.evaluation = j.at("evaluation").get<IntentionEvaluation>();
    t.parse_degraded = j.value("parse_degraded", false);
}

enum class Outcome { success, failure };

NLOHMANN_JSON_SERIALIZE_ENUM(Outcome, {{Outcome::success, "success"}, {Outcome::failure, "failure"}})

struct CallTiming {
    std::string role;
    int turn = 0;
    double seconds = 0.0;

    friend bool operator==(const CallTiming&, const CallTiming&) = default;
};

inline void to_json(json& j, const CallTiming& c) { j = json{{"role", c.role}, {"turn", c.turn}, {"seconds", c.seconds}}; }
inline void from_json(const json& j, CallTiming& c) {
    c.role = j.at("role").get<std::string>();
    c.turn = j.value("turn", 0);
    c.seconds = j.value("seconds", 0.0);
}

struct DialogueRecord {
    std::string id;
    std::string agent_config_id;
    std::string agent_model;
    std::string persona_id;
    IntentionLevel initial_intention = IntentionLevel::initial(3);
    std::vector<TurnRecord> turns;
    Outcome outcome = Outcome::failure;
    IntentionLevel final_intention = IntentionLevel::per_turn(3);
    int max_turns = 10;
    TokenUsage usage;
    std::map<std::string, TokenUsage> usage_by_role;
    std::vector<CallTiming> wall_times;
    bool aborted = false;
    std::string error;

    [[nodiscard]] int turn_count() const { return static_cast<int>(turns.size()); }
    [[nodiscard]] bool succeeded() const { return outcome == Outcome::success; }

    friend bool operator==(const DialogueRecord&, const DialogueRecord&) = default;
};

inline void to_json(json& j, const DialogueRecord& r) {
    j = json{{"id", r.id},
             {"agent_config_id", r.agent_config_id},
             {"agent_model", r.agent_model},
             {"persona_id", r.persona_id},
             {"initial_intention", r.initial_intention.value()},
             {"turns", r.turns},
             {"outcome", r.outcome},
             {"final_intention", r.final_intention.value()},
             {"max_turns", r.max_turns},
             {"usage", r.usage},
             {"usage_by_role", r.usage_by_role},
             {"wall_times", r.wall_times}};
    if (r.aborted) {
        j["aborted"] = true;
        j["error"] = r.error;
    }
}
inline void from_json(const json& j, DialogueRecord& r) {
    r.id = j.at("id").get<std::string>();
    r.agent_config_id = j.at("agent_config_id").get<std::string>();
    r.agent_model = j.value("agent_model", std::string{});
    r.persona_id = j.at("persona_id").get<std::string>();
    r.initial_intention = IntentionLevel::initial(j.at("initial_intention").get<int>());
    r.turns = j.at("turns").get<std::vector<TurnRecord>>();
    r.outcome = j.at("outcome").get<Outcome>();
    r.final_intention = IntentionLevel::per_turn(j.at("final_intention").get<int>());
    r.max_turns = j.value("max_turns", 10);
    r.usage = j.value("usage", TokenUsage{});
    r.usage_by_role = j.value("usage_by_role", std::map<std::string, TokenUsage>{});
    r.wall_times = j.value("wall_times", std::vector<CallTiming>{});
    r.aborted = j.value("aborted", false);
    r.error = j.value("error", std::string{});
}

enum class ExperimentKind { p4g_style, pairwise_dp, annotation };

NLOHMANN_JSON_SERIALIZE_ENUM(ExperimentKind, {{ExperimentKind::p4g_style, "p4g_style"},
                                              {ExperimentKind::pairwise_dp, "pairwise_dp"},
                                              {ExperimentKind::annotation, "annotation"}})

struct BackendDescriptor {
    std::string role;
    std::string backend;
    std::string model;
    std::optional<double> temperature;

    friend bool operator==(const BackendDescriptor&, const BackendDescriptor&) = default;
};

inline void to_json(json& j, const BackendDescriptor& b) {
    j = json{{"role", b.role}, {"backend", b.backend}, {"model", b.model}};
    detail::put_optional(j, "temperature", b.temperature);
}
inline void from_json(const json& j, BackendDescriptor& b) {
    b.role = j.at("role").get<std::string>();
    b.backend = j.value("backend", std::string{});
    b.model = j.value("model", std::string{});
    b.temperature = detail::get_optional<double>(j, "temperature");
}

struct RunManifest {
    std::string run_id;
    ExperimentKind experiment_kind = ExperimentKind::p4g_style;
    Language language = Language::en;
    std::uint64_t seed = 0;
    std::vector<BackendDescriptor> backends;
    std::vector<std::string> agent_ids;
    std::map<std::string, std::string> dataset_fingerprints;
    std::map<std::string, std::string> template_hashes;
    std::string created_at;
    /// Run parameters and aggregate outputs (per-level counts, aborted ids, metrics).
    json details = json::object();

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

inline void to_json(json& j, const RunManifest& m) {
    j = json{{"run_id", m.run_id},
             {"experiment_kind", m.experiment_kind},
             {"language", m.language},
             {"seed", m.seed},
             {"backends", m.backends},
             {"agent_ids", m.agent_ids},
             {"dataset_fingerprints", m.dataset_fingerprints},
             {"template_hashes", m.template_hashes},
             {"created_at", m.created_at},
             {"details", m.details}};
}
inline void from_json(const json& j, RunManifest& m) {
    m.run_id = j.at("run_id").get<std::string>();
    m.experiment_kind = j.at("experiment_kind").get<ExperimentKind>();
    m.language = j.value("language", Language::en);
    m.seed = j.value("seed", std::uint64_t{0});
    m.backends = j.value("backends", std::vector<BackendDescriptor>{});
    m.agent_ids = j.value("agent_ids", std::vector<std::string>{});
    m.dataset_fingerprints = j.value("dataset_fingerprints", std::map<std::string, std::string>{});
    m.template_hashes = j.value("template_hashes", std::map<std::string, std::string>{});
    m.created_at = j.value("created_at", std::string{});
    m.details = j.value("details", json::object());
}

}  // namespace persuade
