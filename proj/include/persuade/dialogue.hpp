#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "core.hpp"
#include "gateway.hpp"
#include "persona.hpp"
#include "prompts.hpp"
#include "strategy_catalog.hpp"

namespace persuade {

enum class AgentKind { simple, procot };
enum class CatalogView { none, p4g_subset, full };

NLOHMANN_JSON_SERIALIZE_ENUM(AgentKind, {{AgentKind::simple, "simple"}, {AgentKind::procot, "procot"}})
NLOHMANN_JSON_SERIALIZE_ENUM(CatalogView, {{CatalogView::none, "none"},
                                           {CatalogView::p4g_subset, "p4g_subset"},
                                           {CatalogView::full, "full"}})

struct AgentConfig {
    std::string id;
    AgentKind kind = AgentKind::simple;
    CatalogView catalog_view = CatalogView::none;
    bool with_descriptions = false;
    Language language = Language::en;
    std::string model = "gpt-4o-2024-11-20";
    std::optional<double> temperature;

    void validate() const {
        if (kind == AgentKind::simple && catalog_view != CatalogView::none)
            throw std::invalid_argument("agent " + id + ": simple agents take no strategy catalog");
        if (kind == AgentKind::procot && catalog_view == CatalogView::none)
            throw std::invalid_argument("agent " + id + ": ProCoT agents need a strategy catalog");
        if (kind == AgentKind::simple && with_descriptions)
            throw std::invalid_argument("agent " + id + ": simple agents have no strategy descriptions");
    }

    /// One of: simple, procot-p4g, procot-p4g-desc, procot-rich, procot-rich-desc.
    static AgentConfig preset(std::string_view name, Language lang, std::string model = "gpt-4o-2024-11-20") {
        AgentConfig a;
        a.id = std::string(name);
        a.language = lang;
        a.model = std::move(model);
        if (name == "simple") return a;
        a.kind = AgentKind::procot;
        if (name == "procot-p4g" || name == "procot-p4g-desc") a.catalog_view = CatalogView::p4g_subset;
        else if (name == "procot-rich" || name == "procot-rich-desc") a.catalog_view = CatalogView::full;
        else throw std::invalid_argument("unknown agent preset: " + std::string(name));
        a.with_descriptions = name.size() > 5 && name.substr(name.size() - 5) == "-desc";
        return a;
    }

    [[nodiscard]] StrategyCatalog catalog() const {
        auto full = build_full_catalog(language);
        return catalog_view == CatalogView::p4g_subset ? p4g_subset(full) : full;
    }
};

inline void to_json(json& j, const AgentConfig& a) {
    j = json{{"id", a.id},
             {"kind", a.kind},
             {"catalog_view", a.catalog_view},
             {"with_descriptions", a.with_descriptions},
             {"language", a.language},
             {"model", a.model}};
    detail::put_optional(j, "temperature", a.temperature);
}

inline constexpr std::array<std::string_view, 5> kAgentPresets = {"simple", "procot-p4g", "procot-p4g-desc",
                                                                  "procot-rich", "procot-rich-desc"};

struct EngineConfig {
    Language language = Language::en;
    int max_turns = 10;
    int repeat_evals = 10;
    std::string persuadee_model = "gpt-4o-2024-11-20";
    std::string evaluator_model = "gpt-4o-2024-11-20";
    std::optional<double> persuadee_temperature;
    std::optional<double> evaluator_temperature = 0.0;
    RetryPolicy retry;
    Sleeper sleep = real_sleeper();
};

class EvaluationDegraded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-dialogue call context: ids for tags plus usage and timing sinks.
struct CallLog {
    std::string dialogue_id;
    std::string persona_id;
    std::string agent_id;
    TokenUsage total;
    std::map<std::string, TokenUsage> by_role;
    std::vector<CallTiming> timings;

    ChatResponse call(ChatBackend& backend, ChatRequest req, const std::string& role, int turn, const EngineConfig& cfg,
                      int call_index = -1) {
        req.tags["role"] = role;
        req.tags["turn"] = std::to_string(turn);
        if (!dialogue_id.empty()) req.tags["dialogue"] = dialogue_id;
        if (!persona_id.empty()) req.tags["persona"] = persona_id;
        if (!agent_id.empty()) req.tags["agent"] = agent_id;
        if (call_index >= 0) req.tags["call"] = std::to_string(call_index);
        auto resp = complete(backend, req, cfg.retry, cfg.sleep);
        total += resp.usage;
        by_role[role] += resp.usage;
        timings.push_back({role, turn, resp.latency_seconds});
        return resp;
    }
};

struct PersuaderStep {
    Utterance utterance;
    bool parse_degraded = false;
};

inline PersuaderStep persuader_step(const AgentConfig& agent, const std::vector<Utterance>& history,
                                    ChatBackend& backend, const EngineConfig& cfg, CallLog& log, int turn) {
    Bindings b{{"dialogue_history", serialize_history(history, DatasetKind::p4g)}};
    TemplateId tid = TemplateId::simple_p4g;
    if (agent.kind == AgentKind::procot) {
        tid = agent.catalog_view == CatalogView::full ? TemplateId::procot_rich : TemplateId::procot_p4g;
        b["persuasive_strategies"] = render_strategy_block(agent.catalog(), agent.with_descriptions);
    }
    auto req = ChatRequest::single_user(agent.model, render(tid, agent.language, b));
    req.temperature = agent.temperature;
    auto resp = log.call(backend, std::move(req), "persuader", turn, cfg);

    PersuaderStep step;
    step.utterance.speaker = Speaker::persuader;
    step.utterance.turn_index = turn;
    step.utterance.raw_model_output = resp.text;
    if (agent.kind == AgentKind::simple) {
        step.utterance.text = resp.text;
        return step;
    }
    auto parsed = parse_procot_output(resp.text, agent.language);
    if (auto* fb = std::get_if<FallbackWhole>(&parsed)) {
        step.utterance.text = fb->utterance;
        step.parse_degraded = true;
        return step;
    }
    const auto& reply = std::get<ProcotReply>(parsed);
    step.utterance.text = reply.utterance;
    step.parse_degraded = reply.degraded;
    if (reply.strategy_text) {
        step.utterance.strategy_text = reply.strategy_text;
        static const StrategyCatalog kFullEn = build_full_catalog(Language::en);
        step.utterance.strategy = match_strategy(kFullEn, *reply.strategy_text);
    }
    if (!step.utterance.strategy) step.parse_degraded = true;
    return step;
}

namespace detail {
inline std::string intention_phrase(const Persona& p) {
    std::string d(p.initial_intention.as(ScaleKind::initial).description());
    if (!d.empty() && d.back() == '.') d.pop_back();
    return d;
}
inline std::string persona_text(const Persona& p) { return p.description.empty() ? attribute_summary(p) : p.description; }
}  // namespace detail

inline Utterance persuadee_step(const Persona& persona, const std::vector<Utterance>& history, ChatBackend& backend,
                                const EngineConfig& cfg, CallLog& log, int turn) {
    Bindings b{{"persuadee_persona_description", detail::persona_text(persona)},
               {"initial_donation_intention_description", detail::intention_phrase(persona)},
               {"dialogue_history", serialize_history(history, DatasetKind::p4g)}};
    auto req = ChatRequest::single_user(cfg.persuadee_model, render(TemplateId::persuadee_sim, cfg.language, b));
    req.temperature = cfg.persuadee_temperature;
    auto resp = log.call(backend, std::move(req), "persuadee", turn, cfg);
    Utterance u;
    u.speaker = Speaker::persuadee;
    u.text = resp.text;
    u.turn_index = turn;
    return u;
}

/// Maps an evaluator reply to a per-turn level; nullopt when no label is present.
inline std::optional<IntentionLevel> parse_intention_label(std::string_view reply) {
    std::string lower = detail::ascii_lower(reply);
    static constexpr std::pair<std::string_view, int> kLabels[] = {
        {"no donation", 5}, {"positive reaction", 2}, {"negative reaction", 4}, {"neutral", 3}, {"donation", 1}};
    std::size_t best_pos = std::string::npos;
    int best_level = 0;
    std::size_t best_len = 0;
    for (auto [label, level] : kLabels) {
        auto pos = lower.find(label);
        // earliest mention wins; at equal positions the longer label wins
        if (pos != std::string::npos && (pos < best_pos || (pos == best_pos && label.size() > best_len))) {
            best_pos = pos;
            best_level = level;
            best_len = label.size();
        }
    }
    if (best_pos == std::string::npos) return std::nullopt;
    return IntentionLevel::per_turn(best_level);
}

inline IntentionEvaluation evaluate_intention(const Persona& persona, const std::vector<Utterance>& history,
                                              ChatBackend& backend, const EngineConfig& cfg, CallLog& log, int turn) {
    if (history.empty()) throw std::invalid_argument("evaluate_intention: empty history");
    Bindings b{{"persuadee_persona_description", detail::persona_text(persona)},
               {"initial_donation_intention_description", detail::intention_phrase(persona)},
               {"dialogue_history", serialize_history(history, DatasetKind::p4g)}};
    const std::string prompt = render(TemplateId::intention_eval, cfg.language, b);
    std::vector<IntentionLevel> samples;
    int unmatched = 0;
    for (int i = 0; i < cfg.repeat_evals; ++i) {
        auto req = ChatRequest::single_user(cfg.evaluator_model, prompt);
        req.temperature = cfg.evaluator_temperature;
        auto resp = log.call(backend, std::move(req), "evaluator", turn, cfg, i);
        auto level = parse_intention_label(resp.text);
        if (!level) ++unmatched;
        samples.push_back(level.value_or(IntentionLevel::per_turn(3)));
    }
    if (2 * unmatched > cfg.repeat_evals)
        throw EvaluationDegraded(std::to_string(unmatched) + " of " + std::to_string(cfg.repeat_evals) +
                                 " evaluator replies carried no intention label");
    return IntentionEvaluation::from_samples(std::move(samples), unmatched);
}

inline std::vector<Utterance> flatten_history(const std::vector<TurnRecord>& turns) {
    std::vector<Utterance> h;
    h.reserve(turns.size() * 2);
    for (const auto& t : turns) {
        h.push_back(t.persuader);
        h.push_back(t.persuadee);
    }
    return h;
}

/// Persuader, persuadee, evaluation; repeated until success or max_turns.
/// Any failure ends the dialogue with a partial record marked aborted.
inline DialogueRecord run_dialogue(const AgentConfig& agent, const Persona& persona, ChatBackend& backend,
                                   const EngineConfig& cfg, const std::string& dialogue_id = {}) {
    DialogueRecord rec;
    rec.id = dialogue_id.empty() ? agent.id + "-" + persona.id : dialogue_id;
    rec.agent_config_id = agent.id;
    rec.agent_model = agent.model;
    rec.persona_id = persona.id;
    rec.initial_intention = persona.initial_intention.as(ScaleKind::initial);
    rec.final_intention = rec.initial_intention.as(ScaleKind::per_turn);
    rec.max_turns = cfg.max_turns;
    CallLog log{rec.id, persona.id, agent.id, {}, {}, {}};
    std::vector<Utterance> history;
    try {
        agent.validate();
        for (int t = 1; t <= cfg.max_turns; ++t) {
            TurnRecord turn;
            auto ps = persuader_step(agent, history, backend, cfg, log, t);
            turn.persuader = std::move(ps.utterance);
            turn.parse_degraded = ps.parse_degraded;
            history.push_back(turn.persuader);
            turn.persuadee = persuadee_step(persona, history, backend, cfg, log, t);
            history.push_back(turn.persuadee);
            turn.evaluation = evaluate_intention(persona, history, backend, cfg, log, t);
            rec.final_intention = turn.evaluation.aggregated;
            const bool success = turn.evaluation.success;
            rec.turns.push_back(std::move(turn));
            if (success) {
                rec.outcome = Outcome::success;
                break;
            }
        }
    } catch (const std::exception& e) {
        rec.aborted = true;
        rec.error = e.what();
        rec.outcome = Outcome::failure;
    }
    rec.usage = log.total;
    rec.usage_by_role = log.by_role;
    rec.wall_times = log.timings;
    return rec;
}

/// Runs every (agent, persona) pair with at most `parallelism` dialogues in
/// flight. `sink` sees records in completion order under a lock; the returned
/// vector is in job order (agent-major, then persona order).
inline std::vector<DialogueRecord> run_batch(const std::vector<AgentConfig>& agents, const std::vector<Persona>& personas,
                                             ChatBackend& backend, const EngineConfig& cfg, int parallelism,
                                             const std::function<void(const DialogueRecord&)>& sink = {}) {
    if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
    for (const auto& a : agents) a.validate();
    const std::size_t jobs = agents.size() * personas.size();
    std::vector<DialogueRecord> out(jobs);
    std::atomic<std::size_t> next{0};
    std::mutex sink_mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs; i = next++) {
            const auto& agent = agents[i / personas.size()];
            const auto& persona = personas[i % personas.size()];
            out[i] = run_dialogue(agent, persona, backend, cfg);
            if (sink) {
                std::lock_guard lock(sink_mu);
                sink(out[i]);
            }
        }
    };
    const auto n_threads = static_cast<std::size_t>(parallelism) < jobs ? static_cast<std::size_t>(parallelism) : jobs;
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    return out;
}

}  // namespace persuade
