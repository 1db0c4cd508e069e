#pragma once

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "core.hpp"
#include "dialogue.hpp"
#include "gateway.hpp"
#include "hashing.hpp"
#include "prompts.hpp"

namespace persuade {

inline constexpr std::array<std::string_view, 35> kDomainVocabulary = {
    "Economics", "History",      "Sport",        "Travel",     "Finance",  "Research",  "Welfare",
    "Ethics",    "Psychology",   "Career",       "Negotiation", "Philosophy", "Craftsmanship", "Education",
    "Marketing", "Innovation",   "Ecology",      "Media",      "Family",   "Business",  "Charity",
    "Science",   "Safety",       "Health",       "Lifestyle",  "Politics", "Architecture", "Technology",
    "Debate",    "Art",          "Culture",      "Leisure",    "Literature", "Fashion", "Law"};

struct DpDialogue {
    std::string id;
    std::vector<Utterance> turns;

    /// Persuader utterances; each opens one turn.
    [[nodiscard]] int turn_count() const {
        return static_cast<int>(std::count_if(turns.begin(), turns.end(),
                                              [](const Utterance& u) { return u.speaker == Speaker::persuader; }));
    }

    /// Utterances belonging to the first k turns.
    [[nodiscard]] std::vector<Utterance> prefix_turns(int k) const {
        std::vector<Utterance> out;
        int seen = 0;
        for (const auto& u : turns) {
            if (u.speaker == Speaker::persuader && ++seen > k) break;
            out.push_back(u);
        }
        return out;
    }
};

struct Scenario {
    std::string id;
    std::string background;
    std::string goal;
    std::vector<std::string> domains;
    std::vector<DpDialogue> dialogues;
};

inline void to_json(json& j, const DpDialogue& d) {
    json turns = json::array();
    for (const auto& u : d.turns) turns.push_back({{"speaker", u.speaker}, {"text", u.text}});
    j = json{{"id", d.id}, {"turns", turns}};
}
inline void from_json(const json& j, DpDialogue& d) {
    d.id = j.at("id").get<std::string>();
    d.turns.clear();
    int turn = 0;
    for (const auto& t : j.at("turns")) {
        Utterance u;
        u.speaker = t.at("speaker").get<Speaker>();
        u.text = t.at("text").get<std::string>();
        if (u.speaker == Speaker::persuader) ++turn;
        u.turn_index = std::max(turn, 1);
        d.turns.push_back(std::move(u));
    }
}
inline void to_json(json& j, const Scenario& s) {
    j = json{{"id", s.id}, {"background", s.background}, {"goal", s.goal}, {"domains", s.domains}, {"dialogues", s.dialogues}};
}
inline void from_json(const json& j, Scenario& s) {
    s.id = j.at("id").get<std::string>();
    s.background = j.at("background").get<std::string>();
    s.goal = j.at("goal").get<std::string>();
    s.domains = j.at("domains").get<std::vector<std::string>>();
    s.dialogues = j.at("dialogues").get<std::vector<DpDialogue>>();
}

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::vector<Scenario> parse_dp_dataset(const json& j) {
    std::vector<Scenario> out;
    try {
        out = j.at("scenarios").get<std::vector<Scenario>>();
    } catch (const json::exception& e) {
        throw DatasetError(std::string("dataset: ") + e.what());
    }
    std::set<std::string> ids;
    for (const auto& s : out) {
        if (!ids.insert(s.id).second) throw DatasetError("dataset: duplicate scenario id " + s.id);
        if (s.domains.empty()) throw DatasetError("dataset: scenario " + s.id + " has no domains");
        if (s.dialogues.empty()) throw DatasetError("dataset: scenario " + s.id + " has no dialogues");
        for (const auto& d : s.dialogues) {
            if (d.turn_count() < 1) throw DatasetError("dataset: dialogue " + d.id + " has no persuader turn");
            if (d.turns.front().speaker != Speaker::persuader)
                throw DatasetError("dataset: dialogue " + d.id + " does not open with the persuader");
        }
    }
    return out;
}

inline std::vector<Scenario> read_dp_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("dataset: not found");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DatasetError("dataset: not valid JSON");
    return parse_dp_dataset(j);
}

enum class JudgeOrder { ab, ba };
enum class RawJudgment { X, Y, ComparableGood, ComparableBad, ParseFail };
enum class Resolved { a_wins, b_wins, tie };

NLOHMANN_JSON_SERIALIZE_ENUM(JudgeOrder, {{JudgeOrder::ab, "ab"}, {JudgeOrder::ba, "ba"}})
NLOHMANN_JSON_SERIALIZE_ENUM(RawJudgment, {{RawJudgment::X, "Uni-X"},
                                           {RawJudgment::Y, "Uni-Y"},
                                           {RawJudgment::ComparableGood, "Comparable-Good"},
                                           {RawJudgment::ComparableBad, "Comparable-Bad"},
                                           {RawJudgment::ParseFail, "ParseFail"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Resolved, {{Resolved::a_wins, "a_wins"}, {Resolved::b_wins, "b_wins"}, {Resolved::tie, "tie"}})

inline constexpr std::array<RawJudgment, 5> kAllRawJudgments = {RawJudgment::X, RawJudgment::Y, RawJudgment::ComparableGood,
                                                                RawJudgment::ComparableBad, RawJudgment::ParseFail};

struct PairInstance {
    std::string id;
    std::string scenario_id;
    std::string dialogue_id;
    std::vector<std::string> domains;
    int total_turns = 1;
    int history_turns = 0;
    std::vector<Utterance> history;
    /// Order judged first; both orders are always judged.
    JudgeOrder first_order = JudgeOrder::ab;
    std::string agent_a;
    std::string agent_b;
    std::string response_a;
    std::string response_b;
    std::string raw_a;
    std::string raw_b;

    friend bool operator==(const PairInstance&, const PairInstance&) = default;
};

inline void to_json(json& j, const PairInstance& p) {
    j = json{{"id", p.id},
             {"scenario_id", p.scenario_id},
             {"dialogue_id", p.dialogue_id},
             {"domains", p.domains},
             {"total_turns", p.total_turns},
             {"history_turns", p.history_turns},
             {"history", p.history},
             {"first_order", p.first_order},
             {"agent_a", p.agent_a},
             {"agent_b", p.agent_b},
             {"response_a", p.response_a},
             {"response_b", p.response_b},
             {"raw_a", p.raw_a},
             {"raw_b", p.raw_b}};
}
inline void from_json(const json& j, PairInstance& p) {
    p.id = j.at("id").get<std::string>();
    p.scenario_id = j.at("scenario_id").get<std::string>();
    p.dialogue_id = j.at("dialogue_id").get<std::string>();
    p.domains = j.at("domains").get<std::vector<std::string>>();
    p.total_turns = j.at("total_turns").get<int>();
    p.history_turns = j.at("history_turns").get<int>();
    p.history = j.at("history").get<std::vector<Utterance>>();
    p.first_order = j.at("first_order").get<JudgeOrder>();
    p.agent_a = j.value("agent_a", std::string{});
    p.agent_b = j.value("agent_b", std::string{});
    p.response_a = j.value("response_a", std::string{});
    p.response_b = j.value("response_b", std::string{});
    p.raw_a = j.value("raw_a", std::string{});
    p.raw_b = j.value("raw_b", std::string{});
}

class InsufficientScenarios : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario-level sampling without replacement, one uniform dialogue per
/// scenario, truncation k uniform in [0, turns-1]. Each kind of draw has its
/// own seed stream.
inline std::vector<PairInstance> sample_instances(const std::vector<Scenario>& dataset, std::size_t n, std::uint64_t seed,
                                                  bool randomize_first_order = true) {
    if (dataset.size() < n)
        throw InsufficientScenarios("need " + std::to_string(n) + " scenarios, dataset has " + std::to_string(dataset.size()));
    Rng scen(seed, "scenario-sampling");
    Rng dial(seed, "dialogue-choice");
    Rng trunc(seed, "truncation");
    Rng order(seed, "judge-order");
    std::vector<PairInstance> out;
    out.reserve(n);
    for (std::size_t idx : scen.sample_without_replacement(dataset.size(), n)) {
        const Scenario& s = dataset[idx];
        const DpDialogue& d = s.dialogues[dial.uniform_index(s.dialogues.size())];
        PairInstance p;
        p.scenario_id = s.id;
        p.dialogue_id = d.id;
        p.domains = s.domains;
        p.total_turns = d.turn_count();
        p.history_turns = trunc.uniform_int(0, p.total_turns - 1);
        p.history = d.prefix_turns(p.history_turns);
        p.first_order = randomize_first_order && order.coin() ? JudgeOrder::ba : JudgeOrder::ab;
        std::ostringstream id;
        id << "i" << std::setw(5) << std::setfill('0') << out.size() + 1;
        p.id = id.str();
        out.push_back(std::move(p));
    }
    return out;
}

/// Renders the DP persuader prompt for `agent` on the instance's history.
inline std::string dp_persuader_prompt(const AgentConfig& agent, const Scenario& scenario, const PairInstance& inst) {
    Bindings b{{"background", scenario.background},
               {"goal", scenario.goal},
               {"conversation_history", serialize_history(inst.history, DatasetKind::dp)}};
    TemplateId tid = TemplateId::simple_dp;
    if (agent.kind == AgentKind::procot) {
        tid = TemplateId::procot_dp;
        b["persuasive_strategies"] = render_strategy_block(agent.catalog(), agent.with_descriptions);
    }
    return render(tid, agent.language, b);
}

struct PairwiseConfig {
    std::string judge_model = "o3-mini";
    std::optional<std::string> judge_reasoning_effort = std::string("high");
    std::optional<double> judge_temperature;
    RetryPolicy retry;
    Sleeper sleep = real_sleeper();
};

/// Asks both agents for a response. ProCoT output is cut down to the utterance.
inline void generate_pair(PairInstance& inst, const Scenario& scenario, const AgentConfig& agent_a,
                          const AgentConfig& agent_b, ChatBackend& backend, const PairwiseConfig& cfg,
                          TokenUsage* usage = nullptr) {
    auto one = [&](const AgentConfig& agent, const char* slot, std::string& response, std::string& raw) {
        auto req = ChatRequest::single_user(agent.model, dp_persuader_prompt(agent, scenario, inst));
        req.temperature = agent.temperature;
        req.tags = {{"role", "persuader"}, {"agent", agent.id}, {"slot", slot},
                    {"scenario", scenario.id}, {"instance", inst.id}};
        auto resp = complete(backend, req, cfg.retry, cfg.sleep);
        if (usage) *usage += resp.usage;
        raw = resp.text;
        response = agent.kind == AgentKind::procot ? utterance_of(parse_procot_output(resp.text, agent.language)) : resp.text;
    };
    inst.agent_a = agent_a.id;
    inst.agent_b = agent_b.id;
    one(agent_a, "a", inst.response_a, inst.raw_a);
    one(agent_b, "b", inst.response_b, inst.raw_b);
}

struct JudgeRecord {
    std::string instance_id;
    JudgeOrder order = JudgeOrder::ab;
    RawJudgment judgment = RawJudgment::ParseFail;
    std::string raw_reply;
    json parsed = nullptr;

    friend bool operator==(const JudgeRecord&, const JudgeRecord&) = default;
};

inline void to_json(json& j, const JudgeRecord& r) {
    j = json{{"instance_id", r.instance_id}, {"order", r.order}, {"judgment", r.judgment}, {"raw_reply", r.raw_reply}};
    if (!r.parsed.is_null()) j["parsed"] = r.parsed;
}
inline void from_json(const json& j, JudgeRecord& r) {
    r.instance_id = j.at("instance_id").get<std::string>();
    r.order = j.at("order").get<JudgeOrder>();
    r.judgment = j.at("judgment").get<RawJudgment>();
    r.raw_reply = j.value("raw_reply", std::string{});
    r.parsed = j.value("parsed", json(nullptr));
}

/// Pulls a JSON object out of a judge reply: whole text, then a fenced
/// block, then the span from the first '{' to the last '}'.
inline std::optional<json> extract_json_object(std::string_view reply) {
    auto attempt = [](std::string_view s) -> std::optional<json> {
        json j = json::parse(s, nullptr, false);
        if (!j.is_discarded() && j.is_object()) return j;
        return std::nullopt;
    };
    if (auto j = attempt(reply)) return j;
    if (auto fence = reply.find("```"); fence != std::string_view::npos) {
        auto body_start = reply.find('\n', fence);
        auto fence_end = body_start == std::string_view::npos ? body_start : reply.find("```", body_start);
        if (fence_end != std::string_view::npos)
            if (auto j = attempt(reply.substr(body_start + 1, fence_end - body_start - 1))) return j;
    }
    auto open = reply.find('{');
    auto close = reply.rfind('}');
    if (open != std::string_view::npos && close != std::string_view::npos && close > open)
        if (auto j = attempt(reply.substr(open, close - open + 1))) return j;
    return std::nullopt;
}

inline RawJudgment parse_judge_reply(std::string_view reply, json* parsed_out = nullptr) {
    auto j = extract_json_object(reply);
    if (!j) return RawJudgment::ParseFail;
    if (parsed_out) *parsed_out = *j;
    auto it = j->find("result");
    if (it == j->end() || !it->is_string()) return RawJudgment::ParseFail;
    std::string result(detail::trim_view(it->get<std::string>()));
    if (result == "Uni-X") return RawJudgment::X;
    if (result == "Uni-Y") return RawJudgment::Y;
    if (result == "Comparable-Good") return RawJudgment::ComparableGood;
    if (result == "Comparable-Bad") return RawJudgment::ComparableBad;
    return RawJudgment::ParseFail;
}

inline JudgeRecord judge_once(const PairInstance& inst, const Scenario& scenario, JudgeOrder order,
                              ChatBackend& judge_backend, const PairwiseConfig& cfg, TokenUsage* usage = nullptr) {
    const bool ab = order == JudgeOrder::ab;
    Bindings b{{"background", scenario.background},
               {"goal", scenario.goal},
               {"conversation_history", serialize_history(inst.history, DatasetKind::dp)},
               {"persuader_x", ab ? inst.response_a : inst.response_b},
               {"persuader_y", ab ? inst.response_b : inst.response_a}};
    auto req = ChatRequest::single_user(cfg.judge_model, render(TemplateId::judge_dp, Language::en, b));
    req.temperature = cfg.judge_temperature;
    req.reasoning_effort = cfg.judge_reasoning_effort;
    req.tags = {{"role", "judge"}, {"instance", inst.id}, {"scenario", scenario.id}, {"order", ab ? "ab" : "ba"}};
    auto resp = complete(judge_backend, req, cfg.retry, cfg.sleep);
    if (usage) *usage += resp.usage;
    JudgeRecord rec;
    rec.instance_id = inst.id;
    rec.order = order;
    rec.raw_reply = resp.text;
    rec.judgment = parse_judge_reply(resp.text, &rec.parsed);
    return rec;
}

enum class Side { a, b, tie };

/// Which agent a single judgment favours once the X/Y swap is undone.
inline Side favoured(JudgeOrder order, RawJudgment raw) {
    if (raw == RawJudgment::X) return order == JudgeOrder::ab ? Side::a : Side::b;
    if (raw == RawJudgment::Y) return order == JudgeOrder::ab ? Side::b : Side::a;
    return Side::tie;
}

inline Resolved resolve_verdict(RawJudgment raw_ab, RawJudgment raw_ba) {
    Side s1 = favoured(JudgeOrder::ab, raw_ab);
    Side s2 = favoured(JudgeOrder::ba, raw_ba);
    if (s1 == Side::a && s2 == Side::a) return Resolved::a_wins;
    if (s1 == Side::b && s2 == Side::b) return Resolved::b_wins;
    return Resolved::tie;
}

struct Verdict {
    std::string instance_id;
    std::string agent_a;
    std::string agent_b;
    std::vector<std::string> domains;
    int history_turns = 0;
    RawJudgment raw_ab = RawJudgment::ParseFail;
    RawJudgment raw_ba = RawJudgment::ParseFail;
    Resolved resolved = Resolved::tie;
    json judge_meta = json::object();

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline void to_json(json& j, const Verdict& v) {
    j = json{{"instance_id", v.instance_id}, {"agent_a", v.agent_a},     {"agent_b", v.agent_b},
             {"domains", v.domains},         {"history_turns", v.history_turns}, {"raw_ab", v.raw_ab},
             {"raw_ba", v.raw_ba},           {"resolved", v.resolved},   {"judge_meta", v.judge_meta}};
}
inline void from_json(const json& j, Verdict& v) {
    v.instance_id = j.at("instance_id").get<std::string>();
    v.agent_a = j.value("agent_a", std::string{});
    v.agent_b = j.value("agent_b", std::string{});
    v.domains = j.value("domains", std::vector<std::string>{});
    v.history_turns = j.value("history_turns", 0);
    v.raw_ab = j.at("raw_ab").get<RawJudgment>();
    v.raw_ba = j.at("raw_ba").get<RawJudgment>();
    v.resolved = j.at("resolved").get<Resolved>();
    v.judge_meta = j.value("judge_meta", json::object());
}

inline Verdict make_verdict(const PairInstance& inst, RawJudgment raw_ab, RawJudgment raw_ba, json meta = json::object()) {
    Verdict v;
    v.instance_id = inst.id;
    v.agent_a = inst.agent_a;
    v.agent_b = inst.agent_b;
    v.domains = inst.domains;
    v.history_turns = inst.history_turns;
    v.raw_ab = raw_ab;
    v.raw_ba = raw_ba;
    v.resolved = resolve_verdict(raw_ab, raw_ba);
    v.judge_meta = std::move(meta);
    return v;
}

/// The same verdict with the two agents' roles exchanged.
inline Verdict swap_agents(const Verdict& v) {
    Verdict s = v;
    std::swap(s.agent_a, s.agent_b);
    std::swap(s.raw_ab, s.raw_ba);
    s.resolved = resolve_verdict(s.raw_ab, s.raw_ba);
    return s;
}

enum class GroupBy { none, domain, history_turns };

struct WinRateRow {
    std::string group;
    int n = 0;
    int wins = 0;
    int ties = 0;
    int losses = 0;
    double win_pct = 0;
    double tie_pct = 0;
    double lose_pct = 0;
};

/// count/n as a percentage rounded half-up to one decimal, in exact integer arithmetic.
inline double percent_1dp(long long count, long long n) {
    if (n <= 0) return 0.0;
    long long tenths = (2 * count * 1000 + n) / (2 * n);
    return static_cast<double>(tenths) / 10.0;
}

/// Win/tie/lose from agent a's side. Multi-domain instances count once per
/// domain. Groups come back in domain vocabulary order (unknown domains after,
/// alphabetically) or ascending history length.
inline std::vector<WinRateRow> aggregate(const std::vector<Verdict>& verdicts, GroupBy group_by) {
    std::map<std::string, WinRateRow> rows;
    auto bump = [&](const std::string& key, Resolved r) {
        auto& row = rows[key];
        row.group = key;
        ++row.n;
        if (r == Resolved::a_wins) ++row.wins;
        else if (r == Resolved::b_wins) ++row.losses;
        else ++row.ties;
    };
    for (const auto& v : verdicts) {
        switch (group_by) {
            case GroupBy::none: bump("all", v.resolved); break;
            case GroupBy::domain: {
                std::set<std::string> seen(v.domains.begin(), v.domains.end());
                for (const auto& d : seen) bump(d, v.resolved);
                break;
            }
            case GroupBy::history_turns: bump(std::to_string(v.history_turns), v.resolved); break;
        }
    }
    std::vector<WinRateRow> out;
    for (auto& [_, row] : rows) {
        row.win_pct = percent_1dp(row.wins, row.n);
        row.tie_pct = percent_1dp(row.ties, row.n);
        row.lose_pct = percent_1dp(row.losses, row.n);
        out.push_back(row);
    }
    auto domain_rank = [](const std::string& d) {
        auto it = std::find(kDomainVocabulary.begin(), kDomainVocabulary.end(), d);
        return static_cast<std::size_t>(it - kDomainVocabulary.begin());
    };
    if (group_by == GroupBy::history_turns) {
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return std::stoi(a.group) < std::stoi(b.group); });
    } else if (group_by == GroupBy::domain) {
        std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
            auto ra = domain_rank(a.group), rb = domain_rank(b.group);
            return ra != rb ? ra < rb : a.group < b.group;
        });
    }
    return out;
}

struct PairwiseRun {
    std::vector<PairInstance> instances;
    std::vector<JudgeRecord> judgments;
    std::vector<Verdict> verdicts;
    TokenUsage agent_usage;
    TokenUsage judge_usage;
    std::vector<std::string> aborted;
};

/// Generation plus double judging for every instance; output in instance order.
inline PairwiseRun run_pairwise(const std::vector<Scenario>& dataset, std::vector<PairInstance> instances,
                                const AgentConfig& agent_a, const AgentConfig& agent_b, ChatBackend& agent_backend,
                                ChatBackend& judge_backend, const PairwiseConfig& cfg, int parallelism = 1) {
    std::map<std::string, const Scenario*> by_id;
    for (const auto& s : dataset) by_id[s.id] = &s;
    const std::size_t n = instances.size();
    std::vector<std::array<JudgeRecord, 2>> judged(n);
    std::vector<std::optional<std::string>> errors(n);
    std::vector<TokenUsage> a_use(n), j_use(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            auto& inst = instances[i];
            try {
                const Scenario& s = *by_id.at(inst.scenario_id);
                generate_pair(inst, s, agent_a, agent_b, agent_backend, cfg, &a_use[i]);
                JudgeOrder first = inst.first_order;
                JudgeOrder second = first == JudgeOrder::ab ? JudgeOrder::ba : JudgeOrder::ab;
                judged[i][0] = judge_once(inst, s, first, judge_backend, cfg, &j_use[i]);
                judged[i][1] = judge_once(inst, s, second, judge_backend, cfg, &j_use[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, parallelism)), n);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    PairwiseRun run;
    for (std::size_t i = 0; i < n; ++i) {
        run.agent_usage += a_use[i];
        run.judge_usage += j_use[i];
        if (errors[i]) {
            run.aborted.push_back(instances[i].id + ": " + *errors[i]);
            continue;
        }
        const auto& [j1, j2] = judged[i];
        const JudgeRecord& ab = j1.order == JudgeOrder::ab ? j1 : j2;
        const JudgeRecord& ba = j1.order == JudgeOrder::ab ? j2 : j1;
        run.judgments.push_back(j1);
        run.judgments.push_back(j2);
        run.verdicts.push_back(make_verdict(instances[i], ab.judgment, ba.judgment,
                                            json{{"judge_model", cfg.judge_model}, {"first_order", instances[i].first_order}}));
    }
    run.instances = std::move(instances);
    return run;
}

/// Seeded DailyPersuasion-shaped dataset for tests and demos.
inline std::vector<Scenario> synthesize_dp_dataset(std::size_t n_scenarios, std::uint64_t seed, int max_turns = 8,
                                                   int dialogues_per_scenario = 2) {
    Rng rng(seed, "synthetic-dp");
    std::vector<Scenario> out;
    for (std::size_t i = 0; i < n_scenarios; ++i) {
        Scenario s;
        std::ostringstream id;
        id << "s" << std::setw(5) << std::setfill('0') << i + 1;
        s.id = id.str();
        std::size_t n_dom = 1 + rng.uniform_index(3);
        for (std::size_t k : rng.sample_without_replacement(kDomainVocabulary.size(), n_dom))
            s.domains.emplace_back(kDomainVocabulary[k]);
        s.background = "A conversation about " + s.domains.front() + " between two acquaintances (" + s.id + ").";
        s.goal = "Convince the other person to try a new " + detail::ascii_lower(s.domains.front()) + " practice";
        for (int d = 0; d < dialogues_per_scenario; ++d) {
            DpDialogue dlg;
            dlg.id = s.id + "-d" + std::to_string(d + 1);
            int turns = rng.uniform_int(1, max_turns);
            for (int t = 1; t <= turns; ++t) {
                dlg.turns.push_back({Speaker::persuader, "Persuader line " + std::to_string(t) + " of " + dlg.id, t,
                                     std::nullopt, std::nullopt, std::nullopt});
                dlg.turns.push_back({Speaker::persuadee, "Persuadee line " + std::to_string(t) + " of " + dlg.id, t,
                                     std::nullopt, std::nullopt, std::nullopt});
            }
            s.dialogues.push_back(std::move(dlg));
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace persuade
