#pragma once

#include <string>
#include <vector>

#include "dialogue.hpp"
#include "pairwise.hpp"
#include "persona.hpp"

namespace persuade {

/// Ten evaluator samples whose majority/mode rule yields `level`.
inline std::vector<int> samples_for_level(int level, Rng& rng, int repeat = 10) {
    std::vector<int> s;
    if (level == 1) {
        int ones = repeat / 2 + 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(repeat - repeat / 2)));
        s.assign(static_cast<std::size_t>(ones), 1);
        s.resize(static_cast<std::size_t>(repeat), 2);
    } else {
        int neighbour = level == 5 ? 4 : level + 1;
        int minority = static_cast<int>(rng.uniform_index(static_cast<std::size_t>((repeat - 1) / 2 + 1)));
        s.assign(static_cast<std::size_t>(repeat - minority), level);
        s.resize(static_cast<std::size_t>(repeat), neighbour);
    }
    rng.shuffle(s);
    return s;
}

struct P4gScriptOptions {
    int max_turns = 10;
    int repeat_evals = 10;
    /// Per-turn chance the level drops by one.
    double improve_probability = 0.3;
    /// Per-turn chance the level rises by one.
    double regress_probability = 0.05;
    /// Chance a ProCoT reply names no catalog strategy.
    double off_catalog_probability = 0.02;
};

/// Scripted-backend rules that play out one seeded random dialogue per
/// (agent, persona) pair, keyed by dialogue id.
inline json make_p4g_script(const std::vector<AgentConfig>& agents, const std::vector<Persona>& personas,
                            std::uint64_t seed, const P4gScriptOptions& opts = {}) {
    json rules = json::array();
    rules.push_back({{"match", {{"role", "persona"}}},
                     {"replies", {"A thoughtful adult who weighs requests carefully before acting."}},
                     {"cycle", true}});
    rules.push_back({{"match", {{"role", "persuadee"}}},
                     {"replies",
                      {"I see. Could you tell me more?", "I am not sure that is for me.", "That does sound worthwhile.",
                       "How would my money actually be used?"}},
                     {"cycle", true}});
    for (const auto& agent : agents) {
        const auto catalog = agent.catalog();
        for (const auto& p : personas) {
            const std::string id = agent.id + "-" + p.id;
            Rng rng(seed, "script:" + id);
            json persuader = json::array();
            json evaluator = json::array();
            int level = p.initial_intention.value();
            for (int t = 1; t <= opts.max_turns; ++t) {
                std::string utterance = "Turn " + std::to_string(t) + " message for " + p.id + ".";
                if (agent.kind == AgentKind::procot) {
                    std::string strategy = "Small talk about the weather";
                    if (!rng.coin(opts.off_catalog_probability))
                        strategy = catalog.entries()[rng.uniform_index(catalog.size())].label;
                    persuader.push_back(compose_procot_reply("The persuadee seems undecided.", strategy, utterance,
                                                             agent.language, rng.coin()));
                } else {
                    persuader.push_back(utterance);
                }
                double u = rng.uniform_real();
                if (u < opts.improve_probability) level = std::max(1, level - 1);
                else if (u < opts.improve_probability + opts.regress_probability) level = std::min(5, level + 1);
                for (int s : samples_for_level(level, rng, opts.repeat_evals))
                    evaluator.push_back(std::string(IntentionLevel::per_turn(s).label()));
                if (level == 1) break;
            }
            rules.push_back({{"match", {{"role", "persuader"}, {"dialogue", id}}}, {"replies", persuader}});
            rules.push_back({{"match", {{"role", "evaluator"}, {"dialogue", id}}}, {"replies", evaluator}});
        }
    }
    return json{{"rules", rules}};
}

/// Judge reply pair (ab, ba) that resolves to `outcome`. Ties rotate through
/// inconsistent, comparable and unparseable forms.
inline std::pair<std::string, std::string> judge_replies_for(Resolved outcome, Rng& rng) {
    auto reply = [](std::string_view result) {
        return json{{"reason", "Both responses were compared on the persuasion goal."}, {"result", result}}.dump();
    };
    switch (outcome) {
        case Resolved::a_wins: return {reply("Uni-X"), reply("Uni-Y")};
        case Resolved::b_wins: return {reply("Uni-Y"), reply("Uni-X")};
        case Resolved::tie: break;
    }
    switch (rng.uniform_index(4)) {
        case 0: return {reply("Uni-X"), reply("Uni-X")};
        case 1: return {reply("Comparable-Good"), reply("Comparable-Good")};
        case 2: return {reply("Uni-Y"), reply("Comparable-Bad")};
        default: return {"I cannot decide.", reply("Uni-X")};
    }
}

/// Scripted rules for a pairwise run: cycling persuader replies plus one
/// judge reply per (instance, order) so the run resolves to `outcomes`.
inline json make_dp_script(const std::vector<PairInstance>& instances, const std::vector<Resolved>& outcomes,
                           std::uint64_t seed) {
    if (instances.size() != outcomes.size()) throw std::invalid_argument("one outcome per instance is required");
    Rng rng(seed, "dp-script");
    json rules = json::array();
    rules.push_back({{"match", {{"role", "persuader"}, {"slot", "a"}}},
                     {"replies", {compose_procot_reply("The persuadee hesitates.", "Emotional appeal",
                                                       "Think of how much this could help.", Language::en, false)}},
                     {"cycle", true}});
    rules.push_back({{"match", {{"role", "persuader"}, {"slot", "b"}}},
                     {"replies", {"You should really consider it."}},
                     {"cycle", true}});
    for (std::size_t i = 0; i < instances.size(); ++i) {
        auto [ab, ba] = judge_replies_for(outcomes[i], rng);
        rules.push_back({{"match", {{"role", "judge"}, {"instance", instances[i].id}, {"order", "ab"}}}, {"replies", {ab}}});
        rules.push_back({{"match", {{"role", "judge"}, {"instance", instances[i].id}, {"order", "ba"}}}, {"replies", {ba}}});
    }
    return json{{"rules", rules}};
}

/// Outcome list with exact counts, shuffled by `seed`.
inline std::vector<Resolved> outcome_mix(int wins, int ties, int losses, std::uint64_t seed) {
    std::vector<Resolved> out;
    out.insert(out.end(), static_cast<std::size_t>(wins), Resolved::a_wins);
    out.insert(out.end(), static_cast<std::size_t>(ties), Resolved::tie);
    out.insert(out.end(), static_cast<std::size_t>(losses), Resolved::b_wins);
    Rng rng(seed, "outcome-mix");
    rng.shuffle(out);
    return out;
}

}  // namespace persuade
