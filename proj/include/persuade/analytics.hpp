#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "gateway.hpp"
#include "strategy_catalog.hpp"

namespace persuade {

class EmptyInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct LevelMetrics {
    int n = 0;
    int n_success = 0;
    int n_fail = 0;
    double sr = 0;
    std::optional<double> aii;
};

struct SuccessMetrics {
    int n = 0;
    int n_success = 0;
    int n_fail = 0;
    int n_aborted = 0;
    double sr = 0;
    double at = 0;
    std::optional<double> at_sd;
    std::optional<double> aii;
    std::map<int, LevelMetrics> by_level;
};

inline void to_json(json& j, const LevelMetrics& m) {
    j = json{{"n", m.n}, {"n_success", m.n_success}, {"n_fail", m.n_fail}, {"sr", m.sr},
             {"aii", m.aii ? json(*m.aii) : json(nullptr)}};
}
inline void to_json(json& j, const SuccessMetrics& m) {
    json levels = json::object();
    for (const auto& [lvl, lm] : m.by_level) levels[std::to_string(lvl)] = lm;
    j = json{{"n", m.n},
             {"n_success", m.n_success},
             {"n_fail", m.n_fail},
             {"n_aborted", m.n_aborted},
             {"sr", m.sr},
             {"at", m.at},
             {"at_sd", m.at_sd ? json(*m.at_sd) : json(nullptr)},
             {"aii", m.aii ? json(*m.aii) : json(nullptr)},
             {"by_level", levels}};
}

/// Turns charged to a dialogue: its length on success, the cap on failure.
inline int charged_turns(const DialogueRecord& r) { return r.succeeded() ? r.turn_count() : r.max_turns; }

/// SR, AT (failures charged max_turns), AT-SD (successes only) and AII (mean
/// initial minus final level over failures). Aborted records are left out.
inline SuccessMetrics compute_success_metrics(const std::vector<DialogueRecord>& records) {
    SuccessMetrics m;
    long long turns_all = 0, turns_success = 0, gain_fail = 0;
    std::map<int, long long> level_gain;
    for (const auto& r : records) {
        if (r.aborted) {
            ++m.n_aborted;
            continue;
        }
        ++m.n;
        auto& lm = m.by_level[r.initial_intention.value()];
        ++lm.n;
        turns_all += charged_turns(r);
        if (r.succeeded()) {
            ++m.n_success;
            ++lm.n_success;
            turns_success += r.turn_count();
        } else {
            ++m.n_fail;
            ++lm.n_fail;
            int gain = r.initial_intention.value() - r.final_intention.value();
            gain_fail += gain;
            level_gain[r.initial_intention.value()] += gain;
        }
    }
    if (m.n == 0) throw EmptyInput("no completed dialogues to score");
    m.sr = static_cast<double>(m.n_success) / m.n;
    m.at = static_cast<double>(turns_all) / m.n;
    if (m.n_success > 0) m.at_sd = static_cast<double>(turns_success) / m.n_success;
    if (m.n_fail > 0) m.aii = static_cast<double>(gain_fail) / m.n_fail;
    for (auto& [lvl, lm] : m.by_level) {
        lm.sr = static_cast<double>(lm.n_success) / lm.n;
        if (lm.n_fail > 0) lm.aii = static_cast<double>(level_gain[lvl]) / lm.n_fail;
    }
    return m;
}

struct ShiftMatrix {
    /// counts[initial-1][final-1]
    std::array<std::array<int, 5>, 5> counts{};

    [[nodiscard]] int row_sum(int initial) const {
        int s = 0;
        for (int c : counts[static_cast<std::size_t>(initial - 1)]) s += c;
        return s;
    }
    [[nodiscard]] int column_sum(int final_level) const {
        int s = 0;
        for (const auto& row : counts) s += row[static_cast<std::size_t>(final_level - 1)];
        return s;
    }
    [[nodiscard]] int total() const {
        int s = 0;
        for (int i = 1; i <= 5; ++i) s += row_sum(i);
        return s;
    }
};

inline ShiftMatrix shift_matrix(const std::vector<DialogueRecord>& records) {
    ShiftMatrix m;
    for (const auto& r : records) {
        if (r.aborted) continue;
        int fin = r.succeeded() ? 1 : r.final_intention.value();
        ++m.counts[static_cast<std::size_t>(r.initial_intention.value() - 1)][static_cast<std::size_t>(fin - 1)];
    }
    return m;
}

inline void to_json(json& j, const ShiftMatrix& m) { j = json{{"counts", m.counts}}; }

/// Shannon entropy in bits over the given proportions; zero entries add nothing.
inline double entropy_bits(const std::vector<double>& proportions) {
    double h = 0;
    for (double p : proportions)
        if (p > 0) h -= p * std::log2(p);
    return h;
}

inline constexpr std::string_view kUnrecognized = "unrecognized";

struct StrategyUsage {
    /// Catalog order, one entry per catalog strategy, then the unrecognized bucket.
    std::vector<std::pair<std::string, int>> counts;
    int total = 0;
    std::vector<double> proportions;
    double entropy_used = 0;
    double entropy_all = 0;

    [[nodiscard]] int count_of(std::string_view id) const {
        for (const auto& [k, c] : counts)
            if (k == id) return c;
        return 0;
    }
};

/// Tabulates the strategy of every persuader utterance. Utterances without a
/// matched strategy land in the unrecognized bucket.
inline StrategyUsage strategy_usage(const std::vector<DialogueRecord>& records, const StrategyCatalog& catalog) {
    StrategyUsage u;
    std::map<std::string, int> tally;
    int unrecognized = 0;
    for (const auto& r : records) {
        if (r.aborted) continue;
        for (const auto& t : r.turns) {
            ++u.total;
            if (t.persuader.strategy && catalog.find(*t.persuader.strategy)) ++tally[*t.persuader.strategy];
            else ++unrecognized;
        }
    }
    for (const auto& e : catalog.entries()) u.counts.emplace_back(e.id, tally[e.id]);
    u.counts.emplace_back(std::string(kUnrecognized), unrecognized);
    std::vector<double> used;
    for (const auto& [_, c] : u.counts) {
        double p = u.total ? static_cast<double>(c) / u.total : 0.0;
        u.proportions.push_back(p);
        if (c > 0) used.push_back(p);
    }
    u.entropy_used = entropy_bits(used);
    u.entropy_all = entropy_bits(u.proportions);
    return u;
}

struct EffectivenessCell {
    int uses = 0;
    int improvements = 0;
    /// nullopt when uses is below the threshold.
    std::optional<double> proportion;
};

struct EffectivenessMatrix {
    int min_uses = 40;
    /// strategy id -> pre-turn level (2..5) -> cell
    std::map<std::string, std::map<int, EffectivenessCell>> cells;

    [[nodiscard]] EffectivenessCell at(const std::string& id, int level) const {
        if (auto it = cells.find(id); it != cells.end())
            if (auto jt = it->second.find(level); jt != it->second.end()) return jt->second;
        return {};
    }
};

/// Level a turn starts from: the initial level for turn 1, else the previous
/// turn's aggregated level.
inline int pre_turn_level(const DialogueRecord& r, std::size_t turn_idx) {
    return turn_idx == 0 ? r.initial_intention.value() : r.turns[turn_idx - 1].evaluation.aggregated.value();
}

inline EffectivenessMatrix effectiveness_matrix(const std::vector<DialogueRecord>& records, int min_uses = 40) {
    EffectivenessMatrix m;
    m.min_uses = min_uses;
    for (const auto& r : records) {
        if (r.aborted) continue;
        for (std::size_t i = 0; i < r.turns.size(); ++i) {
            const auto& t = r.turns[i];
            if (!t.persuader.strategy) continue;
            int pre = pre_turn_level(r, i);
            if (pre <= 1) continue;
            auto& cell = m.cells[*t.persuader.strategy][pre];
            ++cell.uses;
            if (t.evaluation.success || t.evaluation.aggregated.value() < pre) ++cell.improvements;
        }
    }
    for (auto& [_, row] : m.cells)
        for (auto& [__, cell] : row)
            if (cell.uses >= min_uses) cell.proportion = static_cast<double>(cell.improvements) / cell.uses;
    return m;
}

class DegenerateMarginals : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct KappaResult {
    double p_o = 0;
    double p_e = 0;
    std::optional<double> kappa;
};

/// Cohen's kappa for two raters over the same items. kappa is nullopt when
/// chance agreement is 1 (both raters used a single identical label).
inline KappaResult cohens_kappa_detail(const std::vector<std::pair<std::string, std::string>>& pairs) {
    if (pairs.size() < 2) throw std::invalid_argument("cohens_kappa needs at least two items");
    std::map<std::string, int> m1, m2;
    int agree = 0;
    for (const auto& [a, b] : pairs) {
        ++m1[a];
        ++m2[b];
        if (a == b) ++agree;
    }
    const double n = static_cast<double>(pairs.size());
    KappaResult r;
    r.p_o = agree / n;
    for (const auto& [label, c1] : m1)
        if (auto it = m2.find(label); it != m2.end()) r.p_e += (c1 / n) * (it->second / n);
    if (std::abs(1.0 - r.p_e) < 1e-15) return r;
    r.kappa = (r.p_o - r.p_e) / (1.0 - r.p_e);
    return r;
}

inline double cohens_kappa(const std::vector<std::pair<std::string, std::string>>& pairs) {
    auto r = cohens_kappa_detail(pairs);
    if (!r.kappa) throw DegenerateMarginals("chance agreement is 1; kappa undefined");
    return *r.kappa;
}

struct CostLatencyRow {
    std::string agent;
    std::string model;
    int dialogues = 0;
    int persuader_turns = 0;
    double input_tokens_per_turn = 0;
    double output_tokens_per_turn = 0;
    double seconds_per_turn = 0;
    std::optional<double> cost_per_turn;
    TokenUsage persuader_usage;
    TokenUsage all_usage;
};

/// Per-agent averages of the persuader's own calls per persuader turn. Cost
/// is filled when `pricing` is given; an unpriced model raises UnknownModel.
inline std::vector<CostLatencyRow> cost_latency_summary(const std::vector<DialogueRecord>& records,
                                                        const PricingTable* pricing = nullptr) {
    std::map<std::string, CostLatencyRow> rows;
    std::map<std::string, double> seconds, cost;
    for (const auto& r : records) {
        auto& row = rows[r.agent_config_id];
        row.agent = r.agent_config_id;
        row.model = r.agent_model;
        ++row.dialogues;
        for (const auto& t : r.wall_times) {
            if (t.role == "persuader") {
                ++row.persuader_turns;
                seconds[row.agent] += t.seconds;
            }
        }
        TokenUsage pu;
        if (auto it = r.usage_by_role.find("persuader"); it != r.usage_by_role.end()) pu = it->second;
        row.persuader_usage += pu;
        row.all_usage += r.usage;
        if (pricing) cost[row.agent] += cost_of(pu, r.agent_model, *pricing);
    }
    std::vector<CostLatencyRow> out;
    for (auto& [agent, row] : rows) {
        if (row.persuader_turns > 0) {
            const double n = row.persuader_turns;
            row.input_tokens_per_turn = static_cast<double>(row.persuader_usage.input_tokens) / n;
            row.output_tokens_per_turn = static_cast<double>(row.persuader_usage.output_tokens) / n;
            row.seconds_per_turn = seconds[agent] / n;
            if (pricing) row.cost_per_turn = cost[agent] / n;
        } else if (pricing) {
            row.cost_per_turn = 0.0;
        }
        out.push_back(row);
    }
    return out;
}

}  // namespace persuade
