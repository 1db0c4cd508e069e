#pragma once

#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "analytics.hpp"
#include "pairwise.hpp"
#include "strategy_catalog.hpp"

namespace persuade {

enum class TableFormat { csv, md };

inline std::string fixed(double v, int precision) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

inline std::string opt_fixed(const std::optional<double>& v, int precision, std::string_view missing = "n/a") {
    return v ? fixed(*v, precision) : std::string(missing);
}

/// Header plus rows, as CSV or a Markdown pipe table.
inline std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                                TableFormat fmt) {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        if (fmt == TableFormat::csv) {
            for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_escape(cells[i]);
        } else {
            out << '|';
            for (const auto& c : cells) out << ' ' << c << " |";
        }
        out << '\n';
    };
    line(header);
    if (fmt == TableFormat::md) {
        out << '|';
        for (std::size_t i = 0; i < header.size(); ++i) out << " --- |";
        out << '\n';
    }
    for (const auto& r : rows) line(r);
    return out.str();
}

inline std::string success_table(const std::map<std::string, SuccessMetrics>& by_agent, TableFormat fmt) {
    std::vector<std::string> header{"agent", "n", "SR", "AT", "AT-SD", "AII"};
    for (int l = 1; l <= 5; ++l) header.push_back("SR@L" + std::to_string(l));
    for (int l = 2; l <= 5; ++l) header.push_back("AII@L" + std::to_string(l));
    std::vector<std::vector<std::string>> rows;
    for (const auto& [agent, m] : by_agent) {
        std::vector<std::string> r{agent, std::to_string(m.n), fixed(m.sr, 3), fixed(m.at, 2), opt_fixed(m.at_sd, 2),
                                   opt_fixed(m.aii, 2)};
        for (int l = 1; l <= 5; ++l) {
            auto it = m.by_level.find(l);
            r.push_back(it == m.by_level.end() ? "n/a" : fixed(it->second.sr, 3));
        }
        for (int l = 2; l <= 5; ++l) {
            auto it = m.by_level.find(l);
            r.push_back(it == m.by_level.end() ? "n/a" : opt_fixed(it->second.aii, 2));
        }
        rows.push_back(std::move(r));
    }
    return render_table(header, rows, fmt);
}

inline std::string shift_table(const ShiftMatrix& m, TableFormat fmt) {
    std::vector<std::string> header{"initial\\final", "1", "2", "3", "4", "5", "row_sum"};
    std::vector<std::vector<std::string>> rows;
    for (int i = 1; i <= 5; ++i) {
        std::vector<std::string> r{std::to_string(i)};
        for (int f = 1; f <= 5; ++f)
            r.push_back(std::to_string(m.counts[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(f - 1)]));
        r.push_back(std::to_string(m.row_sum(i)));
        rows.push_back(std::move(r));
    }
    std::vector<std::string> col{"column_sum"};
    for (int f = 1; f <= 5; ++f) col.push_back(std::to_string(m.column_sum(f)));
    col.push_back(std::to_string(m.total()));
    rows.push_back(std::move(col));
    return render_table(header, rows, fmt);
}

inline std::string usage_table(const StrategyUsage& u, const StrategyCatalog& catalog, TableFormat fmt) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < u.counts.size(); ++i) {
        const auto& [id, c] = u.counts[i];
        const auto* s = catalog.find(id);
        rows.push_back({id, s ? s->label : std::string("(unrecognized)"), std::to_string(c), fixed(u.proportions[i], 3)});
    }
    rows.push_back({"", "Entropy (w/o unused str.)", "", fixed(u.entropy_used, 3)});
    rows.push_back({"", "Entropy (all)", "", fixed(u.entropy_all, 3)});
    return render_table({"id", "strategy", "count", "proportion"}, rows, fmt);
}

/// Strategies as rows, pre-turn levels 2..5 as columns; masked cells read "masked".
inline std::string heatmap_table(const EffectivenessMatrix& m, const StrategyCatalog& catalog, TableFormat fmt) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : catalog.entries()) {
        std::vector<std::string> r{e.id, e.label};
        for (int lvl = 2; lvl <= 5; ++lvl) {
            auto cell = m.at(e.id, lvl);
            r.push_back(cell.proportion ? fixed(*cell.proportion, 3) : "masked");
        }
        for (int lvl = 2; lvl <= 5; ++lvl) r.push_back(std::to_string(m.at(e.id, lvl).uses));
        rows.push_back(std::move(r));
    }
    return render_table({"id", "strategy", "L2", "L3", "L4", "L5", "uses_L2", "uses_L3", "uses_L4", "uses_L5"}, rows, fmt);
}

inline std::string cost_table(const std::vector<CostLatencyRow>& rows_in, TableFormat fmt) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rows_in) {
        rows.push_back({r.agent, r.model, std::to_string(r.persuader_turns), fixed(r.input_tokens_per_turn, 2),
                        fixed(r.output_tokens_per_turn, 2), fixed(r.seconds_per_turn, 3),
                        r.cost_per_turn ? fixed(*r.cost_per_turn, 6) : "n/a"});
    }
    return render_table({"agent", "model", "turns", "input_tokens/turn", "output_tokens/turn", "seconds/turn", "cost/turn"},
                        rows, fmt);
}

inline std::string winrate_table(const std::vector<WinRateRow>& rows_in, TableFormat fmt, std::string_view group_name = "group") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rows_in) {
        rows.push_back({r.group, std::to_string(r.n), std::to_string(r.wins), std::to_string(r.ties),
                        std::to_string(r.losses), fixed(r.win_pct, 1), fixed(r.tie_pct, 1), fixed(r.lose_pct, 1)});
    }
    return render_table({std::string(group_name), "n", "win", "tie", "lose", "win%", "tie%", "lose%"}, rows, fmt);
}

}  // namespace persuade
