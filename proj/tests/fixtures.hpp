#pragma once

#include <unistd.h>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "persuade/core.hpp"
#include "persuade/hashing.hpp"

namespace fixtures {

using namespace persuade;

inline IntentionEvaluation uniform_eval(int level, int repeat = 10) {
    return IntentionEvaluation::from_samples(
        std::vector<IntentionLevel>(static_cast<std::size_t>(repeat), IntentionLevel::per_turn(level)));
}

/// Record whose turn t ends at aggregated level levels[t]; success when the
/// last level is 1.
inline DialogueRecord make_record(const std::string& id, int initial, const std::vector<int>& levels,
                                  const std::vector<std::optional<std::string>>& strategies = {}, int max_turns = 10,
                                  const std::string& agent = "agent") {
    DialogueRecord r;
    r.id = id;
    r.agent_config_id = agent;
    r.agent_model = "model-x";
    r.persona_id = id;
    r.initial_intention = IntentionLevel::initial(initial);
    r.max_turns = max_turns;
    r.final_intention = IntentionLevel::per_turn(initial);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        TurnRecord t;
        const int turn = static_cast<int>(i) + 1;
        t.persuader = {Speaker::persuader, "pitch " + std::to_string(turn), turn, std::nullopt, std::nullopt, std::nullopt};
        if (i < strategies.size()) t.persuader.strategy = strategies[i];
        t.persuadee = {Speaker::persuadee, "reply " + std::to_string(turn), turn, std::nullopt, std::nullopt, std::nullopt};
        t.evaluation = uniform_eval(levels[i]);
        r.final_intention = t.evaluation.aggregated;
        r.turns.push_back(std::move(t));
    }
    r.outcome = !levels.empty() && levels.back() == 1 ? Outcome::success : Outcome::failure;
    return r;
}

/// Failure that runs the cap and ends at `final_level`.
inline DialogueRecord failed_record(const std::string& id, int initial, int final_level, int max_turns = 10) {
    std::vector<int> levels(static_cast<std::size_t>(max_turns), initial);
    levels.back() = final_level;
    return make_record(id, initial, levels, {}, max_turns);
}

/// Success ending at turn `turns`.
inline DialogueRecord success_record(const std::string& id, int initial, int turns, int max_turns = 10) {
    std::vector<int> levels(static_cast<std::size_t>(turns), initial == 1 ? 2 : initial);
    levels.back() = 1;
    return make_record(id, initial, levels, {}, max_turns);
}

/// Rows of the Japanese ProCoT-rich-desc intention-shift table.
inline const std::array<std::array<int, 5>, 5> kShiftTableJaRichDesc = {{
    {73, 0, 0, 0, 0},
    {53, 3, 0, 0, 0},
    {50, 2, 4, 0, 0},
    {43, 3, 5, 2, 0},
    {31, 0, 5, 1, 25},
}};

/// Records that reproduce a 5x5 (initial, final) count table.
inline std::vector<DialogueRecord> records_from_shift(const std::array<std::array<int, 5>, 5>& table) {
    std::vector<DialogueRecord> out;
    int k = 0;
    for (int i = 1; i <= 5; ++i)
        for (int f = 1; f <= 5; ++f)
            for (int c = 0; c < table[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(f - 1)]; ++c) {
                std::string id = "r" + std::to_string(++k);
                out.push_back(f == 1 ? success_record(id, i, 1 + k % 7) : failed_record(id, i, f));
            }
    return out;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("persuade-test-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
