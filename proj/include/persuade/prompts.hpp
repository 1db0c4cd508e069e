#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "core.hpp"
#include "hashing.hpp"

namespace persuade {

enum class TemplateId {
    simple_p4g,
    procot_p4g,
    procot_rich,
    persuadee_sim,
    intention_eval,
    persona_desc,
    simple_dp,
    procot_dp,
    judge_dp,
};

NLOHMANN_JSON_SERIALIZE_ENUM(TemplateId, {{TemplateId::simple_p4g, "simple_p4g"},
                                          {TemplateId::procot_p4g, "procot_p4g"},
                                          {TemplateId::procot_rich, "procot_rich"},
                                          {TemplateId::persuadee_sim, "persuadee_sim"},
                                          {TemplateId::intention_eval, "intention_eval"},
                                          {TemplateId::persona_desc, "persona_desc"},
                                          {TemplateId::simple_dp, "simple_dp"},
                                          {TemplateId::procot_dp, "procot_dp"},
                                          {TemplateId::judge_dp, "judge_dp"}})

inline constexpr std::array<TemplateId, 9> kAllTemplates = {
    TemplateId::simple_p4g,    TemplateId::procot_p4g,     TemplateId::procot_rich,
    TemplateId::persuadee_sim, TemplateId::intention_eval, TemplateId::persona_desc,
    TemplateId::simple_dp,     TemplateId::procot_dp,      TemplateId::judge_dp};

inline std::string to_string(TemplateId id) { return json(id).get<std::string>(); }

class MissingBinding : public std::runtime_error {
public:
    explicit MissingBinding(std::string name)
        : std::runtime_error("missing binding for placeholder {" + name + "}"), name_(std::move(name)) {}
    [[nodiscard]] const std::string& name() const { return name_; }

private:
    std::string name_;
};

class UnknownTemplate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Bindings = std::map<std::string, std::string, std::less<>>;

namespace templates {

inline constexpr std::string_view kProcotMarkerEn =
    "Therefore, the appropriate dialogue strategy is []. Based on the selected dialogue strategy, the response is";
inline constexpr std::string_view kProcotMarkerJa = "したがって，適切な対話戦略は［］です．選択された対話戦略に基づく応答は：";

inline constexpr std::string_view kPersuadeeJa = R"(Now enter the role-playing mode. In the following conversation, you will play as a Persuadee in a persuasion game.
Your persona:
{persuadee_persona_description}

You must follow the instructions below during chat.
1. Your utterances need to strictly follow your persona. Varying your wording and avoid repeating yourself verbatim!
2. Pretend you have little knowledge about the Save the Children charity. {initial_donation_intention_description} at the beginning of the conversation.
3. Your willingness for donation depends on your persona and how influenced you are by the Persuader.
4. You need to determine whether to donate money or not. If you think you are convinced by the Persuader, you should donate money for the charity.

You are the Persuadee who is being persuaded by a Persuader. Please reply with only one short and succinct sentence in Japanese.
********
{dialogue_history}
********
)";

inline constexpr std::string_view kPersuadeeEn = R"(Now enter the role-playing mode. In the following conversation, you will play as a Persuadee in a persuasion game.
Your persona:
{persuadee_persona_description}

You must follow the instructions below during chat.
1. Your utterances need to strictly follow your persona. Varying your wording and avoid repeating yourself verbatim!
2. Pretend you have little knowledge about the Save the Children charity. {initial_donation_intention_description} at the beginning of the conversation.
3. Your willingness for donation depends on your persona and how influenced you are by the Persuader.
4. You need to determine whether to donate money or not. If you think you are convinced by the Persuader, you should donate money for the charity.

You are the Persuadee who is being persuaded by a Persuader. Please reply with only one short and succinct sentence.
********
{dialogue_history}
********
)";

inline constexpr std::string_view kPersonaDesc = R"(You need to incorporate the following persona attributes and generate a cohesive persona description. You need to ensure the description is easy to understand.
********
Age: {age}
Sex: {sex}
Marital: {marital_status}
Education: {educational_status}
Income: {income}
Religion: {religion}
Ideology: {ideology}
Big-Five Personality: {big_five_label}
Decision-Making Style: {decision_making_style_label}
********
An Example: You are a 28-year-old female software developer. Your personality is characterized by openness to experience, which means you are curious, imaginative, and willing to try new things. In your occupation, you excel at analyzing problems and finding logical solutions. Your decision-making style is analytical, meaning you carefully consider all available information before making a choice.
)";

inline constexpr std::string_view kSimpleP4gJa = R"(Now enter the role-playing mode. In the following conversation, you will play as a Persuader who is trying to persuade the Persuadee to donate to the charity called Save the Children.
Save the Children is head-quartered in London, and they work to help fight poverty around the world.
Children need help in developing countries and war zones. Small donations like $1 or $2 go a long way to help.
You are the Persuader who is trying to convince the Persuadee to donate to a charity called Save the Children.
Please reply with only one short and persuasive sentence in Japanese.
The following is the conversation history:
{dialogue_history}
)";

inline constexpr std::string_view kSimpleP4gEn = R"(Now enter the role-playing mode. In the following conversation, you will play as a Persuader who is trying to persuade the Persuadee to donate to the charity called Save the Children.
Save the Children is head-quartered in London, and they work to help fight poverty around the world.
Children need help in developing countries and war zones. Small donations like $1 or $2 go a long way to help.
You are the Persuader who is trying to convince the Persuadee to donate to a charity called Save the Children.
Please reply with only one short and persuasive sentence.
The following is the conversation history:
{dialogue_history}
)";

inline constexpr std::string_view kProcotP4gJa = R"(Now enter the role-playing mode. In the following conversation, you will play as a Persuader who is trying to persuade the Persuadee to donate to the charity called Save the Children.
Save the Children is head-quartered in London, and they work to help fight poverty around the world.
Children need help in developing countries and war zones. Small donations like $1 or $2 go a long way to help.

Assume you are the Persuader. Given the conversation history, please convince the persuadee to donate for charity. To achieve this, you will first analyze the current conversational context, then evaluate and select the most effective dialogue strategy to persuade effectively. Afterward, you will generate a response based on the dialogue history and the selected dialogue strategy. The reply should start with the analysis of the current conversational context and consideration of the next dialogue strategy, followed by "したがって，適切な対話戦略は［］です．選択された対話戦略に基づく応答は："
Please reply with only one short and persuasive sentence in Japanese.
Dialogue strategies: {persuasive_strategies}
The following is the conversation history:
{dialogue_history}
)";

inline constexpr std::string_view kProcotP4gEn = R"(Now enter the role-playing mode. In the following conversation, you will play as a Persuader who is trying to persuade the Persuadee to donate to the charity called Save the Children.
Save the Children is head-quartered in London, and they work to help fight poverty around the world.
Children need help in developing countries and war zones. Small donations like $1 or $2 go a long way to help.

Assume you are the Persuader. Given the conversation history, please convince the persuadee to donate for charity. To achieve this, you will first analyze the current conversational context, then evaluate and select the most effective dialogue strategy to persuade effectively. Afterward, you will generate a response based on the dialogue history and the selected dialogue strategy. The reply should start with the analysis of the current conversational context and consideration of the next dialogue strategy, followed by "Therefore, the appropriate dialogue strategy is []. Based on the selected dialogue strategy, the response is"
Please reply with only one short and persuasive sentence.
Dialogue strategies: {persuasive_strategies}
The following is the conversation history:
{dialogue_history}
)";

inline constexpr std::string_view kIntentionEval = R"(Now enter the role-playing mode. In the following conversation, you will play as a Persuadee in a persuasion game.
Your persona:
{persuadee_persona_description}

You must follow the instructions below during chat.
1. Your utterances need to strictly follow your persona. Varying your wording and avoid repeating yourself verbatim!
2. Pretend you have little knowledge about the Save the Children charity. {initial_donation_intention_description} at the beginning of conversation.
3. Your willingness for donation depends on your persona and how influenced you are by the Persuader.
4. You need to determine whether to donate money or not. If you think your are convinced by the Persuader, you should donate money for the charity.

You are the Persuadee who is being persuaded by a Persuader.
********
{dialogue_history}
assistant: Would you be interested in donating to Save the Children? Select the appropriate classification from the following options:
********

- Donation: You clearly express your willingness to make a donation to Save the Children.
- Positive reaction: You convey enthusiasm, approval, or curiosity about donating but do not explicitly commit.
- Neutral: You neither express interest nor disinterest in donating and remain non-committal.
- Negative reaction: You express reluctance or hesitation toward donating but do not outright refuse to donate.
- No donation: You explicitly state that you will not donate to Save the Children.
Please output only the label corresponding to the user's response, without any additional explanation.
)";

inline constexpr std::string_view kSimpleDpEn = R"(You are a skilled persuader.
The persuasion background: {background}
The persuasion goal: {goal}.
Please reply with only one short and persuasive sentence in English.
The following is the conversation history:
{conversation_history}
)";

inline constexpr std::string_view kSimpleDpJa = R"(You are a skilled persuader.
The persuasion background: {background}
The persuasion goal: {goal}.
Please reply with only one short and persuasive sentence in Japanese.
The following is the conversation history:
{conversation_history}
)";

inline constexpr std::string_view kProcotDpEn = R"(You are a skilled persuader.
The persuasion background: {background}
The persuasion goal: {goal}.
To achieve this, you will first analyze the current conversational context, then evaluate and select the most effective dialogue strategy to persuade effectively. Afterward, you will generate a response based on the dialogue history and the selected dialogue strategy. The reply should start with the analysis of the current conversational context and consideration of the next dialogue strategy, followed by "Therefore, the appropriate dialogue strategy is []. Based on the selected dialogue strategy, the response is"
Please reply with only one short and persuasive sentence in English.

Dialogue strategies: {persuasive_strategies}
The following is the conversation history:
{conversation_history}
)";

inline constexpr std::string_view kProcotDpJa = R"(You are a skilled persuader.
The persuasion background: {background}
The persuasion goal: {goal}.
To achieve this, you will first analyze the current conversational context, then evaluate and select the most effective dialogue strategy to persuade effectively. Afterward, you will generate a response based on the dialogue history and the selected dialogue strategy. The reply should start with the analysis of the current conversational context and consideration of the next dialogue strategy, followed by "したがって，適切な対話戦略は［］です．選択された対話戦略に基づく応答は："
Please reply with only one short and persuasive sentence in Japanese.

Dialogue strategies: {persuasive_strategies}
The following is the conversation history:
{conversation_history}
)";

inline constexpr std::string_view kJudge = R"(I will provide you with a persuasion background, as well as the corresponding goal, the persuader, the persuadee, and a historical conversation. Based on the historical conversation, there will be a dialogue system called Persuader to continue chatting with persuadee in two parallel universes (Denoted as Uni-X and Uni-Y).
Your task is to judge which universe Persuader performs better.
You have to follow the rules:
1. The evaluation dimensions for "performs better" include persuasiveness, Semantic relevance, emotional factors, factual correctness, overall evaluation, etc.;
2. You should first summarize the history conversation, and then summarize the performance of Persuader in Uni-X and Uni-Y separately;
3. After the summarization, you should compare and analyze the statements in two universes, and finally tell me in which universe Persuader performed better;
4. Don't be affected by the order of the universe. You just need to pay attention to the conversation
Next, I will tell you the persuasion scenario, the historical conversation, and the Persuader dialogue in the parallel universe Uni-X and Uni-Y one by one.
And I will tell you the output format at the end, then you tell me the results in the output format.

Background: {background}
Goal: {goal}

The historical dialogue is as follows:
{conversation_history}

The dialogue in the parallel universe Uni-X is as follows:
Persuader: {persuader_x}

The dialogue in the parallel universe Uni-Y is as follows:
Persuader: {persuader_y}

Please output the results in the following format:
1. Your next output should only be a JSON-formatted Python dict, it should not contain anything else;
2. The output format should be: {"summary_history": string,"summary_X": string,"summary_Y": string,"explain": string,"result": string};
3. summary_history should be your summary of the historical conversation, if the historical conversation is empty, then the string in summary_history should be empty;
4. summary_X and summary_Y are your summaries of the conversation by Persuader in Uni-X and Uni-Y respectively;
5. The content in "result" must be one of the following options:
  - "Uni-X" if Persuader in Uni-X performed clearly better;
  - "Uni-Y" if Persuader in Uni-Y performed clearly better;
  - "Comparable-Good" if both Uni-X and Uni-Y performed equally well and there is no significant difference between them;
  - "Comparable-Bad" if both Uni-X and Uni-Y performed equally poorly and there is no significant difference between them.
Do not output anything else such as "both", "TBD", "neither", or "I don't know", etc.;
6. The content in "explain" should be a detailed analysis, objectively and accurately comparing the performance of Persuader in Uni-X and Uni-Y, and if you find that the performances are comparable, clearly justify which label ("Comparable-Good" or "Comparable-Bad") is most appropriate;
7. In the explanation of the "explain" part, you should first provide analysis and comparison, and then at the end explain which universe you think performs better, rather than showing a clear tendency from the beginning;
)";

}  // namespace templates

inline std::string_view template_body(TemplateId id, Language lang) {
    using namespace templates;
    const bool ja = lang == Language::ja;
    switch (id) {
        case TemplateId::simple_p4g: return ja ? kSimpleP4gJa : kSimpleP4gEn;
        case TemplateId::procot_p4g:
        case TemplateId::procot_rich: return ja ? kProcotP4gJa : kProcotP4gEn;
        case TemplateId::persuadee_sim: return ja ? kPersuadeeJa : kPersuadeeEn;
        case TemplateId::intention_eval: return kIntentionEval;
        case TemplateId::persona_desc: return kPersonaDesc;
        case TemplateId::simple_dp: return ja ? kSimpleDpJa : kSimpleDpEn;
        case TemplateId::procot_dp: return ja ? kProcotDpJa : kProcotDpEn;
        case TemplateId::judge_dp: return kJudge;
    }
    throw UnknownTemplate("unknown template id");
}

inline TemplateId parse_template_id(std::string_view name) {
    for (auto id : kAllTemplates)
        if (to_string(id) == name) return id;
    throw UnknownTemplate("unknown template: " + std::string(name));
}

inline std::string template_hash(TemplateId id, Language lang) { return sha256_hex(template_body(id, lang)); }

/// "{id}.{lang}" -> sha256 for every packaged template.
inline std::map<std::string, std::string> all_template_hashes() {
    std::map<std::string, std::string> out;
    for (auto id : kAllTemplates)
        for (auto lang : {Language::ja, Language::en})
            out[to_string(id) + "." + std::string(to_string(lang))] = template_hash(id, lang);
    return out;
}

namespace detail {

inline bool is_placeholder_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

/// Calls on_text for literal runs and on_placeholder for every {name}.
template <typename Text, typename Placeholder>
void scan_template(std::string_view body, Text&& on_text, Placeholder&& on_placeholder) {
    std::size_t pos = 0, literal_start = 0;
    while ((pos = body.find('{', pos)) != std::string_view::npos) {
        std::size_t end = pos + 1;
        while (end < body.size() && is_placeholder_char(body[end])) ++end;
        if (end > pos + 1 && end < body.size() && body[end] == '}') {
            on_text(body.substr(literal_start, pos - literal_start));
            on_placeholder(body.substr(pos + 1, end - pos - 1));
            pos = literal_start = end + 1;
        } else {
            ++pos;
        }
    }
    on_text(body.substr(literal_start));
}

}  // namespace detail

inline std::vector<std::string> placeholders(std::string_view body) {
    std::vector<std::string> names;
    detail::scan_template(body, [](std::string_view) {}, [&](std::string_view name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
    });
    return names;
}

/// Substitutes placeholders in a raw template body. Bound values are inserted
/// as-is and never rescanned.
inline std::string render_text(std::string_view body, const Bindings& bindings) {
    std::string out;
    out.reserve(body.size() + 256);
    detail::scan_template(body, [&](std::string_view text) { out.append(text); }, [&](std::string_view name) {
        auto it = bindings.find(name);
        if (it == bindings.end()) throw MissingBinding(std::string(name));
        out.append(it->second);
    });
    return out;
}

inline std::string render(TemplateId id, Language lang, const Bindings& bindings) {
    return render_text(template_body(id, lang), bindings);
}

enum class DatasetKind { p4g, dp };

/// One utterance per line with the speaker prefix of the dataset family.
/// Line breaks inside an utterance are folded to spaces so the line count
/// always equals the utterance count.
inline std::string serialize_history(const std::vector<Utterance>& turns, DatasetKind kind) {
    std::string out;
    for (const auto& u : turns) {
        if (!out.empty()) out += '\n';
        switch (u.speaker) {
            case Speaker::persuader: out += kind == DatasetKind::p4g ? "assistant: " : "persuader: "; break;
            case Speaker::persuadee: out += kind == DatasetKind::p4g ? "user: " : "persuadee: "; break;
            case Speaker::system: out += "system: "; break;
        }
        for (char c : u.text) out += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return out;
}

// ---------------------------------------------------------------------------
// ProCoT reply parsing

struct ProcotReply {
    std::string analysis;
    std::optional<std::string> strategy_text;
    std::string utterance;
    /// Response marker missing; utterance is whatever followed the bracket.
    bool degraded = false;
};

struct FallbackWhole {
    std::string utterance;
};

using ProcotParse = std::variant<ProcotReply, FallbackWhole>;

namespace detail {

inline std::string_view trim_view(std::string_view s) {
    // ASCII whitespace plus U+3000 ideographic space.
    for (;;) {
        if (!s.empty() && (s.front() == ' ' || s.front() == '\n' || s.front() == '\t' || s.front() == '\r')) {
            s.remove_prefix(1);
        } else if (s.substr(0, 3) == "　") {
            s.remove_prefix(3);
        } else {
            break;
        }
    }
    for (;;) {
        if (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\t' || s.back() == '\r')) {
            s.remove_suffix(1);
        } else if (s.size() >= 3 && s.substr(s.size() - 3) == "　") {
            s.remove_suffix(3);
        } else {
            break;
        }
    }
    return s;
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

struct MarkerSet {
    std::string_view lead;       // optional connective before the strategy marker
    std::string_view strategy;   // anchor preceding the bracket
    std::string_view response;   // anchor preceding the utterance
    bool case_insensitive;
};

inline constexpr MarkerSet kMarkersEn{"therefore,", "the appropriate dialogue strategy is",
                                      "based on the selected dialogue strategy, the response is", true};
inline constexpr MarkerSet kMarkersJa{"したがって", "適切な対話戦略は", "選択された対話戦略に基づく応答は", false};

inline std::size_t find_marker(const std::string& hay_lower, const std::string& hay, std::string_view marker,
                               bool ci, std::size_t from = 0) {
    return ci ? hay_lower.find(marker, from) : hay.find(marker, from);
}

inline std::string strip_wrapping_quotes(std::string_view s) {
    static constexpr std::pair<std::string_view, std::string_view> kPairs[] = {
        {"\"", "\""}, {"“", "”"}, {"「", "」"}, {"『", "』"}, {"'", "'"}};
    for (auto [open, close] : kPairs) {
        if (s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
            s.substr(s.size() - close.size()) == close) {
            return std::string(trim_view(s.substr(open.size(), s.size() - open.size() - close.size())));
        }
    }
    return std::string(s);
}

inline std::optional<ProcotReply> try_parse(const std::string& raw, const std::string& lower, const MarkerSet& m) {
    std::size_t strat = find_marker(lower, raw, m.strategy, m.case_insensitive);
    std::size_t resp_search_from = 0;
    ProcotReply reply;
    if (strat != std::string::npos) {
        // Analysis ends where the connective ("Therefore," / "したがって") begins, if it directly precedes.
        std::string_view before(raw.data(), strat);
        std::string_view before_trim = trim_view(before);
        std::string before_lower = ascii_lower(before_trim);
        std::size_t cut = before_trim.size();
        for (std::string_view tail : {std::string_view(m.lead), std::string_view("therefore"), std::string_view("したがって，"),
                                      std::string_view("したがって、"), std::string_view("したがって,")}) {
            std::string_view probe = m.case_insensitive ? std::string_view(before_lower) : before_trim;
            if (probe.size() >= tail.size() && probe.substr(probe.size() - tail.size()) == tail) {
                cut = before_trim.size() - tail.size();
                break;
            }
        }
        reply.analysis = std::string(trim_view(before_trim.substr(0, cut)));

        std::size_t after = strat + m.strategy.size();
        std::size_t open_ascii = raw.find('[', after);
        std::size_t open_wide = raw.find("［", after);
        std::size_t open = std::min(open_ascii, open_wide);
        if (open != std::string::npos) {
            std::size_t content = open + (open == open_ascii ? 1 : std::string_view("［").size());
            std::size_t close_ascii = raw.find(']', content);
            std::size_t close_wide = raw.find("］", content);
            std::size_t close = std::min(close_ascii, close_wide);
            if (close != std::string::npos) {
                reply.strategy_text = std::string(trim_view(std::string_view(raw).substr(content, close - content)));
                resp_search_from = close + (close == close_ascii ? 1 : std::string_view("］").size());
            }
        }
        if (resp_search_from == 0) resp_search_from = after;
    }

    std::size_t resp = find_marker(lower, raw, m.response, m.case_insensitive, resp_search_from);
    if (strat == std::string::npos && resp == std::string::npos) return std::nullopt;

    std::string_view rest;
    if (resp != std::string::npos) {
        rest = std::string_view(raw).substr(resp + m.response.size());
        if (strat == std::string::npos) {
            reply.analysis = std::string(trim_view(std::string_view(raw).substr(0, resp)));
            reply.degraded = true;
        }
    } else {
        rest = std::string_view(raw).substr(resp_search_from);
        // drop the copula that closes the strategy sentence
        rest = trim_view(rest);
        for (std::string_view copula : {"です．", "です。", "です.", "です", ".", "．", "。"}) {
            if (rest.substr(0, copula.size()) == copula) {
                rest.remove_prefix(copula.size());
                break;
            }
        }
        reply.degraded = true;
    }
    rest = trim_view(rest);
    if (rest.substr(0, 1) == ":") rest.remove_prefix(1);
    else if (rest.substr(0, 3) == "：") rest.remove_prefix(3);
    reply.utterance = strip_wrapping_quotes(trim_view(rest));
    return reply;
}

}  // namespace detail

/// Splits a ProCoT reply into analysis, bracketed strategy and utterance.
/// The reply language's marker is tried first, then the other language's.
/// Without any marker the whole reply becomes the utterance.
inline ProcotParse parse_procot_output(const std::string& raw, Language lang) {
    const std::string lower = detail::ascii_lower(raw);
    const auto& first = lang == Language::en ? detail::kMarkersEn : detail::kMarkersJa;
    const auto& second = lang == Language::en ? detail::kMarkersJa : detail::kMarkersEn;
    if (auto r = detail::try_parse(raw, lower, first)) return *r;
    if (auto r = detail::try_parse(raw, lower, second)) return *r;
    return FallbackWhole{raw};
}

/// The utterance part of any ProCoT parse.
inline const std::string& utterance_of(const ProcotParse& p) {
    return std::visit([](const auto& v) -> const std::string& { return v.utterance; }, p);
}

/// Builds a well-formed ProCoT reply; used by fixtures and the scripted backend generator.
inline std::string compose_procot_reply(std::string_view analysis, std::string_view strategy, std::string_view utterance,
                                        Language lang, bool wide_brackets) {
    std::string out(analysis);
    if (!out.empty()) out += ' ';
    const std::string_view open = wide_brackets ? "［" : "[";
    const std::string_view close = wide_brackets ? "］" : "]";
    if (lang == Language::en) {
        out += "Therefore, the appropriate dialogue strategy is ";
        out += open;
        out += strategy;
        out += close;
        out += ". Based on the selected dialogue strategy, the response is: ";
    } else {
        out += "したがって，適切な対話戦略は";
        out += open;
        out += strategy;
        out += close;
        out += "です．選択された対話戦略に基づく応答は：";
    }
    if (detail::strip_wrapping_quotes(utterance) != utterance) {
        out += lang == Language::en ? "\"" : "「";
        out += utterance;
        out += lang == Language::en ? "\"" : "」";
    } else {
        out += utterance;
    }
    return out;
}

}  // namespace persuade
