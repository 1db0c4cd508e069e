#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace persuade {

struct StrategyCategory {
    char letter = 'a';
    std::string name;
    std::string intent;
};

/// How the strategy relates to the ten-strategy P4G set.
enum class P4gMark { none, direct, subsumed, dialogue_act };

NLOHMANN_JSON_SERIALIZE_ENUM(P4gMark, {{P4gMark::none, "none"},
                                       {P4gMark::direct, "direct"},
                                       {P4gMark::subsumed, "subsumed"},
                                       {P4gMark::dialogue_act, "dialogue_act"}})

struct Strategy {
    std::string id;
    std::string label;
    std::string category;
    char category_letter = 'a';
    /// "central" or "peripheral" for category b, empty otherwise.
    std::string route;
    std::string description;
    bool in_p4g_subset = false;
    P4gMark p4g_mark = P4gMark::none;
    std::optional<std::string> p4g_alias;
    /// P4G label this strategy folds into for comparison tables; never used for matching.
    std::optional<std::string> soft_alias;
    /// Extra names accepted by match_strategy (other-language label, spelling variants).
    std::vector<std::string> alt_labels;
};

inline void to_json(json& j, const Strategy& s) {
    j = json{{"id", s.id},
             {"label", s.label},
             {"category", s.category},
             {"description", s.description},
             {"in_p4g_subset", s.in_p4g_subset},
             {"p4g_mark", s.p4g_mark}};
    if (!s.route.empty()) j["route"] = s.route;
    detail::put_optional(j, "p4g_alias", s.p4g_alias);
    detail::put_optional(j, "soft_alias", s.soft_alias);
}

class StrategyCatalog {
public:
    static constexpr std::string_view kVersion = "1.0";

    StrategyCatalog() = default;
    StrategyCatalog(Language lang, std::vector<Strategy> entries, std::vector<StrategyCategory> categories, bool subset)
        : language_(lang), entries_(std::move(entries)), categories_(std::move(categories)), subset_(subset) {}

    [[nodiscard]] Language language() const { return language_; }
    [[nodiscard]] bool is_p4g_subset() const { return subset_; }
    [[nodiscard]] const std::vector<Strategy>& entries() const { return entries_; }
    [[nodiscard]] const std::vector<StrategyCategory>& categories() const { return categories_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

    [[nodiscard]] const Strategy* find(std::string_view id) const {
        for (const auto& e : entries_)
            if (e.id == id) return &e;
        return nullptr;
    }

    [[nodiscard]] const Strategy& lookup(std::string_view id) const {
        if (auto* e = find(id)) return *e;
        throw std::out_of_range("unknown strategy id: " + std::string(id));
    }

    /// True when some entry carries `label` as its label or P4G alias.
    [[nodiscard]] bool contains(std::string_view label) const {
        return std::any_of(entries_.begin(), entries_.end(), [&](const Strategy& e) {
            return e.label == label || (e.p4g_alias && *e.p4g_alias == label);
        });
    }

    [[nodiscard]] json to_json() const {
        json cats = json::array();
        for (const auto& c : categories_)
            cats.push_back({{"letter", std::string(1, c.letter)}, {"name", c.name}, {"intent", c.intent}});
        return json{{"version", kVersion},
                    {"language", language_},
                    {"view", subset_ ? "p4g_subset" : "full"},
                    {"categories", cats},
                    {"entries", entries_}};
    }

private:
    Language language_ = Language::en;
    std::vector<Strategy> entries_;
    std::vector<StrategyCategory> categories_;
    bool subset_ = false;
};

namespace detail {

struct CategoryRow {
    char letter;
    std::string_view name_en, name_ja, intent_en, intent_ja;
};

inline constexpr std::array<CategoryRow, 7> kCategories = {{
    {'a', "Gather Information via Inquiry", "質問による情報収集",
     "Learn what the persuadee knows, wants and worries about before pushing.",
     "働きかける前に，相手の知識・関心・懸念を把握する．"},
    {'b', "Select a Persuasion Route (Central/Peripheral)", "説得ルートの選択（中心的／周辺的）",
     "Choose between reasoned argument and quick affective or heuristic influence.",
     "論理による説得か，感情や手がかりによる素早い影響かを選ぶ．"},
    {'c', "Build Trust and Credibility", "信頼と信用の構築",
     "Make the organization and the request believable.",
     "組織と依頼内容を信じてもらえるようにする．"},
    {'d', "Facilitate Concrete Actions", "具体的な行動の促進",
     "Turn a favorable attitude into an actual commitment.",
     "好意的な態度を実際の行動に結びつける．"},
    {'e', "Refine Information Presentation", "情報提示の工夫",
     "Shape how facts are shown to lower the barrier to deciding.",
     "情報の見せ方を工夫し，決断のハードルを下げる．"},
    {'f', "Personalization and Relevance", "個人化と関連性",
     "Tie the request to the persuadee's own experience and values.",
     "依頼を相手自身の経験や価値観に結びつける．"},
    {'g', "Follow-up and Relationship Maintenance", "フォローアップと関係維持",
     "Keep the commitment alive after the decision.",
     "決断後も関与を保ち，コミットメントを維持する．"},
}};

struct StrategyRow {
    std::string_view id;
    std::string_view route;
    std::string_view label_en, label_ja;
    std::string_view desc_en, desc_ja;
    P4gMark mark;
    std::string_view p4g_alias_en, p4g_alias_ja;
    std::string_view soft_alias;
};

inline constexpr std::array<StrategyRow, 31> kStrategies = {{
    {"a-1", "", "Source-related inquiry", "情報源に関する質問",
     "Check if the person is aware of the organization or brand. Clarify misconceptions and tailor explanations based on their familiarity.",
     "相手が団体やブランドを知っているかを確認する．誤解を解き，相手の認知度に合わせて説明を調整する．",
     P4gMark::direct, "", "", ""},
    {"a-2", "", "Task-related inquiry", "タスクに関する質問",
     "Ask about the person's opinion or expectations toward the action (donation, investment, etc.). Identify interests or concerns.",
     "行動（寄付や投資など）に対する相手の意見や期待を尋ね，関心や懸念を把握する．",
     P4gMark::direct, "", "", ""},
    {"a-3", "", "Personal-related inquiry", "個人に関する質問",
     "Explore past experiences, motivations, or barriers to understand individual needs or constraints.",
     "過去の経験や動機，障壁を探り，個人のニーズや制約を理解する．",
     P4gMark::direct, "", "", ""},
    {"b-1", "central", "Logical appeal", "論理的訴求",
     "Use data, facts, and clear evidence. Highlight tangible benefits and real-world impact.",
     "データや事実，明確な根拠を用いる．具体的な利益や現実の効果を強調する．",
     P4gMark::direct, "", "", ""},
    {"b-2", "central", "Message strength", "メッセージの強さ",
     "Reinforce arguments with strong evidence, examples, or case studies.",
     "強い根拠や具体例，事例研究で主張を補強する．",
     P4gMark::subsumed, "", "", "Logical appeal"},
    {"b-3", "central", "Detailed information", "詳細情報",
     "Provide clear step-by-step guidance, manage cognitive load, and ensure transparency in procedures or processes.",
     "段階的で明確な案内を示し，認知的負荷を抑え，手続きや過程の透明性を確保する．",
     P4gMark::direct, "Donation information", "寄付情報", ""},
    {"b-4", "peripheral", "Emotional appeal", "感情的訴求",
     "Elicit empathy, hope, anger, or guilt through stories or visuals that resonate emotionally.",
     "心に響く物語や映像を通じて，共感や希望，怒り，罪悪感を呼び起こす．",
     P4gMark::direct, "Emotion appeal", "感情的訴求", ""},
    {"b-5", "peripheral", "Heuristic cues", "ヒューリスティックな手がかり",
     "Leverage authority figures, social proof, or popularity indicators to increase credibility quickly.",
     "権威者や社会的証明，人気の指標を活用し，素早く信頼性を高める．",
     P4gMark::none, "", "", ""},
    {"b-6", "peripheral", "Personal Demonstration", "自己実演",
     "Demonstrate that the persuader also engages in the behavior. Encourage imitation and reduce perceived risk.",
     "説得者自身もその行動をしていることを示し，模倣を促して知覚リスクを下げる．",
     P4gMark::direct, "Self-modeling", "自己モデリング", ""},
    {"b-7", "peripheral", "Metacognitive approach", "メタ認知的アプローチ",
     "Have the person reflect on their thought process, increasing self-awareness and ownership of the decision.",
     "相手に自分の思考過程を振り返らせ，自己認識と決定への当事者意識を高める．",
     P4gMark::none, "", "", ""},
    {"c-1", "", "Credibility appeal", "信頼性への訴求",
     "Use objective data, track records, or transparency measures to gain trust.",
     "客観的なデータや実績，透明性の取り組みを用いて信頼を得る．",
     P4gMark::direct, "", "", ""},
    {"c-2", "", "Authority", "権威",
     "Emphasize recognized expertise, awards, or credentials to establish legitimacy.",
     "認められた専門性や受賞歴，資格を強調して正当性を確立する．",
     P4gMark::subsumed, "", "", ""},
    {"c-3", "", "Social proof", "社会的証明",
     "Show that many others have already participated or benefited, reducing perceived risk.",
     "既に多くの人が参加し恩恵を受けていることを示し，知覚リスクを下げる．",
     P4gMark::subsumed, "", "", ""},
    {"c-4", "", "Consistency", "一貫性",
     "Frame the request as consistent with the person's past choices or stated values.",
     "依頼を相手の過去の選択や表明した価値観と一貫するものとして提示する．",
     P4gMark::none, "", "", ""},
    {"d-1", "", "Foot in the door", "フット・イン・ザ・ドア",
     "Start with a small, easy request and progressively increase to a larger commitment.",
     "小さく簡単な依頼から始め，段階的に大きなコミットメントへ進める．",
     P4gMark::direct, "", "", ""},
    {"d-2", "", "Door in the face", "ドア・イン・ザ・フェイス",
     "Begin with a large request likely to be refused, then present a more moderate (target) request, making it seem more reasonable.",
     "断られそうな大きな依頼から始め，次に本来の控えめな依頼を示して妥当に見せる．",
     P4gMark::none, "", "", ""},
    {"d-3", "", "Reciprocity", "返報性",
     "Offer something first (e.g., free trial, sample) to invoke a sense of obligation or goodwill.",
     "先に何か（無料体験やサンプルなど）を提供し，義理や好意の感情を引き出す．",
     P4gMark::none, "", "", ""},
    {"d-4", "", "Mutual concession", "相互譲歩",
     "Acknowledge the person's concerns and adapt the proposal. Show willingness to compromise.",
     "相手の懸念を認めて提案を調整し，歩み寄る姿勢を示す．",
     P4gMark::none, "", "", ""},
    {"d-5", "", "Shared Engagement", "共同参加",
     "Reinforce that the persuader also participates, guiding the persuadee to follow suit.",
     "説得者も参加していることを強調し，相手が後に続くよう導く．",
     P4gMark::none, "", "", ""},
    {"e-1", "", "Framing", "フレーミング",
     "Adjust how outcomes are presented (emphasizing benefits vs. avoiding losses).",
     "結果の提示の仕方を調整する（利益の強調か損失の回避か）．",
     P4gMark::none, "", "", ""},
    {"e-2", "", "Contrast effect", "対比効果",
     "Compare options to highlight a more favorable choice or cost-benefit ratio.",
     "選択肢を比較し，より有利な選択や費用対効果を際立たせる．",
     P4gMark::none, "", "", ""},
    {"e-3", "", "Manage cognitive load", "認知負荷の管理",
     "Organize information clearly, use visuals or summaries so it's easier to digest.",
     "情報を明確に整理し，図や要約を用いて理解しやすくする．",
     P4gMark::none, "", "", ""},
    {"e-4", "", "Repetition / summary", "反復・要約",
     "Reiterate the main benefits and key steps to ensure they remain top of mind.",
     "主な利点と重要な手順を繰り返し，記憶に残るようにする．",
     P4gMark::none, "", "", ""},
    {"e-5", "", "Scarcity", "希少性",
     "Emphasize limited availability or time to reduce procrastination.",
     "数量や期間の限定を強調し，先延ばしを減らす．",
     P4gMark::none, "", "", ""},
    {"e-6", "", "Time pressure", "時間的プレッシャー",
     "Set deadlines to encourage quicker decision-making.",
     "期限を設けて素早い意思決定を促す．",
     P4gMark::none, "", "", ""},
    {"f-1", "", "Personal story", "個人的な体験談",
     "Use relatable narratives that resonate with the person's own experiences or emotions.",
     "相手自身の経験や感情に響く，共感しやすい物語を用いる．",
     P4gMark::direct, "", "", ""},
    {"f-2", "", "Personal relevance emphasis", "個人的関連性の強調",
     "Highlight how the action aligns with the individual's personal goals, values, or future plans.",
     "行動が相手の目標や価値観，将来の計画とどう合致するかを強調する．",
     P4gMark::none, "", "", ""},
    {"f-3", "", "Ability support", "能力支援",
     "Provide guidance or tools that boost the person's confidence in taking the action.",
     "行動を起こす自信を高める案内や手段を提供する．",
     P4gMark::none, "", "", ""},
    {"g-1", "", "Feedback and thanks", "フィードバックと感謝",
     "Show appreciation and communicate the impact of the person's contribution or action.",
     "感謝を示し，相手の貢献や行動がもたらした効果を伝える．",
     P4gMark::dialogue_act, "", "", ""},
    {"g-2", "", "Ongoing trust building", "継続的な信頼構築",
     "Offer further guidance, additional resources, or performance updates over time.",
     "継続的に追加の案内や資料，成果の報告を提供する．",
     P4gMark::none, "", "", ""},
    {"g-3", "", "Continuous communication", "継続的なコミュニケーション",
     "Keep contact with newsletters, invitations, or updates to sustain engagement.",
     "ニュースレターや招待，近況報告で連絡を保ち，関与を維持する．",
     P4gMark::none, "", "", ""},
}};

/// P4G strategy set in its conventional order, with the original definitions.
struct P4gRow {
    std::string_view id;
    std::string_view label_en, label_ja;
    std::string_view desc_en, desc_ja;
};

inline constexpr std::array<P4gRow, 10> kP4gSubset = {{
    {"b-1", "Logical appeal", "論理的訴求", "Use of reasoning and evidence to convince others.",
     "推論と根拠を用いて相手を納得させる．"},
    {"b-4", "Emotion appeal", "感情的訴求", "Elicit specific emotions to influence others.",
     "特定の感情を呼び起こして相手に影響を与える．"},
    {"c-1", "Credibility appeal", "信頼性への訴求",
     "Use credentials and cite organizational impacts to establish credibility and earn trust.",
     "実績を示し団体の成果を引用して，信頼性を確立し信用を得る．"},
    {"d-1", "Foot in the door", "フット・イン・ザ・ドア",
     "Start with small donation requests to facilitate compliance, followed by larger requests.",
     "小さな寄付の依頼から始めて応諾を促し，その後により大きな依頼をする．"},
    {"b-6", "Self-modeling", "自己モデリング",
     "The persuader indicates their own intention to donate and acts as a role model.",
     "説得者が自ら寄付の意思を示し，手本となる．"},
    {"f-1", "Personal story", "個人的な体験談",
     "Use narrative exemplars of donation experiences or beneficiaries' positive outcomes.",
     "寄付の体験や受益者の良い結果についての物語を用いる．"},
    {"b-3", "Donation information", "寄付情報",
     "Provide specific information about the donation task, such as the procedure and range.",
     "手続きや金額の範囲など，寄付に関する具体的な情報を提供する．"},
    {"a-1", "Source-related inquiry", "情報源に関する質問",
     "Ask if the persuadee is aware of the organization.", "相手が団体を知っているかを尋ねる．"},
    {"a-2", "Task-related inquiry", "タスクに関する質問",
     "Ask the persuadee's opinion and expectation related to the task.", "寄付に関する相手の意見や期待を尋ねる．"},
    {"a-3", "Personal-related inquiry", "個人に関する質問",
     "Ask about the persuadee's previous personal experiences relevant to charity donation.",
     "寄付に関連する相手の過去の個人的な経験を尋ねる．"},
}};

inline std::vector<StrategyCategory> build_categories(Language lang) {
    std::vector<StrategyCategory> out;
    for (const auto& c : kCategories) {
        out.push_back({c.letter, std::string(lang == Language::en ? c.name_en : c.name_ja),
                       std::string(lang == Language::en ? c.intent_en : c.intent_ja)});
    }
    return out;
}

inline void add_unique(std::vector<std::string>& v, std::string_view s) {
    if (s.empty()) return;
    if (std::find(v.begin(), v.end(), s) == v.end()) v.emplace_back(s);
}

}  // namespace detail

inline StrategyCatalog build_full_catalog(Language lang) {
    const bool en = lang == Language::en;
    std::vector<Strategy> entries;
    entries.reserve(detail::kStrategies.size());
    for (const auto& row : detail::kStrategies) {
        Strategy s;
        s.id = row.id;
        s.label = en ? row.label_en : row.label_ja;
        s.category_letter = row.id[0];
        s.category = en ? detail::kCategories[static_cast<std::size_t>(row.id[0] - 'a')].name_en
                        : detail::kCategories[static_cast<std::size_t>(row.id[0] - 'a')].name_ja;
        s.route = row.route;
        s.description = en ? row.desc_en : row.desc_ja;
        s.p4g_mark = row.mark;
        s.in_p4g_subset = row.mark == P4gMark::direct;
        if (!row.p4g_alias_en.empty()) s.p4g_alias = std::string(en ? row.p4g_alias_en : row.p4g_alias_ja);
        if (!row.soft_alias.empty()) s.soft_alias = std::string(row.soft_alias);
        detail::add_unique(s.alt_labels, en ? row.label_ja : row.label_en);
        detail::add_unique(s.alt_labels, row.p4g_alias_en);
        detail::add_unique(s.alt_labels, row.p4g_alias_ja);
        entries.push_back(std::move(s));
    }
    return {lang, std::move(entries), detail::build_categories(lang), false};
}

/// The ten P4G strategies under their original names and definitions, in the
/// order P4G lists them. Ids still point at the full-catalog entries.
inline StrategyCatalog p4g_subset(const StrategyCatalog& full) {
    if (full.is_p4g_subset()) return full;
    const bool en = full.language() == Language::en;
    std::vector<Strategy> entries;
    for (const auto& row : detail::kP4gSubset) {
        Strategy s = full.lookup(row.id);
        if (!s.in_p4g_subset) throw std::logic_error("catalog entry not flagged for the P4G subset: " + s.id);
        std::string extended = s.label;
        s.label = en ? row.label_en : row.label_ja;
        s.description = en ? row.desc_en : row.desc_ja;
        if (extended != s.label) detail::add_unique(s.alt_labels, extended);
        entries.push_back(std::move(s));
    }
    return {full.language(), std::move(entries), full.categories(), true};
}

inline std::string render_strategy_block(const StrategyCatalog& catalog, bool with_descriptions) {
    std::string out;
    for (const auto& e : catalog.entries()) {
        if (!out.empty()) out += '\n';
        out += e.label;
        if (with_descriptions) {
            out += ": ";
            out += e.description;
        }
    }
    return out;
}

namespace detail {

// Decodes one UTF-8 code point; invalid bytes come back as themselves.
inline char32_t next_code_point(std::string_view s, std::size_t& i) {
    auto b0 = static_cast<unsigned char>(s[i]);
    int len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 1;
    if (i + static_cast<std::size_t>(len) > s.size()) len = 1;
    char32_t cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]) & 0x3F);
    i += static_cast<std::size_t>(len);
    return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

inline bool is_cjk_punct(char32_t cp) {
    switch (cp) {
        case U'・': case U'、': case U'。': case U'「': case U'」': case U'『': case U'』':
        case U'【': case U'】': case U'〈': case U'〉': case U'《': case U'》': case U'“':
        case U'”': case U'‘': case U'’': case U'…': case U'‐': case U'–': case U'—': case U'　':
            return true;
        default:
            return false;
    }
}

/// Folds full-width ASCII, lowercases, turns punctuation into spaces and
/// collapses whitespace. Applied to both catalog names and model output.
inline std::string normalize_strategy_text(std::string_view in) {
    std::string folded;
    for (std::size_t i = 0; i < in.size();) {
        char32_t cp = next_code_point(in, i);
        if (cp >= 0xFF01 && cp <= 0xFF5E) cp -= 0xFEE0;
        if (cp < 0x80) {
            auto c = static_cast<unsigned char>(cp);
            if (std::isalnum(c)) {
                folded += static_cast<char>(std::tolower(c));
            } else if (c != '\'') {
                folded += ' ';
            }
        } else if (is_cjk_punct(cp)) {
            if (cp == U'・') continue;
            folded += ' ';
        } else {
            append_utf8(folded, cp);
        }
    }
    std::string out;
    for (char c : folded) {
        if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
        out += c;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

/// Splits a leading category code ("d-1", "Ｄ－１", "b 4.") off `s`.
inline std::optional<std::string> take_code_prefix(std::string& s) {
    if (s.size() < 2 || s[0] < 'a' || s[0] > 'g') return std::nullopt;
    std::size_t i = 1;
    if (i < s.size() && s[i] == ' ') ++i;
    std::size_t digits = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == digits || (i < s.size() && s[i] != ' ')) return std::nullopt;
    std::string code = std::string(1, s[0]) + "-" + s.substr(digits, i - digits);
    s = i < s.size() ? s.substr(i + 1) : std::string{};
    return code;
}

}  // namespace detail

/// Resolves bracketed strategy text from a model reply to a catalog id.
/// Exact name (label, P4G alias, other-language label) wins; otherwise a
/// substring match is accepted only if it picks out a single entry.
/// nullopt means Unrecognized.
inline std::optional<std::string> match_strategy(const StrategyCatalog& catalog, std::string_view free_text) {
    std::string text = detail::normalize_strategy_text(free_text);
    auto code = detail::take_code_prefix(text);
    if (text.empty()) {
        if (code && catalog.find(*code)) return *code;
        return std::nullopt;
    }

    auto names_of = [](const Strategy& e) {
        std::vector<std::string> names{detail::normalize_strategy_text(e.label)};
        if (e.p4g_alias) names.push_back(detail::normalize_strategy_text(*e.p4g_alias));
        for (const auto& alt : e.alt_labels) names.push_back(detail::normalize_strategy_text(alt));
        return names;
    };

    for (const auto& e : catalog.entries())
        for (const auto& name : names_of(e))
            if (name == text) return e.id;

    std::optional<std::string> hit;
    constexpr std::size_t kMinSubstring = 4;
    for (const auto& e : catalog.entries()) {
        bool matched = false;
        for (const auto& name : names_of(e)) {
            if (name.size() < kMinSubstring || text.size() < kMinSubstring) continue;
            if (name.find(text) != std::string::npos || text.find(name) != std::string::npos) {
                matched = true;
                break;
            }
        }
        if (!matched) continue;
        if (hit) return std::nullopt;
        hit = e.id;
    }
    return hit;
}

}  // namespace persuade
