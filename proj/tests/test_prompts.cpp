#include <sstream>

#include <gtest/gtest.h>

#include "persuade/hashing.hpp"
#include "persuade/prompts.hpp"
#include "persuade/strategy_catalog.hpp"

using namespace persuade;

namespace {

Bindings bind_all(TemplateId id, Language lang, const std::string& value = "X") {
    Bindings b;
    for (const auto& p : placeholders(template_body(id, lang))) b[p] = value;
    return b;
}

Utterance utt(Speaker s, std::string text) { return {s, std::move(text), 1, std::nullopt, std::nullopt, std::nullopt}; }

}  // namespace

TEST(Templates, EveryTemplateRendersWhenFullyBound) {
    for (auto id : kAllTemplates)
        for (auto lang : {Language::en, Language::ja}) {
            auto out = render(id, lang, bind_all(id, lang));
            EXPECT_TRUE(placeholders(out).empty()) << to_string(id);
        }
}

TEST(Templates, MissingBindingNamesThePlaceholder) {
    try {
        render(TemplateId::persuadee_sim, Language::en, {});
        FAIL() << "expected MissingBinding";
    } catch (const MissingBinding& e) {
        EXPECT_FALSE(e.name().empty());
    }
    EXPECT_THROW(parse_template_id("nope"), UnknownTemplate);
    EXPECT_EQ(parse_template_id("judge_dp"), TemplateId::judge_dp);
}

TEST(Templates, ProcotMarkersPresent) {
    auto en = render(TemplateId::procot_p4g, Language::en, bind_all(TemplateId::procot_p4g, Language::en));
    EXPECT_NE(en.find("Therefore, the appropriate dialogue strategy is []"), std::string::npos);
    auto ja = render(TemplateId::procot_p4g, Language::ja, bind_all(TemplateId::procot_p4g, Language::ja));
    EXPECT_NE(ja.find("したがって，適切な対話戦略は［］です"), std::string::npos);
    auto dp = render(TemplateId::procot_dp, Language::en, bind_all(TemplateId::procot_dp, Language::en));
    EXPECT_NE(dp.find("Therefore, the appropriate dialogue strategy is"), std::string::npos);
}

TEST(Templates, PersuadeeCarriesIntentionDescription) {
    auto b = bind_all(TemplateId::persuadee_sim, Language::en);
    b["initial_donation_intention_description"] = std::string(IntentionLevel::initial(5).description());
    auto out = render(TemplateId::persuadee_sim, Language::en, b);
    EXPECT_NE(out.find("explicitly unwilling to donate"), std::string::npos);
    EXPECT_NE(out.find("only one short and succinct sentence"), std::string::npos);
}

TEST(Templates, SimpleDpInstruction) {
    auto out = render(TemplateId::simple_dp, Language::en, bind_all(TemplateId::simple_dp, Language::en));
    EXPECT_NE(out.find("Please reply with only one short and persuasive sentence"), std::string::npos);
}

TEST(Templates, BoundValuesAreNotRescanned) {
    EXPECT_EQ(render_text("a {x} b", {{"x", "{y}"}}), "a {y} b");
    EXPECT_EQ(render_text("{not a placeholder} {X}", {}), "{not a placeholder} {X}");
}

TEST(Templates, HashesCoverBothLanguages) {
    auto h = all_template_hashes();
    EXPECT_EQ(h.size(), 18u);
    EXPECT_EQ(h.at("judge_dp.en"), sha256_hex(templates::kJudge));
    EXPECT_EQ(h.at("procot_rich.en"), h.at("procot_p4g.en"));
}

TEST(History, PrefixRules) {
    EXPECT_EQ(serialize_history({}, DatasetKind::p4g), "");
    EXPECT_EQ(serialize_history({utt(Speaker::persuader, "Hi"), utt(Speaker::persuadee, "Hello")}, DatasetKind::p4g),
              "assistant: Hi\nuser: Hello");
    EXPECT_EQ(serialize_history({utt(Speaker::persuadee, "No thanks")}, DatasetKind::dp), "persuadee: No thanks");
}

TEST(History, LineCountEqualsUtteranceCount) {
    Rng rng(4, "history");
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Utterance> h;
        int n = rng.uniform_int(1, 12);
        for (int i = 0; i < n; ++i) {
            std::string text = "line" + std::to_string(i);
            if (rng.coin()) text += "\nwith break";
            h.push_back(utt(i % 2 ? Speaker::persuadee : Speaker::persuader, text));
        }
        auto s = serialize_history(h, trial % 2 ? DatasetKind::p4g : DatasetKind::dp);
        EXPECT_EQ(std::count(s.begin(), s.end(), '\n') + 1, n);
    }
}

TEST(ProcotParse, EnglishExample) {
    auto p = parse_procot_output(
        "The persuadee is curious. Therefore, the appropriate dialogue strategy is [Foot in the door]. Based on the "
        "selected dialogue strategy, the response is: Would you give $1?",
        Language::en);
    auto* r = std::get_if<ProcotReply>(&p);
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(r->analysis, "The persuadee is curious.");
    EXPECT_EQ(r->strategy_text, "Foot in the door");
    EXPECT_EQ(r->utterance, "Would you give $1?");
    EXPECT_FALSE(r->degraded);
}

TEST(ProcotParse, JapaneseWideBrackets) {
    auto p = parse_procot_output("相手は迷っている．したがって，適切な対話戦略は［感情的訴求］です．選択された対話戦略に基づく応答は：「子どもたちの笑顔を想像してください。」",
                                 Language::ja);
    auto* r = std::get_if<ProcotReply>(&p);
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(r->strategy_text, "感情的訴求");
    EXPECT_EQ(r->utterance, "子どもたちの笑顔を想像してください。");
    EXPECT_EQ(r->analysis, "相手は迷っている．");
}

TEST(ProcotParse, MissingResponseMarkerIsDegraded) {
    auto p = parse_procot_output("Therefore, the appropriate dialogue strategy is [Emotion appeal]. Think of the kids.",
                                 Language::en);
    auto* r = std::get_if<ProcotReply>(&p);
    ASSERT_NE(r, nullptr);
    EXPECT_TRUE(r->degraded);
    EXPECT_EQ(r->strategy_text, "Emotion appeal");
    EXPECT_EQ(r->utterance, "Think of the kids.");
}

TEST(ProcotParse, NoMarkerFallsBackToWhole) {
    for (std::string raw : {"Please donate today.", "", "strategy [x] response", "I think therefore I am."}) {
        auto p = parse_procot_output(raw, Language::en);
        ASSERT_TRUE(std::holds_alternative<FallbackWhole>(p)) << raw;
        EXPECT_EQ(utterance_of(p), raw);
        EXPECT_TRUE(std::holds_alternative<FallbackWhole>(parse_procot_output(raw, Language::ja)));
    }
}

TEST(ProcotParse, CrossLanguageMarkersAccepted) {
    auto raw = compose_procot_reply("分析", "Logical appeal", "Facts matter.", Language::en, true);
    auto p = parse_procot_output(raw, Language::ja);
    auto* r = std::get_if<ProcotReply>(&p);
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(r->strategy_text, "Logical appeal");
    EXPECT_EQ(r->utterance, "Facts matter.");
}

// Random (strategy, utterance) pairs survive compose then parse in both languages and bracket styles.
TEST(ProcotParse, RoundTripProperty) {
    const auto en = build_full_catalog(Language::en);
    const auto ja = build_full_catalog(Language::ja);
    static const std::vector<std::string> kWords = {"please", "help",  "children", "$2",  "today", "寄付",
                                                    "笑顔",   "your",  "gift",     "100", "—",     "なぜ",
                                                    "would",  "you",   "consider", "it?", "「a」", "!"};
    Rng rng(2024, "procot-roundtrip");
    for (int i = 0; i < 1000; ++i) {
        std::string u;
        int n = rng.uniform_int(1, 12);
        for (int w = 0; w < n; ++w) u += (w ? " " : "") + kWords[rng.uniform_index(kWords.size())];
        for (auto lang : {Language::en, Language::ja}) {
            const auto& cat = lang == Language::en ? en : ja;
            std::string s = cat.entries()[rng.uniform_index(cat.size())].label;
            for (bool wide : {false, true}) {
                auto raw = compose_procot_reply("Context analysis " + std::to_string(i) + ".", s, u, lang, wide);
                auto p = parse_procot_output(raw, lang);
                auto* r = std::get_if<ProcotReply>(&p);
                ASSERT_NE(r, nullptr) << raw;
                ASSERT_EQ(r->strategy_text, s) << raw;
                ASSERT_EQ(r->utterance, u) << raw;
                ASSERT_FALSE(r->degraded);
            }
        }
    }
}
