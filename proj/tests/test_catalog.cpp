#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "persuade/strategy_catalog.hpp"

using namespace persuade;

namespace {
int count_lines(const std::string& s) {
    std::istringstream in(s);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}
}  // namespace

TEST(Catalog, FullHas31EntriesIn7Categories) {
    for (auto lang : {Language::en, Language::ja}) {
        auto c = build_full_catalog(lang);
        EXPECT_EQ(c.size(), 31u);
        EXPECT_EQ(c.categories().size(), 7u);
        std::map<std::string, int> counts;
        for (const auto& e : c.entries()) {
            std::string key(1, e.category_letter);
            if (e.category_letter == 'b') key += "-" + e.route;
            ++counts[key];
        }
        std::map<std::string, int> expect{{"a", 3}, {"b-central", 3}, {"b-peripheral", 4}, {"c", 4},
                                          {"d", 5}, {"e", 6},         {"f", 3},            {"g", 3}};
        EXPECT_EQ(counts, expect);
    }
}

TEST(Catalog, LookupExamples) {
    auto c = build_full_catalog(Language::en);
    EXPECT_EQ(c.lookup("d-1").label, "Foot in the door");
    EXPECT_EQ(c.lookup("b-6").p4g_alias, "Self-modeling");
    EXPECT_EQ(c.lookup("b-3").p4g_alias, "Donation information");
    EXPECT_EQ(c.lookup("b-2").soft_alias, "Logical appeal");
    EXPECT_THROW(c.lookup("z-9"), std::out_of_range);
    EXPECT_EQ(c.find("z-9"), nullptr);
}

TEST(Catalog, SubsetHasTenP4gStrategies) {
    auto full = build_full_catalog(Language::en);
    auto sub = p4g_subset(full);
    EXPECT_EQ(sub.size(), 10u);
    EXPECT_TRUE(sub.is_p4g_subset());
    EXPECT_TRUE(sub.contains("Donation information"));
    EXPECT_TRUE(sub.contains("Self-modeling"));
    EXPECT_TRUE(sub.contains("Emotion appeal"));
    EXPECT_FALSE(sub.contains("Door in the face"));
    EXPECT_TRUE(full.contains("Door in the face"));
    // g-1 carries the dialogue-act mark and stays out of the subset
    EXPECT_EQ(full.lookup("g-1").p4g_mark, P4gMark::dialogue_act);
    EXPECT_FALSE(full.lookup("g-1").in_p4g_subset);
}

TEST(Catalog, RenderBlock) {
    auto full = build_full_catalog(Language::en);
    auto sub = p4g_subset(full);
    auto labels = render_strategy_block(sub, false);
    EXPECT_EQ(count_lines(labels), 10);
    EXPECT_EQ(labels.substr(0, labels.find('\n')), "Logical appeal");
    auto rich = render_strategy_block(full, true);
    EXPECT_EQ(count_lines(rich), 31);
    EXPECT_EQ(rich, render_strategy_block(full, true));
    for (const auto& e : full.entries()) {
        auto first = rich.find(e.label + ": ");
        ASSERT_NE(first, std::string::npos) << e.label;
        EXPECT_EQ(rich.find("\n" + e.label + ": ", first + 1), std::string::npos) << e.label;
    }
}

TEST(Catalog, DescriptionsFromTheTable) {
    auto full = build_full_catalog(Language::en);
    EXPECT_EQ(full.lookup("a-1").description,
              "Check if the person is aware of the organization or brand. Clarify misconceptions and tailor explanations "
              "based on their familiarity.");
}

TEST(MatchStrategy, Examples) {
    auto full = build_full_catalog(Language::en);
    EXPECT_EQ(match_strategy(full, "D-1 Foot in the door"), "d-1");
    EXPECT_EQ(match_strategy(full, "emotion appeal"), "b-4");
    EXPECT_EQ(match_strategy(full, "Emotional appeal"), "b-4");
    EXPECT_EQ(match_strategy(full, "Hypnosis"), std::nullopt);
    EXPECT_EQ(match_strategy(full, "  foot-in-the-door. "), "d-1");
    EXPECT_EQ(match_strategy(full, "Ｆｏｏｔ ｉｎ ｔｈｅ ｄｏｏｒ"), "d-1");
    EXPECT_EQ(match_strategy(full, "c-2"), "c-2");
    EXPECT_EQ(match_strategy(full, ""), std::nullopt);
}

TEST(MatchStrategy, AmbiguousSubstringIsUnrecognized) {
    auto full = build_full_catalog(Language::en);
    // "appeal" occurs in several labels
    EXPECT_EQ(match_strategy(full, "appeal"), std::nullopt);
    // a unique fragment resolves
    EXPECT_EQ(match_strategy(full, "Door in the face technique"), "d-2");
}

TEST(MatchStrategy, JapaneseLabelsResolve) {
    auto ja = build_full_catalog(Language::ja);
    auto en = build_full_catalog(Language::en);
    for (const auto& e : ja.entries()) {
        EXPECT_EQ(match_strategy(ja, e.label), e.id) << e.label;
        EXPECT_EQ(match_strategy(en, e.label), e.id) << e.label;
    }
}

// Every subset entry maps back to exactly one full-catalog id.
TEST(MatchStrategy, SubsetBijection) {
    for (auto lang : {Language::en, Language::ja}) {
        auto full = build_full_catalog(lang);
        auto sub = p4g_subset(full);
        std::set<std::string> ids;
        for (const auto& e : sub.entries()) {
            auto m = match_strategy(full, e.label);
            ASSERT_TRUE(m.has_value()) << e.label;
            EXPECT_EQ(*m, e.id);
            ids.insert(*m);
            if (e.p4g_alias) EXPECT_EQ(match_strategy(full, *e.p4g_alias), e.id);
        }
        EXPECT_EQ(ids.size(), 10u);
    }
}

TEST(MatchStrategy, EveryLabelMatchesItself) {
    auto full = build_full_catalog(Language::en);
    for (const auto& e : full.entries()) {
        EXPECT_EQ(match_strategy(full, e.label), e.id) << e.label;
        EXPECT_EQ(match_strategy(full, e.id + " " + e.label), e.id) << e.label;
    }
}

TEST(Catalog, JsonExport) {
    auto j = build_full_catalog(Language::en).to_json();
    EXPECT_EQ(j["entries"].size(), 31u);
    EXPECT_EQ(j["entries"][0]["id"], "a-1");
    EXPECT_TRUE(j["entries"][0].contains("in_p4g_subset"));
    EXPECT_EQ(j["categories"].size(), 7u);
}
