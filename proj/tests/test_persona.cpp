#include <gtest/gtest.h>

#include "persuade/gateway.hpp"
#include "persuade/persona.hpp"

using namespace persuade;

namespace {

std::map<std::string, double> big5(double o, double c, double e, double a, double n) {
    return {{"Openness", o}, {"Conscientiousness", c}, {"Extraversion", e}, {"Agreeableness", a}, {"Neuroticism", n}};
}

const char* kHeader =
    "age,sex,marital,education,income,religion,ideology,openness,conscientiousness,extraversion,agreeableness,"
    "neuroticism,rational,intuitive";

}  // namespace

TEST(SelectLabels, Examples) {
    EXPECT_EQ(select_labels(big5(0.4, 0.1, 0.2, 0.2, 0.1)), (std::vector<std::string>{"Openness"}));
    EXPECT_EQ(select_labels(big5(0.3, 0.3, 0.2, 0.1, 0.1)), (std::vector<std::string>{"Openness", "Conscientiousness"}));
    EXPECT_EQ(select_labels(big5(0.2, 0.2, 0.2, 0.2, 0.2)), (std::vector<std::string>{"Balanced"}));
    EXPECT_EQ(select_labels({{"Rational", 0.5}, {"Intuitive", 0.5}}), (std::vector<std::string>{"Balanced"}));
    EXPECT_EQ(select_labels({{"Rational", 0.7}, {"Intuitive", 0.3}}), (std::vector<std::string>{"Rational"}));
    EXPECT_THROW(select_labels({}), std::invalid_argument);
}

// Labels are invariant under positive scaling and never depend on insertion order.
TEST(SelectLabels, ScalingInvariance) {
    Rng rng(8, "labels");
    for (int i = 0; i < 500; ++i) {
        std::array<int, 5> v{};
        for (auto& x : v) x = rng.uniform_int(0, 5);
        if (std::all_of(v.begin(), v.end(), [](int x) { return x == 0; })) v[0] = 1;
        auto m = big5(v[0], v[1], v[2], v[3], v[4]);
        auto base = select_labels(m);
        double k = 0.01 + rng.uniform_real() * 100;
        auto scaled = m;
        for (auto& [_, x] : scaled) x *= k;
        EXPECT_EQ(select_labels(scaled), base);
        int mx = *std::max_element(v.begin(), v.end());
        auto ties = std::count(v.begin(), v.end(), mx);
        if (ties == 5) EXPECT_EQ(base, (std::vector<std::string>{"Balanced"}));
        else EXPECT_EQ(static_cast<long>(base.size()), ties);
        for (const auto& l : base) EXPECT_EQ(m.at(l), mx);
    }
}

TEST(PersonaCsv, ParsesAndDerivesLabels) {
    std::string csv = std::string(kHeader) + ",initial_intention\n" +
                      "34,Female,Married,\"Bachelor's degree\",\"$50,000 to $74,999\",Catholic,Moderate,0.3,0.3,0.2,0.1,0.1,0.7,0.3,2\n";
    auto ps = read_personas_csv(csv);
    ASSERT_EQ(ps.size(), 1u);
    EXPECT_EQ(ps[0].id, "p0001");
    EXPECT_EQ(ps[0].attributes.income, "$50,000 to $74,999");
    EXPECT_EQ(ps[0].trait_labels, (std::vector<std::string>{"Openness", "Conscientiousness"}));
    EXPECT_EQ(ps[0].style_labels, (std::vector<std::string>{"Rational"}));
    EXPECT_EQ(ps[0].initial_intention, IntentionLevel::initial(2));
}

TEST(PersonaCsv, ErrorsCarryLineNumbers) {
    std::string ok_row = "34,F,S,HS,low,None,Liberal,0.2,0.2,0.2,0.2,0.2,0.5,0.5\n";
    try {
        read_personas_csv(std::string(kHeader) + "\n" + ok_row + "34,F,S,HS,low,None,Liberal,0.5,0.2,0.2,0.2,0.2,0.5,0.5\n");
        FAIL();
    } catch (const PersonaCsvError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("sum"), std::string::npos);
    }
    try {
        read_personas_csv(std::string(kHeader) + "\n34,F,S,HS,low,None,Liberal,abc,0.2,0.2,0.2,0.2,0.5,0.5\n");
        FAIL();
    } catch (const PersonaCsvError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(read_personas_csv("age,sex\n1,2\n"), PersonaCsvError);
    EXPECT_THROW(read_personas_csv(""), PersonaCsvError);
    EXPECT_THROW(read_personas_csv(std::string(kHeader) + "\n1,2\n"), PersonaCsvError);
    EXPECT_THROW(read_personas_csv(std::string(kHeader) + "\n\"open"), PersonaCsvError);
}

TEST(PersonaCsv, WriteReadRoundTrip) {
    auto ps = synthesize_personas(50, 3);
    for (std::size_t i = 0; i < ps.size(); ++i) ps[i].initial_intention = IntentionLevel::initial(1 + static_cast<int>(i % 5));
    ps[0].description = "Line one, with \"quotes\"\nand a second line.";
    EXPECT_EQ(read_personas_csv(write_personas_csv(ps)), ps);
}

TEST(InitialIntentions, ExactCountsFromWeights) {
    auto levels = assign_initial_intentions(300, {73, 56, 56, 53, 62}, 1);
    EXPECT_EQ(level_counts(levels), (std::array<int, 5>{73, 56, 56, 53, 62}));
    auto scaled = assign_initial_intentions(300, {0.2433, 0.1867, 0.1867, 0.1767, 0.2067}, 1);
    EXPECT_EQ(level_counts(scaled), (std::array<int, 5>{73, 56, 56, 53, 62}));
}

TEST(InitialIntentions, DeterministicAndPointMass) {
    EXPECT_EQ(assign_initial_intentions(100, {1, 1, 1, 1, 1}, 9), assign_initial_intentions(100, {1, 1, 1, 1, 1}, 9));
    EXPECT_NE(assign_initial_intentions(100, {1, 1, 1, 1, 1}, 9), assign_initial_intentions(100, {1, 1, 1, 1, 1}, 10));
    auto all4 = assign_initial_intentions(17, {0, 0, 0, 1, 0}, 2);
    EXPECT_EQ(level_counts(all4), (std::array<int, 5>{0, 0, 0, 17, 0}));
    EXPECT_THROW(assign_initial_intentions(3, {0, 0, 0, 0, 0}, 1), std::invalid_argument);
    EXPECT_THROW(assign_initial_intentions(3, {1, -1, 0, 0, 0}, 1), std::invalid_argument);
}

// Counts always sum to n and stay within one of the exact quota.
TEST(InitialIntentions, ApportionmentProperty) {
    Rng rng(77, "apportion");
    for (int i = 0; i < 300; ++i) {
        std::array<double, 5> w{};
        for (auto& x : w) x = rng.coin(0.2) ? 0.0 : rng.uniform_real() * 10;
        if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0; })) w[2] = 1;
        auto n = static_cast<std::size_t>(rng.uniform_int(0, 500));
        auto c = level_counts(assign_initial_intentions(n, w, 5));
        double total = w[0] + w[1] + w[2] + w[3] + w[4];
        int sum = 0;
        for (std::size_t k = 0; k < 5; ++k) {
            double quota = static_cast<double>(n) * w[k] / total;
            EXPECT_LT(std::abs(c[k] - quota), 1.0 + 1e-9);
            if (w[k] == 0) EXPECT_EQ(c[k], 0);
            sum += c[k];
        }
        EXPECT_EQ(sum, static_cast<int>(n));
    }
}

TEST(Description, PromptCarriesLabelsAndReplyIsVerbatim) {
    Persona p = synthesize_personas(1, 1)[0];
    p.trait_labels = {"Openness"};
    std::string seen;
    CallbackBackend b([&](const ChatRequest& r) {
        seen = r.messages.at(0).text;
        EXPECT_EQ(r.tags.at("role"), "persona");
        ChatResponse resp;
        resp.text = "  A retired teacher.\n";
        resp.usage = {10, 5, 1, false};
        return resp;
    });
    TokenUsage usage;
    auto d = generate_description(p, b, {}, &usage, [](double) {});
    EXPECT_EQ(d, "  A retired teacher.\n");
    EXPECT_NE(seen.find("Big-Five Personality: Openness"), std::string::npos);
    EXPECT_EQ(usage.output_tokens, 5u);
    DescriptionOptions lo;
    lo.labels_only = true;
    EXPECT_EQ(generate_description(p, b, lo), "");
}

TEST(Synthesize, SharesSumToOne) {
    for (const auto& p : synthesize_personas(200, 4)) {
        double s = 0;
        for (auto& [_, v] : p.attributes.big_five) s += v;
        EXPECT_NEAR(s, 1.0, 1e-9);
        EXPECT_FALSE(p.trait_labels.empty());
    }
    EXPECT_EQ(synthesize_personas(20, 4), synthesize_personas(20, 4));
}
