#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "persuade/commands.hpp"
#include "persuade/simulate.hpp"

using namespace persuade;
using namespace persuade::cli;

namespace {

json rule(json match, std::vector<std::string> replies, bool cycle = false) {
    return json{{"match", std::move(match)}, {"replies", std::move(replies)}, {"cycle", cycle}};
}

// Four personas at levels 3,4,4,5: two succeed (turns 1 and 2), two run out the cap of 3.
struct SmokeRun {
    std::filesystem::path dir;
    RunP4gOptions opts;

    explicit SmokeRun(const std::string& name) : dir(fixtures::scratch_dir(name)) {
        auto personas = synthesize_personas(4, 1);
        const int levels[] = {3, 4, 4, 5};
        for (int i = 0; i < 4; ++i) personas[static_cast<std::size_t>(i)].initial_intention = IntentionLevel::initial(levels[i]);
        write_text_file(dir / "personas.csv", write_personas_csv(personas));
        json rules = json::array({
            rule({{"role", "persuader"}}, {"Would you donate to Save the Children?"}, true),
            rule({{"role", "persuadee"}}, {"Let me think."}, true),
            rule({{"dialogue", "simple-p0001"}}, {"Donation"}, true),
            rule({{"dialogue", "simple-p0002"}, {"turn", "1"}}, {"Neutral"}, true),
            rule({{"dialogue", "simple-p0002"}}, {"Donation"}, true),
            rule({{"dialogue", "simple-p0003"}, {"turn", "1"}}, {"Neutral"}, true),
            rule({{"dialogue", "simple-p0003"}}, {"Positive Reaction"}, true),
            rule({{"role", "evaluator"}}, {"No Donation"}, true),
        });
        write_text_file(dir / "script.json", json{{"rules", rules}}.dump());
        opts.agents = {"simple"};
        opts.personas = (dir / "personas.csv").string();
        opts.backend = "scripted:" + (dir / "script.json").string();
        opts.max_turns = 3;
        opts.labels_only = true;
        opts.seed = 11;
        opts.out = (dir / "out").string();
    }
    ~SmokeRun() { std::filesystem::remove_all(dir); }
};

class CommandsTest : public ::testing::Test {
protected:
    void SetUp() override { ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1); }
    void TearDown() override { ::unsetenv("SOURCE_DATE_EPOCH"); }
};

}  // namespace

TEST_F(CommandsTest, FourDialogueSmokeRun) {
    SmokeRun s("smoke");
    std::ostringstream out;
    ASSERT_EQ(run_p4g(s.opts, out), kExitOk);
    auto metrics = json::parse(read_text_file(s.dir / "out" / "metrics.json"));
    const auto& m = metrics["agents"]["simple"]["success"];
    EXPECT_EQ(m["sr"], 0.5);
    EXPECT_EQ(m["at"], (1 + 2 + 3 + 3) / 4.0);
    EXPECT_EQ(m["at_sd"], 1.5);
    EXPECT_EQ(m["aii"], ((4 - 2) + (5 - 5)) / 2.0);
    EXPECT_NE(out.str().find("| simple | 4 | 0.500 |"), std::string::npos);
    auto manifest = read_manifest(s.dir / "out").value();
    EXPECT_EQ(manifest.details["initial_level_counts"], json({0, 0, 1, 2, 1}));
    EXPECT_EQ(manifest.created_at, "2023-11-14T22:13:20Z");
    EXPECT_EQ(manifest.run_id.size(), 16u);
}

TEST_F(CommandsTest, AnalyzeRecomputesFromLogs) {
    SmokeRun s("analyze");
    std::ostringstream sink, out;
    ASSERT_EQ(run_p4g(s.opts, sink), kExitOk);
    AnalyzeOptions a;
    a.run = s.opts.out;
    a.metrics = a.shift = true;
    a.format = "csv";
    ASSERT_EQ(analyze(a, out), kExitOk);
    EXPECT_NE(out.str().find("simple,4,0.500,2.25,1.50,1.00"), std::string::npos);
    EXPECT_NE(out.str().find("(rows sum to n)"), std::string::npos);
    EXPECT_NE(out.str().find("column_sum,2,1,0,0,1,4"), std::string::npos);
    AnalyzeOptions bad;
    bad.run = (s.dir / "nope").string();
    std::ostringstream err;
    EXPECT_EQ(guarded([&] { return analyze(bad, out); }, err), kExitUsage);
    EXPECT_NE(err.str().find("run: not found"), std::string::npos);
}

TEST_F(CommandsTest, MissingInputsAreUsageErrors) {
    SmokeRun s("missing");
    auto o = s.opts;
    o.personas = (s.dir / "absent.csv").string();
    std::ostringstream out, err;
    EXPECT_EQ(guarded([&] { return run_p4g(o, out); }, err), kExitUsage);
    auto j = json::parse(err.str());
    EXPECT_EQ(j["error"], "personas: not found");
    EXPECT_EQ(j["exit_code"], 2);
    auto too_many = s.opts;
    too_many.n = 5;
    EXPECT_EQ(guarded([&] { return run_p4g(too_many, out); }, err), kExitUsage);
    auto bad_agent = s.opts;
    bad_agent.agents = {"clever"};
    EXPECT_EQ(guarded([&] { return run_p4g(bad_agent, out); }, err), kExitUsage);
    auto bad_script = s.opts;
    bad_script.backend = "scripted:" + (s.dir / "absent.json").string();
    EXPECT_EQ(guarded([&] { return run_p4g(bad_script, out); }, err), kExitUsage);
    RunDpOptions dp;
    dp.dataset = (s.dir / "absent.json").string();
    dp.agent_a = "simple";
    dp.agent_b = "procot-p4g";
    dp.out = (s.dir / "dp").string();
    EXPECT_EQ(guarded([&] { return run_dp(dp, out); }, err), kExitUsage);
}

TEST_F(CommandsTest, GuardedMapsExceptionTypes) {
    std::ostringstream err;
    EXPECT_EQ(guarded([]() -> int { throw GatewayError(GatewayError::Kind::auth, "no key"); }, err), kExitRuntime);
    EXPECT_NE(err.str().find("AuthError"), std::string::npos);
    EXPECT_EQ(guarded([]() -> int { throw ConfigError("bad"); }, err), kExitUsage);
    EXPECT_EQ(guarded([]() -> int { throw std::runtime_error("boom"); }, err), kExitRuntime);
    EXPECT_EQ(guarded([] { return kExitOk; }, err), kExitOk);
    EXPECT_THROW(parse_weights("1,2,3"), UsageError);
    EXPECT_EQ(parse_weights("73,56,56,53,62"), (std::array<double, 5>{73, 56, 56, 53, 62}));
}

TEST_F(CommandsTest, P4gReplayIsByteIdentical) {
    auto dir = fixtures::scratch_dir("p4g-replay");
    SynthOptions so;
    so.n = 30;
    so.seed = 5;
    so.out = (dir / "personas.csv").string();
    synth_personas(so);
    SynthOptions sc;
    sc.seed = 5;
    sc.personas = so.out;
    sc.agents = {"procot-p4g", "simple"};
    sc.out = (dir / "script.json").string();
    synth_p4g_script(sc);
    auto once = [&](const std::string& name) {
        RunP4gOptions o;
        o.agents = {"procot-p4g", "simple"};
        o.personas = so.out;
        o.seed = 5;
        o.backend = "scripted:" + sc.out;
        o.out = (dir / name).string();
        std::ostringstream sink;
        EXPECT_EQ(run_p4g(o, sink), kExitOk);
        return dir / name;
    };
    auto a = once("a"), b = once("b");
    for (auto f : {"personas.jsonl", "dialogues.jsonl", "manifest.jsonl", "metrics.json", "report.md"})
        EXPECT_EQ(read_text_file(a / f), read_text_file(b / f)) << f;
    std::filesystem::remove_all(dir);
}

TEST_F(CommandsTest, DpReplayIsByteIdentical) {
    auto dir = fixtures::scratch_dir("dp-replay");
    auto data = synthesize_dp_dataset(150, 3);
    write_text_file(dir / "dp.json", json{{"scenarios", data}}.dump());
    auto inst = sample_instances(data, 100, 9);
    write_text_file(dir / "script.json", make_dp_script(inst, outcome_mix(50, 30, 20, 9), 9).dump());
    auto once = [&](const std::string& name) {
        RunDpOptions o;
        o.dataset = (dir / "dp.json").string();
        o.n = 100;
        o.agent_a = "procot-rich-desc";
        o.agent_b = "simple";
        o.seed = 9;
        o.backend = "scripted:" + (dir / "script.json").string();
        o.out = (dir / name).string();
        std::ostringstream sink;
        EXPECT_EQ(run_dp(o, sink), kExitOk);
        return dir / name;
    };
    auto a = once("a"), b = once("b");
    for (auto f : {"instances.jsonl", "judgments.jsonl", "verdicts.jsonl", "manifest.jsonl", "winrate.csv"})
        EXPECT_EQ(read_text_file(a / f), read_text_file(b / f)) << f;
    EXPECT_NE(read_text_file(a / "winrate.csv").find("all,100,50,30,20,50.0,30.0,20.0"), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_F(CommandsTest, AnnotateBuildExportSummary) {
    auto dir = fixtures::scratch_dir("annotate");
    auto ra = dir / "ra", rb = dir / "rb";
    std::filesystem::create_directories(ra);
    std::filesystem::create_directories(rb);
    {
        JsonlWriter wa(ra / "dialogues.jsonl"), wb(rb / "dialogues.jsonl");
        for (int i = 0; i < 3; ++i) {
            auto a = fixtures::make_record("a" + std::to_string(i), 3, {2}, {}, 10, "rich");
            a.persona_id = "p" + std::to_string(i);
            auto b = fixtures::make_record("b" + std::to_string(i), 3, {3}, {}, 10, "simple");
            b.persona_id = a.persona_id;
            wa.write(RecordKind::dialogue, a);
            wb.write(RecordKind::dialogue, b);
        }
    }
    AnnotateBuildOptions o;
    o.run_a = ra.string();
    o.run_b = rb.string();
    o.annotators = "a1,a2";
    o.out = (dir / "tasks").string();
    std::ostringstream out;
    ASSERT_EQ(annotate_build(o, out), kExitOk);
    {
        auto svc = open_service(o.out);
        for (const auto& t : svc.tasks())
            for (auto who : {"a1", "a2"})
                EXPECT_EQ(svc.post_answer(json{{"task_id", t.id}, {"annotator_id", who},
                                               {"choice", t.dialogues[0].agent_id == "rich" ? "left" : "right"}}
                                              .dump())
                              .status,
                          201);
    }
    std::ostringstream csv, summary;
    annotate_export(o.out, std::nullopt, csv);
    const std::string rows = csv.str();
    EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 7);
    annotate_summary(o.out, "rich", summary);
    EXPECT_EQ(json::parse(summary.str())["pairwise"]["win_pct"], 100.0);
    std::filesystem::remove_all(dir);
}
