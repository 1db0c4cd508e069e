#include <fstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "persuade/storage.hpp"

using namespace persuade;

TEST(Envelope, RoundTripThroughFile) {
    auto dir = fixtures::scratch_dir("envelope");
    auto rec = fixtures::make_record("d1", 3, {3, 1}, {std::string("b-4"), std::nullopt});
    {
        JsonlWriter w(dir / "d.jsonl");
        w.write(RecordKind::dialogue, rec);
        w.write(RecordKind::verdict, json{{"x", 1}});
    }
    auto all = read_jsonl(dir / "d.jsonl");
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[0].schema_version, kSchemaVersion);
    EXPECT_EQ(all[0].payload.get<DialogueRecord>(), rec);
    auto only = read_payloads<DialogueRecord>(dir / "d.jsonl", RecordKind::dialogue);
    EXPECT_EQ(only.size(), 1u);
    {
        JsonlWriter w(dir / "d.jsonl", true);
        w.write(RecordKind::dialogue, rec);
    }
    EXPECT_EQ(read_jsonl(dir / "d.jsonl").size(), 3u);
    std::filesystem::remove_all(dir);
}

TEST(Envelope, UnknownFieldsSurviveRewrite) {
    json payload{{"id", "a"}, {"future_field", {1, 2}}};
    auto e = RecordEnvelope::wrap(RecordKind::answer, payload);
    json line = json::parse(e.to_line());
    line["written_by"] = "newer-version";
    auto back = RecordEnvelope::from_line(line.dump());
    EXPECT_EQ(back.extras["written_by"], "newer-version");
    back.rewrite(json{{"id", "b"}});
    EXPECT_EQ(back.payload["future_field"], json({1, 2}));
    EXPECT_EQ(back.payload["id"], "b");
    EXPECT_TRUE(back.hash_ok());
    EXPECT_EQ(json::parse(back.to_line())["written_by"], "newer-version");
}

TEST(Envelope, TamperingIsDetected) {
    auto e = RecordEnvelope::wrap(RecordKind::verdict, json{{"resolved", "tie"}});
    json line = json::parse(e.to_line());
    line["payload"]["resolved"] = "a_wins";
    EXPECT_THROW(RecordEnvelope::from_line(line.dump()), StorageError);
    EXPECT_NO_THROW(RecordEnvelope::from_line(line.dump(), false));
    EXPECT_THROW(RecordEnvelope::from_line("[1,2]"), StorageError);
    EXPECT_THROW(RecordEnvelope::from_line(R"({"kind":"verdict"})"), StorageError);

    auto dir = fixtures::scratch_dir("tamper");
    std::ofstream(dir / "bad.jsonl") << e.to_line() << '\n' << line.dump() << '\n';
    try {
        read_jsonl(dir / "bad.jsonl");
        FAIL();
    } catch (const StorageError& ex) {
        EXPECT_NE(std::string(ex.what()).find(":2:"), std::string::npos);
    }
    EXPECT_THROW(read_jsonl(dir / "missing.jsonl"), StorageError);
    std::filesystem::remove_all(dir);
}

TEST(Config, ParsesAllSections) {
    auto c = parse_config(R"(
seed = 7
language = "ja"
parallelism = 4
[run]
max_turns = 8
repeat_evals = 5
[backend]
kind = "scripted"
script = "s.json"
[models]
persuader = "gpt-x"
judge = "o3-mini"
judge_reasoning_effort = "high"
[temperature]
evaluator = 0.0
[retry]
max_attempts = 3
jitter = false
[intention]
weights = [73, 56, 56, 53, 62]
[pricing."gpt-x"]
input = 0.0025
output = 0.01
)");
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.language, "ja");
    EXPECT_EQ(c.max_turns, 8);
    EXPECT_EQ(c.backend, "scripted:s.json");
    EXPECT_EQ(c.persuader_model, "gpt-x");
    EXPECT_EQ(c.evaluator_temperature, 0.0);
    EXPECT_EQ(c.retry->max_attempts, 3);
    EXPECT_FALSE(c.retry->jitter);
    EXPECT_EQ(c.intention_weights, (std::array<double, 5>{73, 56, 56, 53, 62}));
    EXPECT_DOUBLE_EQ(c.pricing.get("gpt-x").output_per_1k, 0.01);
}

TEST(Config, Errors) {
    try {
        parse_config("seed = \n", "cfg.toml");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    }
    EXPECT_THROW(parse_config("[backend]\nkind = \"scripted\"\n"), ConfigError);
    EXPECT_THROW(parse_config("[intention]\nweights = [1, 2]\n"), ConfigError);
    EXPECT_THROW(parse_config("[pricing.m]\ninput = -1.0\noutput = 1.0\n"), ConfigError);
    EXPECT_THROW(parse_config("[pricing.m]\ninput = 1.0\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/cfg.toml"), ConfigError);
    EXPECT_FALSE(parse_config("").seed.has_value());
}

TEST(RunId, DependsOnInputsOnly) {
    RunManifest m;
    m.seed = 1;
    m.agent_ids = {"simple"};
    m.details = {{"params", {{"n", 300}}}, {"metrics", {{"sr", 0.5}}}};
    m.created_at = "2024-01-01T00:00:00Z";
    auto id = derive_run_id(m);
    EXPECT_EQ(id.size(), 16u);
    auto later = m;
    later.created_at = "2025-01-01T00:00:00Z";
    later.details["metrics"]["sr"] = 0.9;
    EXPECT_EQ(derive_run_id(later), id);
    auto other = m;
    other.seed = 2;
    EXPECT_NE(derive_run_id(other), id);
}

TEST(Timestamp, HonoursSourceDateEpoch) {
    ::setenv("SOURCE_DATE_EPOCH", "0", 1);
    EXPECT_EQ(timestamp_utc(), "1970-01-01T00:00:00Z");
    ::unsetenv("SOURCE_DATE_EPOCH");
    EXPECT_EQ(timestamp_utc().size(), 20u);
}
