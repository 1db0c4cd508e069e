#pragma once

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "analytics.hpp"
#include "annotation.hpp"
#include "dialogue.hpp"
#include "http_backend.hpp"
#include "pairwise.hpp"
#include "persona.hpp"
#include "report.hpp"
#include "simulate.hpp"
#include "storage.hpp"

namespace persuade::cli {

namespace fs = std::filesystem;

/// Bad arguments or missing inputs; exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs `body`, mapping exceptions to exit codes and a JSON error line on `err`.
template <typename F>
int guarded(F&& body, std::ostream& err) {
    auto report = [&](std::string_view type, const std::string& msg, int code) {
        err << json{{"error", msg}, {"type", type}, {"exit_code", code}}.dump() << '\n';
        return code;
    };
    try {
        return body();
    } catch (const UsageError& e) {
        return report("usage", e.what(), kExitUsage);
    } catch (const ConfigError& e) {
        return report("config", e.what(), kExitUsage);
    } catch (const PersonaCsvError& e) {
        return report("personas", e.what(), kExitUsage);
    } catch (const DatasetError& e) {
        return report("dataset", e.what(), kExitUsage);
    } catch (const MisalignedRuns& e) {
        return report("MisalignedRuns", e.what(), kExitRuntime);
    } catch (const InsufficientScenarios& e) {
        return report("InsufficientScenarios", e.what(), kExitRuntime);
    } catch (const GatewayError& e) {
        return report(e.kind_name(), e.what(), kExitRuntime);
    } catch (const std::exception& e) {
        return report("runtime", e.what(), kExitRuntime);
    }
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        auto t = detail::trim_view(cur);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

inline std::array<double, 5> parse_weights(const std::string& s) {
    auto parts = split_list(s);
    if (parts.size() != 5) throw UsageError("intention weights need 5 comma-separated numbers");
    std::array<double, 5> w{};
    for (std::size_t i = 0; i < 5; ++i) {
        try {
            w[i] = std::stod(parts[i]);
        } catch (const std::exception&) {
            throw UsageError("intention weight is not a number: " + parts[i]);
        }
    }
    return w;
}

inline Language language_arg(const std::string& s) {
    try {
        return parse_language(s);
    } catch (const std::exception&) {
        throw UsageError("--lang must be ja or en, got '" + s + "'");
    }
}

/// "live" or "scripted:<file>".
inline std::unique_ptr<ChatBackend> make_backend(const std::string& spec, const std::string& base_url = {}) {
    if (spec == "live") return std::make_unique<HttpChatBackend>(HttpChatBackend::from_env(base_url));
    if (spec.rfind("scripted:", 0) == 0) {
        std::string path = spec.substr(9);
        if (!fs::exists(path)) throw UsageError("script: not found: " + path);
        return std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(path));
    }
    throw UsageError("--backend must be live or scripted:<file>, got '" + spec + "'");
}

inline std::string backend_label(const std::string& spec) {
    return spec.rfind("scripted:", 0) == 0 ? "scripted:" + fs::path(spec.substr(9)).filename().string() : spec;
}

inline HarnessConfig config_arg(const std::optional<std::string>& path) {
    if (!path) return {};
    return load_config(*path);
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// run-p4g

struct RunP4gOptions {
    std::vector<std::string> agents;
    std::string personas;
    std::optional<std::size_t> n;
    std::optional<std::string> lang;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
    std::optional<int> max_turns;
    std::optional<int> repeat_evals;
    std::optional<int> parallelism;
    std::optional<std::string> model;
    std::optional<std::string> intention_weights;
    std::optional<std::string> config;
    bool labels_only = false;
    std::string out;
};

struct P4gReport {
    std::map<std::string, SuccessMetrics> metrics;
    std::map<std::string, ShiftMatrix> shift;
    std::map<std::string, StrategyUsage> usage;
    std::vector<CostLatencyRow> cost;
    json to_json() const {
        json j = json::object();
        for (const auto& [agent, m] : metrics) {
            j[agent] = {{"success", m},
                        {"shift", shift.at(agent)},
                        {"strategy_usage",
                         {{"counts", usage.at(agent).counts},
                          {"total", usage.at(agent).total},
                          {"entropy_used", usage.at(agent).entropy_used},
                          {"entropy_all", usage.at(agent).entropy_all}}}};
        }
        json cost_rows = json::array();
        for (const auto& r : cost) {
            cost_rows.push_back({{"agent", r.agent},
                                 {"model", r.model},
                                 {"persuader_turns", r.persuader_turns},
                                 {"input_tokens_per_turn", r.input_tokens_per_turn},
                                 {"output_tokens_per_turn", r.output_tokens_per_turn},
                                 {"seconds_per_turn", r.seconds_per_turn},
                                 {"cost_per_turn", r.cost_per_turn ? json(*r.cost_per_turn) : json(nullptr)},
                                 {"usage", r.all_usage}});
        }
        return json{{"agents", j}, {"cost", cost_rows}};
    }
};

inline std::map<std::string, std::vector<DialogueRecord>> by_agent(const std::vector<DialogueRecord>& records) {
    std::map<std::string, std::vector<DialogueRecord>> out;
    for (const auto& r : records) out[r.agent_config_id].push_back(r);
    return out;
}

/// Pure view over dialogue records; reports are recomputable from the log.
inline P4gReport summarize_p4g(const std::vector<DialogueRecord>& records, Language lang,
                               const PricingTable* pricing = nullptr) {
    P4gReport rep;
    const auto catalog = build_full_catalog(lang);
    for (const auto& [agent, recs] : by_agent(records)) {
        try {
            rep.metrics[agent] = compute_success_metrics(recs);
        } catch (const EmptyInput&) {
            SuccessMetrics empty;
            empty.n_aborted = static_cast<int>(recs.size());
            rep.metrics[agent] = empty;
        }
        rep.shift[agent] = shift_matrix(recs);
        rep.usage[agent] = strategy_usage(recs, catalog);
    }
    try {
        rep.cost = cost_latency_summary(records, pricing);
    } catch (const GatewayError&) {
        rep.cost = cost_latency_summary(records, nullptr);
    }
    return rep;
}

inline std::string p4g_markdown(const P4gReport& rep, Language lang) {
    const auto catalog = build_full_catalog(lang);
    std::ostringstream md;
    md << "# Persuasion run report\n\n## Success metrics\n\n" << success_table(rep.metrics, TableFormat::md);
    for (const auto& [agent, m] : rep.shift)
        md << "\n## Intention shift: " << agent << "\n\n" << shift_table(m, TableFormat::md);
    for (const auto& [agent, u] : rep.usage) {
        if (u.total == 0) continue;
        md << "\n## Strategy usage: " << agent << "\n\n" << usage_table(u, catalog, TableFormat::md);
    }
    md << "\n## Persuader cost and latency\n\n" << cost_table(rep.cost, TableFormat::md);
    return md.str();
}

inline bool csv_has_column(std::string_view text, std::string_view column) {
    auto rows = parse_csv(text);
    if (rows.empty()) return false;
    for (auto name : rows[0].second)
        if (detail::trim_view(detail::ascii_lower(name)) == column) return true;
    return false;
}

inline int run_p4g(const RunP4gOptions& o, std::ostream& out = std::cout) {
    HarnessConfig cfg = config_arg(o.config);
    if (o.agents.empty()) throw UsageError("--agent is required");
    if (o.out.empty()) throw UsageError("--out is required");
    const Language lang = language_arg(o.lang.value_or(cfg.language.value_or("en")));
    const std::uint64_t seed = o.seed.value_or(cfg.seed.value_or(0));
    const std::string backend_spec = o.backend.value_or(cfg.backend.value_or("live"));
    const int parallelism = o.parallelism.value_or(cfg.parallelism.value_or(1));
    if (parallelism < 1) throw UsageError("--parallelism must be >= 1");

    EngineConfig engine;
    engine.language = lang;
    engine.max_turns = o.max_turns.value_or(cfg.max_turns.value_or(10));
    engine.repeat_evals = o.repeat_evals.value_or(cfg.repeat_evals.value_or(10));
    if (engine.max_turns < 1 || engine.repeat_evals < 1) throw UsageError("--max-turns and --repeat-evals must be >= 1");
    if (cfg.persuadee_model) engine.persuadee_model = *cfg.persuadee_model;
    if (cfg.evaluator_model) engine.evaluator_model = *cfg.evaluator_model;
    if (cfg.persuadee_temperature) engine.persuadee_temperature = cfg.persuadee_temperature;
    if (cfg.evaluator_temperature) engine.evaluator_temperature = cfg.evaluator_temperature;
    if (cfg.retry) engine.retry = *cfg.retry;

    std::vector<AgentConfig> agents;
    const std::string agent_model = o.model.value_or(cfg.persuader_model.value_or("gpt-4o-2024-11-20"));
    for (const auto& name : o.agents) {
        try {
            auto a = AgentConfig::preset(name, lang, agent_model);
            a.temperature = cfg.persuader_temperature;
            agents.push_back(std::move(a));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }

    if (!fs::exists(o.personas)) throw UsageError("personas: not found");
    const std::string csv_text = read_text_file(o.personas);
    auto personas = read_personas_csv(csv_text);
    if (o.n) {
        if (*o.n > personas.size())
            throw UsageError("--n " + std::to_string(*o.n) + " exceeds the " + std::to_string(personas.size()) +
                             " personas available");
        personas.resize(*o.n);
    }
    std::optional<std::array<double, 5>> weights = cfg.intention_weights;
    if (o.intention_weights) weights = parse_weights(*o.intention_weights);
    if (!weights && !csv_has_column(csv_text, "initial_intention")) weights = std::array<double, 5>{1, 1, 1, 1, 1};
    if (weights) {
        auto levels = assign_initial_intentions(personas.size(), *weights, seed);
        for (std::size_t i = 0; i < personas.size(); ++i) personas[i].initial_intention = levels[i];
    }

    auto backend = make_backend(backend_spec, cfg.base_url.value_or(""));
    engine.sleep = backend->virtual_time() ? Sleeper([](double) {}) : real_sleeper();

    const fs::path dir(o.out);
    ensure_dir(dir);

    TokenUsage persona_usage;
    DescriptionOptions dopts;
    dopts.labels_only = o.labels_only;
    dopts.retry = engine.retry;
    if (cfg.persuadee_model) dopts.model = *cfg.persuadee_model;
    for (auto& p : personas)
        if (p.description.empty()) p.description = generate_description(p, *backend, dopts, &persona_usage, engine.sleep);
    {
        JsonlWriter pw(dir / "personas.jsonl");
        for (const auto& p : personas) pw.write(RecordKind::persona, p);
    }

    std::vector<DialogueRecord> records;
    {
        JsonlWriter dw(dir / "dialogues.jsonl");
        records = run_batch(agents, personas, *backend, engine, parallelism,
                            [&](const DialogueRecord& r) { dw.write(RecordKind::dialogue, r); });
    }

    const P4gReport rep = summarize_p4g(records, lang, cfg.pricing.prices().empty() ? nullptr : &cfg.pricing);

    RunManifest m;
    m.experiment_kind = ExperimentKind::p4g_style;
    m.language = lang;
    m.seed = seed;
    const std::string blabel = backend_label(backend_spec);
    for (const auto& a : agents) {
        m.agent_ids.push_back(a.id);
        m.backends.push_back({"persuader:" + a.id, blabel, a.model, a.temperature});
    }
    m.backends.push_back({"persuadee", blabel, engine.persuadee_model, engine.persuadee_temperature});
    m.backends.push_back({"evaluator", blabel, engine.evaluator_model, engine.evaluator_temperature});
    m.dataset_fingerprints["personas"] = sha256_hex(csv_text);
    m.template_hashes = all_template_hashes();
    m.created_at = timestamp_utc();
    std::vector<IntentionLevel> initial;
    for (const auto& p : personas) initial.push_back(p.initial_intention);
    json aborted = json::array();
    for (const auto& r : records)
        if (r.aborted) aborted.push_back({{"id", r.id}, {"error", r.error}});
    json agent_json = json::array();
    for (const auto& a : agents) agent_json.push_back(a);
    m.details = {{"params",
                  {{"n", personas.size()},
                   {"max_turns", engine.max_turns},
                   {"repeat_evals", engine.repeat_evals},
                   {"labels_only", o.labels_only},
                   {"intention_weights", weights ? json(*weights) : json(nullptr)},
                   {"agents", agent_json}}},
                 {"parallelism", parallelism},
                 {"initial_level_counts", level_counts(initial)},
                 {"aborted", aborted},
                 {"persona_usage", persona_usage},
                 {"metrics", rep.to_json()}};
    m.run_id = derive_run_id(m);
    JsonlWriter(dir / "manifest.jsonl").write(RecordKind::manifest, m);

    write_text_file(dir / "metrics.json", rep.to_json().dump(2) + "\n");
    write_text_file(dir / "report.md", p4g_markdown(rep, lang));
    out << success_table(rep.metrics, TableFormat::md);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// run-dp

struct RunDpOptions {
    std::string dataset;
    std::optional<std::size_t> n;
    std::string agent_a;
    std::string agent_b;
    std::optional<std::string> judge;
    std::optional<std::string> judge_effort;
    std::optional<std::string> lang;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
    std::optional<std::string> judge_backend;
    std::optional<int> parallelism;
    std::optional<std::string> model;
    std::optional<std::string> config;
    bool fixed_order = false;
    std::string out;
};

inline std::string dp_markdown(const std::vector<Verdict>& verdicts, const std::string& a, const std::string& b) {
    std::ostringstream md;
    md << "# Pairwise run report\n\nAgent A: " << a << "\nAgent B: " << b << "\n\n## Overall (A's view)\n\n"
       << winrate_table(aggregate(verdicts, GroupBy::none), TableFormat::md) << "\n## By domain\n\n"
       << winrate_table(aggregate(verdicts, GroupBy::domain), TableFormat::md, "domain") << "\n## By history turns\n\n"
       << winrate_table(aggregate(verdicts, GroupBy::history_turns), TableFormat::md, "turns");
    return md.str();
}

inline int run_dp(const RunDpOptions& o, std::ostream& out = std::cout) {
    HarnessConfig cfg = config_arg(o.config);
    if (o.agent_a.empty() || o.agent_b.empty()) throw UsageError("--agent-a and --agent-b are required");
    if (o.out.empty()) throw UsageError("--out is required");
    const Language lang = language_arg(o.lang.value_or(cfg.language.value_or("en")));
    const std::uint64_t seed = o.seed.value_or(cfg.seed.value_or(0));
    const std::string backend_spec = o.backend.value_or(cfg.backend.value_or("live"));
    const std::string judge_spec = o.judge_backend.value_or(cfg.judge_backend.value_or(backend_spec));
    const int parallelism = o.parallelism.value_or(cfg.parallelism.value_or(1));
    if (parallelism < 1) throw UsageError("--parallelism must be >= 1");

    const std::string model = o.model.value_or(cfg.persuader_model.value_or("gpt-4o-2024-11-20"));
    AgentConfig a, b;
    try {
        a = AgentConfig::preset(o.agent_a, lang, model);
        b = AgentConfig::preset(o.agent_b, lang, model);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (a.id == b.id) throw UsageError("--agent-a and --agent-b must differ");
    a.temperature = b.temperature = cfg.persuader_temperature;

    if (!fs::exists(o.dataset)) throw UsageError("dataset: not found");
    const std::string dataset_text = read_text_file(o.dataset);
    json dj = json::parse(dataset_text, nullptr, false);
    if (dj.is_discarded()) throw DatasetError("dataset is not valid JSON");
    const auto dataset = parse_dp_dataset(dj);
    const std::size_t n = o.n.value_or(1000);

    PairwiseConfig pc;
    pc.judge_model = o.judge.value_or(cfg.judge_model.value_or(pc.judge_model));
    if (o.judge_effort) pc.judge_reasoning_effort = *o.judge_effort;
    else if (cfg.judge_reasoning_effort) pc.judge_reasoning_effort = *cfg.judge_reasoning_effort;
    if (pc.judge_reasoning_effort && pc.judge_reasoning_effort->empty()) pc.judge_reasoning_effort.reset();
    pc.judge_temperature = cfg.judge_temperature;
    if (cfg.retry) pc.retry = *cfg.retry;

    auto instances = sample_instances(dataset, n, seed, !o.fixed_order);
    auto agent_backend = make_backend(backend_spec, cfg.base_url.value_or(""));
    std::unique_ptr<ChatBackend> judge_owned;
    ChatBackend* judge_backend = agent_backend.get();
    if (judge_spec != backend_spec) {
        judge_owned = make_backend(judge_spec, cfg.base_url.value_or(""));
        judge_backend = judge_owned.get();
    }
    const bool virtual_clock = agent_backend->virtual_time() && judge_backend->virtual_time();
    pc.sleep = virtual_clock ? Sleeper([](double) {}) : real_sleeper();

    const fs::path dir(o.out);
    ensure_dir(dir);
    auto run = run_pairwise(dataset, std::move(instances), a, b, *agent_backend, *judge_backend, pc, parallelism);

    {
        JsonlWriter iw(dir / "instances.jsonl");
        for (const auto& i : run.instances) iw.write(RecordKind::instance, i);
        JsonlWriter jw(dir / "judgments.jsonl");
        for (const auto& j : run.judgments) jw.write(RecordKind::judgment, j);
        JsonlWriter vw(dir / "verdicts.jsonl");
        for (const auto& v : run.verdicts) vw.write(RecordKind::verdict, v);
    }

    auto overall = aggregate(run.verdicts, GroupBy::none);
    RunManifest m;
    m.experiment_kind = ExperimentKind::pairwise_dp;
    m.language = lang;
    m.seed = seed;
    m.agent_ids = {a.id, b.id};
    m.backends = {{"persuader:" + a.id, backend_label(backend_spec), a.model, a.temperature},
                  {"persuader:" + b.id, backend_label(backend_spec), b.model, b.temperature},
                  {"judge", backend_label(judge_spec), pc.judge_model, pc.judge_temperature}};
    m.dataset_fingerprints["dataset"] = sha256_hex(dataset_text);
    m.template_hashes = all_template_hashes();
    m.created_at = timestamp_utc();
    m.details = {{"params",
                  {{"n", n},
                   {"agent_a", a},
                   {"agent_b", b},
                   {"judge_reasoning_effort", pc.judge_reasoning_effort ? json(*pc.judge_reasoning_effort) : json(nullptr)},
                   {"randomize_first_order", !o.fixed_order}}},
                 {"parallelism", parallelism},
                 {"aborted", run.aborted},
                 {"agent_usage", run.agent_usage},
                 {"judge_usage", run.judge_usage},
                 {"overall", overall.empty() ? json(nullptr)
                                             : json{{"n", overall[0].n},
                                                    {"win_pct", overall[0].win_pct},
                                                    {"tie_pct", overall[0].tie_pct},
                                                    {"lose_pct", overall[0].lose_pct}}}};
    m.run_id = derive_run_id(m);
    JsonlWriter(dir / "manifest.jsonl").write(RecordKind::manifest, m);

    write_text_file(dir / "report.md", dp_markdown(run.verdicts, a.id, b.id));
    write_text_file(dir / "winrate.csv", winrate_table(overall, TableFormat::csv));
    write_text_file(dir / "winrate_by_domain.csv",
                    winrate_table(aggregate(run.verdicts, GroupBy::domain), TableFormat::csv, "domain"));
    write_text_file(dir / "winrate_by_turns.csv",
                    winrate_table(aggregate(run.verdicts, GroupBy::history_turns), TableFormat::csv, "turns"));
    out << winrate_table(overall, TableFormat::md);
    return run.aborted.empty() ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
    std::string run;
    bool metrics = false;
    bool heatmap = false;
    int min_uses = 40;
    bool entropy = false;
    bool shift = false;
    bool cost = false;
    bool winrate = false;
    std::optional<std::string> pricing;
    std::optional<std::string> agent;
    std::string format = "md";
};

inline std::optional<RunManifest> read_manifest(const fs::path& dir) {
    if (!fs::exists(dir / "manifest.jsonl")) return std::nullopt;
    for (const auto& e : read_jsonl(dir / "manifest.jsonl"))
        if (e.kind == RecordKind::manifest) return e.payload.get<RunManifest>();
    return std::nullopt;
}

inline int analyze(const AnalyzeOptions& o, std::ostream& out = std::cout) {
    const fs::path dir(o.run);
    if (!fs::is_directory(dir)) throw UsageError("run: not found: " + o.run);
    TableFormat fmt;
    if (o.format == "md") fmt = TableFormat::md;
    else if (o.format == "csv") fmt = TableFormat::csv;
    else throw UsageError("--format must be csv or md");
    if (o.min_uses < 1) throw UsageError("--min-uses must be >= 1");

    const bool has_dialogues = fs::exists(dir / "dialogues.jsonl");
    const bool has_verdicts = fs::exists(dir / "verdicts.jsonl");
    if (!has_dialogues && !has_verdicts) throw UsageError("run: not found: no dialogue or verdict logs in " + o.run);
    const auto manifest = read_manifest(dir);
    const Language lang = manifest ? manifest->language : Language::en;

    auto section = [&](const std::string& title) {
        if (fmt == TableFormat::md) out << "\n## " << title << "\n\n";
        else out << "# " << title << '\n';
    };
    bool any = o.metrics || o.heatmap || o.entropy || o.shift || o.cost || o.winrate;

    if (has_verdicts && (o.winrate || (!any && !has_dialogues))) {
        auto verdicts = read_payloads<Verdict>(dir / "verdicts.jsonl", RecordKind::verdict);
        section("Win rate");
        out << winrate_table(aggregate(verdicts, GroupBy::none), fmt);
        section("Win rate by domain");
        out << winrate_table(aggregate(verdicts, GroupBy::domain), fmt, "domain");
        section("Win rate by history turns");
        out << winrate_table(aggregate(verdicts, GroupBy::history_turns), fmt, "turns");
    }
    if (!has_dialogues) {
        if (o.metrics || o.heatmap || o.entropy || o.shift || o.cost)
            throw UsageError("run has no dialogues.jsonl for the requested tables");
        return kExitOk;
    }

    auto records = read_payloads<DialogueRecord>(dir / "dialogues.jsonl", RecordKind::dialogue);
    if (o.agent) {
        std::erase_if(records, [&](const DialogueRecord& r) { return r.agent_config_id != *o.agent; });
        if (records.empty()) throw UsageError("no dialogues for agent " + *o.agent);
    }
    const auto groups = by_agent(records);
    const auto catalog = build_full_catalog(lang);

    if (o.metrics || !any) {
        std::map<std::string, SuccessMetrics> metrics;
        for (const auto& [agent, recs] : groups) metrics[agent] = compute_success_metrics(recs);
        section("Success metrics");
        out << success_table(metrics, fmt);
    }
    if (o.shift || !any) {
        for (const auto& [agent, recs] : groups) {
            auto m = shift_matrix(recs);
            int row_total = 0;
            for (int i = 1; i <= 5; ++i) row_total += m.row_sum(i);
            int n = 0;
            for (const auto& r : recs) n += r.aborted ? 0 : 1;
            section("Intention shift: " + agent + (row_total == n ? " (rows sum to n)" : " (ROW SUM MISMATCH)"));
            out << shift_table(m, fmt);
        }
    }
    if (o.entropy) {
        for (const auto& [agent, recs] : groups) {
            section("Strategy usage: " + agent);
            out << usage_table(strategy_usage(recs, catalog), catalog, fmt);
        }
    }
    if (o.heatmap) {
        for (const auto& [agent, recs] : groups) {
            section("Strategy effectiveness: " + agent + " (min uses " + std::to_string(o.min_uses) + ")");
            out << heatmap_table(effectiveness_matrix(recs, o.min_uses), catalog, fmt);
        }
    }
    if (o.cost) {
        std::optional<PricingTable> pricing;
        if (o.pricing) {
            if (!fs::exists(*o.pricing)) throw UsageError("pricing: not found: " + *o.pricing);
            pricing = load_pricing(*o.pricing);
        }
        section("Persuader cost and latency");
        out << cost_table(cost_latency_summary(records, pricing ? &*pricing : nullptr), fmt);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// annotate

inline std::vector<DialogueRecord> load_dialogues(const std::string& run, const std::optional<std::string>& agent) {
    const fs::path path = fs::path(run) / "dialogues.jsonl";
    if (!fs::exists(path)) throw UsageError("run: not found: " + run);
    auto recs = read_payloads<DialogueRecord>(path, RecordKind::dialogue);
    if (agent) std::erase_if(recs, [&](const DialogueRecord& r) { return r.agent_config_id != *agent; });
    return recs;
}

struct AnnotateBuildOptions {
    std::string kind = "pairwise";
    std::string run_a;
    std::string run_b;
    std::optional<std::string> agent_a;
    std::optional<std::string> agent_b;
    std::string annotators = "a1,a2,a3";
    std::uint64_t seed = 0;
    std::string out;
};

inline int annotate_build(const AnnotateBuildOptions& o, std::ostream& out = std::cout) {
    if (o.out.empty()) throw UsageError("--out is required");
    auto annotators = split_list(o.annotators);
    if (annotators.empty()) throw UsageError("--annotators needs at least one id");
    std::vector<AnnotationTask> tasks;
    if (o.kind == "pairwise") {
        if (o.run_b.empty()) throw UsageError("pairwise tasks need --run-a and --run-b");
        tasks = build_pairwise_tasks(load_dialogues(o.run_a, o.agent_a), load_dialogues(o.run_b, o.agent_b), annotators,
                                     o.seed);
    } else if (o.kind == "realism") {
        tasks = build_realism_tasks(load_dialogues(o.run_a, o.agent_a), annotators);
    } else {
        throw UsageError("--kind must be pairwise or realism");
    }
    ensure_dir(o.out);
    JsonlWriter w(fs::path(o.out) / "tasks.jsonl");
    for (const auto& t : tasks) w.write(RecordKind::task, t);
    out << json{{"tasks", tasks.size()}, {"path", (fs::path(o.out) / "tasks.jsonl").string()}}.dump() << '\n';
    return kExitOk;
}

inline std::vector<AnnotationTask> load_tasks(const std::string& dir) {
    const fs::path path = fs::path(dir) / "tasks.jsonl";
    if (!fs::exists(path)) throw UsageError("tasks: not found: " + dir);
    return read_payloads<AnnotationTask>(path, RecordKind::task);
}

inline AnnotationService open_service(const std::string& dir) {
    return AnnotationService(load_tasks(dir), fs::path(dir) / "answers.jsonl");
}

inline int annotate_export(const std::string& dir, const std::optional<std::string>& file, std::ostream& out = std::cout) {
    auto service = open_service(dir);
    if (file) write_text_file(*file, service.export_csv());
    else out << service.export_csv();
    return kExitOk;
}

inline int annotate_summary(const std::string& dir, const std::string& agent_a, std::ostream& out = std::cout) {
    auto tasks = load_tasks(dir);
    std::vector<AnnotationAnswer> answers;
    if (fs::exists(fs::path(dir) / "answers.jsonl"))
        answers = read_payloads<AnnotationAnswer>(fs::path(dir) / "answers.jsonl", RecordKind::answer);
    out << json(summarize(tasks, answers, agent_a)).dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// catalog and synth

inline int print_catalog(const std::string& lang, const std::string& view, std::ostream& out = std::cout) {
    auto full = build_full_catalog(language_arg(lang));
    if (view == "full") out << full.to_json().dump(2) << '\n';
    else if (view == "p4g") out << p4g_subset(full).to_json().dump(2) << '\n';
    else throw UsageError("--view must be full or p4g");
    return kExitOk;
}

struct SynthOptions {
    std::size_t n = 300;
    std::uint64_t seed = 0;
    std::string out;
    std::optional<std::string> intention_weights;
    // script only
    std::string personas;
    std::vector<std::string> agents;
    std::string lang = "en";
    int max_turns = 10;
    int repeat_evals = 10;
};

inline int synth_personas(const SynthOptions& o) {
    if (o.out.empty()) throw UsageError("--out is required");
    auto personas = synthesize_personas(o.n, o.seed);
    const bool with_levels = o.intention_weights.has_value();
    if (with_levels) {
        auto levels = assign_initial_intentions(o.n, parse_weights(*o.intention_weights), o.seed);
        for (std::size_t i = 0; i < o.n; ++i) personas[i].initial_intention = levels[i];
    }
    write_text_file(o.out, write_personas_csv(personas, with_levels));
    return kExitOk;
}

inline int synth_dp_dataset(const SynthOptions& o) {
    if (o.out.empty()) throw UsageError("--out is required");
    write_text_file(o.out, json{{"scenarios", synthesize_dp_dataset(o.n, o.seed)}}.dump(2) + "\n");
    return kExitOk;
}

/// Script for run-p4g over a persona CSV; intention levels must match the run's.
inline int synth_p4g_script(const SynthOptions& o) {
    if (o.out.empty()) throw UsageError("--out is required");
    if (!fs::exists(o.personas)) throw UsageError("personas: not found");
    const std::string text = read_text_file(o.personas);
    auto personas = read_personas_csv(text);
    std::optional<std::array<double, 5>> weights;
    if (o.intention_weights) weights = parse_weights(*o.intention_weights);
    if (!weights && !csv_has_column(text, "initial_intention")) weights = std::array<double, 5>{1, 1, 1, 1, 1};
    if (weights) {
        auto levels = assign_initial_intentions(personas.size(), *weights, o.seed);
        for (std::size_t i = 0; i < personas.size(); ++i) personas[i].initial_intention = levels[i];
    }
    const Language lang = language_arg(o.lang);
    std::vector<AgentConfig> agents;
    for (const auto& a : o.agents.empty() ? std::vector<std::string>{"procot-p4g"} : o.agents) {
        try {
            agents.push_back(AgentConfig::preset(a, lang));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    P4gScriptOptions so;
    so.max_turns = o.max_turns;
    so.repeat_evals = o.repeat_evals;
    write_text_file(o.out, make_p4g_script(agents, personas, o.seed, so).dump() + "\n");
    return kExitOk;
}

}  // namespace persuade::cli
