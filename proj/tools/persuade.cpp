#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "persuade/annotation_http.hpp"
#include "persuade/commands.hpp"

using namespace persuade;
using namespace persuade::cli;

namespace {

httplib::Server* g_server = nullptr;

void stop_server(int) {
    if (g_server) g_server->stop();
}

template <typename T>
void opt(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& help) {
    app->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persuasion dialogue experiment harness"};
    app.require_subcommand(1);
    std::function<int()> action;

    RunP4gOptions p4g;
    auto* run_p4g_cmd = app.add_subcommand("run-p4g", "Simulate donation-persuasion dialogues and score them");
    run_p4g_cmd->add_option("--agent", p4g.agents, "Agent preset (repeatable)")->required()->delimiter(',');
    run_p4g_cmd->add_option("--personas", p4g.personas, "Persona CSV")->required();
    opt(run_p4g_cmd, "--n", p4g.n, "Use the first n personas");
    opt(run_p4g_cmd, "--lang", p4g.lang, "ja or en");
    opt(run_p4g_cmd, "--seed", p4g.seed, "Master seed");
    opt(run_p4g_cmd, "--backend", p4g.backend, "live or scripted:<file>");
    opt(run_p4g_cmd, "--max-turns", p4g.max_turns, "Turn cap per dialogue");
    opt(run_p4g_cmd, "--repeat-evals", p4g.repeat_evals, "Evaluator samples per turn");
    opt(run_p4g_cmd, "--parallelism", p4g.parallelism, "Dialogues in flight");
    opt(run_p4g_cmd, "--model", p4g.model, "Persuader model");
    opt(run_p4g_cmd, "--intention-weights", p4g.intention_weights, "Five weights for initial levels 1..5");
    opt(run_p4g_cmd, "--config", p4g.config, "TOML config file");
    run_p4g_cmd->add_flag("--labels-only", p4g.labels_only, "Skip persona description generation");
    run_p4g_cmd->add_option("--out", p4g.out, "Output directory")->required();
    run_p4g_cmd->callback([&] { action = [&] { return run_p4g(p4g); }; });

    RunDpOptions dp;
    auto* run_dp_cmd = app.add_subcommand("run-dp", "Pairwise judged comparison on a scenario dataset");
    run_dp_cmd->add_option("--dataset", dp.dataset, "Scenario dataset JSON")->required();
    opt(run_dp_cmd, "--n", dp.n, "Instances to sample (default 1000)");
    run_dp_cmd->add_option("--agent-a", dp.agent_a, "Agent preset A")->required();
    run_dp_cmd->add_option("--agent-b", dp.agent_b, "Agent preset B")->required();
    opt(run_dp_cmd, "--judge", dp.judge, "Judge model");
    opt(run_dp_cmd, "--judge-effort", dp.judge_effort, "Judge reasoning effort (empty to omit)");
    opt(run_dp_cmd, "--lang", dp.lang, "ja or en");
    opt(run_dp_cmd, "--seed", dp.seed, "Master seed");
    opt(run_dp_cmd, "--backend", dp.backend, "live or scripted:<file>");
    opt(run_dp_cmd, "--judge-backend", dp.judge_backend, "Backend for the judge (defaults to --backend)");
    opt(run_dp_cmd, "--parallelism", dp.parallelism, "Instances in flight");
    opt(run_dp_cmd, "--model", dp.model, "Persuader model");
    opt(run_dp_cmd, "--config", dp.config, "TOML config file");
    run_dp_cmd->add_flag("--fixed-order", dp.fixed_order, "Always judge A/B order first");
    run_dp_cmd->add_option("--out", dp.out, "Output directory")->required();
    run_dp_cmd->callback([&] { action = [&] { return run_dp(dp); }; });

    AnalyzeOptions an;
    auto* analyze_cmd = app.add_subcommand("analyze", "Tables from a finished run directory");
    analyze_cmd->add_option("--run", an.run, "Run directory")->required();
    analyze_cmd->add_flag("--metrics", an.metrics, "Success metrics");
    analyze_cmd->add_flag("--heatmap", an.heatmap, "Strategy effectiveness matrix");
    analyze_cmd->add_option("--min-uses", an.min_uses, "Mask heatmap cells below this many uses");
    analyze_cmd->add_flag("--entropy", an.entropy, "Strategy usage and entropy");
    analyze_cmd->add_flag("--shift", an.shift, "Initial to final intention matrix");
    analyze_cmd->add_flag("--cost", an.cost, "Persuader tokens, latency and cost per turn");
    analyze_cmd->add_flag("--winrate", an.winrate, "Pairwise win rates");
    opt(analyze_cmd, "--pricing", an.pricing, "TOML file with [pricing.<model>] tables");
    opt(analyze_cmd, "--agent", an.agent, "Restrict to one agent");
    analyze_cmd->add_option("--format", an.format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
    analyze_cmd->callback([&] { action = [&] { return analyze(an); }; });

    auto* annotate_cmd = app.add_subcommand("annotate", "Human annotation tasks");
    annotate_cmd->require_subcommand(1);

    AnnotateBuildOptions ab;
    auto* build_cmd = annotate_cmd->add_subcommand("build", "Build blinded tasks from run directories");
    build_cmd->add_option("--kind", ab.kind, "pairwise or realism");
    build_cmd->add_option("--run-a", ab.run_a, "Run directory A")->required();
    build_cmd->add_option("--run-b", ab.run_b, "Run directory B (pairwise)");
    opt(build_cmd, "--agent-a", ab.agent_a, "Agent filter for run A");
    opt(build_cmd, "--agent-b", ab.agent_b, "Agent filter for run B");
    build_cmd->add_option("--annotators", ab.annotators, "Comma-separated annotator ids");
    build_cmd->add_option("--seed", ab.seed, "Blinding seed");
    build_cmd->add_option("--out", ab.out, "Task directory")->required();
    build_cmd->callback([&] { action = [&] { return annotate_build(ab); }; });

    std::string tasks_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::string> static_dir;
    auto* serve_cmd = annotate_cmd->add_subcommand("serve", "Serve the annotation HTTP API");
    serve_cmd->add_option("--tasks", tasks_dir, "Task directory")->required();
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--port", port, "Port");
    opt(serve_cmd, "--static", static_dir, "Directory with the annotation UI build");
    serve_cmd->callback([&] {
        action = [&] {
            auto service = open_service(tasks_dir);
            httplib::Server server;
            std::optional<std::filesystem::path> sdir;
            if (static_dir) sdir = *static_dir;
            mount(server, service, sdir);
            g_server = &server;
            std::signal(SIGINT, stop_server);
            std::signal(SIGTERM, stop_server);
            std::cerr << json{{"listening", host + ":" + std::to_string(port)}}.dump() << '\n';
            if (!server.listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
            return kExitOk;
        };
    });

    std::optional<std::string> export_file;
    auto* export_cmd = annotate_cmd->add_subcommand("export", "De-blinded answer CSV");
    export_cmd->add_option("--tasks", tasks_dir, "Task directory")->required();
    opt(export_cmd, "--out", export_file, "CSV path (stdout if omitted)");
    export_cmd->callback([&] { action = [&] { return annotate_export(tasks_dir, export_file); }; });

    std::string summary_agent;
    auto* summary_cmd = annotate_cmd->add_subcommand("summary", "Win/tie/lose, agreement and realism");
    summary_cmd->add_option("--tasks", tasks_dir, "Task directory")->required();
    summary_cmd->add_option("--agent-a", summary_agent, "Agent whose view the win rate takes");
    summary_cmd->callback([&] { action = [&] { return annotate_summary(tasks_dir, summary_agent); }; });

    std::string cat_lang = "en", cat_view = "full";
    auto* catalog_cmd = app.add_subcommand("catalog", "Print the strategy catalog as JSON");
    catalog_cmd->add_option("--lang", cat_lang, "ja or en");
    catalog_cmd->add_option("--view", cat_view, "full or p4g");
    catalog_cmd->callback([&] { action = [&] { return print_catalog(cat_lang, cat_view); }; });

    SynthOptions syn;
    auto* synth_cmd = app.add_subcommand("synth", "Seeded synthetic inputs for offline runs");
    synth_cmd->require_subcommand(1);
    auto add_common = [&](CLI::App* c) {
        c->add_option("--n", syn.n, "Count");
        c->add_option("--seed", syn.seed, "Seed");
        c->add_option("--out", syn.out, "Output file")->required();
    };
    auto* sp = synth_cmd->add_subcommand("personas", "Persona CSV");
    add_common(sp);
    opt(sp, "--intention-weights", syn.intention_weights, "Also assign initial levels");
    sp->callback([&] { action = [&] { return synth_personas(syn); }; });
    auto* sd = synth_cmd->add_subcommand("dp-dataset", "Scenario dataset JSON");
    add_common(sd);
    sd->callback([&] { action = [&] { return synth_dp_dataset(syn); }; });
    auto* ss = synth_cmd->add_subcommand("p4g-script", "Scripted backend rules for run-p4g");
    ss->add_option("--seed", syn.seed, "Seed (use the run's seed)");
    ss->add_option("--out", syn.out, "Output file")->required();
    ss->add_option("--personas", syn.personas, "Persona CSV")->required();
    ss->add_option("--agent", syn.agents, "Agent preset (repeatable)")->delimiter(',');
    ss->add_option("--lang", syn.lang, "ja or en");
    ss->add_option("--max-turns", syn.max_turns, "Turn cap");
    ss->add_option("--repeat-evals", syn.repeat_evals, "Evaluator samples per turn");
    opt(ss, "--intention-weights", syn.intention_weights, "Same weights the run will use");
    ss->callback([&] { action = [&] { return synth_p4g_script(syn); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"error", e.what()}, {"type", "usage"}, {"exit_code", kExitUsage}}.dump() << '\n';
        return kExitUsage;
    }
    if (!action) return kExitUsage;
    return guarded(action, std::cerr);
}
