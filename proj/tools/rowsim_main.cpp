#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rowsim/config.hpp"
#include "rowsim/scenario.hpp"
#include "rowsim/sweep.hpp"

using namespace rowsim;

int main(int argc, char** argv) {
    CLI::App app{"rowsim - non-signalized intersection coordination simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string strategies_arg = "rss,rwa,coop";
    std::string lambdas_arg = "100,200,400,600,800";
    std::string seeds_arg = "1..10";
    std::string out_dir = "out";
    std::string scenario_path;
    std::string strategy_arg = "rwa";
    std::vector<std::string> overrides;
    int jobs = 1;
    bool charts = false;
    bool event_logs = false;

    CLI::App* sweep = app.add_subcommand("sweep", "run the strategy/lambda/seed grid");
    sweep->add_option("--config", config_path, "config file (defaults when omitted)");
    sweep->add_option("--strategies", strategies_arg, "comma list: rss,rwa,coop");
    sweep->add_option("--lambdas", lambdas_arg, "comma list of veh/(lane.h)");
    sweep->add_option("--seeds", seeds_arg, "comma list or range a..b");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "parallel simulations");
    sweep->add_option("--set", overrides, "config override key=value")->take_all();
    sweep->add_flag("--charts", charts, "also write SVG charts");
    sweep->add_flag("--event-logs", event_logs, "write per-run event logs");

    CLI::App* scenario = app.add_subcommand("scenario", "replay a fixed scenario file");
    scenario->add_option("--config", config_path, "config file");
    scenario->add_option("--file", scenario_path, "scenario file")->required();
    scenario->add_option("--strategy", strategy_arg, "rss | rwa | coop");
    scenario->add_option("--set", overrides, "config override key=value")->take_all();
    scenario->add_option("--out", out_dir, "directory for the event log (optional)");

    CLI::App* validate = app.add_subcommand("validate", "check a config file");
    validate->add_option("--config", config_path, "config file");

    CLI11_PARSE(app, argc, argv);

    try {
        SimConfig cfg =
            config_path.empty() ? SimConfig{} : load_config_file(config_path);
        for (const std::string& kv : overrides) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--set expects key=value, got " + kv);
            apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        cfg.validate();

        if (validate->parsed()) {
            std::cout << config_to_text(cfg);
            return 0;
        }

        if (scenario->parsed()) {
            const auto vehicles = load_scenario_file(scenario_path);
            const StrategyKind strategy = strategy_from_string(strategy_arg);
            const ScenarioResult result = run_scenario(cfg, strategy, vehicles);
            std::cout << format_passing_order(result);
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                std::ofstream log(out_dir + "/scenario_events.log");
                log << event_log_to_text(result.run.log);
                std::cout << "event log: " << out_dir << "/scenario_events.log\n";
            }
            if (result.run.aborted_on_collision) {
                std::cerr << "collision detected; see the event log\n";
                return 2;
            }
            return 0;
        }

        // sweep
        SweepSpec spec;
        {
            std::istringstream in(strategies_arg);
            std::string item;
            while (std::getline(in, item, ','))
                if (!item.empty()) spec.strategies.push_back(strategy_from_string(item));
        }
        spec.lambdas = parse_number_list(lambdas_arg);
        spec.seeds = parse_seed_list(seeds_arg);
        spec.output_dir = out_dir;
        spec.jobs = jobs;
        spec.write_charts = charts;
        spec.write_event_logs = event_logs;
        const SweepResult result = run_sweep(spec, cfg);
        std::cout << "wrote " << result.rows.size() << " rows to " << out_dir
                  << "/metrics.csv\n";
        if (result.any_collision) {
            std::cerr << "collision detected in at least one run\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
