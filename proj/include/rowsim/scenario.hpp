#pragma once

#include <string>
#include <vector>

#include "rowsim/sim_engine.hpp"

namespace rowsim {

// Scenario files list one vehicle per line: name lane intention s v
// '#' starts a comment. Errors carry the offending line number.
std::vector<InitialVehicle> parse_scenario_text(const std::string& text);
std::vector<InitialVehicle> load_scenario_file(const std::string& path);

struct ScenarioEntry {
    std::string name;
    int vid = -1;
    double junction_enter = 0.0;
    double junction_exit = 0.0;
};

struct ScenarioResult {
    std::vector<ScenarioEntry> order;  // by junction entry time
    RunResult run;
};

ScenarioResult run_scenario(const SimConfig& cfg, StrategyKind strategy,
                            const std::vector<InitialVehicle>& vehicles);

std::string format_passing_order(const ScenarioResult& result);

}  // namespace rowsim
