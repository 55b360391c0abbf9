#pragma once

#include <cstdint>
#include <string>

#include "rowsim/geometry.hpp"
#include "rowsim/safety_zones.hpp"

namespace rowsim {

enum class StrategyKind { Rss, Rwa, Coop };

const char* to_string(StrategyKind k);
StrategyKind strategy_from_string(const std::string& s);

// Complete, validated parameter set for one simulation run. Defaults follow
// the reference experiment settings.
struct SimConfig {
    double lambda = 400.0;        // veh/(lane.h)
    double duration = 1200.0;     // s (measurement window)
    double dt = 0.1;              // s
    std::uint64_t seed = 1;
    double accept_probability = 0.5;

    double ratio_left = 3.0;
    double ratio_right = 3.0;
    double ratio_straight = 4.0;

    double speed_limit_straight = 10.0;  // m/s
    double speed_limit_turn = 5.0;       // m/s
    double a_comfort = 2.0;              // m/s^2
    double vehicle_length = 3.5;         // m
    double spawn_speed = 10.0;           // m/s

    BrakeParams brakes;
    LayoutParams layout;

    double platoon_gap_factor = 2.0;
    double warm_up = 0.0;  // s excluded from metrics when > 0
    bool rss_tie_break = true;

    double coop_delta = 2.0;          // s, min same-subzone interval
    double coop_cell_size = 3.0;      // m
    double coop_replan_period = 1.0;  // s
    int coop_rollout_budget = 200;
    int coop_exact_threshold = 8;
    double coop_merge_headway = 4.0;  // s, entry spacing when a straight follows a turner

    void validate() const;  // throws std::invalid_argument naming the bad key
};

// Parses the flat key-value config format ("key = value", '#' comments).
// Unknown keys, non-numeric values and out-of-range values are rejected.
SimConfig parse_config_text(const std::string& text);
SimConfig load_config_file(const std::string& path);

// Applies "key=value" overrides on top of an existing config.
void apply_override(SimConfig& cfg, const std::string& key, const std::string& value);

std::string config_to_text(const SimConfig& cfg);

}  // namespace rowsim
