#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rowsim/sim_engine.hpp"

namespace rowsim {

struct SweepSpec {
    std::vector<StrategyKind> strategies;
    std::vector<double> lambdas;
    std::vector<std::uint64_t> seeds;
    std::string output_dir;
    int jobs = 1;
    bool write_charts = false;
    bool write_event_logs = false;
};

struct SweepRow {
    StrategyKind strategy;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    Metrics metrics;
    bool collided = false;
    double coop_min_cell_separation = 1e18;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by (strategy, lambda, seed)
    bool any_collision = false;
};

// e.g. "100,200,400" or "1..10"
std::vector<double> parse_number_list(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

std::string metrics_csv_header();
std::string metrics_csv_row(const SweepRow& row);

// Runs the grid, writes metrics.csv plus per-figure aggregate files; rows are
// written in deterministic order as soon as their prefix completes, so an
// interrupted sweep leaves a valid partial file.
SweepResult run_sweep(const SweepSpec& spec, const SimConfig& base);

// mean/sd aggregates per (strategy, lambda); used for the figure files
struct Aggregate {
    StrategyKind strategy;
    double lambda = 0.0;
    int n = 0;
    double delay_mean = 0.0, delay_sd = 0.0;
    double throughput_mean = 0.0, throughput_sd = 0.0;
    double ideal_mean = 0.0;
    double messages_per_vehicle_mean = 0.0;
};
std::vector<Aggregate> aggregate_rows(const std::vector<SweepRow>& rows);

}  // namespace rowsim
