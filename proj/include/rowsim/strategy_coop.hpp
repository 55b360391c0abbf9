#pragma once

#include <array>
#include <map>

#include "rowsim/sim_engine.hpp"

namespace rowsim {

// Junction tiling and per-path occupancy footprints, offsets measured in arc
// length from the junction entry of each path.
struct SubzoneGrid {
    double cell_size = 3.0;
    int cells_per_side = 2;
    struct CellSpan {
        int cell = 0;
        double enter_off = 0.0;
        double exit_off = 0.0;
    };
    std::vector<std::vector<CellSpan>> footprints;  // indexed by path index

    int cell_count() const { return cells_per_side * cells_per_side; }
};

SubzoneGrid build_grid(const IntersectionLayout& layout, double cell_size);

// Scheduling model for one vehicle: when it could enter the junction and how
// it would traverse it.
struct PlannedVehicle {
    int id = -1;
    int path_index = 0;
    int lane = 1;
    int exit_lane = 2;
    bool turning = false;
    double length = 3.5;
    double earliest_entry = 0.0;  // absolute time
    double entry_speed = 0.0;     // modeled speed at the junction boundary
    double cap_speed = 5.0;       // in-junction speed cap
    double accel = 2.0;
};

struct PassingPlan {
    std::vector<int> order;
    std::map<int, double> entry_time;
    double makespan = 0.0;
};

struct CoopParams {
    double delta = 2.0;          // min same-subzone interval, s
    double merge_headway = 4.0;  // exit entry spacing when a straight follows a turner, s
    int exact_threshold = 8;
    int rollout_budget = 200;
    double hold_penalty_slack = 0.5;  // s of slip after which a from-rest crossing is modeled
};

// Occupancy left behind by vehicles already granted (used when replanning).
struct ScheduleSeed {
    std::vector<double> cell_free;            // per cell, time it frees
    std::array<double, 4> exit_arrival{};     // last arrival at each exit-lane start
    std::array<bool, 4> exit_was_turning{};   // and whether that vehicle was turning
    std::array<double, 4> lane_gate{};        // earliest entry per branch
    ScheduleSeed() {
        exit_arrival.fill(-1e18);
        lane_gate.fill(-1e18);
    }
};

// Time for a vehicle to cover `dist` of junction path from its entry.
double crossing_time(const PlannedVehicle& v, double dist);

// Entry times for a fixed passing order (greedy list scheduling). Vehicles
// sharing a lane must appear in lane order.
PassingPlan schedule_order(const std::vector<PlannedVehicle>& order,
                           const SubzoneGrid& grid,
                           const IntersectionLayout& layout,
                           const CoopParams& params,
                           const ScheduleSeed* seed = nullptr);

// Makespan-minimizing order: exact branch-and-bound up to exact_threshold
// vehicles, anytime random rollouts (the FIFO order always seeded) beyond.
PassingPlan plan_order(const std::vector<PlannedVehicle>& vehicles,
                       const SubzoneGrid& grid, const IntersectionLayout& layout,
                       const CoopParams& params, Rng& rng,
                       const ScheduleSeed* seed = nullptr);

enum class CoopCommand { Proceed, Hold, Replan };

// Tracks the planned slot: holds/decelerates before the boundary until the
// entry time, proceeds at the slot, asks for a replan when the slot is stale.
CoopCommand schedule_to_commands(const PassingPlan& plan, const Vehicle& vehicle,
                                 double now, double s_junction_entry, double dt);

class CoopStrategy : public Strategy {
public:
    CoopStrategy(const SimConfig& cfg, const IntersectionLayout& layout);

    StrategyKind kind() const override { return StrategyKind::Coop; }
    void step(World& world) override;

    const PassingPlan& current_plan() const { return plan_; }
    const SubzoneGrid& grid() const { return grid_; }

private:
    void replan(World& world);
    PlannedVehicle model_vehicle(const World& world, const Vehicle& v,
                                 bool from_current_speed) const;
    double approach_time(const World& world, const Vehicle& v) const;

    const IntersectionLayout* layout_;
    SubzoneGrid grid_;
    CoopParams params_;
    PassingPlan plan_;
    Rng rng_;
    double last_replan_ = -1e18;
    bool dirty_ = true;
    int known_injected_ = 0;
    int known_exited_ = 0;
};

}  // namespace rowsim
