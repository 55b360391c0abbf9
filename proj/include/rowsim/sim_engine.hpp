#pragma once

#include <array>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rowsim/config.hpp"
#include "rowsim/event_log.hpp"
#include "rowsim/geometry.hpp"
#include "rowsim/rng.hpp"
#include "rowsim/traffic_model.hpp"

namespace rowsim {

struct Metrics {
    double average_delay = 0.0;  // s per exited vehicle
    int throughput = 0;          // vehicles that completed their path in the window
    int ideal_throughput = 0;    // completions the arrival stream would yield under free flow
    int deadlock_tie_events = 0;
    int collision_events = 0;
    long messages_total = 0;
    double messages_per_vehicle = 0.0;  // messages_total / spawned
    long messages_state = 0;
    long messages_request = 0;
    long messages_accept = 0;
    long messages_reject = 0;
    long messages_plan = 0;
    long observations = 0;  // passive state reads (RSS sensing)
    int spawned = 0;
    int deadlock_events = 0;
    // congestion probes: mean delay of exits in [300,600) and the final 300 s
    double delay_minutes_5_to_10 = 0.0;
    double delay_final_5_minutes = 0.0;
};

// Per-vehicle motion directives assembled each step.
struct MotionPlan {
    bool hold_at_stopline = false;
    std::optional<double> speed_cap;
    // (leader front position in the follower's path coordinates, leader speed)
    std::vector<std::pair<double, double>> leaders;
};

class Strategy;

struct World {
    const SimConfig* cfg = nullptr;
    const IntersectionLayout* layout = nullptr;
    double clock = 0.0;
    long step_count = 0;

    std::vector<ArrivalEvent> arrivals;  // merged stream; index == vehicle id
    int next_arrival = 0;
    std::array<std::deque<int>, 4> point_queues;  // per branch

    std::vector<Vehicle> fleet;       // indexed by vehicle id
    std::vector<char> active;         // injected and not yet exited
    std::array<std::vector<int>, 4> lane_vehicles;  // per branch, sorted by s desc

    std::vector<MotionPlan> plans;    // step scratch, indexed by id
    EventLog log;

    bool collision_abort = false;
    bool deadlock_now = false;
    double deadlock_timer = 0.0;
    long observations = 0;  // passive state reads, accumulated by RSS
    int injected_count = 0;
    int exited_count = 0;

    // conflict-point passage bookkeeping
    struct Passage {
        double t_on = -1.0;
        double t_off = -1.0;
    };
    std::map<std::pair<int, int>, std::array<Passage, 2>> passages;
    std::set<std::pair<int, int>> resolved_pairs;  // registered by strategies

    // realized subzone occupancy (tracked for the cooperative strategy)
    bool track_cells = false;
    std::map<int, std::vector<std::array<double, 3>>> cell_intervals;  // cell -> (t0,t1,vid)
    std::map<std::pair<int, int>, double> cell_enter_time;             // (vid,cell) -> t0

    // scenario support
    std::vector<std::string> names;  // per vehicle id; empty in sweep mode

    const PathGeom& path_of(const Vehicle& v) const { return layout->path_at(v.path_index); }
    Vehicle* find(int id) { return id >= 0 && active[id] ? &fleet[id] : nullptr; }
    const Vehicle* find(int id) const { return id >= 0 && active[id] ? &fleet[id] : nullptr; }

    // first non-committed vehicle per lane, inside the control zone
    std::vector<int> decision_heads() const;
    // committed vehicles whose rear has not yet cleared the junction
    std::vector<int> junction_occupants() const;
    bool junction_empty() const;
    bool body_in_junction(const Vehicle& v) const;

    // platoon extent for zone checks: front position and total covered length
    std::pair<double, double> platoon_extent(const Vehicle& head) const;

    void grant(int id);
    void log_event(EventKind kind, const Vehicle& v, const std::string& detail = "");
    void log_message(const char* kind, int from, int to);
    void mark_resolved(int a, int b);

    long count_messages(const char* kind) const;
    std::string name_of(int id) const;
};

class Strategy {
public:
    virtual ~Strategy() = default;
    virtual StrategyKind kind() const = 0;
    // called once per step after stages are refreshed, before motion
    virtual void step(World& world) = 0;
};

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, const SimConfig& cfg,
                                        const IntersectionLayout& layout);

// Largest next-step speed keeping the worst-case stopping gap to a leader.
double rss_safe_speed(double gap, double v_follower, double v_leader,
                      const BrakeParams& p, double dt);

// Free-flow travel times per intention (indexed by static_cast<int>(Intention)),
// integrated with the engine's controller at the configured dt.
std::array<double, 3> free_flow_times(const SimConfig& cfg);

Metrics compute_metrics(const EventLog& log, const SimConfig& cfg);

struct RunResult {
    Metrics metrics;
    EventLog log;
    bool aborted_on_collision = false;
    double coop_min_cell_separation = 1e18;  // realized, seconds; tracked for coop
};

struct InitialVehicle {
    std::string name;
    int lane = 1;
    Intention intention = Intention::Straight;
    double s = 0.0;
    double v = 0.0;
};

class Simulation {
public:
    Simulation(const SimConfig& cfg, StrategyKind strategy);
    Simulation(const SimConfig& cfg, StrategyKind strategy,
               const std::vector<InitialVehicle>& initial);
    ~Simulation();

    void step();
    bool done() const;
    RunResult finish();           // compute metrics over what ran
    RunResult run();              // steps to completion
    World& world() { return world_; }
    Strategy& strategy() { return *strategy_; }

private:
    void inject_arrivals();
    void refresh_stages();
    void engine_constraints();
    void apply_motion();
    void run_detectors();
    void handle_crossings_and_exits();
    double controller_speed(const Vehicle& v, const MotionPlan& plan) const;

    SimConfig cfg_;
    IntersectionLayout layout_;
    std::unique_ptr<Strategy> strategy_;
    World world_;
    long total_steps_ = 0;
    bool scenario_mode_ = false;
};

RunResult simulate(const SimConfig& cfg, StrategyKind strategy);

}  // namespace rowsim
