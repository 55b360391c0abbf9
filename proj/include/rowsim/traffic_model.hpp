#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rowsim/geometry.hpp"
#include "rowsim/safety_zones.hpp"

namespace rowsim {

enum class Stage { CarFollowing, Decision, Action };

inline const char* to_string(Stage s) {
    switch (s) {
        case Stage::CarFollowing: return "car_following";
        case Stage::Decision: return "decision";
        case Stage::Action: return "action";
    }
    return "?";
}

struct Vehicle {
    int id = -1;
    int lane = 1;
    Intention intention = Intention::Straight;
    double s = 0.0;       // front-bumper arc length along its path
    double v = 0.0;       // m/s
    double length = 3.5;  // m
    Stage stage = Stage::CarFollowing;
    int platoon_id = -1;
    double spawn_time = 0.0;  // arrival time into the point queue
    std::optional<double> exit_time;

    // engine bookkeeping
    int path_index = 0;
    bool committed = false;  // holds a junction grant
    double enter_time = 0.0; // time of physical injection

    double rear() const { return s - length; }
};

struct ArrivalEvent {
    double time = 0.0;
    int lane = 1;
    Intention intention = Intention::Straight;
};

// Poisson arrivals for one lane. lambda is veh/(lane.h); intentions are drawn
// from the given ratio. Deterministic for a fixed (seed, lane).
std::vector<ArrivalEvent> gen_arrivals(double lambda, double duration,
                                       std::uint64_t seed, int lane,
                                       double ratio_left = 3.0,
                                       double ratio_right = 3.0,
                                       double ratio_straight = 4.0);

// v' = clamp(v + a*dt, 0, limit); s' = s + mean(v, v')*dt
Vehicle kinematic_step(Vehicle vehicle, double accel, double dt, double speed_limit);

// delay = exit - spawn - free-flow travel time; empty until the vehicle exits
inline std::optional<double> point_queue_delay(const Vehicle& v, double free_flow_time) {
    if (!v.exit_time) return std::nullopt;
    return *v.exit_time - v.spawn_time - free_flow_time;
}

// Groups maximal runs of consecutive same-intention vehicles whose gaps stay
// within gap_factor * safe_follow_gap. The queue is ordered front to back;
// each run's head becomes the platoon leader (platoon_id = leader id).
// Returns the number of platoons formed.
int form_platoons(std::span<Vehicle*> lane_queue, const BrakeParams& brakes,
                  double gap_factor);

}  // namespace rowsim
