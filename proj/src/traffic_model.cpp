#include "rowsim/traffic_model.hpp"

#include <algorithm>
#include <cmath>

#include "rowsim/rng.hpp"

namespace rowsim {

std::vector<ArrivalEvent> gen_arrivals(double lambda, double duration,
                                       std::uint64_t seed, int lane,
                                       double ratio_left, double ratio_right,
                                       double ratio_straight) {
    std::vector<ArrivalEvent> events;
    if (lambda <= 0.0 || duration <= 0.0) return events;
    Rng rng(seed, 0x4c414e45ULL + static_cast<std::uint64_t>(lane));
    const double mean_gap = 3600.0 / lambda;
    const double total = ratio_left + ratio_right + ratio_straight;
    const double p_left = ratio_left / total;
    const double p_right = ratio_right / total;
    double t = 0.0;
    for (;;) {
        t += rng.exponential(mean_gap);
        if (t > duration) break;
        const double u = rng.u01();
        Intention intent = Intention::Straight;
        if (u < p_left) intent = Intention::Left;
        else if (u < p_left + p_right) intent = Intention::Right;
        events.push_back({t, lane, intent});
    }
    return events;
}

Vehicle kinematic_step(Vehicle vehicle, double accel, double dt, double speed_limit) {
    const double v0 = vehicle.v;
    double v1 = v0 + accel * dt;
    v1 = std::clamp(v1, 0.0, speed_limit);
    vehicle.s += 0.5 * (v0 + v1) * dt;
    vehicle.v = v1;
    return vehicle;
}

int form_platoons(std::span<Vehicle*> lane_queue, const BrakeParams& brakes,
                  double gap_factor) {
    int platoons = 0;
    const Vehicle* head = nullptr;
    for (std::size_t i = 0; i < lane_queue.size(); ++i) {
        Vehicle* v = lane_queue[i];
        bool joins = false;
        if (head != nullptr && i > 0) {
            const Vehicle* prev = lane_queue[i - 1];
            const double gap = prev->rear() - v->s;
            const double threshold =
                gap_factor * safe_follow_gap(v->v, prev->v, brakes);
            joins = v->intention == prev->intention && gap <= threshold;
        }
        if (!joins) {
            v->platoon_id = v->id;
            head = v;
            ++platoons;
        } else {
            v->platoon_id = head->id;
        }
    }
    return platoons;
}

}  // namespace rowsim
