#pragma once

#include <algorithm>

namespace rowsim {

// Braking capabilities used by the zone formulas. "a" parameters belong to the
// priority vehicle, "b" parameters to the other vehicle.
struct BrakeParams {
    double rho = 1.0;          // response time, s
    double a_max_brake = 6.0;  // m/s^2
    double a_min_brake = 2.0;
    double b_max_brake = 6.0;
    double b_min_brake = 2.0;
};

// Forbidden-area length for two vehicles with the same drive intention:
// [v_b*rho + v_b^2/(2 b_max) - v_a^2/(2 a_max)]+
inline double forbidden_same_intention(double v_a, double v_b, const BrakeParams& p) {
    const double raw = v_b * p.rho + v_b * v_b / (2.0 * p.b_max_brake) -
                       v_a * v_a / (2.0 * p.a_max_brake);
    return std::max(0.0, raw);
}

// Forbidden-area length behind the priority vehicle:
// [v_b^2/(2 b_min) - v_a^2/(2 a_max)]+
inline double forbidden_rear(double v_a, double v_b, const BrakeParams& p) {
    const double raw = v_b * v_b / (2.0 * p.b_min_brake) -
                       v_a * v_a / (2.0 * p.a_max_brake);
    return std::max(0.0, raw);
}

// Distance from the priority vehicle's front point to the free-area boundary:
// [v_a*rho + v_a^2/(2 a_min) - v_b^2/(2 b_max)]+
inline double free_boundary_front(double v_a, double v_b, const BrakeParams& p) {
    const double raw = v_a * p.rho + v_a * v_a / (2.0 * p.a_min_brake) -
                       v_b * v_b / (2.0 * p.b_max_brake);
    return std::max(0.0, raw);
}

struct ZoneLengths {
    double f_rear = 0.0;   // forbidden area behind
    double f_front = 0.0;  // forbidden area ahead
    double n_front = 0.0;  // negotiation area beyond f_front
};

// The forward split assumes the priority vehicle's hardest braking for the
// inner (forbidden) boundary and its gentlest braking for the outer (free)
// boundary; the negotiation area is the band between them.
inline ZoneLengths zone_partition(double v_a, double v_b, const BrakeParams& p) {
    ZoneLengths z;
    z.f_rear = forbidden_rear(v_a, v_b, p);
    const double boundary = free_boundary_front(v_a, v_b, p);
    const double inner = v_a * p.rho + v_a * v_a / (2.0 * p.a_max_brake) -
                         v_b * v_b / (2.0 * p.b_max_brake);
    z.f_front = std::clamp(inner, 0.0, boundary);
    z.n_front = boundary - z.f_front;
    return z;
}

enum class Zone { Forbidden, Negotiation, Free };

inline const char* to_string(Zone z) {
    switch (z) {
        case Zone::Forbidden: return "forbidden";
        case Zone::Negotiation: return "negotiation";
        case Zone::Free: return "free";
    }
    return "?";
}

// Classify the virtual vehicle's position relative to the priority vehicle.
// Positions are front-bumper arc lengths on the priority vehicle's path;
// zone distances are measured bumper to bumper.
inline Zone classify_zone(double virtual_b_front, double a_front, double len_a,
                          double len_b, const ZoneLengths& z) {
    const double gap_front = (virtual_b_front - len_b) - a_front;
    if (gap_front > z.f_front + z.n_front) return Zone::Free;
    if (gap_front > z.f_front) return Zone::Negotiation;
    const double gap_rear = (a_front - len_a) - virtual_b_front;
    if (gap_rear > z.f_rear) return Zone::Free;
    return Zone::Forbidden;
}

// Minimum bumper-to-bumper gap for longitudinal following; the Eq.-(1) form
// reused with the leader as priority vehicle.
inline double safe_follow_gap(double v_follower, double v_leader, const BrakeParams& p) {
    return forbidden_same_intention(v_leader, v_follower, p);
}

}  // namespace rowsim
