#pragma once

// Test-only oracles, independent of the library's analytic paths.

#include <cmath>
#include <optional>
#include <utility>

#include "rowsim/geometry.hpp"
#include "rowsim/safety_zones.hpp"

namespace rowsim::oracle {

// distance from a point to a path, plus the closest arc length on the path
inline std::pair<double, double> point_to_path(const Vec2& p, const PathGeom& path) {
    double best = 1e18, best_s = 0.0;
    for (const Segment& seg : path.segments) {
        if (seg.kind == Segment::Kind::Line) {
            const Vec2 d = seg.p1 - seg.p0;
            const double len2 = dot(d, d);
            double t = len2 > 0 ? dot(p - seg.p0, d) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const Vec2 q = seg.p0 + t * d;
            const double dist = norm(p - q);
            if (dist < best) {
                best = dist;
                best_s = seg.s0 + t * seg.length;
            }
        } else {
            const Vec2 rel = p - seg.center;
            const double r = norm(rel);
            const double th = std::atan2(rel.y, rel.x);
            const double sgn = seg.sweep >= 0.0 ? 1.0 : -1.0;
            double local = sgn * (th - seg.ang0);
            local = std::fmod(local, 2.0 * M_PI);
            if (local < 0) local += 2.0 * M_PI;
            if (local <= std::abs(seg.sweep)) {
                const double dist = std::abs(r - seg.radius);
                if (dist < best) {
                    best = dist;
                    best_s = seg.s0 + local * seg.radius;
                }
            }
            for (double u : {0.0, seg.length}) {
                const Vec2 q = seg.point_at(u);
                const double dist = norm(p - q);
                if (dist < best) {
                    best = dist;
                    best_s = seg.s0 + u;
                }
            }
        }
    }
    return {best, best_s};
}

// Brute-force first-overlap search: 1 cm sampling along A inside the junction
// window, refined by bisection (merges) or golden-section (crossings).
inline std::optional<std::pair<double, double>> first_overlap(const PathGeom& a,
                                                              const PathGeom& b) {
    const double s0 = a.s_junction_entry - 0.2;
    const double s1 = a.s_junction_exit + 0.2;
    const double step = 0.01;
    const int n = static_cast<int>((s1 - s0) / step) + 1;
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i)
        d[i] = point_to_path(a.position(s0 + i * step), b).first;

    auto dist_at = [&](double s) { return point_to_path(a.position(s), b).first; };

    for (int i = 1; i + 1 < n; ++i) {
        if (d[i] >= 0.02) continue;
        const bool local_min = d[i] <= d[i - 1] && d[i] <= d[i + 1] + 1e-12;
        if (!local_min && d[i] >= 1e-6) continue;
        double s_star;
        if (d[i] < 1e-6) {
            // tangential merge: bisect for the first near-zero point
            double lo = s0 + (i - 1) * step, hi = s0 + i * step;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (dist_at(mid) < 1e-6) hi = mid;
                else lo = mid;
            }
            s_star = hi;
        } else {
            // transversal crossing: golden-section minimum
            double lo = s0 + (i - 1) * step, hi = s0 + (i + 1) * step;
            const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
            double f1 = dist_at(x1), f2 = dist_at(x2);
            for (int it = 0; it < 80; ++it) {
                if (f1 < f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = dist_at(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = dist_at(x2);
                }
            }
            s_star = 0.5 * (lo + hi);
            if (dist_at(s_star) > 1e-4) continue;  // shallow approach, not an overlap
        }
        return std::make_pair(s_star, point_to_path(a.position(s_star), b).second);
    }
    return std::nullopt;
}

// 1 ms kinematic simulation of the free-area soundness claim: the priority
// vehicle brakes at its minimum rate after the response time, the other
// brakes hard immediately; their virtual gap must never become negative.
inline double min_gap_while_braking(double gap0, double v_a, double v_b,
                                    const BrakeParams& p) {
    double xa = 0.0, xb = gap0;
    double va = v_a, vb = v_b;
    double t = 0.0, min_gap = gap0;
    const double dt = 1e-3;
    while (va > 0.0 || vb > 0.0) {
        if (t >= p.rho) va = std::max(0.0, va - p.a_min_brake * dt);
        vb = std::max(0.0, vb - p.b_max_brake * dt);
        xa += va * dt;
        xb += vb * dt;
        t += dt;
        min_gap = std::min(min_gap, xb - xa);
        if (t > 120.0) break;
    }
    return min_gap;
}

}  // namespace rowsim::oracle
