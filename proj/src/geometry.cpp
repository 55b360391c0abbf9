#include "rowsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rowsim {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_positive(double angle) {
    double a = std::fmod(angle, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a;
}

Vec2 rot90cw(Vec2 p) { return {p.y, -p.x}; }

Vec2 rot_k(Vec2 p, int k) {
    for (int i = 0; i < k; ++i) p = rot90cw(p);
    return p;
}

}  // namespace

const char* to_string(Intention i) {
    switch (i) {
        case Intention::Straight: return "straight";
        case Intention::Left: return "left";
        case Intention::Right: return "right";
    }
    return "?";
}

Intention intention_from_string(const std::string& s) {
    if (s == "straight" || s == "s" || s == "S") return Intention::Straight;
    if (s == "left" || s == "l" || s == "L") return Intention::Left;
    if (s == "right" || s == "r" || s == "R") return Intention::Right;
    throw std::invalid_argument("unknown intention: " + s);
}

const char* to_string(ConflictCase c) {
    switch (c) {
        case ConflictCase::None: return "none";
        case ConflictCase::A: return "a";
        case ConflictCase::B: return "b";
        case ConflictCase::C: return "c";
        case ConflictCase::D: return "d";
        case ConflictCase::E: return "e";
        case ConflictCase::F: return "f";
        case ConflictCase::G: return "g";
    }
    return "?";
}

ConflictCase classify_conflict(int lane_a, Intention ia, int lane_b, Intention ib) {
    const int ba = branch_of_entry_lane(lane_a);
    const int bb = branch_of_entry_lane(lane_b);
    if (ba == bb) return ConflictCase::None;
    const int d = (bb - ba + 4) % 4;  // 1: b is a's clockwise neighbor, 3: counterclockwise
    using I = Intention;
    if (ia == I::Straight && ib == I::Straight)
        return d == 2 ? ConflictCase::None : ConflictCase::A;
    if (ia == I::Straight && ib == I::Right)
        return d == 3 ? ConflictCase::B : ConflictCase::None;
    if (ia == I::Right && ib == I::Straight)
        return d == 1 ? ConflictCase::B : ConflictCase::None;
    if (ia == I::Straight && ib == I::Left) {
        if (d == 1) return ConflictCase::C;
        if (d == 2) return ConflictCase::D;
        return ConflictCase::E;
    }
    if (ia == I::Left && ib == I::Straight) {
        if (d == 3) return ConflictCase::C;
        if (d == 2) return ConflictCase::D;
        return ConflictCase::E;
    }
    if (ia == I::Left && ib == I::Left) return ConflictCase::F;
    if ((ia == I::Left && ib == I::Right) || (ia == I::Right && ib == I::Left))
        return d == 2 ? ConflictCase::G : ConflictCase::None;
    return ConflictCase::None;  // right/right never overlaps
}

Vec2 Segment::point_at(double u) const {
    u = std::clamp(u, 0.0, length);
    if (kind == Kind::Line) {
        const double t = length > 0.0 ? u / length : 0.0;
        return {p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)};
    }
    const double th = ang0 + (sweep >= 0.0 ? u / radius : -u / radius);
    return {center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
}

Vec2 Segment::heading_at(double u) const {
    if (kind == Kind::Line) {
        Vec2 d = p1 - p0;
        const double n = norm(d);
        return n > 0.0 ? (1.0 / n) * d : Vec2{1.0, 0.0};
    }
    const double th = ang0 + (sweep >= 0.0 ? u / radius : -u / radius);
    if (sweep >= 0.0) return {-std::sin(th), std::cos(th)};
    return {std::sin(th), -std::cos(th)};
}

Vec2 PathGeom::position(double s) const {
    for (const Segment& seg : segments) {
        if (s <= seg.s0 + seg.length) return seg.point_at(s - seg.s0);
    }
    return segments.back().point_at(segments.back().length);
}

Vec2 PathGeom::heading(double s) const {
    for (const Segment& seg : segments) {
        if (s <= seg.s0 + seg.length) return seg.heading_at(s - seg.s0);
    }
    return segments.back().heading_at(segments.back().length);
}

IntersectionLayout::IntersectionLayout(const LayoutParams& params) : params_(params) {
    if (params_.lane_width <= 0.0)
        throw std::invalid_argument("lane_width must be positive");
    if (params_.control_radius <= 0.0 || params_.spawn_distance <= 0.0)
        throw std::invalid_argument("layout distances must be positive");
    const double extent = params_.lane_width * std::numbers::sqrt2;
    if (params_.control_radius <= extent)
        throw std::invalid_argument("control_radius must exceed the junction extent");
    if (params_.spawn_distance <= params_.control_radius)
        throw std::invalid_argument("spawn_distance must exceed control_radius");
    build_paths();
    build_conflicts();
}

void IntersectionLayout::build_paths() {
    const double w = params_.lane_width;       // junction half width
    const double off = 0.5 * w;                // lane center offset from road axis
    const double spawn = params_.spawn_distance;
    const double cr = params_.control_radius;
    const double r_right = w - off;            // 1.5 for the default geometry
    const double r_left = w + off;             // 4.5

    paths_.clear();
    paths_.reserve(kPathCount);
    for (int branch = 0; branch < kBranchCount; ++branch) {
        for (Intention intent :
             {Intention::Straight, Intention::Left, Intention::Right}) {
            PathGeom p;
            p.lane = entry_lane_of_branch(branch);
            p.intention = intent;
            p.branch = branch;

            // Built in the north-branch frame, then rotated into place.
            Segment approach;
            approach.kind = Segment::Kind::Line;
            approach.p0 = {-off, spawn};
            approach.p1 = {-off, w};

            Segment mid;
            Segment exit_leg;
            exit_leg.kind = Segment::Kind::Line;
            int exit_branch = 0;
            if (intent == Intention::Straight) {
                mid.kind = Segment::Kind::Line;
                mid.p0 = {-off, w};
                mid.p1 = {-off, -w};
                exit_leg.p0 = {-off, -w};
                exit_leg.p1 = {-off, -cr};
                exit_branch = (branch + 2) % 4;
            } else if (intent == Intention::Left) {
                mid.kind = Segment::Kind::Arc;
                mid.center = {r_left - off, r_left - off};
                mid.radius = r_left;
                mid.ang0 = kPi;
                mid.sweep = 0.5 * kPi;
                exit_leg.p0 = {w, -off};
                exit_leg.p1 = {cr, -off};
                exit_branch = (branch + 1) % 4;
            } else {
                mid.kind = Segment::Kind::Arc;
                mid.center = {-off - r_right, off + r_right};
                mid.radius = r_right;
                mid.ang0 = 0.0;
                mid.sweep = -0.5 * kPi;
                exit_leg.p0 = {-w, off};
                exit_leg.p1 = {-cr, off};
                exit_branch = (branch + 3) % 4;
            }
            if (mid.kind == Segment::Kind::Line) {
                mid.length = norm(mid.p1 - mid.p0);
            } else {
                mid.length = std::abs(mid.sweep) * mid.radius;
            }
            approach.length = norm(approach.p1 - approach.p0);
            exit_leg.length = norm(exit_leg.p1 - exit_leg.p0);

            // rotate everything into the branch frame
            auto rotate_seg = [&](Segment s) {
                s.p0 = rot_k(s.p0, branch);
                s.p1 = rot_k(s.p1, branch);
                s.center = rot_k(s.center, branch);
                s.ang0 -= branch * 0.5 * kPi;
                return s;
            };
            approach = rotate_seg(approach);
            mid = rotate_seg(mid);
            exit_leg = rotate_seg(exit_leg);

            approach.s0 = 0.0;
            mid.s0 = approach.length;
            exit_leg.s0 = mid.s0 + mid.length;
            p.segments = {approach, mid, exit_leg};
            p.length = exit_leg.s0 + exit_leg.length;
            p.s_junction_entry = mid.s0;
            p.s_junction_exit = exit_leg.s0;
            p.s_exit_lane_start = exit_leg.s0;
            p.exit_lane = 2 * exit_branch + 2;
            paths_.push_back(p);
        }
    }
}

namespace {

struct Hit {
    double ua;  // local arc length on segment a
    double ub;  // local arc length on segment b
};

constexpr double kRangeEps = 1e-9;

bool in_range(double u, double len) { return u >= -kRangeEps && u <= len + kRangeEps; }

// local arc length of world angle th on an arc segment, if within the sweep
bool arc_local(const Segment& arc, double th, double* out) {
    const double sgn = arc.sweep >= 0.0 ? 1.0 : -1.0;
    double d = wrap_positive(sgn * (th - arc.ang0));
    // tolerate endpoint wrap
    if (d > std::abs(arc.sweep) + 1e-9) {
        if (d > 2.0 * kPi - 1e-9) d = 0.0;
        else return false;
    }
    *out = std::min(d, std::abs(arc.sweep)) * arc.radius;
    return true;
}

std::vector<Hit> intersect_line_line(const Segment& a, const Segment& b) {
    const Vec2 da = a.p1 - a.p0;
    const Vec2 db = b.p1 - b.p0;
    const double den = da.x * db.y - da.y * db.x;
    if (std::abs(den) < 1e-12) return {};
    const Vec2 w = b.p0 - a.p0;
    const double ta = (w.x * db.y - w.y * db.x) / den;
    const double tb = (w.x * da.y - w.y * da.x) / den;
    const double ua = ta * a.length;
    const double ub = tb * b.length;
    if (!in_range(ua, a.length) || !in_range(ub, b.length)) return {};
    return {{ua, ub}};
}

std::vector<Hit> intersect_line_arc(const Segment& line, const Segment& arc,
                                    bool line_is_a) {
    const Vec2 d = (1.0 / line.length) * (line.p1 - line.p0);
    const Vec2 f = line.p0 - arc.center;
    const double b = 2.0 * dot(f, d);
    const double c = dot(f, f) - arc.radius * arc.radius;
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0) return {};
    const double sq = std::sqrt(disc);
    std::vector<Hit> hits;
    for (double u : {(-b - sq) / 2.0, (-b + sq) / 2.0}) {
        if (!in_range(u, line.length)) continue;
        const Vec2 p = line.point_at(u);
        const double th = std::atan2(p.y - arc.center.y, p.x - arc.center.x);
        double v;
        if (!arc_local(arc, th, &v)) continue;
        hits.push_back(line_is_a ? Hit{u, v} : Hit{v, u});
    }
    return hits;
}

std::vector<Hit> intersect_arc_arc(const Segment& a, const Segment& b) {
    const Vec2 d = b.center - a.center;
    const double dist = norm(d);
    if (dist < 1e-12) return {};  // concentric
    const double ra = a.radius, rb = b.radius;
    if (dist > ra + rb || dist < std::abs(ra - rb)) return {};
    const double x = (dist * dist + ra * ra - rb * rb) / (2.0 * dist);
    const double h2 = ra * ra - x * x;
    if (h2 < 0.0) return {};
    const double h = std::sqrt(std::max(0.0, h2));
    const Vec2 e = (1.0 / dist) * d;
    const Vec2 n{-e.y, e.x};
    std::vector<Hit> hits;
    for (double sgn : {+1.0, -1.0}) {
        const Vec2 p = a.center + x * e + (sgn * h) * n;
        const double tha = std::atan2(p.y - a.center.y, p.x - a.center.x);
        const double thb = std::atan2(p.y - b.center.y, p.x - b.center.x);
        double ua, ub;
        if (!arc_local(a, tha, &ua) || !arc_local(b, thb, &ub)) continue;
        hits.push_back({ua, ub});
        if (h < 1e-12) break;  // tangent, single point
    }
    return hits;
}

std::vector<Hit> intersect_segments(const Segment& a, const Segment& b) {
    using K = Segment::Kind;
    if (a.kind == K::Line && b.kind == K::Line) return intersect_line_line(a, b);
    if (a.kind == K::Line && b.kind == K::Arc) return intersect_line_arc(a, b, true);
    if (a.kind == K::Arc && b.kind == K::Line) return intersect_line_arc(b, a, false);
    return intersect_arc_arc(a, b);
}

}  // namespace

void IntersectionLayout::build_conflicts() {
    for (int i = 0; i < kPathCount; ++i) {
        for (int j = 0; j < kPathCount; ++j) {
            ConflictPair& out = table_[i][j];
            out = ConflictPair{};
            if (i == j) continue;
            const PathGeom& a = paths_[i];
            const PathGeom& b = paths_[j];
            if (a.lane == b.lane) continue;
            const ConflictCase kind =
                classify_conflict(a.lane, a.intention, b.lane, b.intention);
            if (kind == ConflictCase::None) continue;
            out.kind = kind;
            if (a.exit_lane == b.exit_lane) {
                // merging pair: the overlap point is where both join the exit lane
                out.merging = true;
                out.s_a_star = a.s_junction_exit;
                out.s_b_star = b.s_junction_exit;
                continue;
            }
            const Segment& ja = a.segments[1];
            const Segment& jb = b.segments[1];
            std::vector<Hit> hits = intersect_segments(ja, jb);
            if (hits.empty())
                throw std::logic_error("conflict classification disagrees with geometry");
            std::sort(hits.begin(), hits.end(),
                      [](const Hit& l, const Hit& r) { return l.ua < r.ua; });
            out.s_a_star = ja.s0 + hits.front().ua;
            out.s_b_star = jb.s0 + hits.front().ub;
        }
    }
}

IntersectionLayout build_layout(const LayoutParams& params) {
    return IntersectionLayout(params);
}

}  // namespace rowsim
