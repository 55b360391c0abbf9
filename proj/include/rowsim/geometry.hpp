#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rowsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

enum class Intention { Straight, Left, Right };

const char* to_string(Intention i);
Intention intention_from_string(const std::string& s);

// Entry lanes are odd (1 north, 3 east, 5 south, 7 west, labeled clockwise);
// exit lanes are the following even numbers.
inline int branch_of_entry_lane(int lane) {
    if (lane < 1 || lane > 7 || lane % 2 == 0)
        throw std::invalid_argument("not an entry lane: " + std::to_string(lane));
    return (lane - 1) / 2;
}
inline int entry_lane_of_branch(int branch) { return 2 * branch + 1; }

// Conflict taxonomy for two-vehicle junction encounters, rotation invariant.
//   A: straight x straight, perpendicular branches (crossing)
//   B: straight x right turn merging into the straight path's exit lane
//   C: straight x left turn merging into the straight path's exit lane
//   D: straight x left turn from the opposite branch (crossing)
//   E: straight x left turn from the adjacent branch (crossing)
//   F: left x left (crossing; opposite-branch pairs cross twice)
//   G: left x right from opposite branches merging into one exit lane
enum class ConflictCase { None, A, B, C, D, E, F, G };

const char* to_string(ConflictCase c);

// Pure classification from lane/intention labels; total over distinct entry lanes.
ConflictCase classify_conflict(int lane_a, Intention ia, int lane_b, Intention ib);

struct ConflictPair {
    ConflictCase kind = ConflictCase::None;
    double s_a_star = 0.0;  // arc length of the overlap point on A's path
    double s_b_star = 0.0;  // same on B's path
    bool merging = false;   // overlap is a shared-exit merge point
};

// Position on B's path -> equivalent position on A's path, preserving the
// remaining distance to the trajectory overlap point.
inline double map_virtual(double pos_b, const ConflictPair& pair) {
    return pair.s_a_star - (pair.s_b_star - pos_b);
}

struct Segment {
    enum class Kind { Line, Arc };
    Kind kind = Kind::Line;
    Vec2 p0, p1;       // line endpoints
    Vec2 center;       // arc center
    double radius = 0.0;
    double ang0 = 0.0;   // arc start angle (radians)
    double sweep = 0.0;  // signed sweep; >0 counterclockwise
    double length = 0.0;
    double s0 = 0.0;     // arc length of the segment start along the path

    Vec2 point_at(double u) const;     // u in [0, length]
    Vec2 heading_at(double u) const;   // unit tangent
};

struct LayoutParams {
    double lane_width = 3.0;       // m
    double control_radius = 100.0; // m, from junction center
    double spawn_distance = 200.0; // m, from junction center along the lane
};

struct PathGeom {
    int lane = 1;               // entry lane id
    Intention intention = Intention::Straight;
    int branch = 0;             // 0 N, 1 E, 2 S, 3 W
    int exit_lane = 2;          // even exit lane id
    std::array<Segment, 3> segments;  // approach, junction piece, exit leg
    double length = 0.0;
    double s_junction_entry = 0.0;  // stop line / junction boundary
    double s_junction_exit = 0.0;
    double s_exit_lane_start = 0.0; // == s_junction_exit (exit leg starts at the boundary)

    Vec2 position(double s) const;
    Vec2 heading(double s) const;
    bool turning_at(double s) const {
        return intention != Intention::Straight && s >= s_junction_entry &&
               s <= s_junction_exit;
    }
    // distance from the junction boundary point measured along the shared exit lane
    double exit_lane_pos(double s) const { return s - s_exit_lane_start; }
};

class IntersectionLayout {
public:
    static constexpr int kBranchCount = 4;
    static constexpr int kLaneCount = 8;
    static constexpr int kPathCount = 12;

    explicit IntersectionLayout(const LayoutParams& params = {});

    const LayoutParams& params() const { return params_; }
    double junction_half_width() const { return params_.lane_width; }
    double control_zone_entry_s() const {
        return params_.spawn_distance - params_.control_radius;
    }

    static int path_index(int lane, Intention intention) {
        return branch_of_entry_lane(lane) * 3 + static_cast<int>(intention);
    }
    const PathGeom& path(int lane, Intention intention) const {
        return paths_[path_index(lane, intention)];
    }
    const PathGeom& path_at(int index) const { return paths_.at(index); }
    const std::vector<PathGeom>& paths() const { return paths_; }

    // Precomputed overlap table, ordered: (a, b) uses the first crossing along a.
    const ConflictPair& conflict(const PathGeom& a, const PathGeom& b) const {
        return table_[index_of(a)][index_of(b)];
    }
    const ConflictPair& conflict_by_index(int a, int b) const { return table_[a][b]; }

private:
    int index_of(const PathGeom& p) const { return path_index(p.lane, p.intention); }
    void build_paths();
    void build_conflicts();

    LayoutParams params_;
    std::vector<PathGeom> paths_;
    std::array<std::array<ConflictPair, kPathCount>, kPathCount> table_{};
};

IntersectionLayout build_layout(const LayoutParams& params = {});

}  // namespace rowsim
