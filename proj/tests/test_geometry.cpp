#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "rowsim/geometry.hpp"

using namespace rowsim;

namespace {
const IntersectionLayout& default_layout() {
    static IntersectionLayout layout{LayoutParams{}};
    return layout;
}
}  // namespace

TEST_CASE("layout defaults and invariants") {
    const IntersectionLayout& layout = default_layout();
    CHECK(layout.params().control_radius == 100.0);
    CHECK(layout.params().lane_width == 3.0);
    CHECK(layout.junction_half_width() == 3.0);
    CHECK(layout.paths().size() == 12);

    std::set<std::pair<int, int>> keys;
    for (const PathGeom& p : layout.paths()) {
        keys.insert({p.lane, static_cast<int>(p.intention)});
        // spawn sits spawn_distance from the center, the boundary lane_width out
        CHECK(p.s_junction_entry ==
              doctest::Approx(layout.params().spawn_distance - layout.junction_half_width())
                  .epsilon(1e-12));
        CHECK(p.s_junction_exit > p.s_junction_entry);
        CHECK(p.length > p.s_junction_exit);
        // arc length parametrization is consistent with the geometry
        const Vec2 at_entry = p.position(p.s_junction_entry);
        CHECK(std::max(std::abs(at_entry.x), std::abs(at_entry.y)) ==
              doctest::Approx(layout.junction_half_width()).epsilon(1e-9));
    }
    CHECK(keys.size() == 12);

    // crossing lengths for the three intentions
    const PathGeom& straight = layout.path(1, Intention::Straight);
    const PathGeom& left = layout.path(1, Intention::Left);
    const PathGeom& right = layout.path(1, Intention::Right);
    CHECK(straight.s_junction_exit - straight.s_junction_entry == doctest::Approx(6.0));
    CHECK(left.s_junction_exit - left.s_junction_entry ==
          doctest::Approx(4.5 * M_PI / 2.0));
    CHECK(right.s_junction_exit - right.s_junction_entry ==
          doctest::Approx(1.5 * M_PI / 2.0));
}

TEST_CASE("layout rejects bad parameters") {
    LayoutParams bad;
    bad.lane_width = -1.0;
    CHECK_THROWS_AS(build_layout(bad), std::invalid_argument);
    bad = LayoutParams{};
    bad.control_radius = 2.0;  // inside the junction
    CHECK_THROWS_AS(build_layout(bad), std::invalid_argument);
    bad = LayoutParams{};
    bad.spawn_distance = 50.0;  // inside the control zone
    CHECK_THROWS_AS(build_layout(bad), std::invalid_argument);
}

TEST_CASE("conflict classification examples") {
    // perpendicular straights
    CHECK(classify_conflict(1, Intention::Straight, 3, Intention::Straight) ==
          ConflictCase::A);
    // straight and right-turner merging into the same exit
    CHECK(classify_conflict(1, Intention::Straight, 7, Intention::Right) ==
          ConflictCase::B);
    // opposite right turns never meet
    CHECK(classify_conflict(1, Intention::Right, 5, Intention::Right) ==
          ConflictCase::None);
    // opposite straights pass side by side
    CHECK(classify_conflict(1, Intention::Straight, 5, Intention::Straight) ==
          ConflictCase::None);
}

TEST_CASE("conflict classification is rotation invariant and symmetric") {
    const Intention intents[] = {Intention::Straight, Intention::Left, Intention::Right};
    for (int la = 1; la <= 7; la += 2) {
        for (int lb = 1; lb <= 7; lb += 2) {
            if (la == lb) continue;
            for (Intention ia : intents) {
                for (Intention ib : intents) {
                    const ConflictCase base = classify_conflict(la, ia, lb, ib);
                    CHECK(classify_conflict(lb, ib, la, ia) == base);
                    for (int rot = 1; rot < 4; ++rot) {
                        const int ra = ((la - 1) / 2 + rot) % 4 * 2 + 1;
                        const int rb = ((lb - 1) / 2 + rot) % 4 * 2 + 1;
                        CHECK(classify_conflict(ra, ia, rb, ib) == base);
                    }
                }
            }
        }
    }
}

TEST_CASE("conflict points match the sampling oracle within 5 cm") {
    const IntersectionLayout& layout = default_layout();
    for (const PathGeom& a : layout.paths()) {
        for (const PathGeom& b : layout.paths()) {
            if (a.lane == b.lane) continue;
            const ConflictPair& pair = layout.conflict(a, b);
            const auto found = oracle::first_overlap(a, b);
            if (pair.kind == ConflictCase::None) {
                CHECK_FALSE(found.has_value());
                continue;
            }
            REQUIRE_MESSAGE(found.has_value(),
                            "expected overlap for lanes " << a.lane << "/" << b.lane);
            CHECK(std::abs(found->first - pair.s_a_star) < 0.05);
            CHECK(std::abs(found->second - pair.s_b_star) < 0.05);
            // stars stay within each path's junction traversal
            CHECK(pair.s_a_star >= a.s_junction_entry - 1e-9);
            CHECK(pair.s_a_star <= a.s_junction_exit + 1e-9);
            CHECK(pair.s_b_star >= b.s_junction_entry - 1e-9);
            CHECK(pair.s_b_star <= b.s_junction_exit + 1e-9);
        }
    }
}

TEST_CASE("conflict point positions for the anchored cases") {
    const IntersectionLayout& layout = default_layout();
    const PathGeom& ns = layout.path(1, Intention::Straight);
    const PathGeom& es = layout.path(3, Intention::Straight);
    const ConflictPair& cross = layout.conflict(ns, es);
    CHECK(cross.kind == ConflictCase::A);
    CHECK_FALSE(cross.merging);
    // the crossing of the two lane center lines
    const Vec2 p = ns.position(cross.s_a_star);
    CHECK(p.x == doctest::Approx(-1.5).epsilon(1e-9));
    CHECK(p.y == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(cross.s_a_star == doctest::Approx(198.5));
    CHECK(cross.s_b_star == doctest::Approx(201.5));

    const PathGeom& wr = layout.path(7, Intention::Right);
    const ConflictPair& merge = layout.conflict(ns, wr);
    CHECK(merge.kind == ConflictCase::B);
    CHECK(merge.merging);
    // merging pairs overlap where both join the exit lane
    const Vec2 m = ns.position(merge.s_a_star);
    CHECK(m.x == doctest::Approx(-1.5).epsilon(1e-9));
    CHECK(m.y == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(merge.s_a_star == doctest::Approx(203.0));
    CHECK(merge.s_b_star == doctest::Approx(197.0 + 1.5 * M_PI / 2.0));
}

TEST_CASE("virtual vehicle mapping") {
    ConflictPair pair;
    pair.kind = ConflictCase::A;
    pair.s_a_star = 50.0;
    pair.s_b_star = 70.0;
    // B 20 m before the overlap point
    CHECK(map_virtual(50.0, pair) == doctest::Approx(30.0));
    // B exactly at the overlap point
    CHECK(map_virtual(70.0, pair) == doctest::Approx(50.0));
    // B 10 m past the overlap point
    CHECK(map_virtual(80.0, pair) == doctest::Approx(60.0));
    // distance to the overlap is preserved for any position
    for (double pos = -25.0; pos <= 120.0; pos += 7.3) {
        const double mapped = map_virtual(pos, pair);
        CHECK(pair.s_a_star - mapped == doctest::Approx(pair.s_b_star - pos));
    }
}

TEST_CASE("exit lanes and path headings are consistent") {
    const IntersectionLayout& layout = default_layout();
    for (const PathGeom& p : layout.paths()) {
        // heading at the end points outward, away from the junction
        const Vec2 end = p.position(p.length);
        const Vec2 h = p.heading(p.length);
        CHECK(dot(end, h) > 0.0);
        CHECK(norm(end) == doctest::Approx(layout.params().control_radius).epsilon(0.05));
    }
}
