#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rowsim/safety_zones.hpp"

using namespace rowsim;

namespace {
const BrakeParams kDefaults{};  // rho 1, max 6, min 2
}

TEST_CASE("forbidden area, same intention") {
    CHECK(forbidden_same_intention(10.0, 10.0, kDefaults) == doctest::Approx(10.0));
    CHECK(forbidden_same_intention(0.0, 0.0, kDefaults) == doctest::Approx(0.0));
    CHECK(forbidden_same_intention(10.0, 0.0, kDefaults) == doctest::Approx(0.0));
}

TEST_CASE("forbidden area behind") {
    CHECK(forbidden_rear(10.0, 5.0, kDefaults) == doctest::Approx(0.0));  // 6.25 - 8.33
    CHECK(forbidden_rear(0.0, 5.0, kDefaults) == doctest::Approx(6.25));
    CHECK(forbidden_rear(0.0, 0.0, kDefaults) == doctest::Approx(0.0));
}

TEST_CASE("free area boundary ahead") {
    CHECK(free_boundary_front(10.0, 5.0, kDefaults) == doctest::Approx(395.0 / 12.0));
    CHECK(free_boundary_front(5.0, 10.0, kDefaults) == doctest::Approx(35.0 / 12.0));
    CHECK(free_boundary_front(0.0, 0.0, kDefaults) == doctest::Approx(0.0));
}

TEST_CASE("zone partition") {
    const ZoneLengths z = zone_partition(10.0, 5.0, kDefaults);
    CHECK(z.f_rear == doctest::Approx(0.0));
    CHECK(z.f_front == doctest::Approx(16.25));
    CHECK(z.n_front == doctest::Approx(50.0 / 3.0));
    CHECK(z.f_front + z.n_front == doctest::Approx(free_boundary_front(10.0, 5.0, kDefaults)));

    const ZoneLengths zero = zone_partition(0.0, 0.0, kDefaults);
    CHECK(zero.f_rear == 0.0);
    CHECK(zero.f_front == 0.0);
    CHECK(zero.n_front == 0.0);
}

TEST_CASE("partition consistency over a speed grid") {
    for (double va = 0.0; va <= 15.0; va += 1.0) {
        for (double vb = 0.0; vb <= 15.0; vb += 1.0) {
            const ZoneLengths z = zone_partition(va, vb, kDefaults);
            CHECK(z.f_rear >= 0.0);
            CHECK(z.f_front >= 0.0);
            CHECK(z.n_front >= 0.0);
            CHECK(z.f_front + z.n_front ==
                  doctest::Approx(free_boundary_front(va, vb, kDefaults)).epsilon(1e-12));
        }
    }
}

TEST_CASE("monotonicity in both speeds") {
    auto nondecreasing_b = [](double (*f)(double, double, const BrakeParams&)) {
        for (double va = 0.0; va <= 15.0; va += 1.0)
            for (double vb = 0.0; vb < 15.0; vb += 1.0)
                if (f(va, vb + 1.0, kDefaults) < f(va, vb, kDefaults) - 1e-12) return false;
        return true;
    };
    auto nonincreasing_a = [](double (*f)(double, double, const BrakeParams&)) {
        for (double vb = 0.0; vb <= 15.0; vb += 1.0)
            for (double va = 0.0; va < 15.0; va += 1.0)
                if (f(va + 1.0, vb, kDefaults) > f(va, vb, kDefaults) + 1e-12) return false;
        return true;
    };
    CHECK(nondecreasing_b(forbidden_same_intention));
    CHECK(nondecreasing_b(forbidden_rear));
    CHECK(nonincreasing_a(forbidden_same_intention));
    CHECK(nonincreasing_a(forbidden_rear));
    // the free boundary grows with the priority vehicle's own speed instead
    for (double vb = 0.0; vb <= 15.0; vb += 1.0)
        for (double va = 0.0; va < 15.0; va += 1.0)
            CHECK(free_boundary_front(va + 1.0, vb, kDefaults) >=
                  free_boundary_front(va, vb, kDefaults) - 1e-12);
    for (double va = 0.0; va <= 15.0; va += 1.0)
        for (double vb = 0.0; vb < 15.0; vb += 1.0)
            CHECK(free_boundary_front(va, vb + 1.0, kDefaults) <=
                  free_boundary_front(va, vb, kDefaults) + 1e-12);
}

TEST_CASE("clamp correctness") {
    for (double va = 0.0; va <= 15.0; va += 1.5) {
        for (double vb = 0.0; vb <= 15.0; vb += 1.5) {
            const double raw = vb * kDefaults.rho + vb * vb / 12.0 - va * va / 12.0;
            const double out = forbidden_same_intention(va, vb, kDefaults);
            CHECK(out >= 0.0);
            if (raw <= 0.0) CHECK(out == 0.0);
            else CHECK(out == doctest::Approx(raw));
        }
    }
}

TEST_CASE("zone classification examples") {
    const ZoneLengths z = zone_partition(10.0, 5.0, kDefaults);
    const double len = 3.5;
    const double a_front = 100.0;
    // positions given as bumper-to-bumper distances ahead of A
    auto ahead = [&](double gap) { return a_front + gap + len; };
    CHECK(classify_zone(ahead(5.0), a_front, len, len, z) == Zone::Forbidden);
    CHECK(classify_zone(ahead(20.0), a_front, len, len, z) == Zone::Negotiation);
    CHECK(classify_zone(ahead(40.0), a_front, len, len, z) == Zone::Free);
}

TEST_CASE("zone classification is total and ordered") {
    const double len = 3.5;
    const double a_front = 50.0;
    for (double va : {0.0, 4.0, 8.0, 12.0}) {
        for (double vb : {0.0, 4.0, 8.0, 12.0}) {
            const ZoneLengths z = zone_partition(va, vb, kDefaults);
            // sweep the virtual vehicle from far behind to far ahead
            int phase = 0;  // 0 free-behind, 1 forbidden, 2 negotiation, 3 free-ahead
            bool ordered = true;
            for (double pos = a_front - 120.0; pos <= a_front + 160.0; pos += 0.01) {
                const Zone zone = classify_zone(pos, a_front, len, len, z);
                int p = -1;
                if (zone == Zone::Free) p = (pos < a_front) ? 0 : 3;
                else if (zone == Zone::Forbidden) p = 1;
                else p = 2;
                if (p < phase) ordered = false;
                if (p > phase) {
                    // the body band is always forbidden, and negotiation may be
                    // skipped only when it has zero width
                    if (!(p - phase == 1 || (phase == 1 && p == 3 && z.n_front == 0.0)))
                        ordered = false;
                    phase = p;
                }
            }
            CHECK(ordered);
            CHECK(phase == 3);
        }
    }
}

TEST_CASE("free-ahead classification is kinematically sound") {
    // if the virtual vehicle sits in the free area ahead, the priority vehicle
    // braking gently after its response time never reaches it even when the
    // other brakes hard immediately
    const double len = 3.5;
    for (double va = 0.0; va <= 15.0; va += 2.5) {
        for (double vb = 0.0; vb <= 15.0; vb += 2.5) {
            const ZoneLengths z = zone_partition(va, vb, kDefaults);
            const double boundary = z.f_front + z.n_front;
            for (double extra : {0.02, 0.5, 3.0}) {
                const double gap = boundary + extra;
                const double a_front = 0.0;
                REQUIRE(classify_zone(a_front + gap + len, a_front, len, len, z) ==
                        Zone::Free);
                CHECK(oracle::min_gap_while_braking(gap, va, vb, kDefaults) >= -1e-9);
            }
        }
    }
}

TEST_CASE("safe following gap") {
    CHECK(safe_follow_gap(10.0, 10.0, kDefaults) == doctest::Approx(10.0));
    CHECK(safe_follow_gap(0.0, 10.0, kDefaults) == doctest::Approx(0.0));
    CHECK(safe_follow_gap(10.0, 0.0, kDefaults) == doctest::Approx(10.0 + 100.0 / 12.0));
}
