#include <doctest.h>

#include <cmath>

#include "rl/bounds.hpp"
#include "rl/metrics.hpp"
#include "rl/rng.hpp"

using namespace rl;

namespace {
constexpr double kPi = 3.14159265358979323846;

// high-precision phi oracle via long double
long double phi_oracle(long double t) { return std::asin(2.0L * t) - t; }
}  // namespace

TEST_CASE("phi values and domain") {
    CHECK(phi(0.0) == 0.0);
    CHECK(phi(0.5) == doctest::Approx(kPi / 2 - 0.5).epsilon(1e-15));
    CHECK(phi(0.1) == doctest::Approx((double)phi_oracle(0.1L)).epsilon(1e-15));
    CHECK(phi(0.1) == doctest::Approx(0.1013579).epsilon(1e-6));
    CHECK_THROWS(phi(-0.01));
    CHECK_THROWS(phi(0.51));

    // phi(x) > x on (0, 1/2], ratio -> 1 from above. The margin is
    // (4/3) x^3, far below one double ulp of x for x <= 1e-7, so the strict
    // inequality is certified with the extended-precision oracle; the double
    // implementation must still never fall below x.
    for (int i = 0; i <= 100; ++i) {
        long double x = std::pow(10.0L, -8.0L + 8.0L * i / 100.0L) * 0.5L;
        CHECK(phi_oracle(x) > x);
        CHECK(phi((double)x) >= (double)x);
    }
    CHECK(std::abs(phi(1e-5) / 1e-5 - 1.0) < 1e-3);
}

TEST_CASE("polygon cone bound") {
    auto g = polygon_cone_bound(1.0, {{0, 0, 0}});
    CHECK(g.value == doctest::Approx(2 * kPi).epsilon(1e-15));  // Gehring case

    auto two = polygon_cone_bound(1.0, {{0, 0, 0}, {2, 0, 0}});
    CHECK(two.value == doctest::Approx(2 * kPi + 4.0).epsilon(1e-15));

    auto sq = polygon_cone_bound(2.0, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
    CHECK(sq.value == doctest::Approx(4 * kPi + 4.0).epsilon(1e-15));

    // non-convex vertex set rejected
    CHECK_THROWS(polygon_cone_bound(
        1.0, {{0, 0, 0}, {2, 0, 0}, {2, 2, 0}, {0, 2, 0}, {1, 1, 0}}));

    // monotone in r and under polygon inclusion
    CHECK(polygon_cone_bound(2.0, {{0, 0, 0}, {2, 0, 0}}).value >
          polygon_cone_bound(1.0, {{0, 0, 0}, {2, 0, 0}}).value);
    CHECK(polygon_cone_bound(1.0, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}).value <=
          polygon_cone_bound(1.0, {{-1, -1, 0}, {2, -1, 0}, {2, 2, 0}, {-1, 2, 0}}).value);
}

TEST_CASE("Q table") {
    CHECK(qn(1) == 0.0);
    CHECK(qn(2) == 2.0);
    CHECK(qn(3) == 3.0);
    CHECK(qn(4) == 4.0);
    CHECK_THROWS_WITH_AS(qn(5), doctest::Contains("sqrt(n)"), std::invalid_argument);
}

TEST_CASE("link lower bound") {
    CHECK(link_lower_bound({1, 1}).value == doctest::Approx(4 * kPi).epsilon(1e-15));
    CHECK(link_lower_bound({1, 2, 1}).value == doctest::Approx(6 * kPi + 2).epsilon(1e-15));
    // split-link class of L: degrees (2,1,1,0)
    CHECK(link_lower_bound({2, 1, 1, 0}).value == doctest::Approx(6 * kPi + 2).epsilon(1e-15));
    CHECK_THROWS(link_lower_bound({5, 1}));
}

TEST_CASE("eps two point bound") {
    CHECK(eps_two_point_bound(2, 0).value == doctest::Approx(2 * kPi + 4).epsilon(1e-15));
    CHECK(eps_two_point_bound(0, 0).value == doctest::Approx(2 * kPi).epsilon(1e-15));
    CHECK(eps_two_point_bound(2, 0.01).value ==
          doctest::Approx((2 * kPi + 4) * 0.99).epsilon(1e-13));
    CHECK_THROWS(eps_two_point_bound(2, 1.5));
}

TEST_CASE("split margin") {
    auto m = split_margin(31.1090);
    CHECK(m.value == doctest::Approx(8 * kPi + 6).epsilon(1e-15));
    double margin = 0;
    for (auto& [k, v] : m.inputs)
        if (k == "margin") margin = v;
    CHECK(margin == doctest::Approx(8 * kPi + 6 - 31.1090).epsilon(1e-12));

    auto z = split_margin(8 * kPi + 6);
    for (auto& [k, v] : z.inputs)
        if (k == "margin") CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("almost closed bound") {
    CHECK(almost_closed_bound(0.7, {}).value == doctest::Approx(2 * kPi + 1.4).epsilon(1e-15));
    CHECK(almost_closed_bound(0, {0.1}).value == doctest::Approx(2 * kPi - phi(0.1)).epsilon(1e-15));
    CHECK(almost_closed_bound(0.2, {0.05, 0.05, 0.05}).value ==
          doctest::Approx(2 * kPi + 0.4 - 3 * phi(0.05)).epsilon(1e-14));
    CHECK_THROWS(almost_closed_bound(0.2, {0.6}));
    // zero gaps reduce to the two-point cone bound with r = 1
    CHECK(almost_closed_bound(1.3, {0.0, 0.0}).value ==
          doctest::Approx(polygon_cone_bound(1.0, {{0, 0, 0}, {1.3, 0, 0}}).value).epsilon(1e-14));
}

TEST_CASE("suitability margin") {
    CHECK(suitability_margin({{2, 3}, {2, 3}}) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(suitability_margin({{1, 2}}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(suitability_margin({{1, 1}}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS(suitability_margin({{1, 0}}));
}

TEST_CASE("detour curve: straight cases") {
    // disks far from the segment: the segment itself
    Vec3 a{0, 0, 0}, b{0.3, 0, 0};
    auto c = detour_curve(a, b, {5, 5, 0}, {5, 5.2, 0}, {5.1, 5.1, 0});
    CHECK(c.length() == doctest::Approx(0.3).epsilon(1e-12));

    // collinear a, b, m (the lemma's m outside ab case)
    auto c2 = detour_curve(a, b, {-1.2, 0.3, 0}, {-1.2, -0.15, 0}, {-1.2, 0, 0});
    CHECK(c2.length() == doctest::Approx(0.3).epsilon(1e-12));

    CHECK_THROWS(detour_curve(a, {0.6, 0, 0}, {5, 5, 0}, {5, 5.2, 0}, {5.1, 5.1, 0}));
}

TEST_CASE("detour curve: 1000 random admissible configurations") {
    SplitMix64 rng(7);
    int built = 0;
    while (built < 1000) {
        // cluster x, y, m within 1/2 of each other
        Vec3 x{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
        Vec3 y = x + Vec3{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
        Vec3 m = x + Vec3{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
        if (dist(x, y) >= 0.5 || dist(x, m) >= 0.5 || dist(y, m) >= 0.5) continue;
        // a, b outside both unit balls, close together
        Vec3 dir = normalized(Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
        Vec3 a = x + dir * rng.uniform(1.0, 1.3);
        Vec3 b = a + Vec3{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
        if (dist(a, b) >= 0.5 || dist(a, b) < 1e-6) continue;
        if (dist(a, x) < 1 || dist(a, y) < 1 || dist(b, x) < 1 || dist(b, y) < 1) continue;
        PiecewiseCurve c = detour_curve(a, b, x, y, m);
        ++built;

        double dab = dist(a, b);
        CHECK(c.length_interval().lo <= std::asin(2 * dab) - dab + 1e-9);
        CHECK(dist(c.point(0), a) < 1e-12);
        CHECK(dist(c.point(c.length()), b) < 1e-12);

        // clearance of both unit balls, certified
        PiecewiseCurve ballx({Piece::arc({x, {1, 0, 0}, {0, 1, 0}, 1e-6, 0, 2 * kPi})}, true);
        PiecewiseCurve bally({Piece::arc({y, {1, 0, 0}, {0, 1, 0}, 1e-6, 0, 2 * kPi})}, true);
        auto dx = min_distance(c, ballx, 1e-7);
        auto dy = min_distance(c, bally, 1e-7);
        CHECK(dx.hi >= 1.0 - 1e-6 - 1e-9);
        CHECK(dy.hi >= 1.0 - 1e-6 - 1e-9);

        // tightness: with the obstruction far away the detour is the chord
        PiecewiseCurve straight = detour_curve(a, b, x + Vec3{50, 0, 0}, y + Vec3{50, 0, 0},
                                               m + Vec3{50, 0, 0});
        CHECK(straight.length() == doctest::Approx(dab).epsilon(1e-12));
    }
}
