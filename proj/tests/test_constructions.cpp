#include <doctest.h>

#include <cmath>

#include "rl/constructions.hpp"
#include "rl/cone.hpp"
#include "rl/link.hpp"
#include "rl/metrics.hpp"

using namespace rl;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("tangent solve reproduces the reported numerics") {
    TangencySolution s = solve_tangent();
    CHECK(std::abs(s.residual_perp) < 1e-10);
    CHECK(std::abs(s.residual_tangent) < 1e-10);
    CHECK(s.beta == doctest::Approx(1.2554).epsilon(5e-4));
    CHECK(s.seg_len == doctest::Approx(1.0925).epsilon(5e-4));
    CHECK(s.arc_len_b == doctest::Approx(0.2116).epsilon(5e-4));
    // N on the unit circle around G, O on the boundary curve
    Vec3 G{0, std::sqrt(15.0) / 2.0 - 1.0, 0};
    CHECK(dist(s.N, G) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist(s.O, torus_section_point(1.5, s.z_O, 1)) < 1e-12);
}

TEST_CASE("gordian split link: lengths") {
    Link L = build_gordian_split_link();
    REQUIRE(L.size() == 4);

    double lenM = L.comp(0).length();
    double closed_form = 6 * kPi - 8 * std::atan(std::sqrt(15.0));
    CHECK(std::abs(lenM - closed_form) < 1e-9);
    CHECK(lenM == doctest::Approx(8.3046).epsilon(1e-4));

    CHECK(L.comp(1).length() == doctest::Approx(2 * kPi).epsilon(1e-12));
    CHECK(L.comp(2).length() == doctest::Approx(2 * kPi).epsilon(1e-12));

    TangencySolution s = solve_tangent();
    double lenC = L.comp(3).length();
    CHECK(lenC == doctest::Approx(4 * (s.beta + s.seg_len + s.arc_len_b)).epsilon(1e-9));
    CHECK(lenC == doctest::Approx(10.2380).epsilon(5e-5));

    auto rope = ropelength(L);
    CHECK(rope.mid() == doctest::Approx(31.1090).epsilon(5e-5));
    CHECK(rope.hi < 8 * kPi + 6);
    double margin = 8 * kPi + 6 - rope.mid();
    CHECK(margin > 0);
    CHECK(margin / rope.mid() < 0.0008);
}

TEST_CASE("gordian split link: centre curve symmetry") {
    Link L = build_gordian_split_link();
    const auto& C = dynamic_cast<const PiecewiseCurve&>(L.comp(3));
    double len = C.length_param();
    double half = len / 2;
    for (int i = 0; i <= 200; ++i) {
        double s = half * i / 200.0;
        Vec3 p = C.point(s);
        Vec3 q = C.point_cyclic(half - s);   // reflection across the z axis
        CHECK(dist({p.x, -p.y, p.z}, q) < 1e-9);
        Vec3 r = C.point_cyclic(len - s);    // reflection across the y axis
        CHECK(dist({p.x, p.y, -p.z}, r) < 1e-9);
    }
}

TEST_CASE("gordian split link: pairwise distances are exactly 1") {
    Link L = build_gordian_split_link();
    // all five touching pairs, plus A1-A2
    int touching[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (auto& pr : touching) {
        auto d = min_distance(L.comp(pr[0]), L.comp(pr[1]), 1e-7);
        CHECK(d.lo > 1.0 - 1e-6);
        CHECK(d.hi < 1.0 + 1e-6);
    }
    auto tau = thickness(L, 1e-7);
    CHECK(tau.lo > 1.0 - 1e-6);
    CHECK(tau.hi < 1.0 + 1e-6);
}

TEST_CASE("gordian split link: tube thickness and curvature") {
    Link L = build_gordian_split_link();
    auto rep = tube_thickness(L, 1e-6);
    CHECK(rep.tau_e.hi >= 1.0 - 1e-6);
    CHECK(rep.limiting_factor == "inter-component distance");
    CHECK(rep.max_curvature == doctest::Approx(4.0 / std::sqrt(7.0)).epsilon(1e-6));
    CHECK(rep.max_curvature >= 1.49);
    CHECK(rep.max_curvature <= 1.53);
    CHECK(rep.max_curvature_component == 3);
    // attained at P or V
    Vec3 at = L.comp(3).point(rep.max_curvature_param);
    double s7 = std::sqrt(7.0) / 2.0;
    CHECK(std::min(dist(at, {0, 0, s7}), dist(at, {0, 0, -s7})) < 1e-3);
    // every dcsd at least 1
    for (auto& d : rep.dcsd) CHECK(d.lo >= 1.0 - 1e-6);
    // 2/kappa_max = sqrt(7)/2 > 1, so curvature does not limit the tube
    CHECK(2.0 / rep.max_curvature == doctest::Approx(std::sqrt(7.0) / 2.0).epsilon(1e-6));
}

TEST_CASE("gordian split link: linking matrix") {
    Link L = build_gordian_split_link();
    CHECK(std::abs(linking_number(L.comp(0), L.comp(1))) == 1);
    CHECK(std::abs(linking_number(L.comp(0), L.comp(2))) == 1);
    CHECK(linking_number(L.comp(0), L.comp(3)) == 0);
    CHECK(linking_number(L.comp(1), L.comp(2)) == 0);
    CHECK(linking_number(L.comp(1), L.comp(3)) == 0);
    CHECK(linking_number(L.comp(2), L.comp(3)) == 0);
    // topologically split but not separated in this configuration
    CHECK(is_separated(L, {3}) == Separation::NotSeparated);
}

TEST_CASE("gordian split link: splitting-bound hypotheses") {
    Link L = build_gordian_split_link();
    GordianHypotheses h = check_gordian_hypotheses(L, 1e-6);
    CHECK(h.resolved);
    CHECK(h.intersections == 2);
    CHECK(h.all_transverse);
    REQUIRE(h.points.size() == 2);
    // the two crossings sit at G and J
    Vec3 G{0, std::sqrt(15.0) / 2.0 - 1.0, 0}, J{0, -(std::sqrt(15.0) / 2.0 - 1.0), 0};
    double d0 = std::min(dist(h.points[0], G), dist(h.points[0], J));
    double d1 = std::min(dist(h.points[1], G), dist(h.points[1], J));
    CHECK(d0 < 1e-6);
    CHECK(d1 < 1e-6);
    CHECK(dist(h.points[0], h.points[1]) > 1.0);
    CHECK(std::abs(h.lk_m1_a1) == 1);
    CHECK(std::abs(h.lk_m2_a2) == 1);
    CHECK(h.pass);
}

TEST_CASE("hopf minimal") {
    Link h = build_hopf_minimal();
    CHECK(std::abs(linking_number(h.comp(0), h.comp(1))) == 1);
    CHECK(ropelength(h).contains(4 * kPi));
    auto tau = thickness(h, 1e-7);
    CHECK(tau.lo > 1.0 - 1e-6);
    CHECK(tau.hi < 1.0 + 1e-6);
}

TEST_CASE("conjoined unlink") {
    Construction c = build_conjoined_unlink();
    REQUIRE(c.link.size() == 2);
    REQUIRE(c.decomp.has_value());
    CHECK(ropelength(c.link).contains(12 * kPi));
    auto tau = thickness(c.link, 1e-7);
    CHECK(tau.lo > 1.0 - 1e-6);
    CHECK(tau.hi < 1.0 + 1e-6);
    CHECK(linking_number(c.link.comp(0), c.link.comp(1)) == 0);

    // red circles pairwise tangent at the blue centers with a common
    // vertical tangent: both red passages through each blue center are +-z
    const auto& red = dynamic_cast<const PiecewiseCurve&>(c.link.comp(1));
    Vec3 T1{0, 0, 0}, T2{2, 0, 0}, T3{1, std::sqrt(3.0), 0};
    for (const Vec3& T : {T1, T2, T3}) {
        int hits = 0;
        for (double s = 0; s < red.length_param(); s += 1e-4) {
            if (dist(red.point(s), T) < 5e-5) {
                // refine to the closest parameter
                double lo = s - 1e-4, hi = s + 1e-4;
                for (int it = 0; it < 60; ++it) {
                    double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
                    if (dist(red.point_cyclic(m1), T) < dist(red.point_cyclic(m2), T)) hi = m2;
                    else lo = m1;
                }
                double sm = 0.5 * (lo + hi);
                if (dist(red.point_cyclic(sm), T) < 1e-9) {
                    Vec3 t = red.derivative_cyclic(sm);
                    CHECK(std::abs(std::abs(t.z) - 1.0) < 1e-9);
                    ++hits;
                }
                s += 5e-4;
            }
        }
        CHECK(hits >= 2);
    }

    // margin of the attached decomposition is exactly 1: not suitable
    CHECK(decomposition_margin(*c.decomp) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("augmented unlink") {
    Construction c = build_augmented_unlink();
    CHECK(ropelength(c.link).contains(24 * kPi));
    CHECK(ropelength(c.link).width() < 1e-9);
    auto tau = thickness(c.link, 1e-7);
    CHECK(tau.lo > 1.0 - 1e-6);
    CHECK(tau.hi < 1.0 + 1e-6);
    CHECK(linking_number(c.link.comp(0), c.link.comp(1)) == 0);
    CHECK(decomposition_margin(*c.decomp) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    // components are C1 traversals
    for (int i = 0; i < 2; ++i) {
        const auto& pw = dynamic_cast<const PiecewiseCurve&>(c.link.comp((std::size_t)i));
        CHECK(pw.max_tangent_discontinuity() < 1e-9);
    }
}

TEST_CASE("linking-n family") {
    CHECK_THROWS(build_linking_n(1, 0));
    CHECK_THROWS(build_linking_n(3, 5));

    for (auto [k, n] : std::vector<std::pair<int, int>>{{2, 0}, {2, 3}, {4, 5}}) {
        Construction c = build_linking_n(k, n);
        // measured length: k copies of both augmented components plus the
        // extra loops (the paper's closed form is flagged elsewhere)
        double expect = (24.0 * k + 2.0 * n + 2.0) * kPi;
        CHECK(ropelength(c.link).contains(expect));
        int lk = linking_number(c.link.comp(0), c.link.comp(1), 5e-3);
        CHECK(lk == n);
        auto tau = thickness(c.link, 1e-6);
        CHECK(tau.lo > 1.0 - 1e-6);
    }
}

TEST_CASE("construction registry") {
    CHECK(build_by_id("hopf-minimal").link.size() == 2);
    CHECK(build_by_id("gordian-split-4").link.size() == 4);
    CHECK(build_by_id("linking-n:k=2,n=1").link.size() == 2);
    CHECK_THROWS(build_by_id("nonsense"));
    CHECK_THROWS(build_by_id("linking-n:k=x"));

    // builders are deterministic: identical JSON across calls
    CHECK(link_to_json(build_by_id("augmented-unlink-24pi").link) ==
          link_to_json(build_by_id("augmented-unlink-24pi").link));
    CHECK(link_to_json(build_gordian_split_link()) == link_to_json(build_gordian_split_link()));

    // JSON round trip preserves geometry
    Link L = build_gordian_split_link();
    Link L2 = link_from_json(link_to_json(L));
    REQUIRE(L2.size() == L.size());
    for (std::size_t i = 0; i < L.size(); ++i) {
        CHECK(std::abs(L.comp(i).length() - L2.comp(i).length()) < 1e-12);
        for (double f : {0.0, 0.25, 0.5, 0.75})
            CHECK(dist(L.comp(i).point(f * L.comp(i).length_param()),
                       L2.comp(i).point(f * L2.comp(i).length_param())) < 1e-9);
    }
}
