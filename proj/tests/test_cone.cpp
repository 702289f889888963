#include <doctest.h>

#include <cmath>

#include "rl/cone.hpp"
#include "rl/metrics.hpp"
#include "rl/rng.hpp"

using namespace rl;

namespace {

constexpr double kPi = 3.14159265358979323846;

PiecewiseCurve circle(const Vec3& c, const Vec3& u, const Vec3& v, double r) {
    ArcPiece a{c, u, v, r, 0.0, 2 * kPi};
    return PiecewiseCurve({Piece::arc(a)}, true);
}

}  // namespace

TEST_CASE("center of mass") {
    auto circ = circle({2, -1, 3}, {1, 0, 0}, {0, 1, 0}, 1);
    CHECK(dist(center_of_mass(circ), {2, -1, 3}) < 1e-12);

    // quarter arc closed with its chord; Monte-Carlo arclength average oracle
    ArcPiece arc{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 1.0, 0.0, kPi / 2};
    std::vector<Piece> ps{Piece::arc(arc), Piece::segment({{0, 1, 0}, {1, 0, 0}})};
    PiecewiseCurve pie(std::move(ps), true);
    Vec3 com = center_of_mass(pie);
    SplitMix64 rng(99);
    Vec3 mc{0, 0, 0};
    const int N = 1000000;
    for (int i = 0; i < N; ++i) mc += pie.point(rng.uniform() * pie.length());
    mc = mc / (double)N;
    CHECK(dist(com, mc) < 3e-3);

    // torus-section quadrature path: a symmetric full oval has its center of
    // mass on the z = 0 axis by symmetry
    double s7 = std::sqrt(7.0) / 2.0;
    std::vector<Piece> oval{
        Piece::torus_section({1.5, 0.0, s7, 1}), Piece::torus_section({1.5, s7, 0.0, -1}),
        Piece::torus_section({1.5, 0.0, -s7, -1}), Piece::torus_section({1.5, -s7, 0.0, 1})};
    PiecewiseCurve dg(std::move(oval), true);
    Vec3 c = center_of_mass(dg);
    CHECK(std::abs(c.y) < 1e-9);
    CHECK(std::abs(c.z) < 1e-9);
    CHECK(std::abs(c.x) < 1e-12);
}

TEST_CASE("brouwer degree axioms") {
    auto id = [](const Vec3& p) { return p; };
    CHECK(brouwer_degree_box(id, {-1, -1, -1}, {1, 1, 1}, 4, 1e-6) == 1);
    CHECK(brouwer_degree_box(id, {2, 2, 2}, {3, 3, 3}, 4, 1e-6) == 0);
    auto neg = [](const Vec3& p) { return -p; };
    CHECK(brouwer_degree_box(neg, {-1, -1, -1}, {1, 1, 1}, 4, 1e-6) == -1);

    // additivity: two zeros of opposite sign sum to zero over the union box
    auto two = [](const Vec3& p) {
        // zeros at (+-1, 0, 0), Jacobian signs differ
        return Vec3{p.x * p.x - 1.0, p.y, p.z};
    };
    CHECK(brouwer_degree_box(two, {-2, -1, -1}, {2, 1, 1}, 8, 1e-9) == 0);
    CHECK(brouwer_degree_box(two, {0, -1, -1}, {2, 1, 1}, 8, 1e-9) == 1);
    CHECK(brouwer_degree_box(two, {-2, -1, -1}, {0, 1, 1}, 8, 1e-9) == -1);

    // boundary exclusion enforcement
    CHECK_THROWS(brouwer_degree_box(id, {0, -1, -1}, {1, 1, 1}, 4, 1e-6));
}

TEST_CASE("disk-curve intersections: hopf piercing through the spanning disk") {
    auto base = std::make_shared<PiecewiseCurve>(circle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 1));
    ConeDisk disk = center_of_mass_disk(base);
    auto other = circle({1, 0, 0}, {1, 0, 0}, {0, 0, 1}, 1);  // pierces at the origin = apex

    auto res = disk_curve_intersections(disk, other, 1e-6);
    REQUIRE(res.resolved());
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].transverse);
    CHECK(std::abs(res.records[0].sign) == 1);
    CHECK(dist(res.records[0].point, {0, 0, 0}) < 1e-8);

    // count and signs stable under tol refinement
    auto res2 = disk_curve_intersections(disk, other, 2.5e-7);
    REQUIRE(res2.records.size() == 1);
    CHECK(res2.records[0].sign == res.records[0].sign);

    // orientation flip of the curve negates the sign
    auto rev = other.reversed();
    auto res3 = disk_curve_intersections(disk, rev, 1e-6);
    REQUIRE(res3.records.size() == 1);
    CHECK(res3.records[0].sign == -res.records[0].sign);
}

TEST_CASE("disk-curve intersections: separated circles miss the disk") {
    auto base = std::make_shared<PiecewiseCurve>(circle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 1));
    ConeDisk disk = center_of_mass_disk(base);
    auto far = circle({12, 0, 0}, {1, 0, 0}, {0, 0, 1}, 1);
    auto res = disk_curve_intersections(disk, far, 1e-6);
    CHECK(res.resolved());
    CHECK(res.records.empty());
}

TEST_CASE("disk-curve intersections: skew crossing through a cone") {
    // an off-center apex makes a genuinely conical disk; a vertical line
    // (closed far above and below) crosses it once, away from the apex
    std::vector<Piece> sq;
    sq.push_back(Piece::segment({{1.5, -1.5, 0}, {1.5, 1.5, 0}}));
    sq.push_back(Piece::segment({{1.5, 1.5, 0}, {-1.5, 1.5, 0}}));
    sq.push_back(Piece::segment({{-1.5, 1.5, 0}, {-1.5, -1.5, 0}}));
    sq.push_back(Piece::segment({{-1.5, -1.5, 0}, {1.5, -1.5, 0}}));
    auto base = std::make_shared<PiecewiseCurve>(std::move(sq), true);
    ConeDisk disk;
    disk.base = base;
    disk.apex = Vec3{0.5, 0.2, 0.7};  // lifted off the base plane

    // closed rounded loop crossing the cone surface transversally
    std::vector<Piece> loop;
    loop.push_back(Piece::segment({{-0.7, -0.1, -3}, {-0.7, -0.1, 3}}));
    // big return arc looping around the left, well away from the disk
    ArcPiece ret{{-0.7 - 4, -0.1, 0}, {1, 0, 0}, {0, 0, 1}, 5.0,
                 std::atan2(3.0, 4.0), 2 * kPi - 2 * std::atan2(3.0, 4.0)};
    loop.push_back(Piece::arc(ret));
    PiecewiseCurve curve(std::move(loop), true);

    auto res = disk_curve_intersections(disk, curve, 1e-6);
    REQUIRE(res.resolved());
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].transverse);
    CHECK(std::abs(res.records[0].sign) == 1);
    // the record satisfies the coincidence invariant
    CHECK(dist(disk.point(res.records[0].x, res.records[0].y), res.records[0].point) < 1e-8);

    // sum of signs equals the Brouwer degree over the full parameter box
    auto F = [&](const Vec3& p) { return disk.point(p.x, p.y) - curve.point_cyclic(p.z); };
    int total = brouwer_degree_box(F, {0, 0, 0},
                                   {base->length_param(), 1.0, curve.length_param()}, 24, 1e-7);
    int sum = 0;
    for (auto& r : res.records) sum += r.sign;
    CHECK(sum == total);
}
