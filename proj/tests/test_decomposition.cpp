#include <doctest.h>

#include <cmath>

#include "rl/constructions.hpp"
#include "rl/decomposition.hpp"
#include "rl/displaced.hpp"
#include "rl/metrics.hpp"
#include "rl/rng.hpp"

using namespace rl;

namespace {
constexpr double kPi = 3.14159265358979323846;

ConjoinedDecomposition hopf_trivial_decomposition() {
    // component 0: unit circle at the origin (XY), pierced by component 1 at
    // its center; breakpoints at the piercing parameters.
    ConjoinedDecomposition c;
    c.a.breaking_points = {0.0};  // A(0) = (1,0,0) = center of B
    c.a.groups = {{{0}, {1}}};
    c.a.clusters = {{0}};
    c.b.breaking_points = {kPi};  // B(pi) = origin = center of A
    c.b.groups = {{{0}, {1}}};
    c.b.clusters = {{0}};
    c.hA = {0};
    c.hB = {0};
    c.linking = {{true}};
    return c;
}

}  // namespace

TEST_CASE("fit_circle") {
    SplitMix64 rng(3);
    Vec3 axis = normalized(Vec3{0.3, -0.5, 0.8});
    Vec3 e1 = normalized(cross(axis, Vec3{1, 0, 0}));
    Vec3 e2 = cross(axis, e1);
    Vec3 cen{2, -1, 0.5};
    std::vector<Vec3> pts;
    for (int i = 0; i < 200; ++i) {
        double th = rng.uniform(0, 2 * kPi);
        pts.push_back(cen + 1.7 * (std::cos(th) * e1 + std::sin(th) * e2));
    }
    FittedCircle f = fit_circle(pts);
    CHECK(dist(f.center, cen) < 1e-9);
    CHECK(f.radius == doctest::Approx(1.7).epsilon(1e-9));
    CHECK(f.max_deviation < 1e-9);
    CHECK(std::abs(std::abs(dot(f.normal, axis)) - 1.0) < 1e-9);
}

TEST_CASE("verify circle decomposition: built links pass") {
    Construction c = build_augmented_unlink();
    auto ra = verify_circle_decomposition(c.link.comp(0), c.decomp->a);
    auto rb = verify_circle_decomposition(c.link.comp(1), c.decomp->b);
    if (!ra.pass()) MESSAGE(ra.failed()->name, ": ", ra.failed()->detail);
    CHECK(ra.pass());
    CHECK(rb.pass());

    Construction nc = build_conjoined_unlink();
    CHECK(verify_circle_decomposition(nc.link.comp(0), nc.decomp->a).pass());
    CHECK(verify_circle_decomposition(nc.link.comp(1), nc.decomp->b).pass());
}

TEST_CASE("verify circle decomposition: corrupted data fails") {
    Construction c = build_augmented_unlink();

    // a breakpoint clustered with the wrong point set -> cluster condition
    {
        ConjoinedDecomposition bad = *c.decomp;
        int moved = bad.a.clusters[0].back();
        bad.a.clusters[0].pop_back();
        bad.a.clusters[1].push_back(moved);
        auto r = verify_circle_decomposition(c.link.comp(0), bad.a);
        CHECK(!r.pass());
        CHECK(r.failed()->name.find("cluster") != std::string::npos);
    }
    // a deleted breaking point leaves the partitions malformed
    {
        ConjoinedDecomposition bad = *c.decomp;
        bad.a.breaking_points.pop_back();
        auto r = verify_circle_decomposition(c.link.comp(0), bad.a);
        CHECK(!r.pass());
    }
    // circles of radius 1.1 fail the unit-circle fit (and the 2 pi length)
    {
        const auto& pw = dynamic_cast<const PiecewiseCurve&>(c.link.comp(0));
        PiecewiseCurve scaled = pw.transformed(Mat3{}, {0, 0, 0}, 1.1);
        ConjoinedDecomposition bad = *c.decomp;
        for (auto& b : bad.a.breaking_points) b *= 1.1;
        auto r = verify_circle_decomposition(scaled, bad.a);
        CHECK(!r.pass());
        bool fit_or_len = false;
        for (auto& it : r.items)
            if (!it.pass && (it.name.find("unit-circle") != std::string::npos ||
                             it.name.find("length") != std::string::npos))
                fit_or_len = true;
        CHECK(fit_or_len);
    }
}

TEST_CASE("verify conjoined: augmented unlink and hopf pass, translate fails") {
    Construction c = build_augmented_unlink();
    auto r = verify_conjoined(c.link, *c.decomp, 1e-6);
    if (!r.pass()) MESSAGE(r.failed()->name, ": ", r.failed()->detail);
    CHECK(r.pass());

    // hopf-minimal with one-circle/one-cluster decompositions
    Link h = build_hopf_minimal();
    auto rh = verify_conjoined(h, hopf_trivial_decomposition(), 1e-6);
    if (!rh.pass()) MESSAGE(rh.failed()->name, ": ", rh.failed()->detail);
    CHECK(rh.pass());

    // one component translated by 0.1 -> distance check fails
    Link moved = c.link;
    const auto& pw = dynamic_cast<const PiecewiseCurve&>(c.link.comp(1));
    moved.components[1] =
        std::make_shared<PiecewiseCurve>(pw.transformed(Mat3{}, {0, 0, 0.1}, 1.0));
    auto rm = verify_conjoined(moved, *c.decomp, 1e-6);
    CHECK(!rm.pass());
    bool dist_failed = false;
    for (auto& it : rm.items)
        if (!it.pass && it.name == "distance-1") dist_failed = true;
    CHECK(dist_failed);
}

TEST_CASE("linking scheme matrices") {
    Construction c = build_augmented_unlink();
    auto m = linking_scheme(c.link, *c.decomp);
    CHECK(m == c.decomp->linking);
    // every A-circle linked to exactly two of the three distinct red images;
    // with doubled groups that is four true entries per row
    for (auto& row : m) {
        int cnt = 0;
        for (bool v : row) cnt += v ? 1 : 0;
        CHECK(cnt == 4);
    }

    Link h = build_hopf_minimal();
    auto mh = linking_scheme(h, hopf_trivial_decomposition());
    REQUIRE(mh.size() == 1);
    CHECK(mh[0][0]);

    // split pair of distant circles -> all false
    ArcPiece a1{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 1.0, 0.0, 2 * kPi};
    ArcPiece a2{{10, 0, 0}, {1, 0, 0}, {0, 0, 1}, 1.0, 0.0, 2 * kPi};
    Link split = make_link({PiecewiseCurve({Piece::arc(a1)}, true),
                            PiecewiseCurve({Piece::arc(a2)}, true)},
                           "split");
    ConjoinedDecomposition cs;
    cs.a.breaking_points = {0.0};
    cs.a.groups = {{{0}, {1}}};
    cs.a.clusters = {{0}};
    cs.b = cs.a;
    cs.hA = {0};
    cs.hB = {0};
    cs.linking = {{false}};
    auto ms = linking_scheme(split, cs);
    CHECK(!ms[0][0]);
}

TEST_CASE("verify suitable") {
    Construction aug = build_augmented_unlink();
    auto r = verify_suitable(aug.link, *aug.decomp, 1e-6);
    if (!r.pass()) MESSAGE(r.failed()->name, ": ", r.failed()->detail);
    CHECK(r.pass());
    CHECK(decomposition_margin(*aug.decomp) == doctest::Approx(4.0 / 3.0));

    // the non-augmented 6-circle decomposition fails the strict counting
    Construction plain = build_conjoined_unlink();
    auto rp = verify_suitable(plain.link, *plain.decomp, 1e-6);
    CHECK(!rp.pass());
    bool counting_failed = false;
    for (auto& it : rp.items)
        if (!it.pass && it.name.find("counting") != std::string::npos) counting_failed = true;
    CHECK(counting_failed);
    CHECK(decomposition_margin(*plain.decomp) == doctest::Approx(1.0));

    // hopf trivial: first condition fails (linked to one circle, not two)
    Link h = build_hopf_minimal();
    auto rh = verify_suitable(h, hopf_trivial_decomposition(), 1e-6);
    CHECK(!rh.pass());
    bool two_failed = false;
    for (auto& it : rh.items)
        if (!it.pass && it.name == "linked-to-exactly-two") two_failed = true;
    CHECK(two_failed);

    // suitability of the linking-n family decompositions
    Construction fam = build_linking_n(2, 3);
    auto rf = verify_suitable(fam.link, *fam.decomp, 1e-6);
    if (!rf.pass()) MESSAGE(rf.failed()->name, ": ", rf.failed()->detail);
    CHECK(rf.pass());
}

TEST_CASE("min diameter points") {
    Construction c = build_augmented_unlink();
    auto windows = default_windows(c.link, *c.decomp);

    // unperturbed: every cluster diameter minimizes to (numerically) zero
    for (std::size_t l = 0; l < c.decomp->a.clusters.size(); ++l) {
        std::vector<std::pair<double, double>> w;
        for (int i : c.decomp->a.clusters[l]) w.push_back(windows[0][(std::size_t)i]);
        auto md = min_diameter_points(c.link.comp(0), w);
        CHECK(md.diameter < 1e-6);
    }

    // displaced curve: agree with a dense grid oracle within 10%
    auto base = std::dynamic_pointer_cast<const PiecewiseCurve>(c.link.components[0]);
    std::vector<Vec3> ca(3, Vec3{0, 0, 0}), cb(3, Vec3{0, 0, 0});
    ca[0] = {0.004, 0, 0.008};
    cb[1] = {0, 0.006, 0.003};
    cb[2] = {0.002, 0, 0.005};
    DisplacedCurve disp(base, ca, cb, 1.0);
    std::vector<std::pair<double, double>> w;
    for (int i : c.decomp->a.clusters[0]) w.push_back(windows[0][(std::size_t)i]);
    auto md = min_diameter_points(disp, w);
    // oracle: dense 160^3 product grid
    double best = HUGE_VAL;
    const int G = 160;
    std::vector<std::vector<Vec3>> pts(3);
    for (int i = 0; i < 3; ++i)
        for (int q = 0; q < G; ++q)
            pts[i].push_back(
                disp.point_cyclic(w[i].first + (w[i].second - w[i].first) * (q + 0.5) / G));
    for (int q0 = 0; q0 < G; ++q0)
        for (int q1 = 0; q1 < G; ++q1)
            for (int q2 = 0; q2 < G; ++q2) {
                double d = std::max({dist(pts[0][q0], pts[1][q1]), dist(pts[0][q0], pts[2][q2]),
                                     dist(pts[1][q1], pts[2][q2])});
                best = std::min(best, d);
            }
    CHECK(md.diameter <= best + 1e-9);
    CHECK(md.diameter >= best - 0.1 * best - 1e-6);
}

TEST_CASE("perturbation bound report: unperturbed equality") {
    Construction c = build_augmented_unlink();
    auto windows = default_windows(c.link, *c.decomp);
    auto rep = perturbation_bound_report(c.link, *c.decomp, c.link, windows);
    for (auto& t : rep.terms) {
        CHECK(t.q < 1e-6);
        CHECK(t.term >= 0.0);
        CHECK(t.h_preimage == 2);
        CHECK(t.f == 3);
    }
    CHECK(rep.base_length == doctest::Approx(24 * kPi));
    CHECK(std::abs(rep.rhs - 24 * kPi) < 1e-5);
    CHECK(rep.measured.contains(24 * kPi));
    CHECK(rep.length_inequality);
    CHECK(rep.rhs_at_least_base);
    CHECK(rep.delta4 > 0.1);  // margin 4/3 gives a generous threshold

    // termwise nonnegativity with equality iff q = 0, on a q-grid
    double m = decomposition_margin(*c.decomp);
    for (double q : {1e-6, 1e-4, 1e-2, 0.1, rep.delta4}) {
        double term = 2.0 * 2.0 * q - 3.0 * phi(q);
        if (q <= rep.delta4) CHECK(term >= 0.0);
        CHECK(m == doctest::Approx(4.0 / 3.0));
    }
}

TEST_CASE("perturbation bound report: rigid rotation is an equality case") {
    Construction c = build_augmented_unlink();
    auto windows = default_windows(c.link, *c.decomp);
    Mat3 R = Mat3::rotation({0.2, 0.5, 0.9}, 0.7);
    Link rot = c.link;
    for (int i = 0; i < 2; ++i) {
        const auto& pw = dynamic_cast<const PiecewiseCurve&>(c.link.comp((std::size_t)i));
        rot.components[(std::size_t)i] =
            std::make_shared<PiecewiseCurve>(pw.transformed(R, {0.3, -0.2, 0.1}, 1.0));
    }
    auto rep = perturbation_bound_report(c.link, *c.decomp, rot, windows);
    for (auto& t : rep.terms) CHECK(t.q < 1e-6);
    CHECK(std::abs(rep.rhs - 24 * kPi) < 1e-5);
    CHECK(rep.measured.contains(24 * kPi));
    CHECK(rep.length_inequality);
}

TEST_CASE("decomposition json round trip") {
    Construction c = build_augmented_unlink();
    std::string js = decomposition_to_json(*c.decomp);
    ConjoinedDecomposition back = decomposition_from_json(js);
    CHECK(back.a.breaking_points == c.decomp->a.breaking_points);
    CHECK(back.hA == c.decomp->hA);
    CHECK(back.hB == c.decomp->hB);
    CHECK(back.linking == c.decomp->linking);
    CHECK(back.a.groups.size() == c.decomp->a.groups.size());
    // verifier accepts the round-tripped data
    CHECK(verify_circle_decomposition(c.link.comp(0), back.a).pass());
}

TEST_CASE("decomposition verifiers are isometry invariant") {
    Construction c = build_conjoined_unlink();
    Mat3 R = Mat3::rotation({1, 2, 3}, 1.1);
    Link rot = c.link;
    for (int i = 0; i < 2; ++i) {
        const auto& pw = dynamic_cast<const PiecewiseCurve&>(c.link.comp((std::size_t)i));
        rot.components[(std::size_t)i] =
            std::make_shared<PiecewiseCurve>(pw.transformed(R, {1, -2, 0.5}, 1.0));
    }
    CHECK(verify_circle_decomposition(rot.comp(0), c.decomp->a).pass());
    CHECK(verify_conjoined(rot, *c.decomp, 1e-6).pass());

    // cyclic relabeling: move the curve's basepoint to breakpoint 2 and
    // renumber all indices consistently
    const auto& pw0 = dynamic_cast<const PiecewiseCurve&>(c.link.comp(0));
    int shift = 2;
    std::vector<Piece> rotated;
    std::size_t np = pw0.pieces().size();
    for (std::size_t i = 0; i < np; ++i)
        rotated.push_back(pw0.pieces()[((std::size_t)shift + i) % np]);
    PiecewiseCurve shifted(std::move(rotated), true);
    double off = c.decomp->a.breaking_points[(std::size_t)shift];
    double len = pw0.length_param();
    int n = (int)c.decomp->a.breaking_points.size();
    CircleDecomposition rel;
    rel.breaking_points.resize((std::size_t)n);
    for (int i = 0; i < n; ++i) {
        double b = c.decomp->a.breaking_points[(std::size_t)((i + shift) % n)] - off;
        if (b < 0) b += len;
        rel.breaking_points[(std::size_t)i] = b;
    }
    std::sort(rel.breaking_points.begin(), rel.breaking_points.end());
    auto renum = [&](int i) { return (i + n - shift) % n; };
    rel.groups = c.decomp->a.groups;
    for (auto& g : rel.groups)
        for (auto& i : g.intervals) i = renum(i);
    rel.clusters = c.decomp->a.clusters;
    for (auto& cl : rel.clusters)
        for (auto& i : cl) i = renum(i);
    CHECK(verify_circle_decomposition(shifted, rel).pass());
}
