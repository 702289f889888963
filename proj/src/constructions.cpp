#include "rl/constructions.hpp"

#include <cmath>
#include <stdexcept>

#include "rl/cone.hpp"
#include "rl/metrics.hpp"

namespace rl {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kD = 1.5;  // auxiliary circle offset

// boundary curve of the forbidden slice in (y, z) coordinates, y >= 0 branch,
// parametrized by psi in (0, arccos(d-1)): u = 1 + cos(psi)
Vec3 boundary_point(double psi) {
    double u = 1.0 + std::cos(psi);
    double z = std::sqrt(std::max(0.0, u * u - kD * kD));
    return {0.0, std::sin(psi), z};
}

Vec3 boundary_tangent(double psi) {
    double u = 1.0 + std::cos(psi);
    double y = std::sin(psi);
    double z = std::sqrt(std::max(0.0, u * u - kD * kD));
    // d/dpsi (y, z) = (cos psi, -u y / z)
    Vec3 t{0.0, std::cos(psi), -u * y / z};
    return t / norm(t);
}

}  // namespace

TangencySolution solve_tangent() {
    const Vec3 G{0.0, std::sqrt(15.0) / 2.0 - 1.0, 0.0};
    // signed distance of G from the boundary tangent line at psi, minus 1
    auto gfun = [&](double psi) {
        Vec3 O = boundary_point(psi);
        Vec3 T = boundary_tangent(psi);
        Vec3 r = G - O;
        double c = r.y * T.z - r.z * T.y;  // 2d cross in (y, z)
        return std::abs(c) - 1.0;
    };

    // certify a unique sign change on (0, arccos(d-1))
    double psi_hi = std::acos(kD - 1.0);
    const int scan = 4096;
    double lo = 0.0, hi = 0.0;
    int changes = 0;
    double pa = 1e-9, fa = gfun(pa);
    for (int i = 1; i <= scan; ++i) {
        double pb = 1e-9 + (psi_hi - 2e-9) * i / scan;
        double fb = gfun(pb);
        if (fa > 0 && fb <= 0) {
            ++changes;
            lo = pa;
            hi = pb;
        }
        if (fa <= 0 && fb > 0) ++changes;
        pa = pb;
        fa = fb;
    }
    if (changes != 1)
        throw std::runtime_error("solve_tangent: bracketing failure (no unique sign change)");

    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        if (gfun(mid) > 0) lo = mid;
        else hi = mid;
    }
    double psi = 0.5 * (lo + hi);

    TangencySolution sol;
    sol.O = boundary_point(psi);
    Vec3 T = boundary_tangent(psi);
    // N is the foot of the perpendicular from G onto the tangent line
    Vec3 r = G - sol.O;
    sol.N = sol.O + dot(r, T) * T;
    sol.z_O = sol.O.z;
    Vec3 gn = sol.N - G;
    sol.beta = std::atan2(gn.z, gn.y);
    sol.seg_len = dist(sol.N, sol.O);
    Vec3 no = sol.O - sol.N;
    sol.residual_perp = dot(no, gn) / norm(no);
    sol.residual_tangent = (no.y * T.z - no.z * T.y) / norm(no);
    if (std::abs(sol.residual_perp) > 1e-10 || std::abs(sol.residual_tangent) > 1e-10)
        throw std::runtime_error("solve_tangent: residuals did not converge");
    if (!(sol.N.y > 0 && sol.N.z > 0 && sol.O.y > 0 && sol.O.z > 0))
        throw std::runtime_error("solve_tangent: solution left the first quadrant");
    sol.arc_len_b =
        Piece::torus_section({kD, sol.z_O, std::sqrt(4.0 - kD * kD), 1}).length();
    return sol;
}

// ---------------------------------------------------------------------------

Link build_gordian_split_link() {
    const double at15 = std::atan(std::sqrt(15.0));
    const double s15h = std::sqrt(15.0) / 2.0;
    const double long_sweep = 2.0 * (kPi - at15);
    const double short_sweep = kPi - 2.0 * at15;
    const Vec3 ux{1, 0, 0}, uy{0, 1, 0}, uz{0, 0, 1};

    // main curve: four tangent unit arcs in the XY plane
    std::vector<Piece> m;
    m.push_back(Piece::arc({{0.5, 0, 0}, ux, uy, 1.0, kPi - at15, -long_sweep}));
    m.push_back(Piece::arc({{0, -s15h, 0}, ux, uy, 1.0, at15, short_sweep}));
    m.push_back(Piece::arc({{-0.5, 0, 0}, ux, uy, 1.0, -at15, -long_sweep}));
    m.push_back(Piece::arc({{0, s15h, 0}, ux, uy, 1.0, at15 - kPi, short_sweep}));
    PiecewiseCurve M(std::move(m), true);

    // auxiliary unit circles in the XZ plane
    PiecewiseCurve A1({Piece::arc({{kD, 0, 0}, ux, uz, 1.0, 0.0, 2 * kPi})}, true);
    PiecewiseCurve A2({Piece::arc({{-kD, 0, 0}, ux, uz, 1.0, 0.0, 2 * kPi})}, true);

    // centre curve: first quarter from (0, s15h, 0) to (0, 0, sqrt7/2)
    TangencySolution sol = solve_tangent();
    std::vector<Piece> q1;
    q1.push_back(Piece::arc({{0, s15h - 1.0, 0}, uy, uz, 1.0, 0.0, sol.beta}));
    q1.push_back(Piece::segment({sol.N, sol.O}));
    q1.push_back(Piece::torus_section({kD, sol.z_O, std::sqrt(4.0 - kD * kD), 1}));

    std::vector<Piece> c = q1;
    for (auto it = q1.rbegin(); it != q1.rend(); ++it)  // P -> bottom, y < 0
        c.push_back(it->reflected_y().reversed());
    for (auto& p : q1) c.push_back(p.reflected_y().reflected_z());  // bottom -> V
    for (auto it = q1.rbegin(); it != q1.rend(); ++it)  // V -> top
        c.push_back(it->reflected_z().reversed());
    PiecewiseCurve C(std::move(c), true);

    return make_link({std::move(M), std::move(A1), std::move(A2), std::move(C)},
                     "gordian-split-4");
}

Link build_hopf_minimal() {
    const Vec3 ux{1, 0, 0}, uy{0, 1, 0}, uz{0, 0, 1};
    PiecewiseCurve a({Piece::arc({{0, 0, 0}, ux, uy, 1.0, 0.0, 2 * kPi})}, true);
    PiecewiseCurve b({Piece::arc({{1, 0, 0}, ux, uz, 1.0, 0.0, 2 * kPi})}, true);
    return make_link({std::move(a), std::move(b)}, "hopf-minimal");
}

// ---------------------------------------------------------------------------
// The six-circle unlink family.
//
// Blue: three unit circles in the XY plane centered on an equilateral side-2
// triangle T1=(0,0,0), T2=(2,0,0), T3=(1,sqrt3,0); they touch at the edge
// midpoints M12, M13, M23. Red: three unit circles in the upright planes
// through the edges, centered at the midpoints, passing through two blue
// centers; they touch at the blue centers. Traversals are Eulerian circuits
// through the tangency points, C1 at every junction, with crossing directions
// chosen so that every plane crossing cancels and the components have linking
// number zero.

namespace {

const Vec3 kT1{0, 0, 0}, kT2{2, 0, 0}, kT3{1, std::sqrt(3.0), 0};
const Vec3 kM12 = 0.5 * (kT1 + kT2);
const Vec3 kM13 = 0.5 * (kT1 + kT3);
const Vec3 kM23 = 0.5 * (kT2 + kT3);
const Vec3 kUX{1, 0, 0}, kUY{0, 1, 0}, kUZ{0, 0, 1};

Piece blue_arc(const Vec3& center, double theta0, double sweep) {
    return Piece::arc({center, kUX, kUY, 1.0, theta0, sweep});
}

Piece red_arc(int edge, double theta0, double sweep) {
    // edge 0: T1T2, 1: T1T3, 2: T2T3
    static const Vec3 centers[3] = {kM12, kM13, kM23};
    static const Vec3 us[3] = {normalized(kT2 - kT1), normalized(kT3 - kT1),
                               normalized(kT3 - kT2)};
    return Piece::arc({centers[edge], us[edge], kUZ, 1.0, theta0, sweep});
}

struct TraversalPlan {
    std::vector<Piece> pieces;
    std::vector<int> group_of;   // circle-group id per interval
    std::vector<int> sign_of;    // orientation of the interval inside its group
    std::vector<int> cluster_of; // cluster id per breakpoint (= interval start)
    std::vector<int> group_center_cluster;  // per group: cluster id of the other side
    int n_groups = 0;
};

const double kS60 = kPi / 3.0;

// augmented blue circuit: [Eb1, s1, Eb3, g3, Eb2, s2, g1, s3, g2]
TraversalPlan blue_plan(bool augmented) {
    TraversalPlan t;
    // groups: 0:Eb1(T1) 1:B1(T1) 2:Eb3(T3) 3:B3(T3) 4:Eb2(T2) 5:B2(T2)
    // clusters of the other side (red): T1 -> 0, T2 -> 1, T3 -> 2
    auto add = [&](Piece p, int group, int sign, int cluster) {
        t.pieces.push_back(std::move(p));
        t.group_of.push_back(group);
        t.sign_of.push_back(sign);
        t.cluster_of.push_back(cluster);
    };
    if (augmented) {
        add(blue_arc(kT1, 0.0, 2 * kPi), 0, +1, 0);            // Eb1 from M12
        add(blue_arc(kT1, 0.0, kS60), 1, +1, 0);               // short blue1 M12->M13
        add(blue_arc(kT3, 4 * kS60, -2 * kPi), 2, +1, 1);      // Eb3 from M13, clockwise
        add(blue_arc(kT3, 4 * kS60, -5 * kS60), 3, -1, 1);     // long blue3 M13->M23
        add(blue_arc(kT2, 2 * kS60, 2 * kPi), 4, +1, 2);       // Eb2 from M23
        add(blue_arc(kT2, 2 * kS60, kS60), 5, +1, 2);          // short blue2 M23->M12
        add(blue_arc(kT1, 0.0, -5 * kS60), 1, -1, 0);          // long blue1 M12->M13
        add(blue_arc(kT3, 4 * kS60, kS60), 3, +1, 1);          // short blue3 M13->M23
        add(blue_arc(kT2, 2 * kS60, -5 * kS60), 5, -1, 2);     // long blue2 M23->M12
        t.n_groups = 6;
        t.group_center_cluster = {0, 0, 2, 2, 1, 1};
    } else {
        add(blue_arc(kT1, 0.0, kS60), 0, +1, 0);
        add(blue_arc(kT3, 4 * kS60, -5 * kS60), 1, -1, 1);
        add(blue_arc(kT2, 2 * kS60, kS60), 2, +1, 2);
        add(blue_arc(kT1, 0.0, -5 * kS60), 0, -1, 0);
        add(blue_arc(kT3, 4 * kS60, kS60), 1, +1, 1);
        add(blue_arc(kT2, 2 * kS60, -5 * kS60), 2, -1, 2);
        t.n_groups = 3;
        t.group_center_cluster = {0, 2, 1};
    }
    return t;
}

// augmented red circuit: [ER12, p1, p2, ER13, p3, p4, ER23, p5, p6]
TraversalPlan red_plan(bool augmented) {
    TraversalPlan t;
    // groups: 0:ER12(m12) 1:R12(m12) 2:ER13(m13) 3:R13(m13) 4:ER23(m23) 5:R23(m23)
    // clusters of the other side (blue): M12 -> 0, M13 -> 1, M23 -> 2
    auto add = [&](Piece p, int group, int sign, int cluster) {
        t.pieces.push_back(std::move(p));
        t.group_of.push_back(group);
        t.sign_of.push_back(sign);
        t.cluster_of.push_back(cluster);
    };
    if (augmented) {
        add(red_arc(0, kPi, -2 * kPi), 0, +1, 0);  // ER12 from T1, clockwise
        add(red_arc(0, kPi, -kPi), 1, +1, 0);      // upper half T1->T2
        add(red_arc(2, kPi, kPi), 5, +1, 1);       // lower half T2->T3
        add(red_arc(1, 0.0, 2 * kPi), 2, +1, 2);   // ER13 from T3
        add(red_arc(1, 0.0, kPi), 3, +1, 2);       // upper half T3->T1
        add(red_arc(0, kPi, kPi), 1, -1, 0);       // lower half T1->T2
        add(red_arc(2, kPi, -2 * kPi), 4, +1, 1);  // ER23 from T2, clockwise
        add(red_arc(2, kPi, -kPi), 5, -1, 1);      // upper half T2->T3
        add(red_arc(1, 0.0, -kPi), 3, -1, 2);      // lower half T3->T1
        t.n_groups = 6;
        t.group_center_cluster = {0, 0, 1, 1, 2, 2};
    } else {
        add(red_arc(0, kPi, -kPi), 0, +1, 0);
        add(red_arc(2, kPi, kPi), 2, +1, 1);
        add(red_arc(1, 0.0, kPi), 1, +1, 2);
        add(red_arc(0, kPi, kPi), 0, -1, 0);
        add(red_arc(2, kPi, -kPi), 2, -1, 1);
        add(red_arc(1, 0.0, -kPi), 1, -1, 2);
        t.n_groups = 3;
        t.group_center_cluster = {0, 1, 2};  // R12 -> M12, R13 -> M13, R23 -> M23
    }
    return t;
}

CircleDecomposition plan_decomposition(const TraversalPlan& t, int copies,
                                       int extra_loops, double copy_len) {
    CircleDecomposition d;
    int n = (int)t.pieces.size();
    int nclusters = 3;
    d.clusters.assign(nclusters, {});
    double s = 0.0;
    int ngroups_total = t.n_groups * copies + extra_loops;
    d.groups.assign(ngroups_total, {});
    for (int c = 0; c < copies; ++c) {
        for (int i = 0; i < n; ++i) {
            int bp = c * n + i;
            d.breaking_points.push_back(s);
            s += t.pieces[i].length();
            d.clusters[t.cluster_of[i]].push_back(bp);
            int g = c * t.n_groups + t.group_of[i];
            d.groups[g].intervals.push_back(bp);
            d.groups[g].signs.push_back(t.sign_of[i]);
        }
    }
    // extra full-circle loops appended after the copies, each one interval
    for (int e = 0; e < extra_loops; ++e) {
        int bp = copies * n + e;
        d.breaking_points.push_back(copies * copy_len + e * 2 * kPi);
        d.clusters[0].push_back(bp);  // loops start at the cluster-0 point
        d.groups[copies * t.n_groups + e].intervals.push_back(bp);
        d.groups[copies * t.n_groups + e].signs.push_back(+1);
    }
    // groups listed with reversed intervals first need their order fixed:
    // put the +1 interval first so concatenation starts forward
    for (auto& g : d.groups) {
        if (g.signs.size() == 2 && g.signs[0] == -1) {
            std::swap(g.intervals[0], g.intervals[1]);
            std::swap(g.signs[0], g.signs[1]);
        }
    }
    return d;
}

PiecewiseCurve plan_curve(const TraversalPlan& t, int copies, int extra_loops,
                          const Piece& loop) {
    std::vector<Piece> ps;
    for (int c = 0; c < copies; ++c)
        for (auto& p : t.pieces) ps.push_back(p);
    for (int e = 0; e < extra_loops; ++e) ps.push_back(loop);
    return PiecewiseCurve(std::move(ps), true);
}

std::vector<std::vector<bool>> family_linking(const std::vector<int>& blue_center_cluster,
                                              const std::vector<int>& red_center_cluster) {
    // blue circle around red-cluster c (c indexes T1,T2,T3 as 0,1,2) is the
    // blue circle of that triangle vertex; red circle around blue-cluster c
    // (M12,M13,M23) covers edge c. Linked iff the vertex belongs to the edge.
    auto vertex_on_edge = [](int vertex, int edge) {
        static const int ends[3][2] = {{0, 1}, {0, 2}, {1, 2}};  // M12, M13, M23
        return ends[edge][0] == vertex || ends[edge][1] == vertex;
    };
    std::vector<std::vector<bool>> m(blue_center_cluster.size(),
                                     std::vector<bool>(red_center_cluster.size(), false));
    for (std::size_t i = 0; i < blue_center_cluster.size(); ++i)
        for (std::size_t j = 0; j < red_center_cluster.size(); ++j)
            m[i][j] = vertex_on_edge(blue_center_cluster[i], red_center_cluster[j]);
    return m;
}

Construction build_unlink(bool augmented) {
    TraversalPlan tb = blue_plan(augmented), tr = red_plan(augmented);
    Construction out;
    PiecewiseCurve blue = plan_curve(tb, 1, 0, tb.pieces[0]);
    PiecewiseCurve red = plan_curve(tr, 1, 0, tr.pieces[0]);
    ConjoinedDecomposition d;
    double blen = blue.length_param(), rlen = red.length_param();
    d.a = plan_decomposition(tb, 1, 0, blen);
    d.b = plan_decomposition(tr, 1, 0, rlen);
    d.hB = tb.group_center_cluster;
    d.hA = tr.group_center_cluster;
    d.linking = family_linking(tb.group_center_cluster, tr.group_center_cluster);
    out.link = make_link({std::move(blue), std::move(red)},
                         augmented ? "augmented-unlink-24pi" : "conjoined-unlink-12pi");
    out.decomp = std::move(d);
    return out;
}

}  // namespace

Construction build_conjoined_unlink() { return build_unlink(false); }
Construction build_augmented_unlink() { return build_unlink(true); }

Construction build_linking_n(int k, int n) {
    if (n < 0) throw std::invalid_argument("build_linking_n: n must be >= 0");
    if (k < std::max(2, n - 1))
        throw std::invalid_argument("build_linking_n: need k >= max(2, n-1)");
    TraversalPlan tb = blue_plan(true), tr = red_plan(true);
    // S1: the blue circle around T1 with the loop orientation it has in the
    // traversal; S2: the red circle around M12 likewise. lk(S1, S2) = 1.
    Piece s1 = blue_arc(kT1, 0.0, 2 * kPi);
    Piece s2 = red_arc(0, kPi, -2 * kPi);

    PiecewiseCurve c1 = plan_curve(tb, k, n, s1);
    PiecewiseCurve c2 = plan_curve(tr, k, 1, s2);
    ConjoinedDecomposition d;
    d.a = plan_decomposition(tb, k, n, 12 * kPi);
    d.b = plan_decomposition(tr, k, 1, 12 * kPi);
    for (int c = 0; c < k; ++c)
        for (int g : tb.group_center_cluster) d.hB.push_back(g);
    for (int e = 0; e < n; ++e) d.hB.push_back(0);  // S1 loops centered at T1
    for (int c = 0; c < k; ++c)
        for (int g : tr.group_center_cluster) d.hA.push_back(g);
    d.hA.push_back(0);  // S2 centered at M12
    std::vector<int> bc, rc;
    for (int c = 0; c < k; ++c)
        for (int g : tb.group_center_cluster) bc.push_back(g);
    for (int e = 0; e < n; ++e) bc.push_back(0);
    for (int c = 0; c < k; ++c)
        for (int g : tr.group_center_cluster) rc.push_back(g);
    rc.push_back(0);
    d.linking = family_linking(bc, rc);

    Construction out;
    out.link = make_link({std::move(c1), std::move(c2)},
                         "linking-n:k=" + std::to_string(k) + ",n=" + std::to_string(n));
    out.decomp = std::move(d);
    return out;
}

Construction build_by_id(const std::string& id) {
    if (id == "gordian-split-4") return {build_gordian_split_link(), std::nullopt};
    if (id == "hopf-minimal") return {build_hopf_minimal(), std::nullopt};
    if (id == "conjoined-unlink-12pi") return build_conjoined_unlink();
    if (id == "augmented-unlink-24pi") return build_augmented_unlink();
    if (id.rfind("linking-n:", 0) == 0) {
        int k = -1, n = -1;
        if (std::sscanf(id.c_str(), "linking-n:k=%d,n=%d", &k, &n) == 2)
            return build_linking_n(k, n);
        throw std::invalid_argument("construction id: expected linking-n:k=<k>,n=<n>");
    }
    throw std::invalid_argument("unknown construction id: " + id);
}

GordianHypotheses check_gordian_hypotheses(const Link& link, double tol, bool parallel) {
    if (link.size() != 4)
        throw std::invalid_argument("check_gordian_hypotheses: expected (M, A1, A2, C)");
    GordianHypotheses out;
    const auto& M = dynamic_cast<const PiecewiseCurve&>(link.comp(0));
    ConeDisk disk = center_of_mass_disk(link.components[3]);
    DiskIntersections di = disk_curve_intersections(disk, M, tol, parallel);
    out.resolved = di.resolved();
    out.intersections = (int)di.records.size();
    out.all_transverse = !di.records.empty();
    for (auto& r : di.records) {
        out.points.push_back(r.point);
        if (!r.transverse) out.all_transverse = false;
    }
    if (!out.resolved || out.intersections != 2 || !out.all_transverse) return out;

    // chord-split halves of M, each closed with the segment between the two
    // intersection points
    double t1 = di.records[0].t, t2 = di.records[1].t;
    Vec3 p1 = M.point_cyclic(t1), p2 = M.point_cyclic(t2);
    auto half = [&](double from, double to) {
        auto ps = M.subcurve_pieces(from, to);
        ps.push_back(Piece::segment({M.point_cyclic(to), M.point_cyclic(from)}));
        return PiecewiseCurve(std::move(ps), true);
    };
    PiecewiseCurve m1 = half(t1, t2);
    PiecewiseCurve m2 = half(t2, t1 + M.length_param());
    (void)p1;
    (void)p2;
    // m1/m2 naming follows the auxiliary circles: the half reaching into
    // x > 0 is paired with the circle centered at positive x
    auto max_x = [](const PiecewiseCurve& c) {
        double m = -HUGE_VAL;
        for (double s = 0; s < c.length_param(); s += 1e-2) m = std::max(m, c.point(s).x);
        return m;
    };
    const Curve& a1 = link.comp(1);
    const Curve& a2 = link.comp(2);
    bool m1_positive = max_x(m1) > max_x(m2);
    const PiecewiseCurve& mp = m1_positive ? m1 : m2;
    const PiecewiseCurve& mn = m1_positive ? m2 : m1;
    out.lk_m1_a1 = linking_number(mp, a1, 1e-2, 7, parallel);
    out.lk_m2_a2 = linking_number(mn, a2, 1e-2, 7, parallel);
    out.pass = std::abs(out.lk_m1_a1) == 1 && std::abs(out.lk_m2_a2) == 1;
    return out;
}

}  // namespace rl
