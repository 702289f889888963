#include "rl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rl {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double phi(double t) {
    if (t < 0.0 || t > 0.5) throw std::invalid_argument("phi: t must be in [0, 1/2]");
    return std::asin(2.0 * t) - t;
}

namespace {

// perimeter of the convex hull; throws if some input vertex is not on it
double convex_perimeter(const std::vector<Vec3>& vs) {
    if (vs.size() <= 1) return 0.0;
    if (vs.size() == 2) return 2.0 * dist(vs[0], vs[1]);
    // The points must be planar and in convex position.
    Vec3 c{0, 0, 0};
    for (auto& v : vs) c += v;
    c = c / (double)vs.size();
    Vec3 n{0, 0, 0};
    for (std::size_t i = 0; i < vs.size(); ++i)
        n += cross(vs[i] - c, vs[(i + 1) % vs.size()] - c);
    if (norm(n) < 1e-12) throw std::invalid_argument("polygon_cone_bound: degenerate polygon");
    n = normalized(n);
    for (auto& v : vs)
        if (std::abs(dot(v - c, n)) > 1e-9)
            throw std::invalid_argument("polygon_cone_bound: vertices are not coplanar");
    Vec3 e1 = normalized(vs[0] - c);
    Vec3 e2 = cross(n, e1);
    std::vector<std::pair<double, Vec3>> ang;
    for (auto& v : vs) ang.push_back({std::atan2(dot(v - c, e2), dot(v - c, e1)), v});
    std::sort(ang.begin(), ang.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double per = 0.0;
    for (std::size_t i = 0; i < ang.size(); ++i) {
        const Vec3& a = ang[i].second;
        const Vec3& b = ang[(i + 1) % ang.size()].second;
        const Vec3& d = ang[(i + 2) % ang.size()].second;
        if (dot(cross(b - a, d - b), n) < -1e-9)
            throw std::invalid_argument("polygon_cone_bound: vertex set is not convex");
        per += dist(a, b);
    }
    return per;
}

}  // namespace

BoundResult polygon_cone_bound(double r, const std::vector<Vec3>& vertices) {
    if (r < 0) throw std::invalid_argument("polygon_cone_bound: r must be >= 0");
    BoundResult b;
    b.formula = "len >= 2 pi r + circumference(P)";
    double per = convex_perimeter(vertices);
    b.value = 2.0 * kPi * r + per;
    b.inputs = {{"r", r}, {"circumference", per}};
    return b;
}

double qn(int n) {
    switch (n) {
        case 1: return 0.0;
        case 2: return 2.0;
        case 3: return 3.0;
        case 4: return 4.0;
        default:
            throw std::invalid_argument(
                "qn: no exact value for n >= 5 (only the asymptotic Q_n ~ sqrt(n) is known)");
    }
}

BoundResult link_lower_bound(const std::vector<int>& ks) {
    BoundResult b;
    b.formula = "len >= 2 n pi + sum Q_{k_i}";
    double total = 0.0;
    int nlinked = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        int k = ks[i];
        if (k < 0) throw std::invalid_argument("link_lower_bound: negative degree");
        if (k == 0) continue;  // an unlinked component contributes nothing
        ++nlinked;
        total += 2.0 * kPi + qn(k);
        b.inputs.push_back({"k" + std::to_string(i), (double)k});
    }
    b.value = total;
    b.inputs.push_back({"linked_components", (double)nlinked});
    return b;
}

BoundResult eps_two_point_bound(double dist_xy, double eps) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("eps_two_point_bound: eps in [0,1]");
    if (dist_xy < 0.0) throw std::invalid_argument("eps_two_point_bound: negative distance");
    BoundResult b;
    b.formula = "len >= 2 pi + 2 ||x-y|| - (2 pi + 4) eps";
    b.value = 2.0 * kPi + 2.0 * dist_xy - (2.0 * kPi + 4.0) * eps;
    b.inputs = {{"dist", dist_xy}, {"eps", eps}};
    return b;
}

BoundResult split_margin(double link_ropelength) {
    BoundResult b;
    b.formula = "no thick homotopy splits L when len(L) < 8 pi + 6";
    double threshold = 8.0 * kPi + 6.0;
    b.value = threshold;
    b.inputs = {{"threshold", threshold},
                {"ropelength", link_ropelength},
                {"margin", threshold - link_ropelength}};
    return b;
}

BoundResult almost_closed_bound(double diam, const std::vector<double>& gaps) {
    if (diam < 0) throw std::invalid_argument("almost_closed_bound: negative diameter");
    BoundResult b;
    b.formula = "sum len(C_i) >= 2 pi + 2 diam(A) - sum phi(gap_i)";
    double v = 2.0 * kPi + 2.0 * diam;
    for (double g : gaps) v -= phi(g);  // phi throws outside [0, 1/2]
    b.value = v;
    b.inputs = {{"diam", diam}, {"gaps", (double)gaps.size()}};
    return b;
}

double suitability_margin(const std::vector<std::pair<int, int>>& cluster_counts) {
    double m = HUGE_VAL;
    for (auto& [h_preimage, f] : cluster_counts) {
        if (f < 1) throw std::invalid_argument("suitability_margin: f(l) must be >= 1");
        m = std::min(m, 2.0 * h_preimage / (double)f);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Detour construction

namespace {

struct Disk2 {
    double cx, cy, r;
    bool valid;
};

// exit distance of the ray from m along unit dir through a disk containing m
double ray_exit(const Disk2& D, double mx, double my, double ux, double uy) {
    double rx = D.cx - mx, ry = D.cy - my;
    double proj = rx * ux + ry * uy;
    double perp2 = (rx * rx + ry * ry) - proj * proj;
    double disc = D.r * D.r - perp2;
    if (disc <= 0) return -HUGE_VAL;
    return proj + std::sqrt(disc);
}

}  // namespace

PiecewiseCurve detour_curve(const Vec3& a, const Vec3& b, const Vec3& x, const Vec3& y,
                            const Vec3& m) {
    double dab = dist(a, b);
    if (!(dab < 0.5)) throw std::invalid_argument("detour_curve: need ||a-b|| < 1/2");
    if (!(dist(x, y) < 0.5 && dist(x, m) < 0.5 && dist(y, m) < 0.5))
        throw std::invalid_argument("detour_curve: need ||x-y||, ||x-m||, ||y-m|| < 1/2");
    if (dist(a, x) < 1.0 - 1e-12 || dist(a, y) < 1.0 - 1e-12 || dist(b, x) < 1.0 - 1e-12 ||
        dist(b, y) < 1.0 - 1e-12)
        throw std::invalid_argument("detour_curve: a, b must avoid the open unit balls");

    // plane through a, b, m
    Vec3 e1 = normalized(b - a);
    Vec3 w = m - a;
    Vec3 e2v = w - dot(w, e1) * e1;
    bool collinear = norm(e2v) < 1e-12;
    if (collinear) {
        // the lemma's collinear case: the straight segment already avoids the balls
        return PiecewiseCurve({Piece::segment({a, b})}, false);
    }
    Vec3 e2 = normalized(e2v);
    auto to2 = [&](const Vec3& p) { return std::pair<double, double>(dot(p - a, e1), dot(p - a, e2)); };
    auto to3 = [&](double px, double py) { return a + px * e1 + py * e2; };

    auto mk_disk = [&](const Vec3& c) {
        Disk2 D;
        Vec3 off = c - a;
        double out = dot(off, cross(e1, e2));
        double r2 = 1.0 - out * out;
        D.valid = r2 > 0;
        D.cx = dot(off, e1);
        D.cy = dot(off, e2);
        D.r = D.valid ? std::sqrt(r2) : 0.0;
        return D;
    };
    Disk2 D1 = mk_disk(x), D2 = mk_disk(y);
    auto [mx, my] = to2(m);

    // segment ab is the x-axis from 0 to dab; intersect with the disks
    double t_in = HUGE_VAL, t_out = -HUGE_VAL;
    for (const Disk2& D : {D1, D2}) {
        if (!D.valid) continue;
        double disc = D.r * D.r - D.cy * D.cy;
        if (disc <= 0) continue;
        double s0 = D.cx - std::sqrt(disc), s1 = D.cx + std::sqrt(disc);
        if (s1 <= 0 || s0 >= dab) continue;
        t_in = std::min(t_in, std::max(0.0, s0));
        t_out = std::max(t_out, std::min(dab, s1));
    }
    if (t_in >= t_out) return PiecewiseCurve({Piece::segment({a, b})}, false);

    // radial projection away from m of the covered part of ab
    auto dir_at = [&](double t) {
        double dx = t - mx, dy = -my;
        double n = std::hypot(dx, dy);
        return std::pair<double, double>(dx / n, dy / n);
    };
    auto exit_disk = [&](double ux, double uy) -> int {
        double s1 = D1.valid ? ray_exit(D1, mx, my, ux, uy) : -HUGE_VAL;
        double s2 = D2.valid ? ray_exit(D2, mx, my, ux, uy) : -HUGE_VAL;
        return s1 >= s2 ? 0 : 1;
    };
    auto exit_point = [&](double t) {
        auto [ux, uy] = dir_at(t);
        double s1 = D1.valid ? ray_exit(D1, mx, my, ux, uy) : -HUGE_VAL;
        double s2 = D2.valid ? ray_exit(D2, mx, my, ux, uy) : -HUGE_VAL;
        double s = std::max(s1, s2);
        return std::pair<double, double>(mx + s * ux, my + s * uy);
    };

    // locate switch parameters where the winning disk changes
    const int kScan = 2048;
    std::vector<double> knots{t_in};
    int prev = exit_disk(dir_at(t_in).first, dir_at(t_in).second);
    for (int i = 1; i <= kScan; ++i) {
        double t = t_in + (t_out - t_in) * i / kScan;
        int cur = exit_disk(dir_at(t).first, dir_at(t).second);
        if (cur != prev) {
            double lo = t_in + (t_out - t_in) * (i - 1) / kScan, hi = t;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                if (exit_disk(dir_at(mid).first, dir_at(mid).second) == prev) lo = mid;
                else hi = mid;
            }
            knots.push_back(0.5 * (lo + hi));
            prev = cur;
        }
    }
    knots.push_back(t_out);

    std::vector<Piece> pieces;
    auto [ex0, ey0] = exit_point(t_in);
    Vec3 p_in = to3(ex0, ey0);
    if (t_in > 1e-12 && dist(a, p_in) > 1e-12) pieces.push_back(Piece::segment({a, p_in}));

    Vec3 n3 = cross(e1, e2);
    (void)n3;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        double ta = knots[k], tb = knots[k + 1];
        double tmid = 0.5 * (ta + tb);
        const Disk2& D = exit_disk(dir_at(tmid).first, dir_at(tmid).second) == 0 ? D1 : D2;
        auto [ax2, ay2] = exit_point(ta);
        auto [bx2, by2] = exit_point(tb);
        auto [mx2, my2] = exit_point(tmid);
        double th0 = std::atan2(ay2 - D.cy, ax2 - D.cx);
        double th1 = std::atan2(by2 - D.cy, bx2 - D.cx);
        double thm = std::atan2(my2 - D.cy, mx2 - D.cx);
        // orient the sweep through the sampled midpoint
        double sweep = std::remainder(th1 - th0, 2 * kPi);
        double halfm = std::remainder(thm - th0, 2 * kPi);
        if (sweep * halfm < 0 || std::abs(halfm) > std::abs(sweep))
            sweep = sweep > 0 ? sweep - 2 * kPi : sweep + 2 * kPi;
        if (std::abs(sweep) < 1e-14) continue;
        ArcPiece arc;
        arc.center = to3(D.cx, D.cy);
        arc.u = e1;
        arc.v = e2;
        arc.radius = D.r;
        arc.theta0 = th0;
        arc.dtheta = sweep;
        pieces.push_back(Piece::arc(arc));
    }

    auto [ex1, ey1] = exit_point(t_out);
    Vec3 p_out = to3(ex1, ey1);
    if (t_out < dab - 1e-12 && dist(p_out, b) > 1e-12) pieces.push_back(Piece::segment({p_out, b}));
    if (pieces.empty()) pieces.push_back(Piece::segment({a, b}));

    PiecewiseCurve c(std::move(pieces), false);
    double bound = std::asin(2.0 * dab) - dab;
    if (c.length_interval().lo > bound + 1e-9)
        throw std::runtime_error("detour_curve: constructed curve exceeds the length bound");
    return c;
}

}  // namespace rl
