#include "rl/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "rl/cone.hpp"
#include "rl/json_out.hpp"
#include "rl/metrics.hpp"
#include "rl/parallel.hpp"

namespace rl {

namespace {

constexpr double kPi = 3.14159265358979323846;

// smallest-eigenvalue eigenvector of a symmetric 3x3 (Jacobi sweeps)
Vec3 smallest_axis(double a[3][3]) {
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int sweep = 0; sweep < 32; ++sweep) {
        int p = 0, q = 1;
        double m = std::abs(a[0][1]);
        if (std::abs(a[0][2]) > m) { m = std::abs(a[0][2]); p = 0; q = 2; }
        if (std::abs(a[1][2]) > m) { m = std::abs(a[1][2]); p = 1; q = 2; }
        if (m < 1e-18) break;
        double theta = 0.5 * std::atan2(2 * a[p][q], a[q][q] - a[p][p]);
        double c = std::cos(theta), s = std::sin(theta);
        double app = c * c * a[p][p] - 2 * s * c * a[p][q] + s * s * a[q][q];
        double aqq = s * s * a[p][p] + 2 * s * c * a[p][q] + c * c * a[q][q];
        int r = 3 - p - q;
        double arp = c * a[r][p] - s * a[r][q];
        double arq = s * a[r][p] + c * a[r][q];
        a[p][p] = app;
        a[q][q] = aqq;
        a[p][q] = a[q][p] = 0.0;
        a[r][p] = a[p][r] = arp;
        a[r][q] = a[q][r] = arq;
        for (int i = 0; i < 3; ++i) {
            double vip = c * v[i][p] - s * v[i][q];
            double viq = s * v[i][p] + c * v[i][q];
            v[i][p] = vip;
            v[i][q] = viq;
        }
    }
    int k = 0;
    if (a[1][1] < a[k][k]) k = 1;
    if (a[2][2] < a[k][k]) k = 2;
    return normalized(Vec3{v[0][k], v[1][k], v[2][k]});
}

}  // namespace

FittedCircle fit_circle(const std::vector<Vec3>& pts) {
    if (pts.size() < 3) throw std::invalid_argument("fit_circle: need >= 3 points");
    Vec3 cen{0, 0, 0};
    for (auto& p : pts) cen += p;
    cen = cen / (double)pts.size();
    double cov[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    for (auto& p : pts) {
        Vec3 d = p - cen;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cov[i][j] += d[i] * d[j];
    }
    FittedCircle f;
    f.normal = smallest_axis(cov);
    Vec3 e1 = normalized(cross(f.normal, std::abs(f.normal.x) < 0.8 ? Vec3{1, 0, 0}
                                                                    : Vec3{0, 1, 0}));
    Vec3 e2 = cross(f.normal, e1);

    // algebraic (Kasa) fit in the plane: minimize sum (|p|^2 - 2 c.p - k)^2
    double Sxx = 0, Sxy = 0, Syy = 0, Sx = 0, Sy = 0, Sxz = 0, Syz = 0, Sz = 0;
    std::size_t n = pts.size();
    for (auto& p : pts) {
        double x = dot(p - cen, e1), y = dot(p - cen, e2);
        double z = x * x + y * y;
        Sxx += x * x; Sxy += x * y; Syy += y * y;
        Sx += x; Sy += y;
        Sxz += x * z; Syz += y * z; Sz += z;
    }
    double A[3][3] = {{2 * Sxx, 2 * Sxy, Sx}, {2 * Sxy, 2 * Syy, Sy}, {2 * Sx, 2 * Sy, (double)n}};
    double B[3] = {Sxz, Syz, Sz};
    // solve 3x3
    auto solve3 = [&](double M[3][3], double* b, double* out) {
        for (int i = 0; i < 3; ++i) {
            int piv = i;
            for (int r = i + 1; r < 3; ++r)
                if (std::abs(M[r][i]) > std::abs(M[piv][i])) piv = r;
            std::swap(M[i], M[piv]);
            std::swap(b[i], b[piv]);
            for (int r = i + 1; r < 3; ++r) {
                double fpiv = M[r][i] / M[i][i];
                for (int ccol = i; ccol < 3; ++ccol) M[r][ccol] -= fpiv * M[i][ccol];
                b[r] -= fpiv * b[i];
            }
        }
        for (int i = 2; i >= 0; --i) {
            double s = b[i];
            for (int ccol = i + 1; ccol < 3; ++ccol) s -= M[i][ccol] * out[ccol];
            out[i] = s / M[i][i];
        }
    };
    double sol[3];
    solve3(A, B, sol);
    double cx = sol[0], cy = sol[1];
    double r = std::sqrt(std::max(0.0, sol[2] + cx * cx + cy * cy));

    // geometric refinement (Gauss-Newton on the radial residuals)
    for (int it = 0; it < 24; ++it) {
        double JtJ[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double Jtr[3] = {0, 0, 0};
        for (auto& p : pts) {
            double x = dot(p - cen, e1), y = dot(p - cen, e2);
            double rho = std::hypot(x - cx, y - cy);
            if (rho < 1e-12) continue;
            double res = rho - r;
            double jx = (cx - x) / rho, jy = (cy - y) / rho, jr = -1.0;
            double J[3] = {jx, jy, jr};
            for (int i = 0; i < 3; ++i) {
                Jtr[i] += J[i] * res;
                for (int j = 0; j < 3; ++j) JtJ[i][j] += J[i] * J[j];
            }
        }
        for (int i = 0; i < 3; ++i) JtJ[i][i] += 1e-12;
        double step[3], rhs[3] = {-Jtr[0], -Jtr[1], -Jtr[2]};
        solve3(JtJ, rhs, step);
        cx += step[0];
        cy += step[1];
        r += step[2];
        if (std::abs(step[0]) + std::abs(step[1]) + std::abs(step[2]) < 1e-15) break;
    }
    f.center = cen + cx * e1 + cy * e2;
    f.radius = r;
    f.max_deviation = 0.0;
    for (auto& p : pts) {
        double h = dot(p - f.center, f.normal);
        double x = dot(p - f.center, e1), y = dot(p - f.center, e2);
        double rho = std::hypot(x, y);
        f.max_deviation = std::max(f.max_deviation, std::hypot(rho - r, h));
    }
    return f;
}

// ---------------------------------------------------------------------------

namespace {

double interval_end(const CircleDecomposition& d, double len, int i) {
    int n = (int)d.breaking_points.size();
    return i + 1 < n ? d.breaking_points[i + 1] : d.breaking_points[0] + len;
}

// samples of the signed concatenation C^j, in concatenation order
std::vector<Vec3> group_samples(const Curve& curve, const CircleDecomposition& d, int g,
                                int per_interval) {
    std::vector<Vec3> out;
    double len = curve.length_param();
    const CircleGroup& grp = d.groups[g];
    for (std::size_t k = 0; k < grp.intervals.size(); ++k) {
        int i = grp.intervals[k];
        double s0 = d.breaking_points[i], s1 = interval_end(d, len, i);
        for (int q = 0; q <= per_interval; ++q) {
            double f = (double)q / per_interval;
            if (grp.signs[k] < 0) f = 1.0 - f;
            out.push_back(curve.point_cyclic(s0 + f * (s1 - s0)));
        }
    }
    return out;
}

}  // namespace

Vec3 group_center(const Curve& curve, const CircleDecomposition& d, int g) {
    return fit_circle(group_samples(curve, d, g, 64)).center;
}

VerifyReport verify_circle_decomposition(const Curve& curve, const CircleDecomposition& d,
                                         double tol) {
    VerifyReport rep;
    double len = curve.length_param();
    int n = (int)d.breaking_points.size();

    {
        CheckItem it{"breaking-points-ordered", true, false, ""};
        if (n < 1) { it.pass = false; it.detail = "no breaking points"; }
        for (int i = 0; i + 1 < n && it.pass; ++i)
            if (!(d.breaking_points[i] < d.breaking_points[i + 1])) {
                it.pass = false;
                it.detail = "breaking points not strictly increasing at index " + std::to_string(i);
            }
        if (it.pass && n >= 1 &&
            (d.breaking_points.front() < 0 || d.breaking_points.back() >= len)) {
            it.pass = false;
            it.detail = "breaking points outside [0, len)";
        }
        rep.items.push_back(it);
        if (!it.pass) return rep;
    }

    {
        CheckItem it{"intervals-positive", true, false, ""};
        for (int i = 0; i < n; ++i)
            if (!(interval_end(d, len, i) - d.breaking_points[i] > 0)) {
                it.pass = false;
                it.detail = "interval " + std::to_string(i) + " empty";
            }
        rep.items.push_back(it);
    }

    {
        CheckItem it{"groups-partition-intervals", true, false, ""};
        std::vector<int> seen(n, 0);
        for (auto& g : d.groups) {
            if (g.intervals.size() != g.signs.size()) { it.pass = false; it.detail = "signs size"; }
            for (int i : g.intervals) {
                if (i < 0 || i >= n) { it.pass = false; it.detail = "interval index"; break; }
                seen[i]++;
            }
        }
        for (int i = 0; i < n; ++i)
            if (seen[i] != 1) { it.pass = false; it.detail = "interval " + std::to_string(i) + " covered " + std::to_string(seen[i]) + " times"; }
        rep.items.push_back(it);
        if (!it.pass) return rep;
    }

    {
        CheckItem it{"clusters-partition-breakpoints", true, false, ""};
        std::vector<int> seen(n, 0);
        for (auto& cl : d.clusters) {
            if (cl.empty()) { it.pass = false; it.detail = "empty cluster"; }
            for (int i : cl) {
                if (i < 0 || i >= n) { it.pass = false; it.detail = "cluster index"; break; }
                seen[i]++;
            }
        }
        for (int i = 0; i < n; ++i)
            if (seen[i] != 1) { it.pass = false; it.detail = "breakpoint " + std::to_string(i) + " covered " + std::to_string(seen[i]) + " times"; }
        rep.items.push_back(it);
        if (!it.pass) return rep;
    }

    for (std::size_t g = 0; g < d.groups.size(); ++g) {
        const CircleGroup& grp = d.groups[g];
        std::string tag = "group-" + std::to_string(g);
        {
            CheckItem it{tag + "-length-2pi", true, false, ""};
            double total = 0.0;
            for (int i : grp.intervals) total += interval_end(d, len, i) - d.breaking_points[i];
            if (std::abs(total - 2 * kPi) > tol) {
                it.pass = false;
                it.detail = "length " + std::to_string(total);
            }
            rep.items.push_back(it);
        }
        {
            CheckItem it{tag + "-concatenation-continuous", true, false, ""};
            for (std::size_t k = 0; k < grp.intervals.size(); ++k) {
                int i = grp.intervals[k];
                int inext = grp.intervals[(k + 1) % grp.intervals.size()];
                double e0 = grp.signs[k] > 0 ? interval_end(d, len, i) : d.breaking_points[i];
                double s1 = grp.signs[(k + 1) % grp.signs.size()] > 0
                                ? d.breaking_points[inext]
                                : interval_end(d, len, inext);
                if (dist(curve.point_cyclic(e0), curve.point_cyclic(s1)) > 1e-8) {
                    it.pass = false;
                    it.detail = "gap after interval " + std::to_string(i);
                }
            }
            rep.items.push_back(it);
        }
        {
            CheckItem it{tag + "-unit-circle-fit", true, false, ""};
            FittedCircle f = fit_circle(group_samples(curve, d, (int)g, 64));
            if (std::abs(f.radius - 1.0) > tol || f.max_deviation > tol) {
                it.pass = false;
                it.detail = "radius " + std::to_string(f.radius) + ", deviation " +
                            std::to_string(f.max_deviation);
            }
            rep.items.push_back(it);
        }
    }

    {
        CheckItem it{"cluster-condition", true, false, ""};
        std::vector<int> cluster_of(n, -1);
        for (std::size_t l = 0; l < d.clusters.size(); ++l)
            for (int i : d.clusters[l]) cluster_of[i] = (int)l;
        for (int i = 0; i < n && it.pass; ++i)
            for (int j = i + 1; j < n && it.pass; ++j) {
                double dd = dist(curve.point_cyclic(d.breaking_points[i]),
                                 curve.point_cyclic(d.breaking_points[j]));
                bool same = cluster_of[i] == cluster_of[j];
                if (same && dd > 1e-8) {
                    it.pass = false;
                    it.detail = "clustered breakpoints " + std::to_string(i) + "," +
                                std::to_string(j) + " map " + std::to_string(dd) + " apart";
                }
                if (!same && dd <= 1e-8) {
                    it.pass = false;
                    it.detail = "breakpoints " + std::to_string(i) + "," + std::to_string(j) +
                                " coincide but are not clustered";
                }
            }
        rep.items.push_back(it);
    }
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct GroupGeometry {
    FittedCircle circle;
    std::shared_ptr<PiecewiseCurve> curve;  // the extracted circle curve C^j
};

GroupGeometry extract_group(const PiecewiseCurve& curve, const CircleDecomposition& d, int g) {
    GroupGeometry gg;
    gg.circle = fit_circle(group_samples(curve, d, g, 96));
    double len = curve.length_param();
    std::vector<Piece> ps;
    const CircleGroup& grp = d.groups[g];
    for (std::size_t k = 0; k < grp.intervals.size(); ++k) {
        int i = grp.intervals[k];
        double s0 = d.breaking_points[i], s1 = interval_end(d, len, i);
        auto sub = curve.subcurve_pieces(s0, s1);
        if (grp.signs[k] < 0) {
            std::vector<Piece> rev;
            for (auto it = sub.rbegin(); it != sub.rend(); ++it) rev.push_back(it->reversed());
            sub.swap(rev);
        }
        for (auto& p : sub) ps.push_back(std::move(p));
    }
    gg.curve = std::make_shared<PiecewiseCurve>(std::move(ps), true);
    return gg;
}

const PiecewiseCurve& as_piecewise(const Curve& c, const char* who) {
    auto* pw = dynamic_cast<const PiecewiseCurve*>(&c);
    if (!pw) throw std::invalid_argument(std::string(who) + ": needs piecewise curves");
    return *pw;
}

}  // namespace

VerifyReport verify_conjoined(const Link& link, const ConjoinedDecomposition& c, double tol,
                              bool parallel) {
    VerifyReport rep;
    if (link.size() != 2) throw std::invalid_argument("verify_conjoined: needs a 2-component link");
    const PiecewiseCurve& C1 = as_piecewise(link.comp(0), "verify_conjoined");
    const PiecewiseCurve& C2 = as_piecewise(link.comp(1), "verify_conjoined");

    {
        VerifyReport ra = verify_circle_decomposition(C1, c.a, tol);
        VerifyReport rb = verify_circle_decomposition(C2, c.b, tol);
        CheckItem it{"component-decompositions", ra.pass() && rb.pass(), false, ""};
        if (!ra.pass()) it.detail = "component 0: " + ra.failed()->name;
        if (!rb.pass()) it.detail += " component 1: " + rb.failed()->name;
        rep.items.push_back(it);
        if (!it.pass) return rep;
    }

    {
        CheckItem it{"distance-1", true, false, ""};
        IntervalValue d = min_distance(C1, C2, 1e-7, parallel);
        if (std::abs(d.mid() - 1.0) > 1e-6) {
            it.pass = false;
            it.detail = "dist(C1,C2) = [" + std::to_string(d.lo) + ", " + std::to_string(d.hi) + "]";
        }
        rep.items.push_back(it);
    }

    // Circle centers pierced at the named clusters, and transversality of
    // every disk intersection.
    auto side_checks = [&](const PiecewiseCurve& self, const CircleDecomposition& ds,
                           const PiecewiseCurve& other, const CircleDecomposition& dother,
                           const std::vector<int>& h, const char* side) {
        for (std::size_t j = 0; j < ds.groups.size(); ++j) {
            GroupGeometry gg = extract_group(self, ds, (int)j);
            std::string tag = std::string(side) + "-circle-" + std::to_string(j);
            CheckItem piercing{tag + "-center-at-cluster", true, false, ""};
            if (j >= h.size() || h[j] < 0 || h[j] >= (int)dother.clusters.size()) {
                piercing.pass = false;
                piercing.detail = "h index out of range";
            } else {
                for (int bi : dother.clusters[h[j]]) {
                    double dd = dist(other.point_cyclic(dother.breaking_points[bi]), gg.circle.center);
                    if (dd > 1e-6) {
                        piercing.pass = false;
                        piercing.detail = "cluster point misses center by " + std::to_string(dd);
                    }
                }
            }
            rep.items.push_back(piercing);

            CheckItem trans{tag + "-transverse", true, false, ""};
            Vec3 e1 = normalized(cross(gg.circle.normal, std::abs(gg.circle.normal.x) < 0.8
                                                             ? Vec3{1, 0, 0}
                                                             : Vec3{0, 1, 0}));
            Vec3 e2 = cross(gg.circle.normal, e1);
            ConeDisk disk = flat_disk(gg.circle.center, e1, e2, gg.circle.radius);
            try {
                DiskIntersections di = disk_curve_intersections(disk, other, 1e-6, parallel);
                if (!di.resolved()) {
                    trans.pass = false;
                    trans.inconclusive = true;
                    trans.detail = std::to_string(di.unresolved.size()) + " unresolved regions";
                } else if (di.records.empty()) {
                    trans.pass = false;
                    trans.detail = "no intersection found";
                } else {
                    for (auto& r : di.records)
                        if (!r.transverse) {
                            trans.pass = false;
                            trans.detail = "non-transverse record";
                        }
                }
            } catch (const std::exception& e) {
                trans.pass = false;
                trans.inconclusive = true;
                trans.detail = e.what();
            }
            rep.items.push_back(trans);
        }
    };
    side_checks(C1, c.a, C2, c.b, c.hB, "A");
    side_checks(C2, c.b, C1, c.a, c.hA, "B");
    return rep;
}

std::vector<std::vector<bool>> linking_scheme(const Link& link, const ConjoinedDecomposition& c,
                                              bool parallel) {
    const PiecewiseCurve& C1 = as_piecewise(link.comp(0), "linking_scheme");
    const PiecewiseCurve& C2 = as_piecewise(link.comp(1), "linking_scheme");
    std::size_t na = c.a.groups.size(), nb = c.b.groups.size();

    // group the circle curves by image to avoid recomputing identical pairs
    auto image_key = [](const FittedCircle& f) {
        auto q = [](double v) { return std::llround(v * 1e6); };
        Vec3 n = f.normal.z < 0 || (f.normal.z == 0 && f.normal.y < 0) ? -f.normal : f.normal;
        return std::array<long long, 7>{q(f.center.x), q(f.center.y), q(f.center.z),
                                        q(n.x), q(n.y), q(n.z), q(f.radius)};
    };
    std::vector<GroupGeometry> ga, gb;
    for (std::size_t j = 0; j < na; ++j) ga.push_back(extract_group(C1, c.a, (int)j));
    for (std::size_t j = 0; j < nb; ++j) gb.push_back(extract_group(C2, c.b, (int)j));
    std::map<std::array<long long, 7>, int> ka, kb;
    std::vector<int> ia(na), ib(nb);
    std::vector<int> repa, repb;
    for (std::size_t j = 0; j < na; ++j) {
        auto key = image_key(ga[j].circle);
        auto [it, fresh] = ka.try_emplace(key, (int)repa.size());
        if (fresh) repa.push_back((int)j);
        ia[j] = it->second;
    }
    for (std::size_t j = 0; j < nb; ++j) {
        auto key = image_key(gb[j].circle);
        auto [it, fresh] = kb.try_emplace(key, (int)repb.size());
        if (fresh) repb.push_back((int)j);
        ib[j] = it->second;
    }
    std::vector<std::vector<bool>> image_linked(repa.size(), std::vector<bool>(repb.size(), false));
    for (std::size_t p = 0; p < repa.size(); ++p)
        for (std::size_t q = 0; q < repb.size(); ++q) {
            int lk = linking_number(*ga[(std::size_t)repa[p]].curve, *gb[(std::size_t)repb[q]].curve,
                                    1e-2, 7, parallel);
            image_linked[p][q] = std::abs(lk) >= 1;
        }
    std::vector<std::vector<bool>> m(na, std::vector<bool>(nb, false));
    for (std::size_t j = 0; j < na; ++j)
        for (std::size_t j2 = 0; j2 < nb; ++j2) m[j][j2] = image_linked[ia[j]][ib[j2]];
    return m;
}

double decomposition_margin(const ConjoinedDecomposition& c) {
    std::vector<std::pair<int, int>> counts;
    auto side = [&](const CircleDecomposition& ds, const std::vector<int>& h_from_other,
                    const CircleDecomposition& /*dother*/) {
        int n = (int)ds.breaking_points.size();
        std::vector<int> cluster_of(n, -1);
        for (std::size_t l = 0; l < ds.clusters.size(); ++l)
            for (int i : ds.clusters[l]) cluster_of[i] = (int)l;
        for (std::size_t l = 0; l < ds.clusters.size(); ++l) {
            int h_pre = 0;
            for (int hl : h_from_other)
                if (hl == (int)l) ++h_pre;
            int f = 0;
            for (auto& g : ds.groups) {
                bool along = false;
                for (int i : g.intervals) {
                    int inext = (i + 1) % n;
                    if (cluster_of[i] == (int)l || cluster_of[inext] == (int)l) along = true;
                }
                if (along) ++f;
            }
            counts.push_back({h_pre, f});
        }
    };
    side(c.a, c.hA, c.b);
    side(c.b, c.hB, c.a);
    return suitability_margin(counts);
}

double margin_threshold_delta4(double margin) {
    if (!(margin > 1.0)) return 0.0;
    // largest delta with phi(x) <= margin * x on [0, delta]
    auto g = [&](double x) { return phi(x) - margin * x; };
    double lo = 1e-12, hi = 0.5;
    if (g(hi) <= 0) return hi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) <= 0) lo = mid;
        else hi = mid;
    }
    return lo;
}

VerifyReport verify_suitable(const Link& link, const ConjoinedDecomposition& c, double tol,
                             bool parallel) {
    VerifyReport rep;
    const PiecewiseCurve& C1 = as_piecewise(link.comp(0), "verify_suitable");
    const PiecewiseCurve& C2 = as_piecewise(link.comp(1), "verify_suitable");

    // 1. every circle is linked to exactly two distinct circles of the other
    //    curve (distinct images, not distinct indices)
    {
        auto scheme = linking_scheme(link, c, parallel);
        CheckItem match{"linking-scheme-matches", true, false, ""};
        if (scheme != c.linking) {
            match.pass = false;
            match.detail = "recomputed scheme differs from the attached one";
        }
        rep.items.push_back(match);

        auto image_of = [](const PiecewiseCurve& cur, const CircleDecomposition& ds, int j) {
            FittedCircle f = fit_circle(group_samples(cur, ds, j, 64));
            auto q = [](double v) { return std::llround(v * 1e6); };
            Vec3 nn = f.normal.z < 0 || (f.normal.z == 0 && f.normal.y < 0) ? -f.normal : f.normal;
            return std::array<long long, 7>{q(f.center.x), q(f.center.y), q(f.center.z),
                                            q(nn.x), q(nn.y), q(nn.z), q(f.radius)};
        };
        std::vector<std::array<long long, 7>> ib;
        for (std::size_t j = 0; j < c.b.groups.size(); ++j) ib.push_back(image_of(C2, c.b, (int)j));
        std::vector<std::array<long long, 7>> iaa;
        for (std::size_t j = 0; j < c.a.groups.size(); ++j) iaa.push_back(image_of(C1, c.a, (int)j));

        CheckItem two{"linked-to-exactly-two", true, false, ""};
        for (std::size_t j = 0; j < c.a.groups.size(); ++j) {
            std::set<std::array<long long, 7>> distinct;
            for (std::size_t q = 0; q < c.b.groups.size(); ++q)
                if (scheme[j][q]) distinct.insert(ib[q]);
            if (distinct.size() != 2) {
                two.pass = false;
                two.detail = "A-circle " + std::to_string(j) + " linked to " +
                             std::to_string(distinct.size()) + " circles";
            }
        }
        for (std::size_t q = 0; q < c.b.groups.size(); ++q) {
            std::set<std::array<long long, 7>> distinct;
            for (std::size_t j = 0; j < c.a.groups.size(); ++j)
                if (scheme[j][q]) distinct.insert(iaa[j]);
            if (distinct.size() != 2) {
                two.pass = false;
                two.detail = "B-circle " + std::to_string(q) + " linked to " +
                             std::to_string(distinct.size()) + " circles";
            }
        }
        rep.items.push_back(two);
    }

    // 2/3. strict counting inequalities per cluster
    {
        auto counting = [&](const CircleDecomposition& ds, const std::vector<int>& h_from_other,
                            const char* side) {
            int n = (int)ds.breaking_points.size();
            std::vector<int> cluster_of(n, -1);
            for (std::size_t l = 0; l < ds.clusters.size(); ++l)
                for (int i : ds.clusters[l]) cluster_of[i] = (int)l;
            CheckItem it{std::string(side) + "-counting-inequality", true, false, ""};
            for (std::size_t l = 0; l < ds.clusters.size(); ++l) {
                int h_pre = 0;
                for (int hl : h_from_other)
                    if (hl == (int)l) ++h_pre;
                int f = 0;
                for (auto& g : ds.groups) {
                    bool along = false;
                    for (int i : g.intervals) {
                        int inext = (i + 1) % n;
                        if (cluster_of[i] == (int)l || cluster_of[inext] == (int)l) along = true;
                    }
                    if (along) ++f;
                }
                if (!(f < 2 * h_pre)) {
                    it.pass = false;
                    it.detail = "cluster " + std::to_string(l) + ": f = " + std::to_string(f) +
                                " vs 2#h^-1 = " + std::to_string(2 * h_pre);
                }
            }
            rep.items.push_back(it);
        };
        counting(c.a, c.hA, "A");
        counting(c.b, c.hB, "B");
    }

    // 4/5. two distinguishable indices per cluster
    {
        auto distinguishable = [&](const PiecewiseCurve& cur, const CircleDecomposition& ds,
                                   const char* side) {
            CheckItem it{std::string(side) + "-distinguishable-pairs", true, false, ""};
            double len = cur.length_param();
            int n = (int)ds.breaking_points.size();
            // half-window: half the smallest cyclic gap between breakpoints
            double gap = len;
            for (int i = 0; i < n; ++i) {
                double g = std::fmod(ds.breaking_points[(i + 1) % n] - ds.breaking_points[i] + len,
                                     len);
                gap = std::min(gap, g);
            }
            double w = std::min(0.3, 0.45 * gap);
            const double r0 = 1e-3;
            auto germ = [&](int bi, double a, double b) {
                auto ps = cur.subcurve_pieces(ds.breaking_points[bi] + a + len,
                                              ds.breaking_points[bi] + b + len);
                return PiecewiseCurve(std::move(ps), false);
            };
            for (std::size_t l = 0; l < ds.clusters.size(); ++l) {
                bool found = false;
                auto& cl = ds.clusters[l];
                for (std::size_t x = 0; x < cl.size() && !found; ++x)
                    for (std::size_t y = x + 1; y < cl.size() && !found; ++y) {
                        // germ(x) away from the cluster point vs full germ(y),
                        // and vice versa
                        bool ok = true;
                        for (int swap = 0; swap < 2 && ok; ++swap) {
                            int bi = swap ? cl[y] : cl[x];
                            int bj = swap ? cl[x] : cl[y];
                            PiecewiseCurve full = germ(bj, -w, w);
                            for (double sgn : {-1.0, 1.0}) {
                                PiecewiseCurve part =
                                    sgn < 0 ? germ(bi, -w, -r0) : germ(bi, r0, w);
                                IntervalValue dd = min_distance(part, full, 1e-7, parallel);
                                if (!(dd.lo > 0)) ok = false;
                            }
                        }
                        if (ok) found = true;
                    }
                if (!found) {
                    it.pass = false;
                    it.detail = "cluster " + std::to_string(l) + " has no distinguishable pair";
                }
            }
            rep.items.push_back(it);
        };
        distinguishable(C1, c.a, "A");
        distinguishable(C2, c.b, "B");
    }
    (void)tol;
    return rep;
}

// ---------------------------------------------------------------------------

MinDiameterResult min_diameter_points(const Curve& curve,
                                      const std::vector<std::pair<double, double>>& windows,
                                      bool parallel) {
    int w = (int)windows.size();
    if (w < 1) throw std::invalid_argument("min_diameter_points: no windows");
    // grid resolution per window; 64 for small clusters, reduced so the
    // product grid stays bounded
    int g = 64;
    while (w > 3 && std::pow((double)g, w) > 2e7) g /= 2;
    g = std::max(g, 4);

    std::vector<std::vector<Vec3>> pts(w);
    std::vector<std::vector<double>> ss(w);
    for (int i = 0; i < w; ++i) {
        for (int q = 0; q < g; ++q) {
            double s = windows[i].first +
                       (windows[i].second - windows[i].first) * (q + 0.5) / g;
            ss[i].push_back(s);
            pts[i].push_back(curve.point_cyclic(s));
        }
    }
    auto diam_of = [&](const std::vector<Vec3>& v) {
        double m = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j) m = std::max(m, dist(v[i], v[j]));
        return m;
    };

    std::int64_t total = 1;
    for (int i = 0; i < w; ++i) total *= g;
    auto [best, arg] = par::block_min(
        total,
        [&](std::int64_t idx) {
            std::vector<Vec3> v(w);
            std::int64_t r = idx;
            for (int i = 0; i < w; ++i) {
                v[i] = pts[i][(std::size_t)(r % g)];
                r /= g;
            }
            return diam_of(v);
        },
        parallel);

    MinDiameterResult res;
    res.params.resize(w);
    {
        std::int64_t r = arg;
        for (int i = 0; i < w; ++i) {
            res.params[i] = ss[i][(std::size_t)(r % g)];
            r /= g;
        }
    }

    // Refinement: joint centroid-projection steps (all parameters chase the
    // current centroid) interleaved with per-coordinate scans. Pure
    // coordinate descent stalls on this max-of-distances objective.
    double span = 0.0;
    for (auto& win : windows) span = std::max(span, win.second - win.first);
    double step = span / g;
    std::vector<Vec3> cur(w);
    for (int i = 0; i < w; ++i) cur[i] = curve.point_cyclic(res.params[i]);
    double value = diam_of(cur);
    while (step > 5e-8) {
        bool improved = true;
        int rounds = 0;
        while (improved && rounds++ < 40) {
            improved = false;
            // joint step toward the centroid
            Vec3 cbar{0, 0, 0};
            for (auto& p : cur) cbar += p;
            cbar = cbar / (double)w;
            std::vector<double> cand(res.params);
            std::vector<Vec3> cpts(cur);
            for (int i = 0; i < w; ++i) {
                double best_d = HUGE_VAL, best_t = res.params[i];
                for (int q = -16; q <= 16; ++q) {
                    double t = std::clamp(res.params[i] + q * step / 4.0, windows[i].first,
                                          windows[i].second);
                    double dd = dist(curve.point_cyclic(t), cbar);
                    if (dd < best_d) { best_d = dd; best_t = t; }
                }
                cand[i] = best_t;
                cpts[i] = curve.point_cyclic(best_t);
            }
            double vj = diam_of(cpts);
            if (vj < value - 1e-15) {
                value = vj;
                res.params = cand;
                cur = cpts;
                improved = true;
            }
            // joint moves along every sign combination; the valley of this
            // objective is diagonal (all parameters shift together)
            if (w <= 6) {
                for (int mask = 0; mask < (1 << w); ++mask) {
                    std::vector<double> cnd(res.params);
                    std::vector<Vec3> cp(w);
                    for (int i = 0; i < w; ++i) {
                        double dir = (mask >> i) & 1 ? step : -step;
                        cnd[i] = std::clamp(res.params[i] + dir, windows[i].first,
                                            windows[i].second);
                        cp[i] = curve.point_cyclic(cnd[i]);
                    }
                    double v = diam_of(cp);
                    if (v < value - 1e-15) {
                        value = v;
                        res.params = cnd;
                        cur = cp;
                        improved = true;
                    }
                }
            }
            // per-coordinate moves
            for (int i = 0; i < w; ++i) {
                for (double c2 : {res.params[i] - step, res.params[i] + step}) {
                    double clamped = std::clamp(c2, windows[i].first, windows[i].second);
                    Vec3 save = cur[i];
                    cur[i] = curve.point_cyclic(clamped);
                    double v = diam_of(cur);
                    if (v < value - 1e-15) {
                        value = v;
                        res.params[i] = clamped;
                        improved = true;
                    } else {
                        cur[i] = save;
                    }
                }
            }
        }
        step *= 0.5;
    }
    res.points = cur;
    res.diameter = value;
    if (value > best + 1e-12)
        throw std::runtime_error("min_diameter_points: refinement above grid bound");
    return res;
}

std::vector<std::vector<std::pair<double, double>>> default_windows(
    const Link& link, const ConjoinedDecomposition& c) {
    std::vector<std::vector<std::pair<double, double>>> out(2);
    for (int side = 0; side < 2; ++side) {
        const CircleDecomposition& d = side == 0 ? c.a : c.b;
        double len = link.comp((std::size_t)side).length_param();
        double r = 0.05 * len;
        int n = (int)d.breaking_points.size();
        for (int i = 0; i < n; ++i) {
            double gap = std::fmod(d.breaking_points[(i + 1) % n] - d.breaking_points[i] + len, len);
            r = std::min(r, 0.45 * gap);
        }
        for (int i = 0; i < n; ++i)
            out[(std::size_t)side].push_back(
                {d.breaking_points[i] - r, d.breaking_points[i] + r});
    }
    return out;
}

PerturbationReport perturbation_bound_report(
    const Link& reference, const ConjoinedDecomposition& c, const Link& perturbed,
    const std::vector<std::vector<std::pair<double, double>>>& windows, bool parallel) {
    if (reference.size() != 2 || perturbed.size() != 2)
        throw std::invalid_argument("perturbation_bound_report: needs 2-component links");
    IntervalValue tau = thickness(perturbed, 1e-7, parallel);
    if (!(tau.hi >= 1.0 - 1e-9))
        throw std::invalid_argument("perturbation_bound_report: perturbed link is not thick");
    for (int side = 0; side < 2; ++side) {
        double len = perturbed.comp((std::size_t)side).length_param();
        for (auto& wnd : windows[(std::size_t)side])
            if (!(wnd.second > wnd.first) || wnd.second - wnd.first > len)
                throw std::invalid_argument("perturbation_bound_report: invalid window");
    }

    PerturbationReport rep;
    int n_circles = (int)c.a.groups.size(), m_circles = (int)c.b.groups.size();
    rep.base_length = 2.0 * (n_circles + m_circles) * kPi;
    double margin = decomposition_margin(c);
    rep.delta4 = margin_threshold_delta4(margin);
    rep.all_q_small = true;

    auto side_terms = [&](int side, const CircleDecomposition& ds,
                          const std::vector<int>& h_from_other) {
        const Curve& cur = perturbed.comp((std::size_t)side);
        int n = (int)ds.breaking_points.size();
        std::vector<int> cluster_of(n, -1);
        for (std::size_t l = 0; l < ds.clusters.size(); ++l)
            for (int i : ds.clusters[l]) cluster_of[i] = (int)l;
        for (std::size_t l = 0; l < ds.clusters.size(); ++l) {
            ClusterTerm t;
            t.side = side;
            t.cluster = (int)l;
            std::vector<std::pair<double, double>> wnds;
            for (int i : ds.clusters[l]) wnds.push_back(windows[(std::size_t)side][(std::size_t)i]);
            MinDiameterResult md = min_diameter_points(cur, wnds, parallel);
            t.q = md.diameter;
            for (int hl : h_from_other)
                if (hl == (int)l) ++t.h_preimage;
            for (auto& g : ds.groups) {
                bool along = false;
                for (int i : g.intervals) {
                    int inext = (i + 1) % n;
                    if (cluster_of[i] == (int)l || cluster_of[inext] == (int)l) along = true;
                }
                if (along) ++t.f;
            }
            double qcl = std::min(t.q, 0.5);  // phi domain; q beyond it is flagged
            t.term = 2.0 * t.h_preimage * t.q - t.f * phi(qcl);
            if (t.q > rep.delta4) rep.all_q_small = false;
            rep.terms.push_back(t);
        }
    };
    side_terms(0, c.a, c.hA);
    side_terms(1, c.b, c.hB);

    rep.rhs = rep.base_length;
    for (auto& t : rep.terms) rep.rhs += t.term;
    rep.measured = ropelength(perturbed);
    rep.length_inequality = rep.measured.lo >= rep.rhs - 1e-6;
    rep.rhs_at_least_base = rep.rhs >= rep.base_length - 1e-12;
    return rep;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void write_component(JsonWriter& w, const CircleDecomposition& d) {
    w.begin_object();
    w.key("breaking_points").begin_array();
    for (double b : d.breaking_points) w.value(b);
    w.end_array();
    w.key("groups").begin_array();
    for (auto& g : d.groups) {
        w.begin_object();
        w.key("indices").begin_array();
        for (int i : g.intervals) w.value(i);
        w.end_array();
        w.key("signs").begin_array();
        for (int s : g.signs) w.value(s);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.key("clusters").begin_array();
    for (auto& cl : d.clusters) {
        w.begin_array();
        for (int i : cl) w.value(i);
        w.end_array();
    }
    w.end_array();
    w.end_object();
}

CircleDecomposition read_component(const nlohmann::json& j) {
    CircleDecomposition d;
    for (auto& b : j.at("breaking_points")) d.breaking_points.push_back(b.get<double>());
    for (auto& g : j.at("groups")) {
        CircleGroup grp;
        for (auto& i : g.at("indices")) grp.intervals.push_back(i.get<int>());
        for (auto& s : g.at("signs")) grp.signs.push_back(s.get<int>());
        d.groups.push_back(grp);
    }
    for (auto& cl : j.at("clusters")) {
        std::vector<int> v;
        for (auto& i : cl) v.push_back(i.get<int>());
        d.clusters.push_back(v);
    }
    return d;
}

}  // namespace

std::string decomposition_to_json(const ConjoinedDecomposition& c) {
    JsonWriter w;
    w.begin_object();
    w.key("components").begin_array();
    write_component(w, c.a);
    write_component(w, c.b);
    w.end_array();
    w.key("hA").begin_array();
    for (int v : c.hA) w.value(v);
    w.end_array();
    w.key("hB").begin_array();
    for (int v : c.hB) w.value(v);
    w.end_array();
    w.key("linking").begin_array();
    for (auto& row : c.linking) {
        w.begin_array();
        for (bool v : row) w.value(v);
        w.end_array();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

ConjoinedDecomposition decomposition_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ConjoinedDecomposition c;
    auto& comps = j.at("components");
    if (comps.size() != 2)
        throw std::invalid_argument("decomposition json: expected 2 components");
    c.a = read_component(comps[0]);
    c.b = read_component(comps[1]);
    for (auto& v : j.at("hA")) c.hA.push_back(v.get<int>());
    for (auto& v : j.at("hB")) c.hB.push_back(v.get<int>());
    for (auto& row : j.at("linking")) {
        std::vector<bool> r;
        for (auto& v : row) r.push_back(v.get<bool>());
        c.linking.push_back(r);
    }
    return c;
}

std::string perturbation_report_json(const PerturbationReport& r) {
    JsonWriter w;
    w.begin_object();
    w.kv("base_length", r.base_length);
    w.kv("rhs", r.rhs);
    w.key("measured").begin_object().kv("lo", r.measured.lo).kv("hi", r.measured.hi).end_object();
    w.kv("delta4", r.delta4);
    w.kv("all_q_small", r.all_q_small);
    w.kv("length_inequality", r.length_inequality);
    w.kv("rhs_at_least_base", r.rhs_at_least_base);
    w.key("clusters").begin_array();
    for (auto& t : r.terms) {
        w.begin_object();
        w.kv("side", t.side == 0 ? "A" : "B");
        w.kv("cluster", t.cluster);
        w.kv("q", t.q);
        w.kv("h_preimage", t.h_preimage);
        w.kv("f", t.f);
        w.kv("term", t.term);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

}  // namespace rl
