#include "rl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rl/json_out.hpp"
#include "rl/parallel.hpp"
#include "rl/rng.hpp"

namespace rl {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Minimum over the box [-hs,hs] x [-ht,ht] of
//   |P0 + x u - y v|^2,
// a convex quadratic. Evaluated exactly (interior critical point or edges).
double quad_box_min(const Vec3& P0, const Vec3& u, const Vec3& v, double hs, double ht) {
    const double c0 = norm2(P0);
    const double gx = dot(P0, u), gy = -dot(P0, v);
    const double axx = norm2(u), ayy = norm2(v), axy = -dot(u, v);
    auto Q = [&](double x, double y) {
        return c0 + 2 * gx * x + 2 * gy * y + axx * x * x + ayy * y * y + 2 * axy * x * y;
    };
    double det = axx * ayy - axy * axy;
    if (det > 1e-14 * std::max(1.0, axx * ayy)) {
        double x = (-gx * ayy + gy * axy) / det;
        double y = (-gy * axx + gx * axy) / det;
        if (std::abs(x) <= hs && std::abs(y) <= ht) return Q(x, y);
    }
    auto edge_min = [&](double xfix, bool x_fixed) {
        // minimize along the free coordinate
        if (x_fixed) {
            double b = gy + axy * xfix, a = ayy;
            double y = (a > 0) ? std::clamp(-b / a, -ht, ht) : (b > 0 ? -ht : ht);
            return Q(xfix, y);
        }
        double b = gx + axy * xfix, a = axx;
        double x = (a > 0) ? std::clamp(-b / a, -hs, hs) : (b > 0 ? -hs : hs);
        return Q(x, xfix);
    };
    double m = edge_min(hs, true);
    m = std::min(m, edge_min(-hs, true));
    m = std::min(m, edge_min(ht, false));
    m = std::min(m, edge_min(-ht, false));
    return m;
}

struct DistNode {
    double sa, sb, ta, tb;
    double Ma, Mb;  // second-derivative bounds, inherited from the seed piece
    double lower;
};

struct NodeEval {
    double lower;
    double upper;
    double sm, tm;
};

NodeEval eval_node(const Curve& A, const Curve& B, DistNode& n) {
    double sm = 0.5 * (n.sa + n.sb), tm = 0.5 * (n.ta + n.tb);
    double hs = 0.5 * (n.sb - n.sa), ht = 0.5 * (n.tb - n.ta);
    Vec3 P0 = A.point(sm) - B.point(tm);
    Vec3 u = A.derivative(sm), v = B.derivative(tm);
    double q = quad_box_min(P0, u, v, hs, ht);
    double lb = std::sqrt(std::max(0.0, q)) - 0.5 * (n.Ma * hs * hs + n.Mb * ht * ht);
    n.lower = std::max(0.0, lb);
    return {n.lower, norm(P0), sm, tm};
}

std::vector<DistNode> seed_nodes(const Curve& A, const Curve& B) {
    std::vector<DistNode> nodes;
    auto bA = A.breakpoints();
    auto bB = B.breakpoints();
    for (std::size_t i = 0; i + 1 < bA.size(); ++i)
        for (std::size_t j = 0; j + 1 < bB.size(); ++j) {
            DistNode n;
            n.sa = bA[i];
            n.sb = bA[i + 1];
            n.ta = bB[j];
            n.tb = bB[j + 1];
            if (!(n.sb > n.sa) || !(n.tb > n.ta)) continue;
            n.Ma = A.d2_bound(n.sa, n.sb);
            n.Mb = B.d2_bound(n.ta, n.tb);
            n.lower = 0.0;
            nodes.push_back(n);
        }
    return nodes;
}

}  // namespace

namespace {

struct DfsResult {
    double lo = HUGE_VAL;      // min lower bound over terminal boxes
    double hi = HUGE_VAL;      // best midpoint distance seen
    double ws = 0.0, wt = 0.0;
};

// Depth-first refinement of one box down to certificate width <= tol,
// pruning against an upper bound. Memory stays O(depth).
DfsResult dfs_refine(const Curve& A, const Curve& B, DistNode root, double tol, double upper0,
                     double spA, double spB) {
    DfsResult res;
    res.hi = upper0;
    std::vector<DistNode> stack{root};
    std::size_t evals = 0;
    while (!stack.empty()) {
        DistNode n = stack.back();
        stack.pop_back();
        NodeEval e = eval_node(A, B, n);
        if (++evals > 80u * 1000u * 1000u)
            throw std::runtime_error("min_distance: subdivision budget exhausted");
        if (e.upper < res.hi) {
            res.hi = e.upper;
            res.ws = e.sm;
            res.wt = e.tm;
        }
        if (res.hi <= 2 * tol) {  // touching curves: resolution floor reached
            res.lo = 0.0;
            return res;
        }
        if (e.lower >= res.hi) continue;           // cannot improve
        if (res.hi - e.lower <= tol) {             // certified at this box
            res.lo = std::min(res.lo, e.lower);
            continue;
        }
        bool split_s = (n.sb - n.sa) * spA >= (n.tb - n.ta) * spB;
        DistNode c1 = n, c2 = n;
        if (split_s) {
            double m = 0.5 * (n.sa + n.sb);
            c1.sb = m;
            c2.sa = m;
        } else {
            double m = 0.5 * (n.ta + n.tb);
            c1.tb = m;
            c2.ta = m;
        }
        stack.push_back(c1);
        stack.push_back(c2);
    }
    return res;
}

}  // namespace

IntervalValue min_distance(const Curve& A, const Curve& B, double tol, bool parallel) {
    if (!(tol > 0)) throw std::invalid_argument("min_distance: tol must be positive");
    std::vector<DistNode> nodes = seed_nodes(A, B);
    double best_hi = HUGE_VAL, wit_s = 0.0, wit_t = 0.0;
    double glob_lo = 0.0;
    double spA = A.max_speed(), spB = B.max_speed();
    const std::size_t kFrontierCap = 200000;

    for (int round = 0; round < 200; ++round) {
        std::vector<NodeEval> evals(nodes.size());
        par::for_each(
            (std::int64_t)nodes.size(), [&](std::int64_t i) { evals[i] = eval_node(A, B, nodes[i]); },
            parallel);
        glob_lo = HUGE_VAL;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (evals[i].upper < best_hi) {
                best_hi = evals[i].upper;
                wit_s = evals[i].sm;
                wit_t = evals[i].tm;
            }
            glob_lo = std::min(glob_lo, evals[i].lower);
        }
        // Width <= tol, or the distance itself is certified below the 2 tol
        // resolution floor (touching curves; the zero set can be a continuum
        // and is not worth resolving to tol width).
        if (nodes.empty() || best_hi - glob_lo <= tol || best_hi <= 2 * tol)
            return IntervalValue(std::max(0.0, std::min(glob_lo, best_hi)), best_hi)
                .with_witness(wit_s, wit_t);

        if (nodes.size() > kFrontierCap) {
            // Wide frontier (touching curves): finish each box depth-first
            // with bounded memory. Results merge in index order, so the
            // outcome does not depend on the worker count.
            std::vector<DfsResult> rs(nodes.size());
            double upper0 = best_hi;
            par::for_each(
                (std::int64_t)nodes.size(),
                [&](std::int64_t i) {
                    if (nodes[(std::size_t)i].lower >= upper0) return;
                    rs[(std::size_t)i] =
                        dfs_refine(A, B, nodes[(std::size_t)i], tol, upper0, spA, spB);
                },
                parallel);
            double lo = HUGE_VAL, hi = best_hi;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                if (nodes[i].lower >= upper0) continue;
                lo = std::min(lo, rs[i].lo);
                if (rs[i].hi < hi) {
                    hi = rs[i].hi;
                    wit_s = rs[i].ws;
                    wit_t = rs[i].wt;
                }
            }
            if (lo == HUGE_VAL) lo = hi;
            lo = std::min(lo, hi);
            // boxes pruned against upper0 cannot hold anything below
            // min(upper0, their own lower), both >= lo here
            return IntervalValue(std::max(0.0, lo), hi).with_witness(wit_s, wit_t);
        }

        std::vector<DistNode> next;
        next.reserve(nodes.size());
        for (auto& n : nodes) {
            if (n.lower >= best_hi) continue;
            bool split_s = (n.sb - n.sa) * spA >= (n.tb - n.ta) * spB;
            DistNode c1 = n, c2 = n;
            if (split_s) {
                double m = 0.5 * (n.sa + n.sb);
                c1.sb = m;
                c2.sa = m;
            } else {
                double m = 0.5 * (n.ta + n.tb);
                c1.tb = m;
                c2.ta = m;
            }
            next.push_back(c1);
            next.push_back(c2);
        }
        nodes.swap(next);
    }
    throw std::runtime_error("min_distance: did not converge");
}

IntervalValue thickness(const Link& link, double tol, bool parallel) {
    link.validate();
    if (link.size() < 2)
        throw std::invalid_argument("thickness: undefined for a single-component link");
    IntervalValue best(HUGE_VAL, HUGE_VAL);
    for (std::size_t i = 0; i < link.size(); ++i)
        for (std::size_t j = i + 1; j < link.size(); ++j) {
            IntervalValue d = min_distance(link.comp(i), link.comp(j), tol, parallel);
            if (d.hi < best.hi) best = d;
        }
    return best;
}

// ---------------------------------------------------------------------------
// Doubly-critical self distance

namespace {

struct DcsdCtx {
    const Curve* C;
    double L;
    double kmax;
};

double resid1(const DcsdCtx& c, double s, double t) {
    return dot(c.C->derivative_cyclic(s), c.C->point_cyclic(t) - c.C->point_cyclic(s));
}
double resid2(const DcsdCtx& c, double s, double t) {
    return dot(c.C->derivative_cyclic(t), c.C->point_cyclic(t) - c.C->point_cyclic(s));
}

// cyclic gap range between parameter intervals
void gap_range(double L, double sa, double sb, double ta, double tb, double* gmin, double* gmax) {
    double dlo = ta - sb, dhi = tb - sa;
    auto gap = [&](double d) {
        d = std::fmod(std::fmod(d, L) + L, L);
        return std::min(d, L - d);
    };
    *gmin = std::min(gap(dlo), gap(dhi));
    *gmax = std::max(gap(dlo), gap(dhi));
    // interior extrema of the piecewise-linear cyclic gap
    for (double k = std::ceil(dlo / (0.5 * L)); k * 0.5 * L <= dhi; k += 1.0) {
        double d = k * 0.5 * L;
        double g = gap(d);
        *gmin = std::min(*gmin, g);
        *gmax = std::max(*gmax, g);
    }
}

struct DcNode {
    double sa, sb, ta, tb;
    double lower;
};

}  // namespace

IntervalValue doubly_critical_self_distance(const Curve& C, double tol, bool parallel) {
    if (!C.closed()) throw std::invalid_argument("dcsd: curve must be closed");
    DcsdCtx ctx;
    ctx.C = &C;
    ctx.L = C.length_param();
    ctx.kmax = std::max(1e-9, C.d2_bound(0.0, ctx.L));
    const double safe_gap = 0.999 * kPi / ctx.kmax;
    const double h_fd = 1e-7;

    auto bps = C.breakpoints();
    std::vector<DcNode> nodes;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i)
        for (std::size_t j = 0; j + 1 < bps.size(); ++j)
            nodes.push_back({bps[i], bps[i + 1], bps[j], bps[j + 1], 0.0});

    double best_hi = HUGE_VAL, wit_s = 0, wit_t = 0;

    auto newton_polish = [&](double s, double t, double* val, double* os, double* ot) -> bool {
        for (int it = 0; it < 30; ++it) {
            double r1 = resid1(ctx, s, t), r2 = resid2(ctx, s, t);
            if (std::abs(r1) < 1e-11 && std::abs(r2) < 1e-11) {
                *val = norm(C.point_cyclic(t) - C.point_cyclic(s));
                *os = s;
                *ot = t;
                return true;
            }
            double j11 = (resid1(ctx, s + h_fd, t) - resid1(ctx, s - h_fd, t)) / (2 * h_fd);
            double j12 = (resid1(ctx, s, t + h_fd) - resid1(ctx, s, t - h_fd)) / (2 * h_fd);
            double j21 = (resid2(ctx, s + h_fd, t) - resid2(ctx, s - h_fd, t)) / (2 * h_fd);
            double j22 = (resid2(ctx, s, t + h_fd) - resid2(ctx, s, t - h_fd)) / (2 * h_fd);
            double det = j11 * j22 - j12 * j21;
            if (std::abs(det) < 1e-14) return false;
            double ds = (-r1 * j22 + r2 * j12) / det;
            double dt = (-r2 * j11 + r1 * j21) / det;
            if (std::abs(ds) > 0.5 || std::abs(dt) > 0.5) return false;
            s += ds;
            t += dt;
        }
        return false;
    };

    struct Ev {
        double lower;
        bool keep;
        bool try_newton;
        double sm, tm;
    };

    for (int round = 0; round < 120; ++round) {
        std::vector<Ev> evals(nodes.size());
        par::for_each(
            (std::int64_t)nodes.size(),
            [&](std::int64_t i) {
                DcNode& n = nodes[i];
                double sm = 0.5 * (n.sa + n.sb), tm = 0.5 * (n.ta + n.tb);
                double hs = 0.5 * (n.sb - n.sa), ht = 0.5 * (n.tb - n.ta);
                double gmin, gmax;
                gap_range(ctx.L, n.sa, n.sb, n.ta, n.tb, &gmin, &gmax);
                if (gmax < safe_gap) {  // no critical chord this close to the diagonal
                    evals[i] = {HUGE_VAL, false, false, sm, tm};
                    return;
                }
                Vec3 Ps = C.point_cyclic(sm), Pt = C.point_cyclic(tm);
                Vec3 u = C.derivative_cyclic(sm), v = C.derivative_cyclic(tm);
                Vec3 P0 = Ps - Pt;
                double D_up = norm(P0) + hs + ht;
                double r1 = dot(u, Pt - Ps), r2 = dot(v, Pt - Ps);
                double L1 = (1 + ctx.kmax * D_up) * hs + ht;
                double L2 = hs + (1 + ctx.kmax * D_up) * ht;
                if (std::abs(r1) > L1 || std::abs(r2) > L2) {  // residual cannot vanish here
                    evals[i] = {HUGE_VAL, false, false, sm, tm};
                    return;
                }
                double q = quad_box_min(-P0, u, v, hs, ht);
                double lb =
                    std::max(0.0, std::sqrt(std::max(0.0, q)) - 0.5 * ctx.kmax * (hs * hs + ht * ht));
                n.lower = lb;
                bool try_newton = (std::abs(r1) < 0.1 && std::abs(r2) < 0.1 && hs + ht < 0.2);
                evals[i] = {lb, lb < best_hi, try_newton, sm, tm};
            },
            parallel);

        double glob_lo = HUGE_VAL;
        for (std::size_t i = 0; i < evals.size(); ++i) {
            if (!evals[i].keep) continue;
            glob_lo = std::min(glob_lo, evals[i].lower);
            if (evals[i].try_newton) {
                double val, os, ot;
                if (newton_polish(evals[i].sm, evals[i].tm, &val, &os, &ot)) {
                    double gmin, gmax;
                    gap_range(ctx.L, os, os, ot, ot, &gmin, &gmax);
                    if (gmin >= safe_gap && val + 1e-9 < best_hi) {
                        best_hi = val + 1e-9;
                        wit_s = os;
                        wit_t = ot;
                    }
                }
            }
        }
        if (glob_lo == HUGE_VAL) glob_lo = best_hi;  // all remaining boxes pruned
        if ((best_hi - glob_lo <= tol || best_hi <= 2 * tol) && best_hi < HUGE_VAL)
            return IntervalValue(std::max(0.0, std::min(glob_lo, best_hi)), best_hi)
                .with_witness(wit_s, wit_t);

        std::vector<DcNode> next;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!evals[i].keep || nodes[i].lower >= best_hi) continue;
            DcNode& n = nodes[i];
            DcNode c1 = n, c2 = n;
            if (n.sb - n.sa >= n.tb - n.ta) {
                double m = 0.5 * (n.sa + n.sb);
                c1.sb = m;
                c2.sa = m;
            } else {
                double m = 0.5 * (n.ta + n.tb);
                c1.tb = m;
                c2.ta = m;
            }
            next.push_back(c1);
            next.push_back(c2);
        }
        nodes.swap(next);
        if (nodes.size() > 8u * 1000u * 1000u)
            throw std::runtime_error("dcsd: subdivision budget exhausted");
    }
    throw std::runtime_error("dcsd: did not converge");
}

// ---------------------------------------------------------------------------
// Tube thickness

ThicknessReport tube_thickness(const Link& link, double tol, bool parallel) {
    link.validate();
    ThicknessReport rep;

    // C1 requirement
    for (std::size_t i = 0; i < link.size(); ++i) {
        if (auto* pw = dynamic_cast<const PiecewiseCurve*>(&link.comp(i))) {
            double arg;
            double ang = pw->max_tangent_discontinuity(&arg);
            if (ang > 1e-6)
                throw std::invalid_argument("tube_thickness: component " + std::to_string(i) +
                                            " has a non-C1 junction at arclength " +
                                            std::to_string(arg));
        }
    }

    // curvature maximum
    for (std::size_t i = 0; i < link.size(); ++i) {
        double arg = 0.0, k = 0.0;
        if (auto* pw = dynamic_cast<const PiecewiseCurve*>(&link.comp(i))) {
            k = pw->curvature_max(&arg);
        } else {
            const Curve& c = link.comp(i);
            int n = 8192;
            for (int q = 0; q <= n; ++q) {
                double s = c.length_param() * q / n;
                double kk = c.curvature(s);
                if (kk > k) { k = kk; arg = s; }
            }
        }
        if (k > rep.max_curvature) {
            rep.max_curvature = k;
            rep.max_curvature_param = arg;
            rep.max_curvature_component = (int)i;
        }
    }

    for (std::size_t i = 0; i < link.size(); ++i)
        rep.dcsd.push_back(doubly_critical_self_distance(link.comp(i), tol, parallel));

    IntervalValue inter(HUGE_VAL, HUGE_VAL);
    if (link.size() >= 2) {
        for (std::size_t i = 0; i < link.size(); ++i)
            for (std::size_t j = i + 1; j < link.size(); ++j) {
                IntervalValue d = min_distance(link.comp(i), link.comp(j), tol, parallel);
                rep.pairs.push_back({(int)i, (int)j, d});
                if (d.hi < inter.hi) inter = d;
            }
        rep.tau = inter;
        rep.tau_valid = true;
    }

    double kcap = rep.max_curvature > 0 ? 2.0 / rep.max_curvature : HUGE_VAL;
    IntervalValue dmin(HUGE_VAL, HUGE_VAL);
    for (auto& d : rep.dcsd)
        if (d.hi < dmin.hi) dmin = d;

    rep.tau_e = IntervalValue(kcap, kcap);
    rep.limiting_factor = "curvature";
    if (dmin.hi < rep.tau_e.hi) {
        rep.tau_e = dmin;
        rep.limiting_factor = "doubly-critical self-distance";
    }
    if (rep.tau_valid && inter.hi < rep.tau_e.hi) {
        rep.tau_e = inter;
        rep.limiting_factor = "inter-component distance";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Linking number

namespace {

double solid_angle_tri(const Vec3& a, const Vec3& b, const Vec3& c) {
    double la = norm(a), lb = norm(b), lc = norm(c);
    double num = dot(a, cross(b, c));
    double den = la * lb * lc + dot(a, b) * lc + dot(b, c) * la + dot(c, a) * lb;
    return 2.0 * std::atan2(num, den);
}

}  // namespace

double gauss_linking_polylines(const Polyline& A, const Polyline& B, bool parallel) {
    std::size_t na = A.pts.size(), nb = B.pts.size();
    double total = par::block_sum(
        (std::int64_t)(na * nb),
        [&](std::int64_t idx) {
            std::size_t i = (std::size_t)idx / nb, j = (std::size_t)idx % nb;
            const Vec3& p1 = A.pts[i];
            const Vec3& p2 = A.pts[(i + 1) % na];
            const Vec3& q1 = B.pts[j];
            const Vec3& q2 = B.pts[(j + 1) % nb];
            Vec3 a = p1 - q1, b = p1 - q2, c = p2 - q2, d = p2 - q1;
            return solid_angle_tri(a, b, c) + solid_angle_tri(c, d, a);
        },
        parallel);
    return total / (4.0 * kPi);
}

bool crossing_linking_polylines(const Polyline& A, const Polyline& B, const Vec3& w, int* lk) {
    // orthonormal basis of the projection plane
    Vec3 e1 = cross(w, std::abs(w.x) < 0.8 ? Vec3{1, 0, 0} : Vec3{0, 1, 0});
    e1 = normalized(e1);
    Vec3 e2 = normalized(cross(w, e1));
    auto prj = [&](const Vec3& p) { return std::pair<double, double>(dot(p, e1), dot(p, e2)); };

    std::size_t na = A.pts.size(), nb = B.pts.size();
    long long total = 0;
    for (std::size_t i = 0; i < na; ++i) {
        auto [ax0, ay0] = prj(A.pts[i]);
        auto [ax1, ay1] = prj(A.pts[(i + 1) % na]);
        double dax = ax1 - ax0, day = ay1 - ay0;
        for (std::size_t j = 0; j < nb; ++j) {
            auto [bx0, by0] = prj(B.pts[j]);
            auto [bx1, by1] = prj(B.pts[(j + 1) % nb]);
            double dbx = bx1 - bx0, dby = by1 - by0;
            double den = dax * dby - day * dbx;
            double rx = bx0 - ax0, ry = by0 - ay0;
            if (std::abs(den) < 1e-12) {
                // parallel in projection: degenerate only if they overlap
                if (std::abs(rx * dby - ry * dbx) < 1e-9) return false;
                continue;
            }
            double s = (rx * dby - ry * dbx) / den;
            double t = (rx * day - ry * dax) / den;
            if (s <= -1e-9 || s >= 1 + 1e-9 || t <= -1e-9 || t >= 1 + 1e-9) continue;
            if (s < 1e-9 || s > 1 - 1e-9 || t < 1e-9 || t > 1 - 1e-9) return false;  // endpoint hit
            double za = dot(w, A.pts[i]) + s * dot(w, A.pts[(i + 1) % na] - A.pts[i]);
            double zb = dot(w, B.pts[j]) + t * dot(w, B.pts[(j + 1) % nb] - B.pts[j]);
            if (std::abs(za - zb) < 1e-9) return false;
            if (za > zb) total += (den > 0) ? 1 : -1;
        }
    }
    *lk = (int)total;
    return true;
}

int linking_number(const Curve& A, const Curve& B, double poly_tol, std::uint64_t seed,
                   bool parallel) {
    if (!A.closed() || !B.closed()) throw std::invalid_argument("linking_number: curves must be closed");
    IntervalValue d = min_distance(A, B, std::max(1e-6, poly_tol * 0.1), parallel);
    if (!(d.lo > 2.5 * poly_tol))
        throw std::runtime_error("linking_number: curves too close to certify disjointness");

    Polyline pa = polygonalize(A, poly_tol);
    Polyline pb = polygonalize(B, poly_tol);

    double g = gauss_linking_polylines(pa, pb, parallel);
    int gauss = (int)std::llround(g);
    if (std::abs(g - gauss) >= 0.1)
        throw std::runtime_error("linking_number: Gauss integral residual too large");

    SplitMix64 rng(seed);
    for (int attempt = 0; attempt < 32; ++attempt) {
        double th = std::acos(2.0 * rng.uniform() - 1.0);
        double ph = 2.0 * kPi * rng.uniform();
        Vec3 w{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
        int lk;
        if (!crossing_linking_polylines(pa, pb, w, &lk)) continue;  // degenerate, redraw
        if (lk != gauss)
            throw std::runtime_error("linking_number: crossing count and Gauss integral disagree");
        return lk;
    }
    throw std::runtime_error("linking_number: no non-degenerate projection found");
}

// ---------------------------------------------------------------------------
// Separation (GJK over the polygonalized vertex sets)

namespace {

Vec3 support(const std::vector<Vec3>& pts, const Vec3& dir) {
    double best = -HUGE_VAL;
    Vec3 r = pts[0];
    for (const Vec3& p : pts) {
        double d = dot(p, dir);
        if (d > best) { best = d; r = p; }
    }
    return r;
}

// closest point to the origin on a simplex of <= 4 points; reduces the
// simplex to the supporting face
Vec3 simplex_closest(std::vector<Vec3>& sx) {
    auto seg = [](const Vec3& a, const Vec3& b, double* t) {
        Vec3 d = b - a;
        double dd = norm2(d);
        *t = dd > 0 ? std::clamp(-dot(a, d) / dd, 0.0, 1.0) : 0.0;
        return a + *t * d;
    };
    if (sx.size() == 1) return sx[0];
    if (sx.size() == 2) {
        double t;
        Vec3 p = seg(sx[0], sx[1], &t);
        if (t <= 0) sx = {sx[0]};
        else if (t >= 1) sx = {sx[1]};
        return p;
    }
    auto tri = [&](const Vec3& a, const Vec3& b, const Vec3& c, std::vector<Vec3>& keep) {
        Vec3 ab = b - a, ac = c - a, n = cross(ab, ac);
        double n2 = norm2(n);
        if (n2 < 1e-30) {  // degenerate: best of the edges
            double t;
            Vec3 p1 = seg(a, b, &t), p2 = seg(a, c, &t), p3 = seg(b, c, &t);
            Vec3 best = p1;
            keep = {a, b};
            if (norm2(p2) < norm2(best)) { best = p2; keep = {a, c}; }
            if (norm2(p3) < norm2(best)) { best = p3; keep = {b, c}; }
            return best;
        }
        // barycentric of the origin projection
        Vec3 p = n * (dot(a, n) / n2);
        Vec3 ap = p - a;
        double d11 = dot(ab, ab), d12 = dot(ab, ac), d22 = dot(ac, ac);
        double dp1 = dot(ap, ab), dp2 = dot(ap, ac);
        double det = d11 * d22 - d12 * d12;
        double v = (d22 * dp1 - d12 * dp2) / det;
        double wq = (d11 * dp2 - d12 * dp1) / det;
        if (v >= 0 && wq >= 0 && v + wq <= 1) {
            keep = {a, b, c};
            return p;
        }
        double t;
        Vec3 p1 = seg(a, b, &t), p2 = seg(a, c, &t), p3 = seg(b, c, &t);
        Vec3 best = p1;
        keep = {a, b};
        if (norm2(p2) < norm2(best)) { best = p2; keep = {a, c}; }
        if (norm2(p3) < norm2(best)) { best = p3; keep = {b, c}; }
        return best;
    };
    if (sx.size() == 3) {
        std::vector<Vec3> keep;
        Vec3 p = tri(sx[0], sx[1], sx[2], keep);
        sx = keep;
        return p;
    }
    // tetrahedron: origin inside <=> on the same side of all faces
    const Vec3 a = sx[0], b = sx[1], c = sx[2], d = sx[3];
    Vec3 best{};
    double bestd = HUGE_VAL;
    std::vector<Vec3> bestkeep;
    bool inside = true;
    const Vec3 vertices[4][3] = {{a, b, c}, {a, b, d}, {a, c, d}, {b, c, d}};
    const Vec3 opposite[4] = {d, c, b, a};
    for (int f = 0; f < 4; ++f) {
        Vec3 n = cross(vertices[f][1] - vertices[f][0], vertices[f][2] - vertices[f][0]);
        double side_o = dot(n, Vec3{0, 0, 0} - vertices[f][0]);
        double side_d = dot(n, opposite[f] - vertices[f][0]);
        if (side_o * side_d < 0) inside = false;
        std::vector<Vec3> keep;
        Vec3 p = tri(vertices[f][0], vertices[f][1], vertices[f][2], keep);
        if (norm2(p) < bestd) {
            bestd = norm2(p);
            best = p;
            bestkeep = keep;
        }
    }
    if (inside) {
        sx = {a, b, c, d};
        return {0, 0, 0};
    }
    sx = bestkeep;
    return best;
}

// distance between conv(P) and conv(Q)
double gjk_distance(const std::vector<Vec3>& P, const std::vector<Vec3>& Q) {
    Vec3 v = P[0] - Q[0];
    std::vector<Vec3> sx{v};
    for (int it = 0; it < 256; ++it) {
        v = simplex_closest(sx);
        double lv = norm(v);
        if (lv < 1e-12) return 0.0;
        Vec3 w = support(P, -v) - support(Q, v);
        if (lv - dot(v, w) / lv < 1e-12) return lv;  // no progress: optimum
        bool dup = false;
        for (auto& s : sx)
            if (norm2(s - w) < 1e-24) dup = true;
        if (dup) return lv;
        sx.push_back(w);
        if (sx.size() > 4) sx.erase(sx.begin());
    }
    return norm(v);
}

}  // namespace

Separation is_separated(const Link& link, const std::vector<int>& part, double poly_tol) {
    link.validate();
    if (part.empty() || part.size() >= link.size())
        throw std::invalid_argument("is_separated: partition must be nonempty and proper");
    std::vector<bool> inJ(link.size(), false);
    for (int i : part) {
        if (i < 0 || (std::size_t)i >= link.size()) throw std::invalid_argument("is_separated: bad index");
        inJ[(std::size_t)i] = true;
    }
    std::vector<Vec3> P, Q;
    for (std::size_t i = 0; i < link.size(); ++i) {
        Polyline pl = polygonalize(link.comp(i), poly_tol);
        auto& dst = inJ[i] ? P : Q;
        dst.insert(dst.end(), pl.pts.begin(), pl.pts.end());
    }
    double d = gjk_distance(P, Q);
    if (d > 2.0 * poly_tol) return Separation::Separated;
    if (d <= 1e-12) return Separation::NotSeparated;
    return Separation::Unknown;  // inconclusive margin, never a guess
}

IntervalValue ropelength(const Link& link) {
    link.validate();
    IntervalValue total(0.0, 0.0);
    for (auto& c : link.components) total = total + c->length_interval();
    return total;
}

// ---------------------------------------------------------------------------
// Whole-link measurement

MeasurementReport measure_link(const Link& link, double tol, bool parallel) {
    MeasurementReport r;
    r.link_name = link.name;
    r.rope = ropelength(link);
    r.tube = tube_thickness(link, tol, parallel);
    r.pairs = r.tube.pairs;
    if (link.size() >= 2) {
        r.tau_valid = true;
        r.tau = r.tube.tau;
    }
    r.linking_matrix.assign(link.size(), std::vector<int>(link.size(), 0));
    for (std::size_t i = 0; i < link.size(); ++i)
        for (std::size_t j = i + 1; j < link.size(); ++j) {
            int lk = linking_number(link.comp(i), link.comp(j), 1e-2, 7, parallel);
            r.linking_matrix[i][j] = lk;
            r.linking_matrix[j][i] = lk;
        }
    return r;
}

std::string measurement_report_json(const MeasurementReport& r) {
    JsonWriter w;
    w.begin_object();
    w.kv("link", r.link_name);
    w.key("ropelength").begin_object().kv("lo", r.rope.lo).kv("hi", r.rope.hi).end_object();
    if (r.tau_valid)
        w.key("tau").begin_object().kv("lo", r.tau.lo).kv("hi", r.tau.hi).end_object();
    else
        w.key("tau").null();
    w.key("tau_e")
        .begin_object()
        .kv("lo", r.tube.tau_e.lo)
        .kv("hi", r.tube.tau_e.hi)
        .kv("limiting", r.tube.limiting_factor)
        .kv("criterion", r.tube.criterion)
        .end_object();
    w.key("max_curvature")
        .begin_object()
        .kv("value", r.tube.max_curvature)
        .kv("component", r.tube.max_curvature_component)
        .kv("arclength", r.tube.max_curvature_param)
        .end_object();
    w.key("linking_matrix").begin_array();
    for (auto& row : r.linking_matrix) {
        w.begin_array();
        for (int v : row) w.value(v);
        w.end_array();
    }
    w.end_array();
    w.key("pairs").begin_array();
    for (auto& p : r.pairs) {
        w.begin_object();
        w.kv("i", p.i).kv("j", p.j);
        w.key("dist").begin_object().kv("lo", p.dist.lo).kv("hi", p.dist.hi).end_object();
        w.key("witness").begin_array().value(p.dist.witness_s).value(p.dist.witness_t).end_array();
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

}  // namespace rl
