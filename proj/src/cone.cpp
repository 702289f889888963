#include "rl/cone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rl/metrics.hpp"
#include "rl/parallel.hpp"

namespace rl {

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr int kGL = 15;
constexpr double kGLx[kGL] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601700, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601700,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kGLw[kGL] = {
    0.03075324199611727, 0.07036604748810812, 0.1071592204671719,
    0.1395706779261543,  0.1662692058169939,  0.1861610000155622,
    0.1984314853271116,  0.2025782419255613,  0.1984314853271116,
    0.1861610000155622,  0.1662692058169939,  0.1395706779261543,
    0.1071592204671719,  0.07036604748810812, 0.03075324199611727};

}  // namespace

Vec3 center_of_mass(const Curve& c) {
    Vec3 moment{0, 0, 0};
    double mass = 0.0;
    if (auto* pw = dynamic_cast<const PiecewiseCurve*>(&c)) {
        for (const Piece& p : pw->pieces()) {
            switch (p.type()) {
                case PieceType::Segment: {
                    auto& s = p.segment_data();
                    moment += 0.5 * (s.a + s.b) * p.length();
                    break;
                }
                case PieceType::Arc: {
                    auto& a = p.arc_data();
                    double th0 = a.theta0, th1 = a.theta0 + a.dtheta;
                    double sg = a.dtheta >= 0 ? 1.0 : -1.0;
                    Vec3 m = a.center * (th1 - th0) +
                             a.radius * ((std::sin(th1) - std::sin(th0)) * a.u -
                                         (std::cos(th1) - std::cos(th0)) * a.v);
                    moment += sg * a.radius * m;
                    break;
                }
                case PieceType::TorusSection: {
                    int n = std::max(64, (int)(p.length() * 512));
                    for (int i = 0; i < n; ++i) {
                        double a0 = p.length() * i / n, a1 = p.length() * (i + 1) / n;
                        double mid = 0.5 * (a0 + a1), half = 0.5 * (a1 - a0);
                        for (int g = 0; g < kGL; ++g)
                            moment += (half * kGLw[g]) * p.point_at(mid + half * kGLx[g]);
                    }
                    break;
                }
            }
            mass += p.length();
        }
        return moment / mass;
    }
    int n = std::max(256, (int)(c.length_param() * 256));
    double L = c.length_param();
    for (int i = 0; i < n; ++i) {
        double a0 = L * i / n, a1 = L * (i + 1) / n;
        double mid = 0.5 * (a0 + a1), half = 0.5 * (a1 - a0);
        for (int g = 0; g < kGL; ++g) {
            double s = mid + half * kGLx[g];
            double w = half * kGLw[g] * norm(c.derivative(s));
            moment += w * c.point(s);
            mass += w;
        }
    }
    return moment / mass;
}

ConeDisk center_of_mass_disk(std::shared_ptr<const Curve> base) {
    ConeDisk d;
    d.apex = center_of_mass(*base);
    d.base = std::move(base);
    return d;
}

ConeDisk flat_disk(const Vec3& center, const Vec3& u, const Vec3& v, double radius) {
    ArcPiece a;
    a.center = center;
    a.u = u;
    a.v = v;
    a.radius = radius;
    a.theta0 = 0.0;
    a.dtheta = 2.0 * kPi;
    std::vector<Piece> ps{Piece::arc(a)};
    ConeDisk d;
    d.base = std::make_shared<PiecewiseCurve>(std::move(ps), true);
    d.apex = center;
    return d;
}

// ---------------------------------------------------------------------------
// Brouwer degree via boundary winding

namespace {

double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    double la = norm(a), lb = norm(b), lc = norm(c);
    double num = dot(a, cross(b, c));
    double den = la * lb * lc + dot(a, b) * lc + dot(b, c) * la + dot(c, a) * lb;
    return 2.0 * std::atan2(num, den);
}

struct QuadJob {
    Vec3 p00, p10, p11, p01;  // corners, outward oriented
};

double quad_winding(const std::function<Vec3(const Vec3&)>& F, const QuadJob& q, double delta,
                    int depth) {
    Vec3 f00 = F(q.p00), f10 = F(q.p10), f11 = F(q.p11), f01 = F(q.p01);
    for (const Vec3& f : {f00, f10, f11, f01})
        if (norm(f) < delta)
            throw std::runtime_error("brouwer_degree_box: boundary sample below exclusion bound");
    double o1 = solid_angle(f00, f10, f11);
    double o2 = solid_angle(f00, f11, f01);
    if ((std::abs(o1) < 0.5 * kPi && std::abs(o2) < 0.5 * kPi) || depth >= 24) return o1 + o2;
    Vec3 pm = 0.25 * (q.p00 + q.p10 + q.p11 + q.p01);
    Vec3 e0 = 0.5 * (q.p00 + q.p10), e1 = 0.5 * (q.p10 + q.p11);
    Vec3 e2 = 0.5 * (q.p11 + q.p01), e3 = 0.5 * (q.p01 + q.p00);
    return quad_winding(F, {q.p00, e0, pm, e3}, delta, depth + 1) +
           quad_winding(F, {e0, q.p10, e1, pm}, delta, depth + 1) +
           quad_winding(F, {pm, e1, q.p11, e2}, delta, depth + 1) +
           quad_winding(F, {e3, pm, e2, q.p01}, delta, depth + 1);
}

}  // namespace

int brouwer_degree_box(const std::function<Vec3(const Vec3&)>& F, const Vec3& lo, const Vec3& hi,
                       int samples_per_face, double delta) {
    if (samples_per_face < 1) throw std::invalid_argument("brouwer_degree_box: need n >= 1");
    int n = samples_per_face;
    double total = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
        for (int side = 0; side < 2; ++side) {
            double fixed = side ? hi[axis] : lo[axis];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    auto corner = [&](int ii, int jj) {
                        Vec3 p;
                        p[axis] = fixed;
                        p[a1] = lo[a1] + (hi[a1] - lo[a1]) * ii / n;
                        p[a2] = lo[a2] + (hi[a2] - lo[a2]) * jj / n;
                        return p;
                    };
                    QuadJob q;
                    if (side) {
                        q = {corner(i, j), corner(i + 1, j), corner(i + 1, j + 1), corner(i, j + 1)};
                    } else {
                        q = {corner(i, j), corner(i, j + 1), corner(i + 1, j + 1), corner(i + 1, j)};
                    }
                    total += quad_winding(F, q, delta, 0);
                }
        }
    }
    double deg = total / (4.0 * kPi);
    int d = (int)std::llround(deg);
    if (std::abs(deg - d) > 0.05)
        throw std::runtime_error("brouwer_degree_box: winding did not settle near an integer");
    return d;
}

// ---------------------------------------------------------------------------
// Disk-curve intersections
//
// Two charts for the disk:
//  * the generic cone chart (x, y) -> y*base(x) + (1-y)*apex, which
//    degenerates at the apex; crossings near the apex of a non-flat cone are
//    reported as unresolved;
//  * a planar chart (a, b) -> center + r(a u + b v) for flat disks (base a
//    full circle coned from its own center), which is regular everywhere and
//    covers the center-piercing intersections of circle spanning disks.

namespace {

struct PBox {
    double p0, p1, q0, q1, t0, t1;  // chart params p, q and curve param t
    double pmid() const { return 0.5 * (p0 + p1); }
    double qmid() const { return 0.5 * (q0 + q1); }
    double tmid() const { return 0.5 * (t0 + t1); }
    bool touches(const PBox& o, double dp, double dq, double dt) const {
        return p0 <= o.p1 + dp && o.p0 <= p1 + dp && q0 <= o.q1 + dq && o.q0 <= q1 + dq &&
               t0 <= o.t1 + dt && o.t0 <= t1 + dt;
    }
};

struct Chart {
    const Curve* curve;
    std::function<Vec3(double, double)> disk_point;   // (p, q) -> R^3
    double Lp, Lq;          // Lipschitz constants per chart axis
    double spC;
    // domain and pruning
    double plo, phi, qlo, qhi;
    std::function<bool(const PBox&)> outside;         // box certainly outside the disk domain
    std::function<void(double, double, double*, double*)> to_xy;  // chart -> cone (x, y)

    Vec3 F(double p, double q, double t) const { return disk_point(p, q) - curve->point_cyclic(t); }
    double lower(const PBox& b) const {
        Vec3 f = F(b.pmid(), b.qmid(), b.tmid());
        return norm(f) - 0.5 * ((b.p1 - b.p0) * Lp + (b.q1 - b.q0) * Lq + (b.t1 - b.t0) * spC);
    }
};

}  // namespace

DiskIntersections disk_curve_intersections(const ConeDisk& disk, const Curve& curve, double tol,
                                           bool parallel) {
    if (!(tol > 0)) throw std::invalid_argument("disk_curve_intersections: tol must be positive");

    // Precondition: the curve stays clear of the disk boundary circle.
    IntervalValue rim = min_distance(*disk.base, curve, std::min(1e-4, tol), parallel);
    if (!(rim.lo > 0))
        throw std::runtime_error("disk_curve_intersections: cannot certify curve clear of disk rim");

    double R = 0.0;
    {
        double Lx = disk.base->length_param();
        for (int i = 0; i <= 512; ++i)
            R = std::max(R, norm(disk.base->point(Lx * i / 512.0) - disk.apex));
        R = R * 1.01 + 1e-9;
    }

    DiskIntersections out;
    Chart ch;
    ch.curve = &curve;
    ch.spC = curve.max_speed();
    double Lc = curve.length_param();

    bool flat = false;
    ArcPiece circle;
    if (auto* pw = dynamic_cast<const PiecewiseCurve*>(disk.base.get())) {
        if (pw->pieces().size() == 1 && pw->pieces()[0].type() == PieceType::Arc) {
            circle = pw->pieces()[0].arc_data();
            if (std::abs(std::abs(circle.dtheta) - 2 * kPi) < 1e-12 &&
                norm(circle.center - disk.apex) < 1e-12)
                flat = true;
        }
    }

    if (flat) {
        double r = circle.radius;
        ch.disk_point = [circle, r](double a, double b) {
            return circle.center + (r * a) * circle.u + (r * b) * circle.v;
        };
        ch.Lp = r;
        ch.Lq = r;
        ch.plo = ch.qlo = -1.0;
        ch.phi = ch.qhi = 1.0;
        double rim_margin = rim.lo / r;  // zeros keep this margin from |(a,b)| = 1
        ch.outside = [rim_margin](const PBox& b) {
            // nearest radius of the box to the chart origin
            double amin = (b.p0 > 0) ? b.p0 : (b.p1 < 0 ? -b.p1 : 0.0);
            double bmin = (b.q0 > 0) ? b.q0 : (b.q1 < 0 ? -b.q1 : 0.0);
            double edge = 1.0 - 0.5 * rim_margin;
            return amin * amin + bmin * bmin > edge * edge;
        };
        ch.to_xy = [circle, r](double a, double b, double* x, double* y) {
            *y = std::hypot(a, b);
            double sg = circle.dtheta >= 0 ? 1.0 : -1.0;
            double xx = sg * (std::atan2(b, a) - circle.theta0) * r;
            double Lx = 2 * kPi * r;
            *x = std::fmod(std::fmod(xx, Lx) + Lx, Lx);
        };
    } else {
        double Lx = disk.base->length_param();
        double spX = disk.base->max_speed();
        Vec3 apex = disk.apex;
        const ConeDisk* dp = &disk;
        ch.disk_point = [dp](double x, double y) { return dp->point(x, y); };
        ch.Lp = spX;  // times y <= 1
        ch.Lq = R;
        ch.plo = 0.0;
        ch.phi = Lx;
        ch.qlo = 0.0;
        ch.qhi = 1.0;
        ch.outside = [](const PBox&) { return false; };
        ch.to_xy = [](double p, double q, double* x, double* y) {
            *x = p;
            *y = q;
        };
        // Apex crossings cannot be classified in this chart; report the apex
        // region unresolved if the curve comes near it.
        double apex_d = HUGE_VAL, apex_t = 0.0;
        for (int i = 0; i <= 8192; ++i) {
            double t = Lc * i / 8192.0;
            double d = norm(curve.point(t) - apex);
            if (d < apex_d) { apex_d = d; apex_t = t; }
        }
        double ycut = 20 * tol / R;
        if (apex_d < 0.5 * R * ycut) {
            out.unresolved.push_back({apex_t - 20 * tol / ch.spC, apex_t + 20 * tol / ch.spC, 0.0,
                                      Lx, 0.0, ycut});
            ch.qlo = ycut;
        }
    }

    std::vector<PBox> active;
    auto bps = curve.breakpoints();
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        if (flat) {
            active.push_back({ch.plo, 0.0, ch.qlo, 0.0, bps[i], bps[i + 1]});
            active.push_back({0.0, ch.phi, ch.qlo, 0.0, bps[i], bps[i + 1]});
            active.push_back({ch.plo, 0.0, 0.0, ch.qhi, bps[i], bps[i + 1]});
            active.push_back({0.0, ch.phi, 0.0, ch.qhi, bps[i], bps[i + 1]});
        } else {
            active.push_back({ch.plo, ch.phi, ch.qlo, ch.qhi, bps[i], bps[i + 1]});
        }
    }

    const double leaf = std::max(tol, 1e-7);
    std::vector<PBox> leaves;
    for (int round = 0; round < 96 && !active.empty(); ++round) {
        std::vector<int> verdict(active.size());
        par::for_each(
            (std::int64_t)active.size(),
            [&](std::int64_t i) {
                const PBox& b = active[(std::size_t)i];
                if (ch.outside(b) || ch.lower(b) > 0) { verdict[(std::size_t)i] = 0; return; }
                double wp = (b.p1 - b.p0) * ch.Lp;
                double wq = (b.q1 - b.q0) * ch.Lq;
                double wt = (b.t1 - b.t0) * ch.spC;
                verdict[(std::size_t)i] = (wp < leaf && wq < leaf && wt < leaf) ? 1 : 2;
            },
            parallel);
        std::vector<PBox> next;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const PBox& b = active[i];
            if (verdict[i] == 0) continue;
            if (verdict[i] == 1) { leaves.push_back(b); continue; }
            double wp = (b.p1 - b.p0) * ch.Lp;
            double wq = (b.q1 - b.q0) * ch.Lq;
            double wt = (b.t1 - b.t0) * ch.spC;
            PBox c1 = b, c2 = b;
            if (wt >= wp && wt >= wq) { c1.t1 = c2.t0 = b.tmid(); }
            else if (wp >= wq) { c1.p1 = c2.p0 = b.pmid(); }
            else { c1.q1 = c2.q0 = b.qmid(); }
            next.push_back(c1);
            next.push_back(c2);
        }
        active.swap(next);
        if (active.size() > 4u * 1000u * 1000u)
            throw std::runtime_error("disk_curve_intersections: subdivision budget exhausted");
    }
    if (!active.empty())
        throw std::runtime_error("disk_curve_intersections: subdivision did not terminate");

    // Cluster touching leaves.
    std::vector<int> parent(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) parent[i] = (int)i;
    std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
    double dp = 2 * leaf / std::max(ch.Lp, 1e-12), dq = 2 * leaf / std::max(ch.Lq, 1e-12),
           dt = 2 * leaf / ch.spC;
    for (std::size_t i = 0; i < leaves.size(); ++i)
        for (std::size_t j = i + 1; j < leaves.size(); ++j)
            if (leaves[i].touches(leaves[j], dp, dq, dt)) parent[find((int)i)] = find((int)j);

    std::vector<std::vector<int>> clusters;
    {
        std::vector<int> root_of(leaves.size(), -1);
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            int r = find((int)i);
            if (root_of[r] < 0) {
                root_of[r] = (int)clusters.size();
                clusters.emplace_back();
            }
            clusters[root_of[r]].push_back((int)i);
        }
    }

    for (auto& cl : clusters) {
        PBox e = leaves[cl[0]];
        for (int idx : cl) {
            const PBox& b = leaves[idx];
            e.p0 = std::min(e.p0, b.p0);
            e.p1 = std::max(e.p1, b.p1);
            e.q0 = std::min(e.q0, b.q0);
            e.q1 = std::max(e.q1, b.q1);
            e.t0 = std::min(e.t0, b.t0);
            e.t1 = std::max(e.t1, b.t1);
        }
        double ip = std::max(6 * leaf / std::max(ch.Lp, 1e-12), 0.25 * (e.p1 - e.p0));
        double iq = std::max(6 * leaf / std::max(ch.Lq, 1e-12), 0.25 * (e.q1 - e.q0));
        double it = std::max(6 * leaf / ch.spC, 0.25 * (e.t1 - e.t0));
        PBox box{e.p0 - ip, e.p1 + ip, e.q0 - iq, e.q1 + iq, e.t0 - it, e.t1 + it};
        if (!flat) {
            box.q0 = std::max(box.q0, 0.0);
            box.q1 = std::min(box.q1, 1.0);
        }

        // Newton refinement from the best cluster sample.
        double bp = e.pmid(), bq = e.qmid(), bt = e.tmid(), bn = HUGE_VAL;
        for (int idx : cl) {
            const PBox& b = leaves[idx];
            double n = norm(ch.F(b.pmid(), b.qmid(), b.tmid()));
            if (n < bn) { bn = n; bp = b.pmid(); bq = b.qmid(); bt = b.tmid(); }
        }
        const double h = 1e-7;
        for (int k = 0; k < 60 && bn > 1e-12; ++k) {
            Vec3 f = ch.F(bp, bq, bt);
            Vec3 jp = (ch.F(bp + h, bq, bt) - ch.F(bp - h, bq, bt)) / (2 * h);
            Vec3 jq = (ch.F(bp, bq + h, bt) - ch.F(bp, bq - h, bt)) / (2 * h);
            Vec3 jt = (ch.F(bp, bq, bt + h) - ch.F(bp, bq, bt - h)) / (2 * h);
            double det = dot(jp, cross(jq, jt));
            if (std::abs(det) < 1e-14) break;
            double ddp = dot(-f, cross(jq, jt)) / det;
            double ddq = dot(jp, cross(-f, jt)) / det;
            double ddt = dot(jp, cross(jq, -f)) / det;
            double cap = 8 * leaf / std::min({std::max(ch.Lp, 1e-12), std::max(ch.Lq, 1e-12), ch.spC});
            bp += std::clamp(ddp, -cap, cap);
            bq += std::clamp(ddq, -cap, cap);
            bt += std::clamp(ddt, -cap, cap);
            bn = norm(ch.F(bp, bq, bt));
        }

        // Boundary exclusion certificate, then the local degree.
        double lo0[3] = {box.p0, box.q0, box.t0}, hi0[3] = {box.p1, box.q1, box.t1};
        double sl[3] = {ch.Lp, ch.Lq, ch.spC};
        double delta = HUGE_VAL;
        bool cert = false;
        for (int level = 3; level <= 7 && !cert; ++level) {
            int n = 1 << level;
            delta = HUGE_VAL;
            cert = true;
            for (int face = 0; face < 6 && cert; ++face) {
                int axis = face / 2, side = face % 2;
                int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
                for (int i = 0; i <= n && cert; ++i)
                    for (int j = 0; j <= n && cert; ++j) {
                        double p[3];
                        p[axis] = side ? hi0[axis] : lo0[axis];
                        p[a1] = lo0[a1] + (hi0[a1] - lo0[a1]) * i / n;
                        p[a2] = lo0[a2] + (hi0[a2] - lo0[a2]) * j / n;
                        double cellr = 0.5 * std::hypot((hi0[a1] - lo0[a1]) / n * sl[a1],
                                                        (hi0[a2] - lo0[a2]) / n * sl[a2]);
                        double m = norm(ch.F(p[0], p[1], p[2])) - cellr;
                        if (m <= 0) cert = false;
                        delta = std::min(delta, m);
                    }
            }
        }
        if (!cert) {
            out.unresolved.push_back({box.t0, box.t1, box.p0, box.p1, box.q0, box.q1});
            continue;
        }

        auto Fd = [&](const Vec3& v) { return ch.F(v.x, v.y, v.z); };
        int deg;
        try {
            deg = brouwer_degree_box(Fd, Vec3{box.p0, box.q0, box.t0}, Vec3{box.p1, box.q1, box.t1},
                                     8, std::max(1e-13, 0.25 * delta));
        } catch (const std::exception&) {
            out.unresolved.push_back({box.t0, box.t1, box.p0, box.p1, box.q0, box.q1});
            continue;
        }
        if (deg == 0 && bn > 1e-9) continue;  // certified near-miss

        IntersectionRecord rec;
        rec.t = bt < 0 ? bt + Lc : std::fmod(bt, Lc);
        ch.to_xy(bp, bq, &rec.x, &rec.y);
        rec.point = curve.point_cyclic(bt);
        rec.sign = deg;
        rec.transverse = (deg == 1 || deg == -1);
        if (norm(ch.disk_point(bp, bq) - rec.point) > 1e-8 || !rec.transverse) {
            out.unresolved.push_back({box.t0, box.t1, box.p0, box.p1, box.q0, box.q1});
            continue;
        }
        rec.isolation_radius = 0.5 * std::min({box.p1 - box.p0, box.q1 - box.q0, box.t1 - box.t0});
        out.records.push_back(rec);
    }

    // Deduplicate only records produced twice by the cyclic seam (same curve
    // parameter mod length); distinct passages through the same 3d point are
    // distinct intersections.
    std::sort(out.records.begin(), out.records.end(),
              [](const IntersectionRecord& a, const IntersectionRecord& b) { return a.t < b.t; });
    std::vector<IntersectionRecord> dedup;
    double tgap = 40 * leaf / ch.spC;
    for (auto& r : out.records) {
        bool same = false;
        for (auto& q : dedup) {
            double dt = std::abs(q.t - r.t);
            dt = std::min(dt, Lc - dt);
            if (dt < tgap && q.sign == r.sign) same = true;
        }
        if (!same) dedup.push_back(r);
    }
    out.records.swap(dedup);
    return out;
}

}  // namespace rl
