#include "rl/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rl {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 15-point Gauss-Legendre on [-1,1].
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

template <class F>
double gauss15(F&& f, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < kGL; ++i) s += kGLw[i] * f(mid + half * kGLx[i]);
    return s * half;
}

double torus_u(double d, double z) { return std::sqrt(d * d + z * z); }

// y' = (1-u) z / (u y)
double torus_yprime(double d, double z) {
    double u = torus_u(d, z);
    double y = torus_section_y(d, z);
    return (1.0 - u) * z / (u * y);
}

double torus_speed_z(double d, double z) {
    double yp = torus_yprime(d, z);
    return std::sqrt(1.0 + yp * yp);
}

// psi parametrization: u = 1 + cos(psi), y = sin(psi), z = sz*sqrt(u^2-d^2).
// Regular where z is away from 0; used near the |z| = zmax ends.
double torus_psi_of_z(double d, double z) {
    double u = torus_u(d, z);
    return std::acos(std::clamp(u - 1.0, -1.0, 1.0));
}

double torus_z_of_psi(double d, double psi, int sz) {
    double u = 1.0 + std::cos(psi);
    double q = u * u - d * d;
    return sz * std::sqrt(std::max(0.0, q));
}

double torus_speed_psi(double d, double psi) {
    double u = 1.0 + std::cos(psi);
    double y = std::sin(psi);
    double q = std::max(0.0, u * u - d * d);
    double z = std::sqrt(q);
    double dy = u - 1.0;
    if (z == 0.0) return HUGE_VAL;
    double dz = u * y / z;
    return std::sqrt(dy * dy + dz * dz);
}

}  // namespace

double torus_section_zmax(double d) {
    if (d <= 0.0 || d >= 2.0) throw std::invalid_argument("torus section: need 0 < d < 2");
    return std::sqrt(4.0 - d * d);
}

double torus_section_y(double d, double z) {
    double u = torus_u(d, z);
    // y^2 = u(2-u); written with (4 - d^2 - z^2)/(2+u) to stay accurate
    // where u is close to 2.
    double twominus = (4.0 - d * d - z * z) / (2.0 + u);
    return std::sqrt(std::max(0.0, u * twominus));
}

Vec3 torus_section_point(double d, double z, int branch) {
    double zmax = torus_section_zmax(d);
    if (std::abs(z) > zmax + 1e-12) throw std::invalid_argument("torus section: z outside real branch");
    if (branch != 1 && branch != -1) throw std::invalid_argument("torus section: branch must be +-1");
    return {0.0, branch * torus_section_y(d, z), std::clamp(z, -zmax, zmax)};
}

// Curvature from the implicit form F(y,z) = (d^2+z^2+y^2)^2 - 4(d^2+z^2).
double torus_section_curvature(double d, double z) {
    double y = torus_section_y(d, z);
    double w = d * d + z * z + y * y;
    double Fy = 4.0 * w * y;
    double Fz = 4.0 * z * (w - 2.0);
    double Fyy = 4.0 * w + 8.0 * y * y;
    double Fyz = 8.0 * y * z;
    double Fzz = 4.0 * w + 8.0 * z * z - 8.0;
    double g2 = Fy * Fy + Fz * Fz;
    double num = std::abs(Fyy * Fz * Fz - 2.0 * Fyz * Fy * Fz + Fzz * Fy * Fy);
    return num / (g2 * std::sqrt(g2));
}

// ---------------------------------------------------------------------------
// Torus arclength table

class TorusTable {
  public:
    TorusTable(double d, double z0, double z1, int /*branch*/) : d_(d) {
        double zmax = torus_section_zmax(d);
        // Integrate in z away from the |z|=zmax ends, in psi away from z=0;
        // both integrands are analytic on their half of the split.
        double zsplit = 0.5 * zmax;

        std::vector<double> cuts;
        cuts.push_back(z0);
        for (double c : {-zsplit, zsplit})
            if ((z0 < c && c < z1) || (z1 < c && c < z0)) cuts.push_back(c);
        cuts.push_back(z1);
        std::sort(cuts.begin(), cuts.end());
        if (z0 > z1) std::reverse(cuts.begin(), cuts.end());

        zs_.push_back(z0);
        ss_.push_back(0.0);
        double acc = 0.0;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            double a = cuts[c], b = cuts[c + 1];
            bool use_psi = std::min(std::abs(a), std::abs(b)) >= zsplit - 1e-14;
            int n = std::max(64, (int)std::ceil(std::abs(b - a) * 1024.0));
            if (use_psi) {
                int sz = (a + b) > 0 ? 1 : -1;
                double pa = torus_psi_of_z(d, a), pb = torus_psi_of_z(d, b);
                for (int i = 0; i < n; ++i) {
                    double p0 = pa + (pb - pa) * i / n;
                    double p1 = pa + (pb - pa) * (i + 1) / n;
                    acc += std::abs(gauss15([&](double p) { return torus_speed_psi(d, p); }, p0, p1));
                    zs_.push_back(torus_z_of_psi(d, p1, sz));
                    ss_.push_back(acc);
                }
            } else {
                for (int i = 0; i < n; ++i) {
                    double x0 = a + (b - a) * i / n;
                    double x1 = a + (b - a) * (i + 1) / n;
                    acc += std::abs(gauss15([&](double z) { return torus_speed_z(d, z); }, x0, x1));
                    zs_.push_back(x1);
                    ss_.push_back(acc);
                }
            }
        }
        zs_.back() = z1;
        len_ = acc;
    }

    double length() const { return len_; }

    // z at arclength s from the start of the piece; monotone cubic Hermite
    // between table nodes using dz/ds = 1/speed (0 at the singular end).
    double z_at(double s) const {
        s = std::clamp(s, 0.0, len_);
        auto it = std::upper_bound(ss_.begin(), ss_.end(), s);
        std::size_t i = (std::size_t)std::max<std::ptrdiff_t>(1, it - ss_.begin()) - 1;
        if (i + 1 >= ss_.size()) return zs_.back();
        double h = ss_[i + 1] - ss_[i];
        if (h <= 0.0) return zs_[i];
        double t = (s - ss_[i]) / h;
        double m0 = dzds(zs_[i]) * sgn_, m1 = dzds(zs_[i + 1]) * sgn_;
        // ensure direction consistency with the node ordering
        double dz = zs_[i + 1] - zs_[i];
        if (m0 * dz < 0) m0 = 0;
        if (m1 * dz < 0) m1 = 0;
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * zs_[i] + (t3 - 2 * t2 + t) * h * m0 +
               (-2 * t3 + 3 * t2) * zs_[i + 1] + (t3 - t2) * h * m1;
    }

    void set_direction(double z0, double z1) { sgn_ = (z1 >= z0) ? 1.0 : -1.0; }

  private:
    double dzds(double z) const {
        double sp = torus_speed_z(d_, z);
        if (!std::isfinite(sp) || sp > 1e12) return 0.0;
        return 1.0 / sp;
    }
    double d_;
    double len_ = 0.0;
    double sgn_ = 1.0;
    std::vector<double> zs_, ss_;
};

// ---------------------------------------------------------------------------
// Piece

Piece Piece::arc(const ArcPiece& a) {
    if (!(a.radius > 0.0)) throw std::invalid_argument("arc: radius must be positive");
    if (a.dtheta == 0.0) throw std::invalid_argument("arc: zero sweep");
    if (std::abs(a.dtheta) > 2.0 * kPi + 1e-12) throw std::invalid_argument("arc: |dtheta| > 2pi");
    double tol = 1e-12;
    if (std::abs(norm(a.u) - 1.0) > tol || std::abs(norm(a.v) - 1.0) > tol ||
        std::abs(dot(a.u, a.v)) > tol)
        throw std::invalid_argument("arc: degenerate frame");
    Piece p;
    p.type_ = PieceType::Arc;
    p.arc_ = a;
    p.len_ = a.radius * std::abs(a.dtheta);
    return p;
}

Piece Piece::segment(const SegmentPiece& s) {
    if (!(dist(s.a, s.b) > 0.0)) throw std::invalid_argument("segment: endpoints coincide");
    Piece p;
    p.type_ = PieceType::Segment;
    p.seg_ = s;
    p.len_ = dist(s.a, s.b);
    return p;
}

Piece Piece::torus_section(const TorusSectionPiece& t) {
    double zmax = torus_section_zmax(t.d);
    if (t.branch != 1 && t.branch != -1) throw std::invalid_argument("torus section: branch must be +-1");
    if (std::abs(t.z0) > zmax + 1e-12 || std::abs(t.z1) > zmax + 1e-12)
        throw std::invalid_argument("torus section: z outside real branch");
    if (t.z0 == t.z1) throw std::invalid_argument("torus section: empty z range");
    Piece p;
    p.type_ = PieceType::TorusSection;
    p.tor_ = t;
    TorusSectionPiece c = t;
    c.z0 = std::clamp(c.z0, -zmax, zmax);
    c.z1 = std::clamp(c.z1, -zmax, zmax);
    p.tor_ = c;
    auto table = std::make_shared<TorusTable>(c.d, c.z0, c.z1, c.branch);
    table->set_direction(c.z0, c.z1);
    p.table_ = table;
    p.len_ = table->length();
    return p;
}

IntervalValue Piece::length_interval() const {
    if (type_ == PieceType::TorusSection) {
        // quadrature is far more accurate than this, but 1e-8 is the
        // contracted certificate width
        return {len_ - 5e-9, len_ + 5e-9};
    }
    return exact_interval(len_);
}

double Piece::torus_z_at(double s) const { return table_->z_at(s); }

Vec3 Piece::point_at(double s) const {
    switch (type_) {
        case PieceType::Arc: {
            double th = arc_.theta0 + (arc_.dtheta >= 0 ? s : -s) / arc_.radius;
            return arc_.center + arc_.radius * (std::cos(th) * arc_.u + std::sin(th) * arc_.v);
        }
        case PieceType::Segment: {
            double t = s / len_;
            return seg_.a + t * (seg_.b - seg_.a);
        }
        case PieceType::TorusSection: {
            double z = table_->z_at(s);
            return {0.0, tor_.branch * torus_section_y(tor_.d, z), z};
        }
    }
    return {};
}

Vec3 Piece::tangent_at(double s) const {
    switch (type_) {
        case PieceType::Arc: {
            double sg = arc_.dtheta >= 0 ? 1.0 : -1.0;
            double th = arc_.theta0 + sg * s / arc_.radius;
            return sg * (-std::sin(th) * arc_.u + std::cos(th) * arc_.v);
        }
        case PieceType::Segment:
            return (seg_.b - seg_.a) / len_;
        case PieceType::TorusSection: {
            double z = table_->z_at(s);
            double dirz = (tor_.z1 >= tor_.z0) ? 1.0 : -1.0;
            double u = torus_u(tor_.d, z);
            double y = torus_section_y(tor_.d, z);
            double a = (1.0 - u) * z;  // y' = a / (u*y)
            double b = u * y;
            // tangent (0, branch*y', 1)/speed, computed stably near y = 0
            double n = std::hypot(a, b);
            if (n == 0.0) return {0.0, (double)tor_.branch, 0.0};
            return Vec3{0.0, tor_.branch * a / n, b / n} * dirz;
        }
    }
    return {};
}

double Piece::curvature_at(double s) const {
    switch (type_) {
        case PieceType::Arc:
            return 1.0 / arc_.radius;
        case PieceType::Segment:
            return 0.0;
        case PieceType::TorusSection:
            return torus_section_curvature(tor_.d, table_->z_at(s));
    }
    return 0.0;
}

double Piece::curvature_bound() const { return curvature_bound(0.0, len_); }

double Piece::curvature_bound(double s0, double s1) const {
    switch (type_) {
        case PieceType::Arc:
            return 1.0 / arc_.radius;
        case PieceType::Segment:
            return 0.0;
        case PieceType::TorusSection: {
            // kappa(z) is smooth; sample the sub-range and add Lipschitz slack
            s0 = std::clamp(s0, 0.0, len_);
            s1 = std::clamp(s1, 0.0, len_);
            int n = 16;
            double m = 0.0;
            for (int i = 0; i <= n; ++i) {
                double z = table_->z_at(s0 + (s1 - s0) * i / n);
                m = std::max(m, torus_section_curvature(tor_.d, z));
            }
            double h = (s1 - s0) / n;
            return m + 4.0 * h;  // |dkappa/ds| <= 4 on this family, checked in tests
        }
    }
    return 0.0;
}

Piece Piece::reversed() const {
    switch (type_) {
        case PieceType::Arc: {
            ArcPiece a = arc_;
            a.theta0 = arc_.theta0 + arc_.dtheta;
            a.dtheta = -arc_.dtheta;
            return Piece::arc(a);
        }
        case PieceType::Segment:
            return Piece::segment({seg_.b, seg_.a});
        case PieceType::TorusSection: {
            TorusSectionPiece t = tor_;
            std::swap(t.z0, t.z1);
            return Piece::torus_section(t);
        }
    }
    throw std::logic_error("unreachable");
}

Piece Piece::transformed(const Mat3& R, const Vec3& t, double scale) const {
    switch (type_) {
        case PieceType::Arc: {
            ArcPiece a = arc_;
            a.center = R * (arc_.center * scale) + t;
            a.u = R * arc_.u;
            a.v = R * arc_.v;
            a.radius = arc_.radius * scale;
            return Piece::arc(a);
        }
        case PieceType::Segment:
            return Piece::segment({R * (seg_.a * scale) + t, R * (seg_.b * scale) + t});
        case PieceType::TorusSection:
            throw std::invalid_argument("torus sections only support the y/z reflections");
    }
    throw std::logic_error("unreachable");
}

Piece Piece::reflected_y() const {
    Mat3 R;
    R.m[1][1] = -1.0;
    switch (type_) {
        case PieceType::Arc:
        case PieceType::Segment:
            return transformed(R, {0, 0, 0}, 1.0);
        case PieceType::TorusSection: {
            TorusSectionPiece t = tor_;
            t.branch = -t.branch;
            return Piece::torus_section(t);
        }
    }
    throw std::logic_error("unreachable");
}

Piece Piece::reflected_z() const {
    Mat3 R;
    R.m[2][2] = -1.0;
    switch (type_) {
        case PieceType::Arc:
        case PieceType::Segment:
            return transformed(R, {0, 0, 0}, 1.0);
        case PieceType::TorusSection: {
            TorusSectionPiece t = tor_;
            t.z0 = -t.z0;
            t.z1 = -t.z1;
            return Piece::torus_section(t);
        }
    }
    throw std::logic_error("unreachable");
}

Piece Piece::subrange(double s0, double s1) const {
    s0 = std::clamp(s0, 0.0, len_);
    s1 = std::clamp(s1, 0.0, len_);
    if (!(s1 > s0)) throw std::invalid_argument("piece subrange: empty");
    switch (type_) {
        case PieceType::Arc: {
            ArcPiece a = arc_;
            double sg = arc_.dtheta >= 0 ? 1.0 : -1.0;
            a.theta0 = arc_.theta0 + sg * s0 / arc_.radius;
            a.dtheta = sg * (s1 - s0) / arc_.radius;
            return Piece::arc(a);
        }
        case PieceType::Segment: {
            return Piece::segment({point_at(s0), point_at(s1)});
        }
        case PieceType::TorusSection: {
            TorusSectionPiece t = tor_;
            t.z0 = table_->z_at(s0);
            t.z1 = table_->z_at(s1);
            return Piece::torus_section(t);
        }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Curve base helpers

Vec3 Curve::point_cyclic(double s) const {
    double L = length_param();
    s = std::fmod(s, L);
    if (s < 0) s += L;
    return point(s);
}

Vec3 Curve::derivative_cyclic(double s) const {
    double L = length_param();
    s = std::fmod(s, L);
    if (s < 0) s += L;
    return derivative(s);
}

// ---------------------------------------------------------------------------
// PiecewiseCurve

PiecewiseCurve::PiecewiseCurve(std::vector<Piece> pieces, bool closed)
    : pieces_(std::move(pieces)), closed_(closed) {
    if (pieces_.empty()) throw std::invalid_argument("curve: no pieces");
    cum_.resize(pieces_.size() + 1);
    cum_[0] = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        cum_[i + 1] = cum_[i] + pieces_[i].length();
        if (i + 1 < pieces_.size()) {
            double gap = dist(pieces_[i].end(), pieces_[i + 1].start());
            if (gap > kClosureTol)
                throw std::invalid_argument("curve: pieces " + std::to_string(i) + "," +
                                            std::to_string(i + 1) + " do not meet (gap " +
                                            std::to_string(gap) + ")");
        }
    }
    if (closed_) {
        double gap = dist(pieces_.back().end(), pieces_.front().start());
        if (gap > kClosureTol) throw std::invalid_argument("curve: not closed (gap " + std::to_string(gap) + ")");
    }
}

IntervalValue PiecewiseCurve::length_interval() const {
    IntervalValue total(0.0, 0.0);
    for (auto& p : pieces_) total = total + p.length_interval();
    return total;
}

int PiecewiseCurve::locate(double s, double* local) const {
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    int i = (int)std::max<std::ptrdiff_t>(1, it - cum_.begin()) - 1;
    i = std::min(i, (int)pieces_.size() - 1);
    *local = std::clamp(s - cum_[i], 0.0, pieces_[i].length());
    return i;
}

Vec3 PiecewiseCurve::point(double s) const {
    double local;
    int i = locate(s, &local);
    return pieces_[i].point_at(local);
}

Vec3 PiecewiseCurve::derivative(double s) const {
    double local;
    int i = locate(s, &local);
    return pieces_[i].tangent_at(local);
}

double PiecewiseCurve::curvature(double s) const {
    double local;
    int i = locate(s, &local);
    double k = pieces_[i].curvature_at(local);
    // at a junction take the max of the one-sided limits
    const double eps = 1e-12 * std::max(1.0, length_param());
    if (local < eps && (i > 0 || closed_)) {
        int j = i > 0 ? i - 1 : (int)pieces_.size() - 1;
        k = std::max(k, pieces_[j].curvature_at(pieces_[j].length()));
    }
    if (local > pieces_[i].length() - eps && (i + 1 < (int)pieces_.size() || closed_)) {
        int j = (i + 1) % (int)pieces_.size();
        k = std::max(k, pieces_[j].curvature_at(0.0));
    }
    return k;
}

double PiecewiseCurve::d2_bound(double s0, double s1) const {
    double l0, l1;
    int i0 = locate(std::min(s0, s1), &l0);
    int i1 = locate(std::max(s0, s1), &l1);
    if (i0 == i1) return pieces_[i0].curvature_bound(l0, l1);
    double m = pieces_[i0].curvature_bound(l0, pieces_[i0].length());
    for (int i = i0 + 1; i < i1; ++i) m = std::max(m, pieces_[i].curvature_bound());
    m = std::max(m, pieces_[i1].curvature_bound(0.0, l1));
    return m;
}

void PiecewiseCurve::evaluate(double s, Vec3* p, Vec3* tangent, double* curvature_out) const {
    double L = length_param();
    if (s < -1e-12 || s > L + 1e-12) throw std::invalid_argument("evaluate: arclength out of range");
    s = std::clamp(s, 0.0, L);
    if (p) *p = point(s);
    if (tangent) *tangent = derivative(s);
    if (curvature_out) {
        double local;
        int i = locate(s, &local);
        if (pieces_[i].type() == PieceType::TorusSection) {
            // numerical differentiation of the analytic parametrization
            const double h = 1e-5;
            Vec3 t0 = derivative_cyclic(s - h), t1 = derivative_cyclic(s + h);
            *curvature_out = norm(t1 - t0) / (2.0 * h);
        } else {
            *curvature_out = curvature(s);
        }
    }
}

double PiecewiseCurve::curvature_max(double* arg_s) const {
    double best = 0.0, arg = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Piece& p = pieces_[i];
        if (p.type() == PieceType::TorusSection) {
            int n = 2048;
            for (int k = 0; k <= n; ++k) {
                double s = p.length() * k / n;
                double kk = torus_section_curvature(p.torus_data().d, p.torus_z_at(s));
                if (kk > best) { best = kk; arg = cum_[i] + s; }
            }
        } else {
            double kk = p.curvature_at(0.0);
            if (kk > best) { best = kk; arg = cum_[i]; }
        }
    }
    if (arg_s) *arg_s = arg;
    return best;
}

double PiecewiseCurve::max_tangent_discontinuity(double* arg_s) const {
    double worst = 0.0, arg = 0.0;
    std::size_t n = pieces_.size();
    std::size_t njunc = closed_ ? n : n - 1;
    for (std::size_t i = 0; i < njunc; ++i) {
        const Piece& a = pieces_[i];
        const Piece& b = pieces_[(i + 1) % n];
        double c = std::clamp(dot(a.tangent_at(a.length()), b.tangent_at(0.0)), -1.0, 1.0);
        double ang = std::acos(c);
        if (ang > worst) { worst = ang; arg = cum_[i + 1]; }
    }
    if (arg_s) *arg_s = arg;
    return worst;
}

PiecewiseCurve PiecewiseCurve::reversed() const {
    std::vector<Piece> rp;
    for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) rp.push_back(it->reversed());
    return PiecewiseCurve(std::move(rp), closed_);
}

PiecewiseCurve PiecewiseCurve::transformed(const Mat3& R, const Vec3& t, double scale) const {
    std::vector<Piece> tp;
    for (auto& p : pieces_) tp.push_back(p.transformed(R, t, scale));
    return PiecewiseCurve(std::move(tp), closed_);
}

PiecewiseCurve PiecewiseCurve::reflected_y() const {
    std::vector<Piece> tp;
    for (auto& p : pieces_) tp.push_back(p.reflected_y());
    return PiecewiseCurve(std::move(tp), closed_);
}

PiecewiseCurve PiecewiseCurve::reflected_z() const {
    std::vector<Piece> tp;
    for (auto& p : pieces_) tp.push_back(p.reflected_z());
    return PiecewiseCurve(std::move(tp), closed_);
}

std::vector<Piece> PiecewiseCurve::subcurve_pieces(double s0, double s1) const {
    double L = length_param();
    if (s1 <= s0) throw std::invalid_argument("subcurve: need s1 > s0");
    if (!closed_ && s1 > L + 1e-12) throw std::invalid_argument("subcurve: out of range");
    std::vector<Piece> out;
    double s = s0;
    const double eps = 1e-12 * std::max(1.0, L);
    while (s < s1 - eps) {
        double sw = std::fmod(s, L);
        if (sw < 0) sw += L;
        double local;
        int i = locate(sw, &local);
        if (local >= pieces_[i].length() - eps) {
            s += pieces_[i].length() - local;
            continue;
        }
        double take = std::min(pieces_[i].length() - local, s1 - s);
        out.push_back(pieces_[i].subrange(local, local + take));
        s += take;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Polygonalization

double Polyline::length() const {
    double L = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) L += dist(pts[i], pts[i + 1]);
    if (closed && pts.size() > 1) L += dist(pts.back(), pts.front());
    return L;
}

Polyline polygonalize(const Curve& c, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("polygonalize: tol must be positive");
    Polyline out;
    out.closed = c.closed();
    std::vector<double> bps = c.breakpoints();
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        double a = bps[i], b = bps[i + 1];
        if (!(b > a)) continue;
        double M = c.d2_bound(a, b);
        // chord sagitta <= M h^2 / 8
        double h = M > 0 ? std::sqrt(8.0 * tol / M) : (b - a);
        int n = std::max(1, (int)std::ceil((b - a) / h));
        for (int k = 0; k < n; ++k) {
            double s = a + (b - a) * k / n;
            out.pts.push_back(c.point(s));
            out.params.push_back(s);
        }
    }
    if (!out.closed) {
        out.pts.push_back(c.point(bps.back()));
        out.params.push_back(bps.back());
    }
    return out;
}

}  // namespace rl
