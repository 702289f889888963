#include "rl/displaced.hpp"

#include <cmath>
#include <stdexcept>

namespace rl {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

DisplacedCurve::DisplacedCurve(std::shared_ptr<const PiecewiseCurve> base,
                               std::vector<Vec3> cos_coef, std::vector<Vec3> sin_coef, double scale)
    : base_(std::move(base)), ca_(std::move(cos_coef)), cb_(std::move(sin_coef)), scale_(scale) {
    if (ca_.size() != cb_.size()) throw std::invalid_argument("displaced: coefficient size mismatch");
    if (!(scale_ > 0)) throw std::invalid_argument("displaced: scale must be positive");
    double L = base_->length_param();
    for (std::size_t k = 0; k < ca_.size(); ++k) {
        double w = kTwoPi * (double)(k + 1) / L;
        omega_.push_back(w);
        double amp = norm(ca_[k]) + norm(cb_[k]);
        d1_bound_ += w * amp;
        d2b_ += w * w * amp;
    }
    // cached certified length via composite quadrature per base piece
    auto bps = base_->breakpoints();
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        double a = bps[i], b = bps[i + 1];
        int n = std::max(32, (int)((b - a) * 256));
        // Simpson
        double acc = 0.0;
        for (int q = 0; q < n; ++q) {
            double x0 = a + (b - a) * q / n;
            double x1 = a + (b - a) * (q + 1) / n;
            double xm = 0.5 * (x0 + x1);
            acc += (x1 - x0) / 6.0 *
                   (norm(derivative(x0)) + 4.0 * norm(derivative(xm)) + norm(derivative(x1)));
        }
        len += acc;
    }
    len_lo_ = len - 1e-8;
    len_hi_ = len + 1e-8;
}

Vec3 DisplacedCurve::displacement(double s) const {
    Vec3 d{0, 0, 0};
    for (std::size_t k = 0; k < ca_.size(); ++k)
        d += std::cos(omega_[k] * s) * ca_[k] + std::sin(omega_[k] * s) * cb_[k];
    return d;
}

Vec3 DisplacedCurve::point(double s) const { return scale_ * (base_->point(s) + displacement(s)); }

Vec3 DisplacedCurve::derivative(double s) const {
    Vec3 d{0, 0, 0};
    for (std::size_t k = 0; k < ca_.size(); ++k)
        d += omega_[k] * (-std::sin(omega_[k] * s) * ca_[k] + std::cos(omega_[k] * s) * cb_[k]);
    return scale_ * (base_->derivative(s) + d);
}

IntervalValue DisplacedCurve::length_interval() const { return {len_lo_, len_hi_}; }

double DisplacedCurve::curvature(double s) const {
    const double h = 1e-5;
    Vec3 t0 = derivative_cyclic(s - h), t1 = derivative_cyclic(s + h);
    Vec3 tm = derivative_cyclic(s);
    double sp = norm(tm);
    if (sp == 0) return 0.0;
    Vec3 dT = (normalized(t1) - normalized(t0)) / (2 * h);
    return norm(dT) / sp;
}

double DisplacedCurve::sup_displacement() const {
    double L = base_->length_param();
    int n = 8192;
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, norm(displacement(L * i / n)));
    // |d/ds displacement| <= d1_bound_, so sampling misses at most this much
    return m + d1_bound_ * (L / n) * 0.5;
}

DisplacedCurve DisplacedCurve::rescaled(double scale) const {
    DisplacedCurve c = *this;
    c.scale_ = scale;
    double f = scale / scale_;
    c.len_lo_ = (len_lo_ + 1e-8) * f - 1e-8;
    c.len_hi_ = (len_hi_ - 1e-8) * f + 1e-8;
    return c;
}

}  // namespace rl
