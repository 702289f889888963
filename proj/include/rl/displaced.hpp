#pragma once

#include <memory>
#include <vector>

#include "rl/curve.hpp"

namespace rl {

// A smooth perturbation of a piecewise curve:
//   P(s) = scale * ( B(s) + sum_k a_k cos(w_k s) + b_k sin(w_k s) ),
// with w_k = 2 pi k / len(B). The parameter s is the arclength of the base
// curve, so decomposition breaking points and windows keep their meaning on
// the perturbed link. Trigonometric modes are periodic, which keeps the
// perturbed component closed and C^infinity in parameter.
class DisplacedCurve : public Curve {
  public:
    DisplacedCurve(std::shared_ptr<const PiecewiseCurve> base, std::vector<Vec3> cos_coef,
                   std::vector<Vec3> sin_coef, double scale = 1.0);

    double length_param() const override { return base_->length_param(); }
    IntervalValue length_interval() const override;  // quadrature, cached
    bool closed() const override { return base_->closed(); }
    Vec3 point(double s) const override;
    Vec3 derivative(double s) const override;
    double max_speed() const override { return scale_ * (1.0 + d1_bound_); }
    double d2_bound(double s0, double s1) const override {
        return scale_ * (base_->d2_bound(s0, s1) + d2b_);
    }
    std::vector<double> breakpoints() const override { return base_->breakpoints(); }
    double curvature(double s) const override;

    // sup |P(s) - B(s)| over the component (certified by sampling plus a
    // derivative bound)
    double sup_displacement() const;
    Vec3 displacement(double s) const;
    double scale() const { return scale_; }
    const PiecewiseCurve& base() const { return *base_; }

    DisplacedCurve rescaled(double scale) const;

  private:
    std::shared_ptr<const PiecewiseCurve> base_;
    std::vector<Vec3> ca_, cb_;
    std::vector<double> omega_;
    double scale_ = 1.0;
    double d1_bound_ = 0.0, d2b_ = 0.0;
    double len_lo_ = 0.0, len_hi_ = 0.0;
};

}  // namespace rl
