#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rl/vec3.hpp"
#include "rl/interval.hpp"

namespace rl {

// Closure tolerance for piecewise curves. Constructions are expected to meet
// this exactly by design; nothing is ever snapped.
inline constexpr double kClosureTol = 1e-9;

enum class PieceType { Arc, Segment, TorusSection };

// Circular arc: P(theta) = center + radius*(cos(theta) u + sin(theta) v),
// theta from theta0 over a signed sweep dtheta, |dtheta| in (0, 2pi].
struct ArcPiece {
    Vec3 center;
    Vec3 u, v;  // orthonormal frame of the arc plane
    double radius = 1.0;
    double theta0 = 0.0;
    double dtheta = 0.0;
};

struct SegmentPiece {
    Vec3 a, b;
};

// Section of the boundary curve of the solid-torus slice in the x=0 plane:
//   (d^2 + z^2 + y^2)^2 - 4 (d^2 + z^2) = 0,  y = branch * sqrt(u(2-u)),
// with u = sqrt(d^2 + z^2). Parametrized by z from z0 to z1 (either order);
// the real branch needs |z| <= sqrt(4 - d^2).
struct TorusSectionPiece {
    double d = 1.5;
    double z0 = 0.0, z1 = 0.0;
    int branch = 1;  // sign of y
};

// On the curve above, the point with coordinates (0, +/-y(z), z).
Vec3 torus_section_point(double d, double z, int branch);
double torus_section_y(double d, double z);
double torus_section_curvature(double d, double z);
double torus_section_zmax(double d);

class TorusTable;  // arclength <-> z lookup, built per piece

// A validated piece with cached length. Factories throw std::invalid_argument
// on degenerate input (bad frame, zero sweep, z outside the real branch, ...).
class Piece {
  public:
    static Piece arc(const ArcPiece& a);
    static Piece segment(const SegmentPiece& s);
    static Piece torus_section(const TorusSectionPiece& t);

    PieceType type() const { return type_; }
    const ArcPiece& arc_data() const { return arc_; }
    const SegmentPiece& segment_data() const { return seg_; }
    const TorusSectionPiece& torus_data() const { return tor_; }

    double length() const { return len_; }
    IntervalValue length_interval() const;

    // s is arclength within the piece, in [0, length()].
    Vec3 point_at(double s) const;
    Vec3 tangent_at(double s) const;  // unit
    double curvature_at(double s) const;
    double curvature_bound() const;                     // sup over the piece
    double curvature_bound(double s0, double s1) const; // sup over a sub-range

    Vec3 start() const { return point_at(0.0); }
    Vec3 end() const { return point_at(len_); }

    Piece reversed() const;
    Piece transformed(const Mat3& R, const Vec3& t, double scale) const;
    // Reflections across coordinate planes of the x=0 plane; these are the
    // only improper motions torus sections support.
    Piece reflected_y() const;  // (x,y,z) -> (x,-y,z)
    Piece reflected_z() const;  // (x,y,z) -> (x,y,-z)
    Piece subrange(double s0, double s1) const;  // 0 <= s0 < s1 <= length

    double torus_z_at(double s) const;

  private:
    Piece() = default;
    PieceType type_ = PieceType::Segment;
    ArcPiece arc_;
    SegmentPiece seg_;
    TorusSectionPiece tor_;
    double len_ = 0.0;
    std::shared_ptr<const TorusTable> table_;
};

// Abstract curve used by the measurement kernels. Parametrized by s in
// [0, length_param()]; for piecewise curves the parameter is arclength.
class Curve {
  public:
    virtual ~Curve() = default;
    virtual double length_param() const = 0;             // parameter domain size
    virtual IntervalValue length_interval() const = 0;   // certified arclength
    virtual bool closed() const = 0;
    virtual Vec3 point(double s) const = 0;
    virtual Vec3 derivative(double s) const = 0;  // dP/ds
    virtual double max_speed() const = 0;         // sup |dP/ds|
    // sup |d2P/ds2| over [s0, s1]; ranges never straddle breakpoints when
    // used by branch-and-bound.
    virtual double d2_bound(double s0, double s1) const = 0;
    virtual std::vector<double> breakpoints() const = 0;  // includes 0 and L
    virtual double curvature(double s) const = 0;

    double length() const { return length_interval().mid(); }
    Vec3 point_cyclic(double s) const;
    Vec3 derivative_cyclic(double s) const;
};

class PiecewiseCurve : public Curve {
  public:
    // Validates endpoint continuity (and closure when closed) at kClosureTol.
    PiecewiseCurve(std::vector<Piece> pieces, bool closed);

    double length_param() const override { return cum_.back(); }
    IntervalValue length_interval() const override;
    bool closed() const override { return closed_; }
    Vec3 point(double s) const override;
    Vec3 derivative(double s) const override;
    double max_speed() const override { return 1.0; }
    double d2_bound(double s0, double s1) const override;
    std::vector<double> breakpoints() const override { return cum_; }
    double curvature(double s) const override;

    // The spec-level evaluate operation: throws if s is outside [0, length].
    void evaluate(double s, Vec3* p, Vec3* tangent, double* curvature_out) const;

    const std::vector<Piece>& pieces() const { return pieces_; }
    const std::vector<double>& cumlen() const { return cum_; }

    // Max curvature over the whole curve with the arclength where it is
    // attained; junction values are the max of the one-sided limits.
    double curvature_max(double* arg_s = nullptr) const;
    // Largest angle (radians) between incoming and outgoing tangents over
    // all junctions; 0 for a C1 curve. *arg_s names the worst junction.
    double max_tangent_discontinuity(double* arg_s = nullptr) const;

    PiecewiseCurve reversed() const;
    PiecewiseCurve transformed(const Mat3& R, const Vec3& t, double scale) const;
    PiecewiseCurve reflected_y() const;
    PiecewiseCurve reflected_z() const;
    // Open sub-curve between arclengths s0 < s1 (cyclic wrap allowed for
    // closed curves when s1 > length).
    std::vector<Piece> subcurve_pieces(double s0, double s1) const;

  private:
    int locate(double s, double* local) const;
    std::vector<Piece> pieces_;
    std::vector<double> cum_;  // cum_[0]=0, cum_[i]=length of first i pieces
    bool closed_ = false;
};

struct Polyline {
    std::vector<Vec3> pts;
    std::vector<double> params;  // curve parameter of each vertex
    bool closed = false;

    double length() const;
};

// Inscribed polyline with every curve point within tol of it and vice versa.
// Vertices lie on the curve, so the polyline length approaches the curve
// length from below.
Polyline polygonalize(const Curve& c, double tol);

}  // namespace rl
