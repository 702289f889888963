#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rl/interval.hpp"
#include "rl/link.hpp"

namespace rl {

// Certified minimum distance between two curves via branch-and-bound over
// parameter boxes with first/second order Taylor bounds. The returned
// interval has width <= tol and carries witness parameters; for touching or
// intersecting curves it may instead certify dist <= 2 tol (hi below the
// resolution floor), which is what disjointness checks need.
IntervalValue min_distance(const Curve& A, const Curve& B, double tol = 1e-6,
                           bool parallel = true);

// tau(L): min over component pairs of min_distance. Undefined (throws) for a
// single-component link.
IntervalValue thickness(const Link& link, double tol = 1e-6, bool parallel = true);

// Minimal chord length over parameter pairs whose chord is perpendicular to
// the tangents at both ends. A circle returns its diameter.
IntervalValue doubly_critical_self_distance(const Curve& C, double tol = 1e-6,
                                            bool parallel = true);

struct PairDistance {
    int i = 0, j = 0;
    IntervalValue dist;
};

struct ThicknessReport {
    IntervalValue tau;            // valid when the link has >= 2 components
    bool tau_valid = false;
    IntervalValue tau_e;
    std::string limiting_factor;  // "inter-component distance" | "curvature" |
                                  // "doubly-critical self-distance"
    std::vector<PairDistance> pairs;
    std::vector<IntervalValue> dcsd;  // per component
    double max_curvature = 0.0;
    double max_curvature_param = 0.0;
    int max_curvature_component = -1;
    std::string criterion = "standard tube embedding";
};

// tau_e via the standard embedded-tube characterization
//   min( 2/kappa_max, min dcsd, min inter-component distance ).
// Throws if some junction has a tangent discontinuity > 1e-6 rad.
ThicknessReport tube_thickness(const Link& link, double tol = 1e-6, bool parallel = true);

// Linking number computed two ways (signed crossings of a seeded generic
// projection, and the exact Gauss integral of the polygonalized curves);
// both must agree. Throws if the curves are too close to certify disjointness.
int linking_number(const Curve& A, const Curve& B, double poly_tol = 1e-2,
                   std::uint64_t seed = 7, bool parallel = true);

enum class Separation { Separated, NotSeparated, Unknown };

// Convex-hull disjointness of the two polygonalized unions named by the
// partition. "Unknown" is returned whenever the certified hull distance is
// positive but below the 2*poly_tol margin.
Separation is_separated(const Link& link, const std::vector<int>& part, double poly_tol = 1e-4);

IntervalValue ropelength(const Link& link);

struct MeasurementReport {
    std::string link_name;
    IntervalValue rope;
    bool tau_valid = false;
    IntervalValue tau;
    ThicknessReport tube;
    std::vector<std::vector<int>> linking_matrix;
    std::vector<PairDistance> pairs;
};

MeasurementReport measure_link(const Link& link, double tol = 1e-6, bool parallel = true);
std::string measurement_report_json(const MeasurementReport& r);

// Exact Gauss linking integral of two closed polylines (sum of quadrilateral
// solid angles over segment pairs), divided by 4 pi.
double gauss_linking_polylines(const Polyline& A, const Polyline& B, bool parallel = true);

// Signed crossing count of A over B in the projection along dir.
// Returns false on a degenerate projection.
bool crossing_linking_polylines(const Polyline& A, const Polyline& B, const Vec3& dir, int* lk);

}  // namespace rl
