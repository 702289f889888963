#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rl/bounds.hpp"
#include "rl/curve.hpp"
#include "rl/link.hpp"

namespace rl {

// One signed regrouping of parameter intervals that parametrizes a unit
// circle of the decomposition.
struct CircleGroup {
    std::vector<int> intervals;  // interval indices, in concatenation order
    std::vector<int> signs;      // +1 forward, -1 reversed
};

// Circle decomposition of one closed curve: cyclic breaking points a_i,
// circle groups A_j partitioning the intervals, and point clusters
// partitioning the breaking points by common image.
struct CircleDecomposition {
    std::vector<double> breaking_points;      // strictly increasing in [0, len)
    std::vector<CircleGroup> groups;
    std::vector<std::vector<int>> clusters;   // partition of breakpoint indices
};

struct ConjoinedDecomposition {
    CircleDecomposition a, b;        // component 0 and component 1
    std::vector<int> hA;             // B-side circle j -> A-cluster at its center
    std::vector<int> hB;             // A-side circle j -> B-cluster at its center
    std::vector<std::vector<bool>> linking;  // [A-circle][B-circle], image-level
};

struct CheckItem {
    std::string name;
    bool pass = false;
    bool inconclusive = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckItem> items;
    bool pass() const {
        for (auto& i : items)
            if (!i.pass) return false;
        return true;
    }
    bool inconclusive() const {
        for (auto& i : items)
            if (i.inconclusive) return true;
        return false;
    }
    const CheckItem* failed() const {
        for (auto& i : items)
            if (!i.pass) return &i;
        return nullptr;
    }
};

// Fitted circle (plane + center + radius) of a point cloud; algebraic fit
// refined geometrically.
struct FittedCircle {
    Vec3 center, normal;
    double radius = 0.0;
    double max_deviation = 0.0;  // max |dist(p, circle)| over the samples
};
FittedCircle fit_circle(const std::vector<Vec3>& pts);

// Per-invariant verification of a circle decomposition: ordering, group
// lengths 2 pi, unit-circle fits (< 1e-6 by default), signed concatenation
// continuity, and the cluster condition.
VerifyReport verify_circle_decomposition(const Curve& curve, const CircleDecomposition& d,
                                         double tol = 1e-6);

// Conjoined checks: dist(C1, C2) = 1, every circle's center pierced by the
// other curve at the cluster named by h, and transversality of the disk
// intersections (via the degree machinery on the flat spanning disks).
VerifyReport verify_conjoined(const Link& link, const ConjoinedDecomposition& c,
                              double tol = 1e-6, bool parallel = true);

// The five suitability conditions.
VerifyReport verify_suitable(const Link& link, const ConjoinedDecomposition& c,
                             double tol = 1e-6, bool parallel = true);

// Pairwise |lk| >= 1 matrix between the circle images of the two sides.
std::vector<std::vector<bool>> linking_scheme(const Link& link, const ConjoinedDecomposition& c,
                                              bool parallel = true);

// margin min 2#(h^-1)(l)/f(l) computed from the combinatorial data
double decomposition_margin(const ConjoinedDecomposition& c);
// threshold delta4 > 0 with phi(x) <= margin*x on [0, delta4]
double margin_threshold_delta4(double margin);

// Geometric center of a circle group (from the fitted circle).
Vec3 group_center(const Curve& curve, const CircleDecomposition& d, int group);

// One parameter per window minimizing the diameter of the evaluated point
// set; coarse 64^w grid plus coordinate-descent refinement, certified
// against the grid lower bound.
struct MinDiameterResult {
    std::vector<double> params;
    std::vector<Vec3> points;
    double diameter = 0.0;
};
MinDiameterResult min_diameter_points(const Curve& curve,
                                      const std::vector<std::pair<double, double>>& windows,
                                      bool parallel = true);

// Windows around the breaking points of both components: parameter radius
// 0.05 * total length, shrunk until pairwise disjoint per component.
std::vector<std::vector<std::pair<double, double>>> default_windows(
    const Link& link, const ConjoinedDecomposition& c);

struct ClusterTerm {
    int side = 0;  // 0 = A, 1 = B
    int cluster = -1;
    double q = 0.0;       // minimized cluster diameter on the perturbed link
    int h_preimage = 0;   // #(h^-1)(l)
    int f = 0;            // circles along the cluster
    double term = 0.0;    // 2 #(h^-1)(l) q - f phi(q)
};

struct PerturbationReport {
    std::vector<ClusterTerm> terms;
    double rhs = 0.0;            // 2(n+m)pi + sum of terms
    double base_length = 0.0;    // 2(n+m)pi
    IntervalValue measured;      // ropelength of the perturbed link
    double delta4 = 0.0;
    bool all_q_small = false;    // every q below delta4
    bool length_inequality = false;   // measured >= rhs - 1e-6
    bool rhs_at_least_base = false;   // rhs >= 2(n+m)pi (valid when q small)
};

// Evaluates the perturbation inequality of the reference decomposition on a
// perturbed link. Throws if a window exceeds its component or the perturbed
// link is not thick.
PerturbationReport perturbation_bound_report(
    const Link& reference, const ConjoinedDecomposition& c, const Link& perturbed,
    const std::vector<std::vector<std::pair<double, double>>>& windows, bool parallel = true);

std::string decomposition_to_json(const ConjoinedDecomposition& c);
ConjoinedDecomposition decomposition_from_json(const std::string& text);
std::string perturbation_report_json(const PerturbationReport& r);

}  // namespace rl
