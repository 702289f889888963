#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rl/curve.hpp"

namespace rl {

struct BoundResult {
    double value = 0.0;
    std::string formula;
    std::vector<std::pair<std::string, double>> inputs;
};

// phi(t) = arcsin(2t) - t on [0, 1/2]; throws outside.
double phi(double t);

// Coned-polygon bound 2 pi r + circumference for a convex vertex set kept at
// distance >= r from the curve. Throws on a non-convex vertex set.
BoundResult polygon_cone_bound(double r, const std::vector<Vec3>& vertices);

// Shortest planar closed curve surrounding n points at pairwise unit
// distance; exact for n = 1..4, error (with the asymptotic note) beyond.
double qn(int n);

// 2 n pi + sum Q_{k_i} over components with k_i >= 1; k_i = 0 contributes
// nothing at all.
BoundResult link_lower_bound(const std::vector<int>& linking_degrees);

// 2 pi + 2 dist - (2 pi + 4) eps
BoundResult eps_two_point_bound(double dist_xy, double eps);

// Splitting threshold 8 pi + 6 and its margin over a given ropelength.
BoundResult split_margin(double link_ropelength);

// Detour of the segment ab around the open unit balls at x and y: radial
// projection away from m inside the plane through a, b, m. Exact arcs and
// segments; open curve from a to b with length <= arcsin(2|a-b|) - |a-b|.
PiecewiseCurve detour_curve(const Vec3& a, const Vec3& b, const Vec3& x, const Vec3& y,
                            const Vec3& m);

// 2 pi + 2 diam - sum phi(gap)
BoundResult almost_closed_bound(double diam, const std::vector<double>& gaps);

// min over clusters of 2 #(h^-1)(l) / f(l); suitability needs > 1.
double suitability_margin(const std::vector<std::pair<int, int>>& cluster_counts);

}  // namespace rl
