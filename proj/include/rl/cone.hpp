#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "rl/curve.hpp"

namespace rl {

// Arclength-weighted mean of position; exact for arcs and segments,
// quadrature (error < 1e-9) for torus sections.
Vec3 center_of_mass(const Curve& c);

// Cone disk K(x,y) = y*base(x) + (1-y)*apex, x in [0, base length], y in [0,1].
struct ConeDisk {
    std::shared_ptr<const Curve> base;
    Vec3 apex;

    Vec3 point(double x, double y) const { return y * base->point_cyclic(x) + (1.0 - y) * apex; }
};

ConeDisk center_of_mass_disk(std::shared_ptr<const Curve> base);
// flat spanning disk of a circle, as a cone from its center
ConeDisk flat_disk(const Vec3& center, const Vec3& u, const Vec3& v, double radius);

// Brouwer degree of F around 0 over the box [lo, hi], computed as the winding
// of F over the triangulated boundary. Faces start at n x n quads and refine
// until every image triangle subtends a solid angle below pi/2. Requires
// |F| >= delta on the boundary (certified by the caller); throws if a sample
// comes closer to 0 than delta or if the winding does not settle near an
// integer.
int brouwer_degree_box(const std::function<Vec3(const Vec3&)>& F, const Vec3& lo, const Vec3& hi,
                       int samples_per_face, double delta);

struct IntersectionRecord {
    Vec3 point;
    double t = 0.0;        // curve arclength
    double x = 0.0, y = 0.0;  // disk parameters
    int sign = 0;          // local degree
    bool transverse = false;
    double isolation_radius = 0.0;
};

struct DiskIntersections {
    std::vector<IntersectionRecord> records;            // sorted by curve parameter
    std::vector<std::array<double, 6>> unresolved;      // {t0,t1,x0,x1,y0,y1} boxes
    bool resolved() const { return unresolved.empty(); }
};

// All isolated intersections of a cone disk with a curve, found by
// subdivision of (t, x, y) parameter boxes and classified by the local
// Brouwer degree. The curve must stay clear of the disk boundary circle and
// of the apex. Tangential contacts come back in `unresolved`, never guessed.
DiskIntersections disk_curve_intersections(const ConeDisk& disk, const Curve& curve, double tol,
                                           bool parallel = true);

}  // namespace rl
