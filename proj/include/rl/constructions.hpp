#pragma once

#include <optional>
#include <string>

#include "rl/decomposition.hpp"
#include "rl/link.hpp"

namespace rl {

// Solution of the common-tangent problem in the y >= 0, z >= 0 quadrant of
// the x = 0 plane: the segment from N (on the unit circle around G) to O (on
// the boundary curve of the forbidden torus slice) tangent to both.
struct TangencySolution {
    Vec3 N, O;          // 3d points (x = 0)
    double beta = 0.0;  // angle at G between the directions to (0,s15/2,0) and N
    double seg_len = 0.0;       // |N - O|
    double arc_len_b = 0.0;     // length of the boundary piece from O up to P
    double z_O = 0.0;           // z coordinate of O
    double residual_perp = 0.0;     // (O-N).(N-G)
    double residual_tangent = 0.0;  // cross of (O-N) with the boundary tangent at O
};

// Bracketed bisection; throws if the sign change cannot be certified unique.
TangencySolution solve_tangent();

struct Construction {
    Link link;
    std::optional<ConjoinedDecomposition> decomp;
};

// The four-component split link: main curve M (four tangent unit arcs in the
// XY plane), auxiliary unit circles in XZ centered (+-3/2, 0, 0), and the
// centre curve in the YZ plane assembled from the tangency solution.
Link build_gordian_split_link();

// Two Hopf-linked unit circles at distance 1.
Link build_hopf_minimal();

// Six pairwise tangent unit circles (three coplanar, three upright through
// their centers), traversed once per circle; conjoined decomposition
// attached. Total length 12 pi, linking number 0.
Construction build_conjoined_unlink();

// Same circle images, each traversed twice; the augmented scheme passes the
// suitability conditions. Total length 24 pi.
Construction build_augmented_unlink();

// k copies of each augmented component plus n extra loops on one circle of
// the first and one extra loop on a linked circle of the second; linking
// number n. Requires k >= max(2, n-1).
Construction build_linking_n(int k, int n);

// String ids: gordian-split-4, hopf-minimal, conjoined-unlink-12pi,
// augmented-unlink-24pi, linking-n:k=<k>,n=<n>.
Construction build_by_id(const std::string& id);

// Hypotheses of the splitting bound on a (M, A1, A2, C) link: the main curve
// meets the center-of-mass spanning disk of the centre curve in exactly two
// transverse points, and the chord-split halves of M link the two auxiliary
// circles once each.
struct GordianHypotheses {
    int intersections = 0;
    bool all_transverse = false;
    bool resolved = true;
    std::vector<Vec3> points;
    int lk_m1_a1 = 0, lk_m2_a2 = 0;
    bool pass = false;
};
GordianHypotheses check_gordian_hypotheses(const Link& link, double tol = 1e-6,
                                           bool parallel = true);

}  // namespace rl
