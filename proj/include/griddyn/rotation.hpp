#pragma once

#include <vector>

#include "griddyn/engine.hpp"

namespace griddyn {

// Rotation vector of a periodic grid orbit: exactly (px, py) / period.
struct RationalRotation {
  i64 px = 0, py = 0;
  u64 period = 1;
  Vec2 value() const { return {(double)px / (double)period, (double)py / (double)period}; }
};

struct RotationSetSample {
  std::vector<Vec2> vectors;
  std::vector<Vec2> starts;             // one per vector, observable sampling only
  std::vector<RationalRotation> exact;  // one per vector, discretized sets only
  std::vector<Vec2> hull;               // convex, counter-clockwise
};

// (F^T(x) - x) / T along the lift; the map must be homotopic to the identity.
Vec2 orbit_rotation_vector(const MapExpr& m, Vec2 x, u64 T);

// average of the one-step lift displacement over a sample x sample grid of
// cell centers
Vec2 mean_rotation_vector(const MapExpr& m, int sample = 256);

// rotation vectors of K random orbit segments of length T
RotationSetSample observable_sample(MapPtr m, int K, u64 T, u64 seed, int threads = 1);

// Discretization through the lift: each lattice point goes to the nearest
// (1/N)-lattice point of its lifted image (half-up rounding per coordinate).
// Projects to the same table as discretize() away from rounding ties, and
// makes every cycle's total displacement an exact integer vector.
DiscreteMap lift_discretize(MapPtr m, Grid g, u64 budget = (1ull << 32), int threads = 1);

// one exact rotation vector p/period per cycle of the lift discretization
RotationSetSample discretized_rotation_set(MapPtr m, Grid g, u64 budget = (1ull << 32),
                                           int threads = 1);

// multiset union of the discretized sets over N in [Nlo, Nhi]
RotationSetSample asymptotic_union(MapPtr m, u64 Nlo, u64 Nhi, u64 budget = (1ull << 32),
                                   int threads = 1);

// monotone-chain hull, counter-clockwise, collinear points dropped
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);
// same, with exact integer comparisons on the rationals p/period
std::vector<Vec2> convex_hull_exact(const std::vector<RationalRotation>& pts);

// Euclidean distance from a point to a convex polygon (0 inside); the polygon
// may degenerate to a segment or a point
double point_polygon_distance(Vec2 p, const std::vector<Vec2>& poly);
// Hausdorff distance between convex polygons given as CCW vertex lists
double polygon_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

}  // namespace griddyn
