#pragma once

#include <vector>

#include "griddyn/engine.hpp"

namespace griddyn {

// Cyclic permutation of E_N approximating a conservative map: a perfect
// matching on the cell-transition graph (supersampled), then cycle merging by
// adjacent transpositions along the boustrophedon order. The merge applies
// two layers of disjoint transpositions, so every value moves at most two
// snake steps from the matching's choice.
struct LaxResult {
  std::vector<u32> sigma;    // the single-cycle permutation
  std::vector<u32> matched;  // the perfect matching before merging
  double sup_distance = 0.0;     // sup over grid points of d(f(x), sigma(x))
  double matching_radius = 0.0;  // sup of d(f(x), matched(x))
  int widen_rounds = 0;          // neighborhood growth needed to complete the matching
};

LaxResult lax_cyclic_approximation(MapPtr m, Grid g, int supersample = 4,
                                   u64 budget = (1ull << 24), int threads = 1);

/// Boustrophedon rank: row-major with every odd row reversed, so consecutive
// ranks are adjacent cells (cyclically, via the torus wrap).
u64 snake_rank(const Grid& g, u64 ord);
u64 snake_cell(const Grid& g, u64 rank);

}  // namespace griddyn
