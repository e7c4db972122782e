#pragma once

#include <string>
#include <utility>
#include <vector>

#include "griddyn/engine.hpp"

namespace griddyn {

// Atomic probability measure supported on grid points.
struct GridMeasure {
  Grid grid;
  std::vector<std::pair<u64, double>> atoms;  // strictly increasing ordinals, masses >= 0

  double total() const;
  double mass_at(u64 ord) const;
};

GridMeasure uniform_measure(const Grid& g);

// Uniform measure on the periodic orbit reached from the grid point nearest x.
// Works in O(cycle + tail) time and O(cycle) memory, so the grid can be huge.
GridMeasure mu_x(const DiscreteMap& d, Vec2 x);

// Mixture of the cycle measures, each weighted by its basin of attraction.
GridMeasure mu_global(const FunctionalGraphAnalysis& a, const Grid& g);

// Transport along the image table, iterated k times. Mass-preserving.
GridMeasure pushforward(const DiscreteMap& d, const GridMeasure& mu, u64 k = 1);

// (1/count) * sum of (f_N^*)^i mu over i in [start, start + count). Averaged
// over count = one full period taken at start >= stabilization time, this
// equals mu_global exactly.
GridMeasure cesaro_pushforward(const DiscreteMap& d, const GridMeasure& mu, u64 start, u64 count);

// d(mu, nu) = sum_{k=0..kmax} 2^-k * sum_cells |mu(C) - nu(C)| over the
// half-open dyadic cells [i/2^k, (i+1)/2^k) per axis. Half-open binning makes
// d(mu, mu) exactly zero for atomic measures. Range [0, 2).
double dyadic_distance(const GridMeasure& mu, const GridMeasure& nu, int kmax = 7);
// Same, against continuous Lebesgue measure (cell mass 2^-k per axis).
double dyadic_distance_to_lebesgue(const GridMeasure& mu, int kmax = 7);

// Per-pixel mass table with a fixed log10 grayscale rendering range.
struct DensityRaster {
  int W = 0, H = 0;
  std::vector<double> mass;  // row-major, index px + W * py
  double lo = -6.0, hi = 0.0;

  // binary PGM, "P5\n{W} {H}\n255\n" + W*H bytes in table order (py = 0 first);
  // byte = clamp(255 * (log10(mass) - lo) / (hi - lo)), empty pixel = 0
  std::vector<unsigned char> pgm_bytes() const;
  // header "px,py,mass", one row per pixel in table order
  std::string csv() const;
};

// Aggregates atom masses over a resolution x resolution pixel grid
// (resolution x 1 for circle measures) with half-open pixels.
DensityRaster raster(const GridMeasure& mu, int resolution = 128);

}  // namespace griddyn
