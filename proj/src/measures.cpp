#include "griddyn/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace griddyn {

namespace {

constexpr u64 kDenseLimit = 1ull << 24;

void check_same_grid(const GridMeasure& mu, const DiscreteMap& d) {
  if (mu.grid.dim != d.grid.dim || mu.grid.N != d.grid.N)
    throw SchemaError("measure and map live on different grids");
}

// one pushforward step; dense accumulator when the grid allows it
GridMeasure step(const DiscreteMap& d, const GridMeasure& mu) {
  GridMeasure out;
  out.grid = mu.grid;
  const u64 q = mu.grid.q();
  if (q <= kDenseLimit) {
    std::vector<double> acc(q, 0.0);
    for (const auto& [ord, m] : mu.atoms) acc[d.image(ord)] += m;
    for (u64 i = 0; i < q; ++i)
      if (acc[i] != 0.0) out.atoms.emplace_back(i, acc[i]);
  } else {
    std::map<u64, double> acc;
    for (const auto& [ord, m] : mu.atoms) acc[d.image(ord)] += m;
    out.atoms.assign(acc.begin(), acc.end());
  }
  return out;
}

void accumulate(std::map<u64, double>& acc, const GridMeasure& mu) {
  for (const auto& [ord, m] : mu.atoms) acc[ord] += m;
}

u64 dyadic_cell(i64 coord, u64 side, u64 N) { return (u64)coord * side / N; }

}  // namespace

double GridMeasure::total() const {
  double t = 0.0;
  for (const auto& kv : atoms) t += kv.second;
  return t;
}

double GridMeasure::mass_at(u64 ord) const {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), ord,
                             [](const auto& a, u64 o) { return a.first < o; });
  return it != atoms.end() && it->first == ord ? it->second : 0.0;
}

GridMeasure uniform_measure(const Grid& g) {
  const u64 q = g.q();
  if (q > kDenseLimit) throw BudgetError("uniform measure would need too many atoms");
  GridMeasure mu;
  mu.grid = g;
  mu.atoms.reserve(q);
  const double m = 1.0 / (double)q;
  for (u64 i = 0; i < q; ++i) mu.atoms.emplace_back(i, m);
  return mu;
}

GridMeasure mu_x(const DiscreteMap& d, Vec2 x) {
  OrbitRecord o = floyd_orbit(d, d.grid.project_point(x));
  GridMeasure mu;
  mu.grid = d.grid;
  mu.atoms.reserve(o.cycle);
  const double m = 1.0 / (double)o.cycle;
  u64 at = o.representative;
  for (u64 i = 0; i < o.cycle; ++i) {
    mu.atoms.emplace_back(at, m);
    at = d.image(at);
  }
  std::sort(mu.atoms.begin(), mu.atoms.end());
  return mu;
}

GridMeasure mu_global(const FunctionalGraphAnalysis& a, const Grid& g) {
  if (a.q != g.q()) throw SchemaError("analysis and grid sizes differ");
  GridMeasure mu;
  mu.grid = g;
  mu.atoms.reserve(a.recurrent_count);
  for (const CycleInfo& c : a.cycles) {
    const double m = (double)c.basin / ((double)a.q * (double)c.nodes.size());
    for (u64 node : c.nodes) mu.atoms.emplace_back(node, m);
  }
  std::sort(mu.atoms.begin(), mu.atoms.end());
  return mu;
}

GridMeasure pushforward(const DiscreteMap& d, const GridMeasure& mu, u64 k) {
  check_same_grid(mu, d);
  GridMeasure cur = mu;
  for (u64 i = 0; i < k; ++i) cur = step(d, cur);
  return cur;
}

GridMeasure cesaro_pushforward(const DiscreteMap& d, const GridMeasure& mu, u64 start, u64 count) {
  check_same_grid(mu, d);
  if (count == 0) throw SchemaError("cesaro average needs at least one term");
  GridMeasure cur = pushforward(d, mu, start);
  std::map<u64, double> acc;
  accumulate(acc, cur);
  for (u64 i = 1; i < count; ++i) {
    cur = step(d, cur);
    accumulate(acc, cur);
  }
  GridMeasure out;
  out.grid = mu.grid;
  out.atoms.reserve(acc.size());
  for (const auto& [ord, m] : acc) out.atoms.emplace_back(ord, m / (double)count);
  return out;
}

double dyadic_distance(const GridMeasure& mu, const GridMeasure& nu, int kmax) {
  if (mu.grid.dim != nu.grid.dim) throw SchemaError("dyadic distance needs equal dimensions");
  if (kmax < 0 || kmax > 20) throw SchemaError("dyadic level out of range");
  const int dim = mu.grid.dim;
  double dist = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    const u64 side = 1ull << k;
    const u64 ncell = dim == 1 ? side : side * side;
    // separate accumulators: equal measures give bitwise-equal cell sums,
    // so d(mu, mu) is exactly zero and the distance exactly symmetric
    std::vector<double> pa(ncell, 0.0), pb(ncell, 0.0);
    for (const auto& [ord, m] : mu.atoms) {
      GridIndex ix = mu.grid.index(ord);
      u64 cell = dyadic_cell(ix.i, side, mu.grid.N);
      if (dim == 2) cell += side * dyadic_cell(ix.j, side, mu.grid.N);
      pa[cell] += m;
    }
    for (const auto& [ord, m] : nu.atoms) {
      GridIndex ix = nu.grid.index(ord);
      u64 cell = dyadic_cell(ix.i, side, nu.grid.N);
      if (dim == 2) cell += side * dyadic_cell(ix.j, side, nu.grid.N);
      pb[cell] += m;
    }
    double level = 0.0;
    for (u64 c = 0; c < ncell; ++c) level += std::fabs(pa[c] - pb[c]);
    dist += std::ldexp(level, -k);
  }
  return dist;
}

double dyadic_distance_to_lebesgue(const GridMeasure& mu, int kmax) {
  if (kmax < 0 || kmax > 20) throw SchemaError("dyadic level out of range");
  const int dim = mu.grid.dim;
  double dist = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    const u64 side = 1ull << k;
    const u64 ncell = dim == 1 ? side : side * side;
    std::vector<double> net(ncell, -1.0 / (double)ncell);
    for (const auto& [ord, m] : mu.atoms) {
      GridIndex ix = mu.grid.index(ord);
      u64 cell = dyadic_cell(ix.i, side, mu.grid.N);
      if (dim == 2) cell += side * dyadic_cell(ix.j, side, mu.grid.N);
      net[cell] += m;
    }
    double level = 0.0;
    for (double v : net) level += std::fabs(v);
    dist += std::ldexp(level, -k);
  }
  return dist;
}

std::vector<unsigned char> DensityRaster::pgm_bytes() const {
  char header[64];
  int n = std::snprintf(header, sizeof header, "P5\n%d %d\n255\n", W, H);
  std::vector<unsigned char> out(header, header + n);
  out.reserve(out.size() + mass.size());
  const double span = hi - lo;
  for (double m : mass) {
    double v = 0.0;
    if (m > 0.0) v = std::clamp(255.0 * (std::log10(m) - lo) / span, 0.0, 255.0);
    out.push_back((unsigned char)std::lround(v));
  }
  return out;
}

std::string DensityRaster::csv() const {
  std::string out = "px,py,mass\n";
  char line[64];
  for (int py = 0; py < H; ++py)
    for (int px = 0; px < W; ++px) {
      std::snprintf(line, sizeof line, "%d,%d,%.17g\n", px, py, mass[(u64)px + (u64)W * py]);
      out += line;
    }
  return out;
}

DensityRaster raster(const GridMeasure& mu, int resolution) {
  if (resolution < 1 || resolution > 16384) throw SchemaError("raster resolution out of range");
  DensityRaster r;
  r.W = resolution;
  r.H = mu.grid.dim == 2 ? resolution : 1;
  r.mass.assign((u64)r.W * r.H, 0.0);
  for (const auto& [ord, m] : mu.atoms) {
    GridIndex ix = mu.grid.index(ord);
    u64 px = (u64)ix.i * r.W / mu.grid.N;
    u64 py = mu.grid.dim == 2 ? (u64)ix.j * r.H / mu.grid.N : 0;
    r.mass[px + (u64)r.W * py] += m;
  }
  return r;
}

}  // namespace griddyn
