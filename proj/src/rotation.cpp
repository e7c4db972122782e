#include "griddyn/rotation.hpp"

#include <algorithm>
#include <cmath>

#include "griddyn/parallel.hpp"
#include "griddyn/rng.hpp"

namespace griddyn {

namespace {

void require_torus_identity_class(const MapExpr& m) {
  if (m.dim != 2) throw SchemaError("rotation sets live on the torus");
  Mat2i h = homotopy(m);
  if (h[0][0] != 1 || h[0][1] != 0 || h[1][0] != 0 || h[1][1] != 1)
    throw SchemaError("map is not homotopic to the identity");
}

// one orbit step through the lift; returns the displacement and advances p
Vec2 lift_step(const MapExpr& m, Vec2& p) {
  Vec2 l = eval_lift(m, p);
  Vec2 d{l[0] - p[0], l[1] - p[1]};
  p = {fract(l[0]), fract(l[1])};
  return d;
}

struct i128pt {
  __int128 x, y;
};

// sign of the cross product (b - a) x (c - a) on exact rationals p/period
int cross_sign(const RationalRotation& a, const RationalRotation& b, const RationalRotation& c) {
  i128pt u{(__int128)b.px * (i64)a.period - (__int128)a.px * (i64)b.period,
           (__int128)b.py * (i64)a.period - (__int128)a.py * (i64)b.period};
  i128pt v{(__int128)c.px * (i64)a.period - (__int128)a.px * (i64)c.period,
           (__int128)c.py * (i64)a.period - (__int128)a.py * (i64)c.period};
  // u is scaled by a.period*b.period > 0 and v by a.period*c.period > 0
  __int128 cr = u.x * v.y - u.y * v.x;
  return cr > 0 ? 1 : cr < 0 ? -1 : 0;
}

bool rational_less(const RationalRotation& a, const RationalRotation& b) {
  __int128 lx = (__int128)a.px * (i64)b.period, rx = (__int128)b.px * (i64)a.period;
  if (lx != rx) return lx < rx;
  return (__int128)a.py * (i64)b.period < (__int128)b.py * (i64)a.period;
}

bool rational_eq(const RationalRotation& a, const RationalRotation& b) {
  return (__int128)a.px * (i64)b.period == (__int128)b.px * (i64)a.period &&
         (__int128)a.py * (i64)b.period == (__int128)b.py * (i64)a.period;
}

double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

Vec2 orbit_rotation_vector(const MapExpr& m, Vec2 x, u64 T) {
  require_torus_identity_class(m);
  if (T == 0) throw SchemaError("orbit length must be positive");
  Vec2 p{fract(x[0]), fract(x[1])};
  Vec2 total{0.0, 0.0};
  for (u64 t = 0; t < T; ++t) {
    Vec2 d = lift_step(m, p);
    total[0] += d[0];
    total[1] += d[1];
  }
  return {total[0] / (double)T, total[1] / (double)T};
}

Vec2 mean_rotation_vector(const MapExpr& m, int sample) {
  require_torus_identity_class(m);
  if (sample < 1) throw SchemaError("sample resolution must be positive");
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < sample; ++i)
    for (int j = 0; j < sample; ++j) {
      Vec2 p{((double)i + 0.5) / sample, ((double)j + 0.5) / sample};
      Vec2 l = eval_lift(m, p);
      sx += l[0] - p[0];
      sy += l[1] - p[1];
    }
  double n = (double)sample * (double)sample;
  return {sx / n, sy / n};
}

RotationSetSample observable_sample(MapPtr m, int K, u64 T, u64 seed, int threads) {
  if (!m) throw SchemaError("observable sampling needs a map");
  require_torus_identity_class(*m);
  if (K < 1 || T == 0) throw SchemaError("need at least one start and one step");
  RotationSetSample out;
  out.starts.resize(K);
  out.vectors.resize(K);
  Rng r(seed, 0x0b5e);
  for (int k = 0; k < K; ++k) out.starts[k] = {r.uniform01(), r.uniform01()};
  parallel_ranges(K, threads, [&](u64 lo, u64 hi) {
    for (u64 k = lo; k < hi; ++k) out.vectors[k] = orbit_rotation_vector(*m, out.starts[k], T);
  });
  out.hull = convex_hull(out.vectors);
  return out;
}

DiscreteMap lift_discretize(MapPtr m, Grid g, u64 budget, int threads) {
  if (!m) throw SchemaError("discretization needs a map");
  require_torus_identity_class(*m);
  if (g.dim != 2) throw SchemaError("lift discretization needs a torus grid");
  const u64 q = g.q();
  if (q > budget) throw BudgetError("grid exceeds the materialization budget");
  std::vector<u32> table(q);
  parallel_ranges(q, threads, [&](u64 lo, u64 hi) {
    for (u64 ord = lo; ord < hi; ++ord) {
      Vec2 l = eval_lift(*m, g.point(ord));
      table[ord] =
          (u32)g.ordinal({project_int((double)g.N * l[0]), project_int((double)g.N * l[1])});
    }
  });
  return DiscreteMap::from_table(g, std::move(table));
}

RotationSetSample discretized_rotation_set(MapPtr m, Grid g, u64 budget, int threads) {
  DiscreteMap d = lift_discretize(m, g, budget, threads);
  // per-node integer lattice displacement N*(rounded lift - point)
  const u64 q = g.q();
  std::vector<i64> dx(q), dy(q);
  parallel_ranges(q, threads, [&](u64 lo, u64 hi) {
    for (u64 ord = lo; ord < hi; ++ord) {
      GridIndex ix = g.index(ord);
      Vec2 l = eval_lift(*m, g.point(ord));
      dx[ord] = project_int((double)g.N * l[0]) - ix.i;
      dy[ord] = project_int((double)g.N * l[1]) - ix.j;
    }
  });
  FunctionalGraphAnalysis a = full_sweep_analysis(d);
  RotationSetSample out;
  out.exact.reserve(a.cycles.size());
  for (const CycleInfo& c : a.cycles) {
    i64 sx = 0, sy = 0;
    for (u64 node : c.nodes) {
      sx += dx[node];
      sy += dy[node];
    }
    if (sx % (i64)g.N != 0 || sy % (i64)g.N != 0)
      throw NumericError("cycle displacement is not an integer vector");
    out.exact.push_back({sx / (i64)g.N, sy / (i64)g.N, c.nodes.size()});
    out.vectors.push_back(out.exact.back().value());
  }
  out.hull = convex_hull_exact(out.exact);
  return out;
}

RotationSetSample asymptotic_union(MapPtr m, u64 Nlo, u64 Nhi, u64 budget, int threads) {
  if (Nlo < 1 || Nhi < Nlo) throw SchemaError("bad grid range");
  RotationSetSample out;
  for (u64 N = Nlo; N <= Nhi; ++N) {
    RotationSetSample one = discretized_rotation_set(m, Grid{2, N}, budget, threads);
    out.vectors.insert(out.vectors.end(), one.vectors.begin(), one.vectors.end());
    out.exact.insert(out.exact.end(), one.exact.begin(), one.exact.end());
  }
  out.hull = convex_hull_exact(out.exact);
  return out;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Vec2> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {  // upper
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

std::vector<Vec2> convex_hull_exact(const std::vector<RationalRotation>& pts) {
  std::vector<RationalRotation> p = pts;
  std::sort(p.begin(), p.end(), rational_less);
  p.erase(std::unique(p.begin(), p.end(), rational_eq), p.end());
  const std::size_t n = p.size();
  std::vector<RationalRotation> h;
  if (n <= 2) {
    h = p;
  } else {
    h.resize(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (k >= 2 && cross_sign(h[k - 2], h[k - 1], p[i]) <= 0) --k;
      h[k++] = p[i];
    }
    for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
      while (k >= lower && cross_sign(h[k - 2], h[k - 1], p[i]) <= 0) --k;
      h[k++] = p[i];
    }
    h.resize(k - 1);
  }
  std::vector<Vec2> out;
  out.reserve(h.size());
  for (const RationalRotation& r : h) out.push_back(r.value());
  return out;
}

double point_polygon_distance(Vec2 p, const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  if (n == 0) throw SchemaError("empty polygon");
  if (n == 1) return std::hypot(p[0] - poly[0][0], p[1] - poly[0][1]);
  bool inside = n >= 3;
  double best = HUGE_VAL;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    if (i + 1 == n && n == 2) break;  // a segment has one edge
    if (cross(a, b, p) < 0) inside = false;
    // distance to segment ab
    double vx = b[0] - a[0], vy = b[1] - a[1];
    double wx = p[0] - a[0], wy = p[1] - a[1];
    double vv = vx * vx + vy * vy;
    double t = vv > 0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
    best = std::min(best, std::hypot(wx - t * vx, wy - t * vy));
  }
  return inside ? 0.0 : best;
}

double polygon_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double h = 0.0;
  for (const Vec2& p : a) h = std::max(h, point_polygon_distance(p, b));
  for (const Vec2& p : b) h = std::max(h, point_polygon_distance(p, a));
  return h;
}

}  // namespace griddyn
