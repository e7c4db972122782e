#include "griddyn/engine.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "griddyn/parallel.hpp"

namespace griddyn {

u64 DiscreteMap::image(u64 ord) const {
  if (materialized()) return table[ord];
  return grid.project_ordinal(eval(*map, grid.point(ord)));
}

DiscreteMap DiscreteMap::from_table(Grid g, std::vector<u32> t) {
  if (t.size() != g.q()) throw SchemaError("image table size does not match the grid");
  for (u32 v : t)
    if (v >= g.q()) throw SchemaError("image table entry out of range");
  DiscreteMap d;
  d.grid = g;
  d.table = std::move(t);
  return d;
}

DiscreteMap discretize(MapPtr m, Grid g, u64 budget, int threads) {
  if (!m) throw SchemaError("discretize needs a map");
  if (m->dim != g.dim) throw SchemaError("map and grid dimensions differ");
  DiscreteMap d;
  d.grid = g;
  d.map = std::move(m);
  u64 q = g.q();
  if (q > budget) return d;  // on-the-fly mode
  d.table.resize(q);
  parallel_ranges(q, threads, [&](u64 lo, u64 hi) {
    for (u64 i = lo; i < hi; ++i)
      d.table[i] = (u32)g.project_ordinal(eval(*d.map, g.point(i)));
  });
  return d;
}

u64 FunctionalGraphAnalysis::max_cycle_len() const {
  u64 m = 0;
  for (const CycleInfo& c : cycles) m = std::max<u64>(m, c.nodes.size());
  return m;
}

FunctionalGraphAnalysis full_sweep_analysis(const DiscreteMap& d) {
  if (!d.materialized()) throw BudgetError("full sweep needs a materialized image table");
  const u64 q = d.grid.q();
  const std::vector<u32>& img = d.table;

  FunctionalGraphAnalysis a;
  a.q = q;
  a.cycle_of.assign(q, 0);
  a.tail_of.assign(q, 0);
  // 0 = unvisited, 1 = on the current path, 2 = settled
  std::vector<u8> color(q, 0);
  std::vector<u64> path;

  for (u64 s = 0; s < q; ++s) {
    if (color[s]) continue;
    path.clear();
    u64 x = s;
    while (color[x] == 0) {
      color[x] = 1;
      path.push_back(x);
      x = img[x];
    }
    u32 cid;
    u64 base;        // tail length at the junction point x
    std::size_t cut;  // path[0..cut) is the non-recurrent prefix
    if (color[x] == 1) {
      // the walk closed on the current path: path[pos..] is a new cycle
      std::size_t pos = path.size();
      do {
        --pos;
      } while (path[pos] != x);
      cid = (u32)a.cycles.size();
      CycleInfo ci;
      ci.nodes.assign(path.begin() + (std::ptrdiff_t)pos, path.end());
      std::size_t mi = 0;
      for (std::size_t k = 1; k < ci.nodes.size(); ++k)
        if (ci.nodes[k] < ci.nodes[mi]) mi = k;
      std::rotate(ci.nodes.begin(), ci.nodes.begin() + (std::ptrdiff_t)mi, ci.nodes.end());
      for (u64 nd : ci.nodes) {
        color[nd] = 2;
        a.cycle_of[nd] = cid;
        a.tail_of[nd] = 0;
      }
      a.cycles.push_back(std::move(ci));
      base = 0;
      cut = pos;
    } else {
      // merged into an already settled node
      cid = a.cycle_of[x];
      base = a.tail_of[x];
      cut = path.size();
    }
    for (std::size_t i = 0; i < cut; ++i) {
      u64 nd = path[i];
      color[nd] = 2;
      a.cycle_of[nd] = cid;
      a.tail_of[nd] = (u32)(base + (cut - i));
    }
    if (cut > 0) a.stabilization_time = std::max(a.stabilization_time, base + cut);
  }

  for (const CycleInfo& c : a.cycles) a.recurrent_count += c.nodes.size();
  a.degree_of_recurrence = (double)a.recurrent_count / (double)q;
  for (u64 i = 0; i < q; ++i) a.cycles[a.cycle_of[i]].basin++;

  // order cycles by their smallest ordinal (nodes[0] after the rotation)
  std::vector<u32> order(a.cycles.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](u32 l, u32 r) { return a.cycles[l].nodes[0] < a.cycles[r].nodes[0]; });
  std::vector<u32> inv(order.size());
  for (u32 k = 0; k < order.size(); ++k) inv[order[k]] = k;
  std::vector<CycleInfo> sorted;
  sorted.reserve(a.cycles.size());
  for (u32 k : order) sorted.push_back(std::move(a.cycles[k]));
  a.cycles = std::move(sorted);
  for (u64 i = 0; i < q; ++i) a.cycle_of[i] = inv[a.cycle_of[i]];
  return a;
}

OrbitRecord floyd_orbit(const DiscreteMap& d, GridIndex start) {
  u64 x0 = d.grid.ordinal(start);
  u64 tort = d.image(x0);
  u64 hare = d.image(tort);
  while (tort != hare) {
    tort = d.image(tort);
    hare = d.image(d.image(hare));
  }
  u64 tail = 0;
  tort = x0;
  while (tort != hare) {
    tort = d.image(tort);
    hare = d.image(hare);
    ++tail;
  }
  u64 cycle = 1, rep = tort;
  for (u64 y = d.image(tort); y != tort; y = d.image(y)) {
    rep = std::min(rep, y);
    ++cycle;
  }
  return {tail, cycle, rep};
}

namespace {

u64 apply_to_bitmap(const std::vector<u32>& img, const std::vector<u64>& cur,
                    std::vector<u64>& nxt) {
  std::fill(nxt.begin(), nxt.end(), 0);
  const u64 n = img.size();
  for (u64 w = 0; w < cur.size(); ++w) {
    u64 bits = cur[w];
    while (bits) {
      u64 i = w * 64 + (u64)__builtin_ctzll(bits);
      bits &= bits - 1;
      if (i < n) {
        u64 y = img[i];
        nxt[y >> 6] |= 1ull << (y & 63);
      }
    }
  }
  u64 count = 0;
  for (u64 w : nxt) count += (u64)__builtin_popcountll(w);
  return count;
}

}  // namespace

std::vector<double> injectivity_profile(const DiscreteMap& d, u64 tmax) {
  if (tmax < 1) throw SchemaError("injectivity profile needs tmax >= 1");
  if (!d.materialized()) throw BudgetError("injectivity counting needs a materialized image table");
  const u64 q = d.grid.q();
  std::vector<u64> cur((q + 63) / 64, ~0ull), nxt(cur.size());
  std::vector<double> out;
  out.reserve(tmax);
  u64 prev = q;
  for (u64 t = 1; t <= tmax; ++t) {
    u64 c = apply_to_bitmap(d.table, cur, nxt);
    out.push_back((double)c / (double)q);
    if (c == prev) {
      // a plateau means every later value is identical
      while (out.size() < tmax) out.push_back(out.back());
      break;
    }
    prev = c;
    cur.swap(nxt);
  }
  return out;
}

double rate_of_injectivity(const DiscreteMap& d, u64 t) { return injectivity_profile(d, t).back(); }

std::optional<u64> permutation_order(const FunctionalGraphAnalysis& a) {
  if (a.recurrent_count != a.q) return std::nullopt;
  u64 l = 1;
  for (const CycleInfo& c : a.cycles) {
    u64 len = c.nodes.size();
    u64 g = std::gcd(l, len);
    u64 f = len / g;
    if (f != 0 && l > std::numeric_limits<u64>::max() / f) return std::nullopt;  // overflow
    l *= f;
  }
  return l;
}

std::optional<u64> permutation_order(const DiscreteMap& d) {
  return permutation_order(full_sweep_analysis(d));
}

}  // namespace griddyn
