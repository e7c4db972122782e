#include "griddyn/lax.hpp"

#include <algorithm>
#include <cmath>

#include "griddyn/kernels.hpp"
#include "griddyn/parallel.hpp"
#include "griddyn/rng.hpp"

namespace griddyn {

u64 snake_rank(const Grid& g, u64 ord) {
  if (g.dim == 1) return ord;
  u64 row = ord / g.N, col = ord % g.N;
  return row * g.N + (row % 2 == 0 ? col : g.N - 1 - col);
}

u64 snake_cell(const Grid& g, u64 rank) {
  if (g.dim == 1) return rank;
  u64 row = rank / g.N, c = rank % g.N;
  return row * g.N + (row % 2 == 0 ? c : g.N - 1 - c);
}

namespace {

struct Dsu {
  std::vector<u32> parent;
  explicit Dsu(u64 n) : parent(n) {
    for (u64 i = 0; i < n; ++i) parent[i] = (u32)i;
  }
  u32 find(u32 x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(u32 a, u32 b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

struct Frame {
  u32 src;
  u32 idx;
  u32 chosen;
};

// Kuhn augmenting search, iterative so deep alternating paths cannot overflow
// the stack. owner[t] = source currently matched to target t, or -1.
bool augment(u32 root, const std::vector<std::vector<u32>>& adj, std::vector<i64>& owner,
             std::vector<u32>& stamp, u32 round, std::vector<Frame>& frames) {
  frames.clear();
  frames.push_back({root, 0, 0});
  while (!frames.empty()) {
    Frame& f = frames.back();
    const std::vector<u32>& edges = adj[f.src];
    if (f.idx >= edges.size()) {
      frames.pop_back();
      continue;
    }
    u32 t = edges[f.idx++];
    if (stamp[t] == round) continue;
    stamp[t] = round;
    f.chosen = t;
    if (owner[t] < 0) {
      for (const Frame& fr : frames) owner[fr.chosen] = (i64)fr.src;
      return true;
    }
    frames.push_back({(u32)owner[t], 0, 0});
  }
  return false;
}

double torus_dist(const Grid& g, const Vec2& a, const Vec2& b) {
  double dx = circle_dist(a[0], b[0]);
  if (g.dim == 1) return dx;
  double dy = circle_dist(a[1], b[1]);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

LaxResult lax_cyclic_approximation(MapPtr m, Grid g, int supersample, u64 budget, int threads) {
  if (!m) throw SchemaError("lax approximation needs a map");
  if (m->dim != g.dim) throw SchemaError("map and grid dimensions differ");
  if (supersample < 1) throw SchemaError("supersample factor must be positive");
  const u64 q = g.q();
  if (q > budget) throw BudgetError("grid exceeds the lax materialization budget");

  // Lax's theorem needs a measure-preserving map; spot-check |det DF| = 1.
  {
    Rng r(26, 1);
    for (int i = 0; i < 256; ++i) {
      Vec2 x{r.uniform01(), r.uniform01()};
      if (std::fabs(std::fabs(jacobian_det(*m, x)) - 1.0) > 1e-6)
        throw NumericError("map does not preserve area; no cyclic approximation");
    }
  }

  LaxResult res;
  if (q == 1) {
    res.sigma = {0};
    res.matched = {0};
    Vec2 fx = eval(*m, g.point(0));
    res.sup_distance = res.matching_radius = torus_dist(g, fx, g.point(0));
    return res;
  }

  // supersample each cell and record which cells its image points hit
  const u64 per = (u64)supersample * (u64)supersample;
  std::vector<std::vector<u32>> hits(q);
  {
    std::vector<double> xs(per * q), ys(per * q);
    for (u64 ord = 0; ord < q; ++ord) {
      GridIndex ix = g.index(ord);
      for (u64 a = 0; a < per; ++a) {
        u64 at = ord * per + a;
        if (g.dim == 1) {
          xs[at] = ((double)ix.i + ((double)a + 0.5) / (double)per - 0.5) / (double)g.N;
          ys[at] = 0.0;
        } else {
          u64 ai = a % (u64)supersample, aj = a / (u64)supersample;
          xs[at] = ((double)ix.i + ((double)ai + 0.5) / supersample - 0.5) / (double)g.N;
          ys[at] = ((double)ix.j + ((double)aj + 0.5) / supersample - 0.5) / (double)g.N;
        }
      }
    }
    parallel_ranges(q, threads, [&](u64 lo, u64 hi) {
      map_eval_batch(*m, xs.data() + lo * per, ys.data() + lo * per, (hi - lo) * per, false);
    });
    for (u64 ord = 0; ord < q; ++ord) {
      std::vector<u32>& h = hits[ord];
      h.reserve(per);
      for (u64 a = 0; a < per; ++a)
        h.push_back((u32)g.project_ordinal({xs[ord * per + a], ys[ord * per + a]}));
      std::sort(h.begin(), h.end());
      h.erase(std::unique(h.begin(), h.end()), h.end());
    }
  }

  // perfect matching source -> target, widening each source's candidate set
  // around its hit cells if the sampled graph is too sparse
  std::vector<i64> owner(q, -1);
  std::vector<std::vector<u32>> adj;
  std::vector<u32> stamp(q, 0);
  std::vector<Frame> frames;
  u32 round = 0;
  int widen = 0;
  for (;; ++widen) {
    if (widen == 0) {
      adj = hits;
    } else {
      i64 r = widen;
      for (u64 ord = 0; ord < q; ++ord) {
        std::vector<u32> grown;
        for (u32 h : hits[ord]) {
          GridIndex ix = g.index(h);
          if (g.dim == 1) {
            for (i64 di = -r; di <= r; ++di) grown.push_back((u32)g.ordinal({ix.i + di, 0}));
          } else {
            for (i64 di = -r; di <= r; ++di)
              for (i64 dj = -r; dj <= r; ++dj)
                grown.push_back((u32)g.ordinal({ix.i + di, ix.j + dj}));
          }
        }
        std::sort(grown.begin(), grown.end());
        grown.erase(std::unique(grown.begin(), grown.end()), grown.end());
        adj[ord] = std::move(grown);
      }
    }
    // greedy pass, then augmenting paths for what remains
    std::vector<char> matched_src(q, 0);
    for (u64 t = 0; t < q; ++t)
      if (owner[t] >= 0) matched_src[(u64)owner[t]] = 1;
    std::vector<u32> pending;
    for (u64 s = 0; s < q; ++s) {
      if (matched_src[s]) continue;
      bool has = false;
      for (u32 t : adj[s]) {
        if (owner[t] < 0) {
          owner[t] = (i64)s;
          has = true;
          break;
        }
      }
      if (!has) pending.push_back((u32)s);
    }
    bool complete = true;
    for (u32 s : pending) {
      ++round;
      if (!augment(s, adj, owner, stamp, round, frames)) complete = false;
    }
    if (complete) break;
    if (widen >= 2)
      throw NumericError("no perfect matching on the sampled transition graph");
  }
  res.widen_rounds = widen;

  res.matched.assign(q, 0);
  for (u64 t = 0; t < q; ++t) res.matched[(u64)owner[t]] = (u32)t;

  // merge the matching's cycles into a single one: mark a spanning tree of
  // snake-adjacent transpositions, then apply it as two disjoint layers so no
  // value moves more than two snake steps
  std::vector<u32> cid(q, UINT32_MAX);
  u32 ncyc = 0;
  for (u64 s = 0; s < q; ++s) {
    if (cid[s] != UINT32_MAX) continue;
    for (u64 x = s; cid[x] == UINT32_MAX; x = res.matched[x]) cid[x] = ncyc;
    ++ncyc;
  }
  std::vector<u64> marked;
  {
    Dsu dsu(ncyc);
    for (u64 k = 0; k + 1 < q; ++k)
      if (dsu.unite(cid[snake_cell(g, k)], cid[snake_cell(g, k + 1)])) marked.push_back(k);
  }
  res.sigma = res.matched;
  std::vector<u32> inv(q);
  for (u64 s = 0; s < q; ++s) inv[res.sigma[s]] = (u32)s;
  auto apply_swap = [&](u64 k) {
    u32 a = (u32)snake_cell(g, k), b = (u32)snake_cell(g, k + 1);
    u32 pa = inv[a], pb = inv[b];
    res.sigma[pa] = b;
    res.sigma[pb] = a;
    inv[a] = pb;
    inv[b] = pa;
  };
  for (int layer = 0; layer < 2; ++layer) {
    u64 run_start = 0;
    for (std::size_t i = 0; i < marked.size(); ++i) {
      if (i == 0 || marked[i] != marked[i - 1] + 1) run_start = marked[i];
      if ((marked[i] - run_start) % 2 == (u64)layer) apply_swap(marked[i]);
    }
  }

  // distances, with exact per-centre images
  for (u64 s = 0; s < q; ++s) {
    Vec2 fx = eval(*m, g.point(s));
    res.matching_radius = std::max(res.matching_radius, torus_dist(g, fx, g.point(res.matched[s])));
    res.sup_distance = std::max(res.sup_distance, torus_dist(g, fx, g.point(res.sigma[s])));
  }
  return res;
}

}  // namespace griddyn
