#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "griddyn/engine.hpp"
#include "griddyn/presets.hpp"
#include "griddyn/rng.hpp"

using namespace griddyn;

namespace {

MapPtr identity_map() { return MapExpr::translation({0.0, 0.0}, 2); }

// Exhaustive reference analysis: image-set iteration for the recurrent set,
// per-start simulation for tails, direct walks for cycles and basins.
struct BruteResult {
  std::vector<std::vector<u64>> cycles;
  std::vector<u64> basins;
  std::vector<u64> tails;
  u64 recurrent = 0;
  u64 stab = 0;
};

BruteResult brute_analysis(const std::vector<u32>& img, u64 q) {
  BruteResult r;
  std::vector<char> in(q, 1), tmp(q);
  for (u64 it = 0; it < q; ++it) {
    std::fill(tmp.begin(), tmp.end(), 0);
    for (u64 i = 0; i < q; ++i)
      if (in[i]) tmp[img[i]] = 1;
    in.swap(tmp);
  }
  for (u64 i = 0; i < q; ++i) r.recurrent += (u64)in[i];

  r.tails.resize(q);
  for (u64 s = 0; s < q; ++s) {
    u64 x = s, t = 0;
    while (!in[x]) {
      x = img[x];
      ++t;
    }
    r.tails[s] = t;
    r.stab = std::max(r.stab, t);
  }

  std::map<u64, std::vector<u64>> by_min;  // min node -> cycle in orbit order
  std::vector<char> seen(q, 0);
  for (u64 s = 0; s < q; ++s) {
    if (!in[s] || seen[s]) continue;
    std::vector<u64> cyc{s};
    for (u64 x = img[s]; x != s; x = img[x]) cyc.push_back(x);
    u64 mn = *std::min_element(cyc.begin(), cyc.end());
    std::size_t mi = (std::size_t)(std::find(cyc.begin(), cyc.end(), mn) - cyc.begin());
    std::rotate(cyc.begin(), cyc.begin() + (std::ptrdiff_t)mi, cyc.end());
    for (u64 x : cyc) seen[x] = 1;
    by_min[mn] = std::move(cyc);
  }
  std::map<u64, u64> basin_of;
  for (u64 s = 0; s < q; ++s) {
    u64 x = s;
    while (!in[x]) x = img[x];
    u64 mn = x;
    for (u64 y = img[x]; y != x; y = img[y]) mn = std::min(mn, y);
    basin_of[mn]++;
  }
  for (auto& [mn, cyc] : by_min) {
    r.cycles.push_back(cyc);
    r.basins.push_back(basin_of[mn]);
  }
  return r;
}

void check_against_brute(const DiscreteMap& d) {
  FunctionalGraphAnalysis a = full_sweep_analysis(d);
  BruteResult b = brute_analysis(d.table, d.grid.q());
  REQUIRE(a.cycles.size() == b.cycles.size());
  for (std::size_t k = 0; k < a.cycles.size(); ++k) {
    CHECK(a.cycles[k].nodes == b.cycles[k]);
    CHECK(a.cycles[k].basin == b.basins[k]);
  }
  CHECK(a.recurrent_count == b.recurrent);
  CHECK(a.stabilization_time == b.stab);
  for (u64 i = 0; i < d.grid.q(); ++i) {
    CHECK((u64)a.tail_of[i] == b.tails[i]);
    CHECK(a.cycles[a.cycle_of[i]].nodes[0] == b.cycles[a.cycle_of[i]][0]);
  }
}

}  // namespace

TEST_CASE("identity analysis") {
  DiscreteMap d = discretize(identity_map(), Grid(2, 100));
  FunctionalGraphAnalysis a = full_sweep_analysis(d);
  CHECK(a.cycles.size() == 10000);
  CHECK(a.max_cycle_len() == 1);
  CHECK(a.degree_of_recurrence == 1.0);
  CHECK(a.stabilization_time == 0);
  CHECK(permutation_order(a) == 1);
  CHECK(rate_of_injectivity(d, 5) == 1.0);
}

TEST_CASE("grid translation is the row-shift permutation") {
  DiscreteMap d = discretize(MapExpr::translation({0.1, 0.0}, 2), Grid(2, 10));
  for (u64 ord = 0; ord < 100; ++ord) {
    GridIndex ix = d.grid.index(ord);
    CHECK(d.image(ord) == d.grid.ordinal({ix.i + 1, ix.j}));
  }
  OrbitRecord o = floyd_orbit(d, {3, 7});
  CHECK(o.tail == 0);
  CHECK(o.cycle == 10);
  CHECK(permutation_order(d) == 10);
}

TEST_CASE("cat map discretizations are permutations") {
  for (u64 n : {37, 128}) {
    DiscreteMap d = discretize(preset("cat"), Grid(2, n));
    FunctionalGraphAnalysis a = full_sweep_analysis(d);
    CHECK(a.recurrent_count == a.q);
    CHECK(rate_of_injectivity(d, 3) == 1.0);
  }
}

TEST_CASE("cat map order at N=610") {
  DiscreteMap d = discretize(preset("cat"), Grid(2, 610));
  CHECK(permutation_order(d) == 60);
  OrbitRecord o = floyd_orbit(d, {1, 0});
  CHECK(o.tail == 0);
  CHECK(60 % o.cycle == 0);
}

TEST_CASE("degree of recurrence drops for non-conservative discretizations") {
  // frozen counts cross-validated against an independent implementation
  DiscreteMap ex = discretize(preset("expanding-12.3.3"), Grid(1, 128));
  CHECK(full_sweep_analysis(ex).recurrent_count == 26);
  DiscreteMap ex2 = discretize(preset("expanding-12.3.3"), Grid(1, 256));
  CHECK(full_sweep_analysis(ex2).recurrent_count == 11);
  DiscreteMap f5 = discretize(preset("f5"), Grid(2, 128));
  CHECK(full_sweep_analysis(f5).degree_of_recurrence < 0.5);
}

TEST_CASE("sweep matches the exhaustive reference on small grids") {
  check_against_brute(discretize(preset("cat"), Grid(2, 5)));
  check_against_brute(discretize(preset("cat"), Grid(2, 16)));
  check_against_brute(discretize(preset("f5"), Grid(2, 6)));
  check_against_brute(discretize(preset("f5"), Grid(2, 13)));
  check_against_brute(discretize(preset("g2"), Grid(2, 11)));
  check_against_brute(discretize(preset("expanding-12.3.3"), Grid(1, 9)));
  check_against_brute(discretize(preset("expanding-12.3.3"), Grid(1, 16)));
  check_against_brute(discretize(MapExpr::translation({0.3, 0.7}, 2), Grid(2, 10)));
}

TEST_CASE("floyd agrees with the full sweep") {
  Rng r(31, 0);
  for (const char* name : {"f5", "g2", "expanding-12.3.3"}) {
    MapPtr m = preset(name);
    Grid g(m->dim, m->dim == 1 ? 511 : 349);
    DiscreteMap d = discretize(m, g);
    FunctionalGraphAnalysis a = full_sweep_analysis(d);
    for (int k = 0; k < 334; ++k) {
      u64 ord = r.below(g.q());
      OrbitRecord o = floyd_orbit(d, g.index(ord));
      CHECK(o.tail == a.tail_of[ord]);
      CHECK(o.cycle == a.cycles[a.cycle_of[ord]].nodes.size());
      CHECK(o.representative == a.cycles[a.cycle_of[ord]].nodes[0]);
    }
  }
}

TEST_CASE("injectivity rates are non-increasing and bounded by the recurrence degree") {
  Rng r(32, 0);
  const char* pool[] = {"f5", "g2", "h3", "f1rot", "f6"};
  for (int trial = 0; trial < 20; ++trial) {
    MapPtr m = preset(pool[r.below(5)]);
    Grid g(2, 50 + r.below(251));
    DiscreteMap d = discretize(m, g);
    u64 tmax = 2 + r.below(5);
    std::vector<double> prof = injectivity_profile(d, tmax);
    FunctionalGraphAnalysis a = full_sweep_analysis(d);
    for (std::size_t t = 1; t < prof.size(); ++t) CHECK(prof[t] <= prof[t - 1]);
    for (double v : prof) CHECK(v >= a.degree_of_recurrence);
    u64 sum = 0;
    for (const CycleInfo& c : a.cycles) sum += c.basin;
    CHECK(sum == a.q);
    u64 rec = 0;
    for (const CycleInfo& c : a.cycles) rec += c.nodes.size();
    CHECK(rec == a.recurrent_count);
  }
}

TEST_CASE("rates reach the recurrence degree at the stabilization time") {
  DiscreteMap d = discretize(preset("f5"), Grid(2, 64));
  FunctionalGraphAnalysis a = full_sweep_analysis(d);
  REQUIRE(a.stabilization_time >= 1);
  std::vector<double> prof = injectivity_profile(d, a.stabilization_time);
  CHECK(prof.back() == a.degree_of_recurrence);
  if (a.stabilization_time >= 2) CHECK(prof[prof.size() - 2] > a.degree_of_recurrence);
}

TEST_CASE("budget overflow falls back to on-the-fly images") {
  Grid g(2, 64);
  DiscreteMap small = discretize(preset("f5"), g, 100);  // 4096 points > 100
  CHECK(!small.materialized());
  DiscreteMap full = discretize(preset("f5"), g);
  for (u64 ord = 0; ord < g.q(); ord += 37) CHECK(small.image(ord) == full.image(ord));
  CHECK_THROWS_AS(full_sweep_analysis(small), BudgetError);
  CHECK_THROWS_AS(injectivity_profile(small, 3), BudgetError);
}

TEST_CASE("constant-image table") {
  Grid g(2, 8);
  DiscreteMap d = DiscreteMap::from_table(g, std::vector<u32>(64, 0));
  CHECK(rate_of_injectivity(d, 1) == 1.0 / 64.0);
  FunctionalGraphAnalysis a = full_sweep_analysis(d);
  CHECK(a.cycles.size() == 1);
  CHECK(a.cycles[0].nodes == std::vector<u64>{0});
  CHECK(a.cycles[0].basin == 64);
  CHECK(a.stabilization_time == 1);
  CHECK(permutation_order(a) == std::nullopt);
}

TEST_CASE("table validation") {
  Grid g(2, 4);
  CHECK_THROWS_AS(DiscreteMap::from_table(g, std::vector<u32>(15, 0)), SchemaError);
  CHECK_THROWS_AS(DiscreteMap::from_table(g, std::vector<u32>(16, 16)), SchemaError);
  CHECK_THROWS_AS(discretize(preset("expanding-12.3.3"), Grid(2, 8)), SchemaError);
  CHECK_THROWS_AS(discretize(nullptr, g), SchemaError);
}

TEST_CASE("threaded materialization matches single-threaded") {
  Grid g(2, 101);
  DiscreteMap a = discretize(preset("g1"), g, 1ull << 32, 1);
  DiscreteMap b = discretize(preset("g1"), g, 1ull << 32, 4);
  CHECK(a.table == b.table);
}
