#pragma once

#include <optional>
#include <vector>

#include "griddyn/grid.hpp"
#include "griddyn/mapexpr.hpp"

namespace griddyn {

// Discretized map on E_N: each grid point goes to the grid point nearest to
// its image. Materialized as an ordinal table when the grid fits the budget;
// otherwise images are evaluated on demand.
struct DiscreteMap {
  Grid grid;
  MapPtr map;              // null when built from an explicit table
  std::vector<u32> table;  // empty in on-the-fly mode

  bool materialized() const { return !table.empty(); }
  u64 image(u64 ord) const;

  static DiscreteMap from_table(Grid g, std::vector<u32> t);
};

DiscreteMap discretize(MapPtr m, Grid g, u64 budget = (1ull << 32), int threads = 1);

struct CycleInfo {
  std::vector<u64> nodes;  // in orbit order, rotated to start at the smallest ordinal
  u64 basin = 0;           // grid points whose orbit lands here, cycle nodes included
};

// Complete cycle decomposition of the functional graph.
struct FunctionalGraphAnalysis {
  u64 q = 0;
  std::vector<CycleInfo> cycles;  // sorted by smallest ordinal
  u64 recurrent_count = 0;
  u64 stabilization_time = 0;  // smallest t with f_N^t(E_N) equal to the recurrent set
  double degree_of_recurrence = 0.0;
  std::vector<u32> cycle_of;  // ordinal -> index into cycles
  std::vector<u32> tail_of;   // ordinal -> steps until the orbit enters its cycle

  u64 max_cycle_len() const;
};

FunctionalGraphAnalysis full_sweep_analysis(const DiscreteMap& d);

struct OrbitRecord {
  u64 tail = 0;
  u64 cycle = 0;
  u64 representative = 0;  // smallest ordinal on the reached cycle
};

// Tortoise-and-hare orbit analysis; O(1) memory, works without a table.
OrbitRecord floyd_orbit(const DiscreteMap& d, GridIndex start);

// tau^t = Card(f_N^t(E_N)) / q_N for t = 1..tmax. Non-increasing; once two
// consecutive values agree the sequence is constant, so iteration stops early.
std::vector<double> injectivity_profile(const DiscreteMap& d, u64 tmax);
double rate_of_injectivity(const DiscreteMap& d, u64 t);

// lcm of cycle lengths when the map is a bijection. Absent for non-bijections
// and on 64-bit overflow (the cycle-length multiset in the analysis still
// carries the full information).
std::optional<u64> permutation_order(const FunctionalGraphAnalysis& a);
std::optional<u64> permutation_order(const DiscreteMap& d);

}  // namespace griddyn
