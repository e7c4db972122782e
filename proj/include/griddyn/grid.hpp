#pragma once

#include <array>

#include "griddyn/common.hpp"

namespace griddyn {

struct GridIndex {
  i64 i = 0, j = 0;  // j unused when dim == 1
  bool operator==(const GridIndex&) const = default;
};

// Uniform grid E_N on T^n, n = 1 or 2: points (i/N) or (i/N, j/N),
// 0 <= i, j < N. Flat ordinal is row-major: ord = i + N*j.
struct Grid {
  int dim = 2;
  u64 N = 1;

  Grid() = default;
  Grid(int dim_, u64 N_) : dim(dim_), N(N_) {
    if (dim != 1 && dim != 2) throw SchemaError("grid dim must be 1 or 2");
    if (N == 0) throw SchemaError("grid order must be positive");
    if (dim == 2 && N > 0xFFFFFFFFull) throw BudgetError("grid order exceeds 64-bit point count");
  }

  u64 q() const { return dim == 1 ? N : N * N; }

  GridIndex index(u64 ord) const {
    if (ord >= q()) throw SchemaError("ordinal out of range");
    if (dim == 1) return {(i64)ord, 0};
    return {(i64)(ord % N), (i64)(ord / N)};
  }
  u64 ordinal(GridIndex ix) const {
    i64 n = (i64)N;
    if (dim == 1) return (u64)imod(ix.i, n);
    return (u64)imod(ix.i, n) + N * (u64)imod(ix.j, n);
  }

  std::array<double, 2> point(u64 ord) const {
    GridIndex ix = index(ord);
    return {(double)ix.i / (double)N, dim == 2 ? (double)ix.j / (double)N : 0.0};
  }

  // nearest grid point: half-up rounding of N*x componentwise, then mod N
  GridIndex project_point(const std::array<double, 2>& p) const {
    GridIndex ix;
    ix.i = imod(project_int((double)N * p[0]), (i64)N);
    if (dim == 2) ix.j = imod(project_int((double)N * p[1]), (i64)N);
    return ix;
  }
  u64 project_ordinal(const std::array<double, 2>& p) const { return ordinal(project_point(p)); }
};

}  // namespace griddyn
