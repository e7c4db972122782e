#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace griddyn {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i32 = std::int32_t;
using i64 = std::int64_t;
using i128 = __int128;

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

// Config or input violates a documented contract.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A resource cap (materialization size, coordinate range) would be exceeded.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A numeric consistency check failed (non-integer cycle sum, singular matrix, ...).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Nearest-integer projection with ties resolved downward:
// project(t) = n iff n - 1/2 < t <= n + 1/2.
inline i64 project_int(double t) { return (i64)std::ceil(t - 0.5); }

inline i64 imod(i64 a, i64 n) {
  i64 r = a % n;
  return r < 0 ? r + n : r;
}

inline double fract(double x) { return x - std::floor(x); }

// distance on R/Z
inline double circle_dist(double a, double b) {
  double d = std::fabs(fract(a) - fract(b));
  return d > 0.5 ? 1.0 - d : d;
}

}  // namespace griddyn
