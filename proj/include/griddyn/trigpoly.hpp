#pragma once

#include <vector>

#include "griddyn/common.hpp"

namespace griddyn {

// One 1-periodic wave term: amp * kind(2*pi * freq * (x + phase)) for cos/sin,
// amp * tri(freq * (x + phase)) for tri, where tri(t) = |1 - 2*frac(t)| is the
// tent with tri(0) = 1, tri(1/2) = 0, affine between. Slopes at tent
// breakpoints follow the left-continuous convention.
struct Wave {
  enum Kind { Cos, Sin, Tri } kind = Cos;
  i64 freq = 1;  // positive integer
  double phase = 0.0;
  double amp = 0.0;
};

// t(x) = constant + sum of wave terms; 1-periodic with closed-form derivative.
struct TrigPoly {
  double c = 0.0;
  std::vector<Wave> terms;

  TrigPoly() = default;
  explicit TrigPoly(double constant) : c(constant) {}
  TrigPoly(double constant, std::vector<Wave> ts);

  bool zero() const { return c == 0.0 && terms.empty(); }

  double eval(double x) const;
  double deriv(double x) const;  // left-continuous at tri breakpoints

  double sup_abs() const;        // |c| + sum |amp|
  double sup_abs_deriv() const;  // sum of per-term slope bounds
  bool has_tri() const;

  TrigPoly& add(Wave w);
  TrigPoly& add_const(double v) { c += v; return *this; }
  TrigPoly scaled(double s) const;
  TrigPoly plus(const TrigPoly& o) const;
  // product-to-sum expansion; requires both factors tri-free
  TrigPoly times(const TrigPoly& o) const;
};

inline TrigPoly wave(Wave::Kind k, i64 freq, double phase, double amp) {
  TrigPoly t;
  t.add({k, freq, phase, amp});
  return t;
}

}  // namespace griddyn
