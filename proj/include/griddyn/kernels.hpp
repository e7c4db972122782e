#pragma once

#include <cstddef>

#include "griddyn/common.hpp"
#include "griddyn/mapexpr.hpp"
#include "griddyn/trigpoly.hpp"

namespace griddyn {

// Batch kernels come in a scalar reference flavor and an AVX2 flavor picked at
// runtime. The affine kernel is bit-identical across flavors (mul/add/ceil
// only, compiled with -ffp-contract=off); the wave kernel replaces libm
// sin/cos with a polynomial whose error stays below 2e-14 per unit amplitude,
// and keeps triangle waves exact.

enum class SimdMode { Scalar, Avx2 };

bool avx2_compiled();  // the AVX2 translation unit was built
bool avx2_runtime();   // ... and this CPU can run it
SimdMode simd_mode();
void set_simd_mode(SimdMode m);  // throws SchemaError if Avx2 is unavailable

// ox[i], oy[i] = round-half-down lattice projection of A*(xs[i],ys[i]) + b.
void affine_project_batch(const Mat2d& a, const Vec2& b, const i32* xs, const i32* ys, i64* ox,
                          i64* oy, std::size_t n);

// out[i] = p.eval(xs[i]), exactly (libm path).
void wave_eval_batch(const TrigPoly& p, const double* xs, double* out, std::size_t n);

// Same sum, with the dispatched sin/cos; identical to wave_eval_batch when
// running in scalar mode.
void wave_eval_batch_fast(const TrigPoly& p, const double* xs, double* out, std::size_t n);

// In-place torus map application to n points. exact=true reproduces eval()
// bitwise; exact=false routes the per-node waves through the fast kernel.
// Circle maps (dim 1) ignore ys.
void map_eval_batch(const MapExpr& f, double* xs, double* ys, std::size_t n, bool exact);

namespace detail {

void affine_project_scalar(const Mat2d& a, const Vec2& b, const i32* xs, const i32* ys, i64* ox,
                           i64* oy, std::size_t n);
// The _avx2 entry points throw SchemaError when the build lacks AVX2 support.
void affine_project_avx2(const Mat2d& a, const Vec2& b, const i32* xs, const i32* ys, i64* ox,
                         i64* oy, std::size_t n);
void wave_eval_avx2(const TrigPoly& p, const double* xs, double* out, std::size_t n);
// s[i], c[i] = sin/cos of 2*pi*w[i] for w pre-reduced to [0,1).
void sincos2pi_avx2(const double* w, double* s, double* c, std::size_t n);

}  // namespace detail

}  // namespace griddyn
