#include "griddyn/kernels.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace griddyn {

namespace {

SimdMode resolve_initial_mode() {
  const char* env = std::getenv("GRIDDYN_SIMD");
  if (env) {
    std::string v(env);
    for (char& ch : v) ch = (char)std::tolower((unsigned char)ch);
    if (v == "scalar") return SimdMode::Scalar;
    if (v == "avx2") return avx2_runtime() ? SimdMode::Avx2 : SimdMode::Scalar;
    if (!v.empty()) throw SchemaError("GRIDDYN_SIMD must be 'scalar' or 'avx2'");
  }
  return avx2_runtime() ? SimdMode::Avx2 : SimdMode::Scalar;
}

std::atomic<SimdMode>& mode_slot() {
  static std::atomic<SimdMode> mode{resolve_initial_mode()};
  return mode;
}

}  // namespace

bool avx2_compiled() {
#ifdef GRIDDYN_BUILD_AVX2
  return true;
#else
  return false;
#endif
}

bool avx2_runtime() { return avx2_compiled() && __builtin_cpu_supports("avx2"); }

SimdMode simd_mode() { return mode_slot().load(std::memory_order_relaxed); }

void set_simd_mode(SimdMode m) {
  if (m == SimdMode::Avx2 && !avx2_runtime())
    throw SchemaError("AVX2 kernels are unavailable on this build/CPU");
  mode_slot().store(m, std::memory_order_relaxed);
}

namespace detail {

void affine_project_scalar(const Mat2d& a, const Vec2& b, const i32* xs, const i32* ys, i64* ox,
                           i64* oy, std::size_t n) {
  // same operation order as the AVX2 kernel: mul, add, add, sub, ceil
  for (std::size_t i = 0; i < n; ++i) {
    double x = (double)xs[i], y = (double)ys[i];
    double tx = a[0][0] * x + a[0][1] * y + b[0] - 0.5;
    double ty = a[1][0] * x + a[1][1] * y + b[1] - 0.5;
    ox[i] = (i64)std::ceil(tx);
    oy[i] = (i64)std::ceil(ty);
  }
}

#ifndef GRIDDYN_BUILD_AVX2
void affine_project_avx2(const Mat2d&, const Vec2&, const i32*, const i32*, i64*, i64*,
                         std::size_t) {
  throw SchemaError("AVX2 kernels were not built");
}
void wave_eval_avx2(const TrigPoly&, const double*, double*, std::size_t) {
  throw SchemaError("AVX2 kernels were not built");
}
void sincos2pi_avx2(const double*, double*, double*, std::size_t) {
  throw SchemaError("AVX2 kernels were not built");
}
#endif

}  // namespace detail

void affine_project_batch(const Mat2d& a, const Vec2& b, const i32* xs, const i32* ys, i64* ox,
                          i64* oy, std::size_t n) {
  if (simd_mode() == SimdMode::Avx2)
    detail::affine_project_avx2(a, b, xs, ys, ox, oy, n);
  else
    detail::affine_project_scalar(a, b, xs, ys, ox, oy, n);
}

void wave_eval_batch(const TrigPoly& p, const double* xs, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = p.eval(xs[i]);
}

void wave_eval_batch_fast(const TrigPoly& p, const double* xs, double* out, std::size_t n) {
  if (simd_mode() == SimdMode::Avx2)
    detail::wave_eval_avx2(p, xs, out, n);
  else
    wave_eval_batch(p, xs, out, n);
}

namespace {

using WaveFn = void (*)(const TrigPoly&, const double*, double*, std::size_t);

// One node applied in place to a chunk, mirroring node_lift + fract exactly
// when `wave` is the libm batch.
void apply_node_chunk(const MapExpr& f, double* xs, double* ys, std::size_t n, WaveFn wave,
                      std::vector<double>& t0, std::vector<double>& t1, std::vector<double>& t2) {
  switch (f.kind) {
    case MapExpr::Kind::ShearX:
      t0.resize(n);
      wave(f.wave, ys, t0.data(), n);
      for (std::size_t i = 0; i < n; ++i) xs[i] = fract(xs[i] + t0[i]);
      return;
    case MapExpr::Kind::ShearY:
      t0.resize(n);
      wave(f.wave, xs, t0.data(), n);
      for (std::size_t i = 0; i < n; ++i) ys[i] = fract(ys[i] + t0[i]);
      return;
    case MapExpr::Kind::Linear:
      for (std::size_t i = 0; i < n; ++i) {
        double nx = (double)f.m[0][0] * xs[i] + (double)f.m[0][1] * ys[i];
        double ny = (double)f.m[1][0] * xs[i] + (double)f.m[1][1] * ys[i];
        xs[i] = fract(nx);
        ys[i] = fract(ny);
      }
      return;
    case MapExpr::Kind::Translation:
      for (std::size_t i = 0; i < n; ++i) {
        xs[i] = fract(xs[i] + f.v[0]);
        if (f.dim == 2) ys[i] = fract(ys[i] + f.v[1]);
      }
      return;
    case MapExpr::Kind::Perturb:
      t0.resize(n);
      t1.resize(n);
      t2.resize(n);
      wave(f.wxx, xs, t0.data(), n);
      wave(f.wxy, ys, t1.data(), n);
      // new x staged in t1; wyx still needs the original xs
      for (std::size_t i = 0; i < n; ++i) t1[i] = fract(xs[i] + t0[i] + t1[i]);
      wave(f.wyx, xs, t0.data(), n);
      wave(f.wyy, ys, t2.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        ys[i] = fract(ys[i] + t2[i] + t0[i]);
        xs[i] = t1[i];
      }
      return;
    case MapExpr::Kind::CircleExpanding:
      t0.resize(n);
      wave(f.wave, xs, t0.data(), n);
      for (std::size_t i = 0; i < n; ++i) xs[i] = fract((double)f.degree * xs[i] + t0[i]);
      return;
    case MapExpr::Kind::CircleHomeo:
      t0.resize(n);
      wave(f.wave, xs, t0.data(), n);
      for (std::size_t i = 0; i < n; ++i) xs[i] = fract(xs[i] + t0[i]);
      return;
    case MapExpr::Kind::Compose: break;
  }
  throw SchemaError("compose node reached apply_node_chunk");
}

}  // namespace

void map_eval_batch(const MapExpr& f, double* xs, double* ys, std::size_t n, bool exact) {
  if (exact) {
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 p = eval(f, {xs[i], f.dim == 2 ? ys[i] : 0.0});
      xs[i] = p[0];
      if (f.dim == 2) ys[i] = p[1];
    }
    return;
  }
  WaveFn wave = simd_mode() == SimdMode::Avx2 ? detail::wave_eval_avx2 : wave_eval_batch;
  std::vector<const MapExpr*> nodes = flatten(f);
  const std::size_t chunk = 4096;
  std::vector<double> t0, t1, t2;
  static double ys_dummy[chunk];
  for (std::size_t at = 0; at < n; at += chunk) {
    std::size_t m = std::min(chunk, n - at);
    double* cx = xs + at;
    double* cy = f.dim == 2 ? ys + at : ys_dummy;
    for (std::size_t i = 0; i < m; ++i) cx[i] = fract(cx[i]);
    if (f.dim == 2)
      for (std::size_t i = 0; i < m; ++i) cy[i] = fract(cy[i]);
    for (const MapExpr* node : nodes) apply_node_chunk(*node, cx, cy, m, wave, t0, t1, t2);
  }
}

}  // namespace griddyn
