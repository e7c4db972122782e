#ifdef GRIDDYN_BUILD_AVX2

#include <immintrin.h>

#include <cstring>

#include "griddyn/kernels.hpp"

namespace griddyn {
namespace detail {

namespace {

// sinpi(r) = r * sum S[k] r^(2k), cospi(r) = sum C[k] r^(2k), |r| <= 1/4;
// Taylor truncation is 4.7e-17 (sin) / 2.1e-18 (cos) at the interval edge.
constexpr double kS[8] = {3.1415926535897932385,     -5.1677127800499700292,
                          2.5501640398773454439,     -0.59926452932079207689,
                          0.082145886611128228799,   -0.0073704309457143507773,
                          0.00046630280576761256442, -0.000021915353447830215827};
constexpr double kC[9] = {1.0,
                          -4.9348022005446793094,
                          4.0587121264167682182,
                          -1.3352627688545894959,
                          0.23533063035889320454,
                          -0.025806891390014060013,
                          0.0019295743094039230479,
                          -0.00010463810492484570712,
                          4.3030695870329470073e-6};

inline __m256d poly_horner(const double* k, int deg, __m256d r2) {
  __m256d acc = _mm256_set1_pd(k[deg]);
  for (int i = deg - 1; i >= 0; --i)
    acc = _mm256_add_pd(_mm256_mul_pd(acc, r2), _mm256_set1_pd(k[i]));
  return acc;
}

// sin/cos of 2*pi*w for w in [0,1): split 2w = n/2 + r with |r| <= 1/4 and
// pick the quadrant by n mod 4. The split is exact (Sterbenz).
inline void sincos2pi_vec(__m256d w, __m256d& s, __m256d& c) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d u = _mm256_add_pd(w, w);
  __m256d nd = _mm256_round_pd(_mm256_add_pd(u, u), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(u, _mm256_mul_pd(nd, _mm256_set1_pd(0.5)));
  __m256i n = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(nd));
  __m256d r2 = _mm256_mul_pd(r, r);
  __m256d ps = _mm256_mul_pd(r, poly_horner(kS, 7, r2));
  __m256d pc = poly_horner(kC, 8, r2);
  __m256d odd = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(n, _mm256_set1_epi64x(1)), _mm256_set1_epi64x(1)));
  __m256d neg = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(n, _mm256_set1_epi64x(2)), _mm256_set1_epi64x(2)));
  s = _mm256_blendv_pd(ps, pc, odd);
  c = _mm256_blendv_pd(pc, _mm256_xor_pd(ps, sign), odd);
  __m256d flip = _mm256_and_pd(neg, sign);
  s = _mm256_xor_pd(s, flip);
  c = _mm256_xor_pd(c, flip);
}

}  // namespace

void sincos2pi_avx2(const double* w, double* s, double* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d sv, cv;
    sincos2pi_vec(_mm256_loadu_pd(w + i), sv, cv);
    _mm256_storeu_pd(s + i, sv);
    _mm256_storeu_pd(c + i, cv);
  }
  if (i < n) {
    double wb[4] = {0, 0, 0, 0}, sb[4], cb[4];
    std::memcpy(wb, w + i, (n - i) * sizeof(double));
    __m256d sv, cv;
    sincos2pi_vec(_mm256_loadu_pd(wb), sv, cv);
    _mm256_storeu_pd(sb, sv);
    _mm256_storeu_pd(cb, cv);
    std::memcpy(s + i, sb, (n - i) * sizeof(double));
    std::memcpy(c + i, cb, (n - i) * sizeof(double));
  }
}

void wave_eval_avx2(const TrigPoly& p, const double* xs, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = p.c;
  for (const Wave& t : p.terms) {
    const __m256d freq = _mm256_set1_pd((double)t.freq);
    const __m256d ph = _mm256_set1_pd(t.phase);
    const __m256d amp = _mm256_set1_pd(t.amp);
    auto term4 = [&](const double* src, double* dst) {
      __m256d w = _mm256_mul_pd(freq, _mm256_add_pd(_mm256_loadu_pd(src), ph));
      w = _mm256_sub_pd(w, _mm256_floor_pd(w));
      __m256d val;
      if (t.kind == Wave::Tri) {
        __m256d tri = _mm256_sub_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(_mm256_set1_pd(2.0), w));
        val = _mm256_andnot_pd(_mm256_set1_pd(-0.0), tri);
      } else {
        __m256d s, c;
        sincos2pi_vec(w, s, c);
        val = (t.kind == Wave::Cos) ? c : s;
      }
      __m256d acc = _mm256_add_pd(_mm256_loadu_pd(dst), _mm256_mul_pd(amp, val));
      _mm256_storeu_pd(dst, acc);
    };
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) term4(xs + i, out + i);
    if (i < n) {
      double xb[4] = {0, 0, 0, 0}, ob[4] = {0, 0, 0, 0};
      std::memcpy(xb, xs + i, (n - i) * sizeof(double));
      std::memcpy(ob, out + i, (n - i) * sizeof(double));
      term4(xb, ob);
      std::memcpy(out + i, ob, (n - i) * sizeof(double));
    }
  }
}

void affine_project_avx2(const Mat2d& a, const Vec2& b, const i32* xs, const i32* ys, i64* ox,
                         i64* oy, std::size_t n) {
  const __m256d a00 = _mm256_set1_pd(a[0][0]), a01 = _mm256_set1_pd(a[0][1]);
  const __m256d a10 = _mm256_set1_pd(a[1][0]), a11 = _mm256_set1_pd(a[1][1]);
  const __m256d b0 = _mm256_set1_pd(b[0]), b1 = _mm256_set1_pd(b[1]);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_cvtepi32_pd(_mm_loadu_si128((const __m128i*)(xs + i)));
    __m256d y = _mm256_cvtepi32_pd(_mm_loadu_si128((const __m128i*)(ys + i)));
    __m256d tx = _mm256_sub_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(a00, x), _mm256_mul_pd(a01, y)), b0), half);
    __m256d ty = _mm256_sub_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(a10, x), _mm256_mul_pd(a11, y)), b1), half);
    tx = _mm256_round_pd(tx, _MM_FROUND_TO_POS_INF | _MM_FROUND_NO_EXC);
    ty = _mm256_round_pd(ty, _MM_FROUND_TO_POS_INF | _MM_FROUND_NO_EXC);
    double txb[4], tyb[4];
    _mm256_storeu_pd(txb, tx);
    _mm256_storeu_pd(tyb, ty);
    for (int k = 0; k < 4; ++k) {
      ox[i + k] = (i64)txb[k];
      oy[i + k] = (i64)tyb[k];
    }
  }
  if (i < n) affine_project_scalar(a, b, xs + i, ys + i, ox + i, oy + i, n - i);
}

}  // namespace detail
}  // namespace griddyn

#endif  // GRIDDYN_BUILD_AVX2
