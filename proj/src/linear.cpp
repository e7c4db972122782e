#include "griddyn/linear.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <functional>
#include <cmath>
#include <cstddef>
#include <numeric>

#include "griddyn/kernels.hpp"
#include "griddyn/parallel.hpp"

namespace griddyn {

namespace {

// Projections stay exact while the pre-image of ceil is below 2^52.
constexpr double kExactLimit = 4.0e15;
// Packed two-coordinate keys carry each biased coordinate in 32 bits; keep a
// wide margin so difference offsets can never carry between fields.
constexpr i64 kPackLimit = (i64)1 << 28;
constexpr i64 kPackBias = (i64)1 << 30;

void check_dim(int n) {
  if (n < 1 || n > 3) throw SchemaError("linear: dimension must be 1, 2, or 3");
}

u64 pack2(i64 x, i64 y) {
  return ((u64)(x + kPackBias) << 32) | (u64)(y + kPackBias);
}

i64 unpack_x(u64 k) { return (i64)(k >> 32) - kPackBias; }
i64 unpack_y(u64 k) { return (i64)(k & 0xffffffffull) - kPackBias; }

u64 ball_count(int n, i64 R) {
  u64 side = (u64)(2 * R + 1);
  u64 c = 1;
  for (int i = 0; i < n; ++i) c *= side;
  return c;
}

[[noreturn]] void range_overflow() {
  throw BudgetError("linear: image coordinates exceeded the 2^28 working range");
}

// One discretized affine step over packed 2-D points, routed through the
// dispatched affine kernel in fixed-size chunks.
void step_packed(const LinearMap& lm, std::vector<u64>& keys, int threads) {
  Mat2d a{{{lm.A.at(0, 0), lm.A.at(0, 1)}, {lm.A.at(1, 0), lm.A.at(1, 1)}}};
  Vec2 b{lm.shift[0], lm.shift[1]};
  std::atomic<bool> overflow{false};
  parallel_ranges(keys.size(), threads, [&](u64 lo, u64 hi) {
    constexpr std::size_t B = 4096;
    i32 xs[B], ys[B];
    i64 ox[B], oy[B];
    for (u64 at = lo; at < hi; at += B) {
      std::size_t len = std::min<u64>(B, hi - at);
      for (std::size_t i = 0; i < len; ++i) {
        xs[i] = (i32)unpack_x(keys[at + i]);
        ys[i] = (i32)unpack_y(keys[at + i]);
      }
      affine_project_batch(a, b, xs, ys, ox, oy, len);
      for (std::size_t i = 0; i < len; ++i) {
        if (std::llabs(ox[i]) >= kPackLimit || std::llabs(oy[i]) >= kPackLimit) {
          overflow.store(true);
          return;
        }
        keys[at + i] = pack2(ox[i], oy[i]);
      }
    }
  });
  if (overflow.load()) range_overflow();
}

void step_generic(const LinearMap& lm, int n, std::vector<IVec>& pts, int threads) {
  std::atomic<bool> bad{false};
  parallel_ranges(pts.size(), threads, [&](u64 lo, u64 hi) {
    for (u64 i = lo; i < hi; ++i) {
      IVec out{};
      for (int r = 0; r < n; ++r) {
        // same accumulation order as the affine kernel: row dot, then shift
        double t = 0.0;
        for (int c = 0; c < n; ++c) t += lm.A.at(r, c) * (double)pts[i][(std::size_t)c];
        t += lm.shift[(std::size_t)r];
        if (std::fabs(t) > kExactLimit) {
          bad.store(true);
          return;
        }
        out[(std::size_t)r] = project_int(t);
      }
      pts[i] = out;
    }
  });
  if (bad.load()) throw NumericError("linear: affine image left the exact integer range");
}

void sort_unique(std::vector<u64>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void sort_unique(std::vector<IVec>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<u64> packed_ball(i64 R) {
  if (R >= kPackLimit - 1) range_overflow();
  std::vector<u64> keys;
  keys.reserve((std::size_t)ball_count(2, R));
  for (i64 x = -R; x <= R; ++x)
    for (i64 y = -R; y <= R; ++y) keys.push_back(pack2(x, y));
  return keys;
}

std::vector<IVec> generic_ball(int n, i64 R) {
  std::vector<IVec> pts;
  pts.reserve((std::size_t)ball_count(n, R));
  i64 ylo = n >= 2 ? -R : 0, yhi = n >= 2 ? R : 0;
  i64 zlo = n >= 3 ? -R : 0, zhi = n >= 3 ? R : 0;
  for (i64 x = -R; x <= R; ++x)
    for (i64 y = ylo; y <= yhi; ++y)
      for (i64 z = zlo; z <= zhi; ++z) pts.push_back(IVec{x, y, z});
  return pts;
}

void validate_seq(const MatrixSeq& seq) {
  check_dim(seq.n);
  if (seq.maps.empty()) throw SchemaError("linear: empty matrix sequence");
  for (const LinearMap& m : seq.maps) {
    if (m.A.n != seq.n) throw SchemaError("linear: matrix dimension mismatch in sequence");
    if (std::fabs(m.A.det()) < 1e-12) throw SchemaError("linear: singular matrix in sequence");
  }
}

// shared worker: runs the sequence over the R-ball, recording the distinct
// image count after every step; optionally keeps the final pattern
struct SweepResult {
  std::vector<double> taus;
  std::vector<IVec> points;
};

SweepResult run_sweep(const MatrixSeq& seq, i64 R, bool keep_points, int threads) {
  validate_seq(seq);
  if (R < 0) throw SchemaError("linear: negative radius");
  if (ball_count(seq.n, R) > (u64)1 << 26)
    throw BudgetError("linear: source ball exceeds the 2^26 point budget");
  SweepResult res;
  double sources = (double)ball_count(seq.n, R);
  if (seq.n == 2 && R < kPackLimit - 1) {
    std::vector<u64> keys = packed_ball(R);
    for (const LinearMap& lm : seq.maps) {
      step_packed(lm, keys, threads);
      sort_unique(keys);
      res.taus.push_back((double)keys.size() / sources);
    }
    if (keep_points) {
      res.points.reserve(keys.size());
      for (u64 k : keys) res.points.push_back(IVec{unpack_x(k), unpack_y(k), 0});
    }
  } else {
    std::vector<IVec> pts = generic_ball(seq.n, R);
    for (const LinearMap& lm : seq.maps) {
      step_generic(lm, seq.n, pts, threads);
      sort_unique(pts);
      res.taus.push_back((double)pts.size() / sources);
    }
    if (keep_points) res.points = std::move(pts);
  }
  return res;
}

// documented enumeration window: every lattice point within L-infinity
// distance 1/2 of the target lies inside z-radius ceil(|A^-1|_inf) + 1
i64 window_radius(const MatN& inv) {
  return (i64)std::ceil(inv.norm_inf()) + 1;
}

// lattice-point count of A Z^2 in the half-open unit cube centred on x
int psi_count(const MatN& A, const MatN& inv, i64 rad, double x0, double x1) {
  double w0 = inv.at(0, 0) * x0 + inv.at(0, 1) * x1;
  double w1 = inv.at(1, 0) * x0 + inv.at(1, 1) * x1;
  i64 c0 = project_int(w0), c1 = project_int(w1);
  int count = 0;
  for (i64 z0 = c0 - rad; z0 <= c0 + rad; ++z0)
    for (i64 z1 = c1 - rad; z1 <= c1 + rad; ++z1) {
      double d0 = x0 - (A.at(0, 0) * (double)z0 + A.at(0, 1) * (double)z1);
      double d1 = x1 - (A.at(1, 0) * (double)z0 + A.at(1, 1) * (double)z1);
      if (d0 > -0.5 && d0 <= 0.5 && d1 > -0.5 && d1 <= 0.5) ++count;
    }
  return count;
}

bool near_rational(double q, i64 max_den, double tol) {
  for (i64 d = 1; d <= max_den; ++d) {
    double t = q * (double)d;
    if (std::fabs(t - std::nearbyint(t)) <= tol * (double)d) return true;
  }
  return false;
}

double ks_uniform_half(std::vector<double>& eps) {
  // KS distance of the sample to the uniform law on (-1/2, 1/2]
  std::sort(eps.begin(), eps.end());
  double n = (double)eps.size(), ks = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    double f = eps[i] + 0.5;
    ks = std::max(ks, std::max(f - (double)i / n, (double)(i + 1) / n - f));
  }
  return ks;
}

}  // namespace

MatN MatN::identity(int n) {
  check_dim(n);
  MatN m;
  m.n = n;
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

MatN MatN::from2(double a00, double a01, double a10, double a11) {
  MatN m;
  m.n = 2;
  m.at(0, 0) = a00;
  m.at(0, 1) = a01;
  m.at(1, 0) = a10;
  m.at(1, 1) = a11;
  return m;
}

MatN MatN::from2(const Mat2d& s) { return from2(s[0][0], s[0][1], s[1][0], s[1][1]); }

MatN MatN::times(const MatN& o) const {
  if (n != o.n) throw SchemaError("linear: matrix dimension mismatch in product");
  MatN r;
  r.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += at(i, k) * o.at(k, j);
      r.at(i, j) = s;
    }
  return r;
}

MatN MatN::transpose() const {
  MatN r;
  r.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.at(i, j) = at(j, i);
  return r;
}

std::array<double, 3> MatN::apply(const std::array<double, 3>& x) const {
  std::array<double, 3> y{};
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += at(i, j) * x[(std::size_t)j];
    y[(std::size_t)i] = s;
  }
  return y;
}

double MatN::det() const {
  if (n == 1) return at(0, 0);
  if (n == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
  return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
         at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
         at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
}

MatN MatN::inverse() const {
  double d = det();
  if (std::fabs(d) < 1e-12) throw NumericError("linear: singular matrix");
  MatN r;
  r.n = n;
  if (n == 1) {
    r.at(0, 0) = 1.0 / d;
    return r;
  }
  if (n == 2) {
    r.at(0, 0) = at(1, 1) / d;
    r.at(0, 1) = -at(0, 1) / d;
    r.at(1, 0) = -at(1, 0) / d;
    r.at(1, 1) = at(0, 0) / d;
    return r;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      // adjugate: cofactor of (j, i)
      r.at(i, j) = (at(j1, i1) * at(j2, i2) - at(j1, i2) * at(j2, i1)) / d;
    }
  return r;
}

double MatN::norm_inf() const {
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::fabs(at(i, j));
    best = std::max(best, row);
  }
  return best;
}

MatrixSeq MatrixSeq::single(const MatN& A, std::array<double, 3> shift) {
  MatrixSeq s;
  s.n = A.n;
  s.maps.push_back(LinearMap{A, shift});
  return s;
}

IVec apply_hat(const MatN& A, IVec x, std::array<double, 3> shift) {
  IVec y{};
  for (int i = 0; i < A.n; ++i) {
    // same accumulation order as the affine kernel: row dot, then shift
    double t = 0.0;
    for (int j = 0; j < A.n; ++j) t += A.at(i, j) * (double)x[(std::size_t)j];
    t += shift[(std::size_t)i];
    if (std::fabs(t) > kExactLimit)
      throw NumericError("linear: affine image left the exact integer range");
    y[(std::size_t)i] = project_int(t);
  }
  return y;
}

PatternSample sequence_rate(const MatrixSeq& seq, i64 R, bool keep_points, int threads) {
  SweepResult full = run_sweep(seq, R, keep_points, threads);
  PatternSample out;
  out.n = seq.n;
  out.R = R;
  out.source_count = ball_count(seq.n, R);
  out.tau = full.taus.back();
  out.points = std::move(full.points);
  out.tau_coarse = R >= 2 ? run_sweep(seq, R / 2, false, threads).taus.back() : out.tau;
  return out;
}

std::vector<double> injectivity_curve(const MatrixSeq& seq, i64 R, int threads) {
  return run_sweep(seq, R, false, threads).taus;
}

double image_density(const MatN& A, i64 R, int threads) {
  if (R < 1) throw SchemaError("linear: radius must be positive");
  MatN inv = A.inverse();
  i64 Rs = (i64)std::ceil(inv.norm_inf() * ((double)R + 0.5)) + 1;
  SweepResult sw = run_sweep(MatrixSeq::single(A), Rs, true, threads);
  u64 inside = 0;
  for (const IVec& p : sw.points) {
    bool ok = true;
    for (int i = 0; i < A.n; ++i) ok = ok && std::llabs(p[(std::size_t)i]) <= R;
    inside += ok ? 1 : 0;
  }
  return (double)inside / (double)ball_count(A.n, R);
}

double DifferenceTable::at(IVec v) const {
  i64 side = 2 * V + 1;
  u64 idx = 0;
  for (int i = 0; i < n; ++i) {
    if (std::llabs(v[(std::size_t)i]) > V)
      throw SchemaError("linear: difference offset outside the table");
    idx = idx * (u64)side + (u64)(v[(std::size_t)i] + V);
  }
  return rho[idx];
}

double DifferenceTable::mean() const {
  long double s = 0.0L;
  for (double r : rho) s += r;
  return (double)(s / (long double)rho.size());
}

namespace {

// pattern as packed bit rows, one bit per x, one row per y
struct RowBitmap {
  i64 x0 = 0, y0 = 0;
  i64 H = 0;
  std::size_t words = 0;
  std::vector<u64> bits;
  const u64* row(i64 y) const { return bits.data() + (std::size_t)(y - y0) * words; }
};

bool build_bitmap(const std::vector<IVec>& pts, int n, RowBitmap& bm) {
  if (pts.empty() || n > 2) return false;
  i64 xmin = pts.front()[0], xmax = pts.front()[0];
  i64 ymin = 0, ymax = 0;
  for (const IVec& p : pts) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    if (n == 2) {
      ymin = std::min(ymin, p[1]);
      ymax = std::max(ymax, p[1]);
    }
  }
  i64 W = xmax - xmin + 1;
  bm.x0 = xmin;
  bm.y0 = ymin;
  bm.H = ymax - ymin + 1;
  bm.words = (std::size_t)((W + 63) / 64 + 1);  // pad word keeps shifted reads in range
  if ((u64)bm.H * (u64)bm.words > (u64)1 << 24) return false;  // 128 MB cap
  bm.bits.assign((std::size_t)bm.H * bm.words, 0);
  for (const IVec& p : pts) {
    i64 x = p[0] - bm.x0, y = n == 2 ? p[1] - bm.y0 : 0;
    bm.bits[(std::size_t)y * bm.words + (std::size_t)(x >> 6)] |= (u64)1 << (x & 63);
  }
  return true;
}

// pairs (x, x + s) with bit x set in a and bit x + s set in b, s >= 0
u64 count_pairs_shifted(const u64* a, const u64* b, std::size_t words, i64 s) {
  std::size_t q = (std::size_t)(s >> 6);
  int r = (int)(s & 63);
  u64 total = 0;
  for (std::size_t w = 0; w + q < words; ++w) {
    u64 bw = b[w + q] >> r;
    if (r != 0 && w + q + 1 < words) bw |= b[w + q + 1] << (64 - r);
    total += (u64)std::popcount(a[w] & bw);
  }
  return total;
}

u64 bitmap_count(const RowBitmap& bm, const IVec& v) {
  i64 vy = v[1];
  i64 ylo = std::max(bm.y0, bm.y0 - vy);
  i64 yhi = std::min(bm.y0 + bm.H - 1, bm.y0 + bm.H - 1 - vy);
  u64 total = 0;
  for (i64 y = ylo; y <= yhi; ++y)
    total += count_pairs_shifted(bm.row(y), bm.row(y + vy), bm.words, v[0]);
  return total;
}

u64 twopointer_count(const std::vector<IVec>& pts, const IVec& v) {
  u64 count = 0;
  std::size_t i = 0, j = 0;
  while (i < pts.size() && j < pts.size()) {
    IVec shifted{pts[j][0] + v[0], pts[j][1] + v[1], pts[j][2] + v[2]};
    if (pts[i] == shifted) {
      ++count;
      ++i;
      ++j;
    } else if (pts[i] < shifted) {
      ++i;
    } else {
      ++j;
    }
  }
  return count;
}

DifferenceTable difference_table_impl(const MatrixSeq& seq, i64 R, i64 V, int threads,
                                      bool allow_fast) {
  if (V < 0 || V > 100000) throw SchemaError("linear: difference range must be in [0, 1e5]");
  PatternSample pat = sequence_rate(seq, R, true, threads);
  const std::vector<IVec>& pts = pat.points;
  double m = (double)pts.size();
  i64 side = 2 * V + 1;
  DifferenceTable table;
  table.n = seq.n;
  table.V = V;
  u64 size = 1;
  for (int i = 0; i < seq.n; ++i) size *= (u64)side;
  table.rho.assign(size, 0.0);

  // enumerate the lexicographically nonnegative half (leading component >= 0,
  // so bit shifts stay nonnegative); rho(-v) = rho(v) exactly
  std::vector<IVec> half;
  if (seq.n == 1) {
    for (i64 x = 0; x <= V; ++x) half.push_back(IVec{x, 0, 0});
  } else if (seq.n == 2) {
    for (i64 y = 0; y <= V; ++y) half.push_back(IVec{0, y, 0});
    for (i64 x = 1; x <= V; ++x)
      for (i64 y = -V; y <= V; ++y) half.push_back(IVec{x, y, 0});
  } else {
    for (i64 z = 0; z <= V; ++z) half.push_back(IVec{0, 0, z});
    for (i64 y = 1; y <= V; ++y)
      for (i64 z = -V; z <= V; ++z) half.push_back(IVec{0, y, z});
    for (i64 x = 1; x <= V; ++x)
      for (i64 y = -V; y <= V; ++y)
        for (i64 z = -V; z <= V; ++z) half.push_back(IVec{x, y, z});
  }

  RowBitmap bm;
  bool fast = allow_fast && build_bitmap(pts, seq.n, bm);

  auto index_of = [&](const IVec& v) {
    u64 idx = 0;
    for (int i = 0; i < seq.n; ++i) idx = idx * (u64)side + (u64)(v[(std::size_t)i] + V);
    return idx;
  };
  auto index_neg = [&](const IVec& v) {
    u64 idx = 0;
    for (int i = 0; i < seq.n; ++i) idx = idx * (u64)side + (u64)(V - v[(std::size_t)i]);
    return idx;
  };

  parallel_ranges(half.size(), threads, [&](u64 lo, u64 hi) {
    for (u64 h = lo; h < hi; ++h) {
      const IVec& v = half[h];
      u64 count = fast ? bitmap_count(bm, v) : twopointer_count(pts, v);
      double r = m > 0.0 ? (double)count / m : 0.0;
      table.rho[index_of(v)] = r;
      table.rho[index_neg(v)] = r;
    }
  });
  return table;
}

}  // namespace

DifferenceTable difference_frequencies(const MatrixSeq& seq, i64 R, i64 V, int threads) {
  return difference_table_impl(seq, R, V, threads, true);
}

namespace detail {
DifferenceTable difference_frequencies_reference(const MatrixSeq& seq, i64 R, i64 V,
                                                 int threads) {
  return difference_table_impl(seq, R, V, threads, false);
}
}  // namespace detail

MeanRate mean_rate_geometric(const MatN& A, int sample) {
  if (A.n != 2) throw SchemaError("linear: mean rate is implemented for 2x2 matrices");
  if (sample < 1) throw SchemaError("linear: sample must be positive");
  MatN inv = A.inverse();
  i64 rad = window_radius(inv);
  long double s1 = 0.0L, s2 = 0.0L;
  for (int i = 0; i < sample; ++i)
    for (int j = 0; j < sample; ++j) {
      double x0 = ((double)i + 0.5) / (double)sample - 0.5;
      double x1 = ((double)j + 0.5) / (double)sample - 0.5;
      int psi = psi_count(A, inv, rad, x0, x1);
      double g = psi > 0 ? 1.0 / (double)psi : 0.0;
      s1 += g;
      s2 += g * g;
    }
  double count = (double)sample * (double)sample;
  MeanRate r;
  r.value = (double)(s1 / (long double)count);
  double var = (double)(s2 / (long double)count) - r.value * r.value;
  r.std_error = std::sqrt(std::max(0.0, var) / count);
  return r;
}

FiberReport fiber_cardinality_check(const MatN& A, int samples, u64 seed) {
  if (A.n != 2) throw SchemaError("linear: fiber check is implemented for 2x2 matrices");
  MatN inv = A.inverse();
  i64 rad = window_radius(inv);
  Rng rng(seed, 0x11afe);
  FiberReport rep;
  for (int s = 0; s < samples; ++s) {
    IVec x{(i64)rng.below(2001) - 1000, (i64)rng.below(2001) - 1000, 0};
    IVec c = apply_hat(A, x);
    // brute force: integer points projecting onto the same image
    double w0 = inv.at(0, 0) * (double)c[0] + inv.at(0, 1) * (double)c[1];
    double w1 = inv.at(1, 0) * (double)c[0] + inv.at(1, 1) * (double)c[1];
    i64 b0 = project_int(w0), b1 = project_int(w1);
    int brute = 0;
    for (i64 y0 = b0 - rad; y0 <= b0 + rad; ++y0)
      for (i64 y1 = b1 - rad; y1 <= b1 + rad; ++y1) {
        IVec img = apply_hat(A, IVec{y0, y1, 0});
        if (img[0] == c[0] && img[1] == c[1]) ++brute;
      }
    // lattice count around the reduced point
    double t0 = A.at(0, 0) * (double)x[0] + A.at(0, 1) * (double)x[1] - (double)c[0];
    double t1 = A.at(1, 0) * (double)x[0] + A.at(1, 1) * (double)x[1] - (double)c[1];
    int psi = psi_count(A, inv, rad, t0, t1);
    ++rep.checked;
    if (brute != psi) {
      rep.pass = false;
      rep.witness = x;
      rep.fiber_brute = brute;
      rep.fiber_psi = psi;
      return rep;
    }
  }
  return rep;
}

CubeUnionEstimate cube_union_density(const MatrixSeq& seq, u64 samples, u64 seed) {
  validate_seq(seq);
  if (seq.n != 2) throw SchemaError("linear: cube union density needs a 2-D sequence");
  std::size_t k = seq.k();
  if (k > 4) throw SchemaError("linear: cube union density supports up to 4 matrices");
  for (const LinearMap& m : seq.maps)
    if (m.shift[0] != 0.0 || m.shift[1] != 0.0 || m.shift[2] != 0.0)
      throw SchemaError("linear: cube union density is defined for linear sequences");
  std::vector<MatN> inv;
  std::vector<i64> rad;
  for (const LinearMap& m : seq.maps) {
    inv.push_back(m.A.inverse());
    rad.push_back(window_radius(inv.back()));
  }

  Rng rng(seed, 0xcbe5);
  CubeUnionEstimate est;
  est.samples = samples;
  u64 covered = 0;
  constexpr u64 kNodeCap = 200000;

  // blockwise membership: search z_{k-1}, ..., z_0 with each block residual in
  // the half-open unit cube; candidates come from the inverse-image window
  std::vector<Vec2> u((std::size_t)k);
  u64 nodes = 0;
  bool exhausted = false;

  std::function<bool(int, Vec2)> search = [&](int i, Vec2 znext) -> bool {
    // target for block i: u_i + z_{i+1} (zero for the last block)
    double t0 = u[(std::size_t)i][0] + znext[0];
    double t1 = u[(std::size_t)i][1] + znext[1];
    const MatN& mi = inv[(std::size_t)i];
    i64 c0 = project_int(mi.at(0, 0) * t0 + mi.at(0, 1) * t1);
    i64 c1 = project_int(mi.at(1, 0) * t0 + mi.at(1, 1) * t1);
    const MatN& A = seq.maps[(std::size_t)i].A;
    i64 r = rad[(std::size_t)i];
    for (i64 z0 = c0 - r; z0 <= c0 + r; ++z0)
      for (i64 z1 = c1 - r; z1 <= c1 + r; ++z1) {
        if (++nodes > kNodeCap) {
          exhausted = true;
          return false;
        }
        double d0 = t0 - (A.at(0, 0) * (double)z0 + A.at(0, 1) * (double)z1);
        double d1 = t1 - (A.at(1, 0) * (double)z0 + A.at(1, 1) * (double)z1);
        if (d0 > -0.5 && d0 <= 0.5 && d1 > -0.5 && d1 <= 0.5) {
          if (i == 0) return true;
          if (search(i - 1, Vec2{(double)z0, (double)z1})) return true;
          if (exhausted) return false;
        }
      }
    return false;
  };

  for (u64 s = 0; s < samples; ++s) {
    // u = Mtilde w for w uniform on [0,1)^{2k}: a uniform point of the
    // fundamental domain of the block lattice
    std::vector<Vec2> w((std::size_t)k);
    for (std::size_t i = 0; i < k; ++i) w[i] = Vec2{rng.uniform01(), rng.uniform01()};
    for (std::size_t i = 0; i < k; ++i) {
      const MatN& A = seq.maps[i].A;
      u[i][0] = A.at(0, 0) * w[i][0] + A.at(0, 1) * w[i][1];
      u[i][1] = A.at(1, 0) * w[i][0] + A.at(1, 1) * w[i][1];
      if (i + 1 < k) {
        u[i][0] -= w[i + 1][0];
        u[i][1] -= w[i + 1][1];
      }
    }
    nodes = 0;
    exhausted = false;
    bool hit = search((int)k - 1, Vec2{0.0, 0.0});
    if (exhausted) {
      ++est.window_exhausted;
    } else if (hit) {
      ++covered;
    }
  }
  est.density = samples > 0 ? (double)covered / (double)samples : 0.0;
  est.std_error =
      samples > 0 ? std::sqrt(est.density * (1.0 - est.density) / (double)samples) : 0.0;
  return est;
}

std::vector<std::pair<IVec, double>> weighted_projection(std::array<double, 3> u, int n) {
  check_dim(n);
  std::vector<std::pair<IVec, double>> out;
  std::array<i64, 3> base{};
  std::array<double, 3> frac{};
  for (int i = 0; i < n; ++i) {
    base[(std::size_t)i] = (i64)std::floor(u[(std::size_t)i]);
    frac[(std::size_t)i] = u[(std::size_t)i] - (double)base[(std::size_t)i];
  }
  for (int corner = 0; corner < (1 << n); ++corner) {
    IVec v{};
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      int up = (corner >> i) & 1;
      v[(std::size_t)i] = base[(std::size_t)i] + up;
      w *= up ? frac[(std::size_t)i] : 1.0 - frac[(std::size_t)i];
    }
    if (w > 0.0) out.emplace_back(v, w);
  }
  return out;
}

MinkowskiReport minkowski_check(const DifferenceTable& t, double density, i64 s) {
  if (s < 0 || s > t.V) throw SchemaError("linear: box size outside the difference table");
  long double lhs = 0.0L;
  IVec v{};
  i64 xlo = -s, xhi = s;
  i64 ylo = t.n >= 2 ? -s : 0, yhi = t.n >= 2 ? s : 0;
  i64 zlo = t.n >= 3 ? -s : 0, zhi = t.n >= 3 ? s : 0;
  for (i64 x = xlo; x <= xhi; ++x)
    for (i64 y = ylo; y <= yhi; ++y)
      for (i64 z = zlo; z <= zhi; ++z) {
        v = IVec{x, y, z};
        lhs += t.at(v);
      }
  u64 half = 1;
  for (int i = 0; i < t.n; ++i) half *= (u64)(2 * (s / 2) + 1);
  MinkowskiReport rep;
  rep.lhs = (double)lhs;
  rep.rhs = density * (double)half;
  rep.pass = rep.lhs >= rep.rhs - 0.02;
  return rep;
}

MinkowskiReport minkowski_lattice_example(i64 k) {
  if (k < 3 || k % 2 == 0) throw SchemaError("linear: lattice example needs odd k >= 3");
  // lattice kZ x Z against the box whose integer points are (i, 0) for
  // |i| <= k-1 and (+-i, +-1) for 1 <= i <= k-1; rho is exact membership
  long double lhs = 0.0L;
  for (i64 i = -(k - 1); i <= k - 1; ++i)
    if (imod(i, k) == 0) lhs += 1.0L;
  for (i64 i = 1; i <= k - 1; ++i) {
    if (imod(i, k) == 0) lhs += 2.0L;  // (i, 1) and (-i, -1)
  }
  i64 half = 2 * ((k - 1) / 2) + 1;  // integer points of the halved box: (i, 0), |2i| <= k-1
  MinkowskiReport rep;
  rep.lhs = (double)lhs;
  rep.rhs = (double)half / (double)k;
  rep.pass = rep.lhs >= rep.rhs - 1e-15;
  return rep;
}

std::optional<HajosWitness> hajos_witness(const MatN& A, i64 bmax) {
  if (A.n != 2) throw SchemaError("linear: tiling witness is implemented for 2x2 matrices");
  if (std::fabs(A.det() - 1.0) > 1e-9)
    throw SchemaError("linear: tiling witness needs det = 1");
  constexpr double kTol = 1e-9;
  auto try_b = [&](i64 a, i64 b, i64 c, i64 d) -> std::optional<HajosWitness> {
    double p00 = A.at(0, 0) * (double)a + A.at(0, 1) * (double)c;
    double p01 = A.at(0, 0) * (double)b + A.at(0, 1) * (double)d;
    double p10 = A.at(1, 0) * (double)a + A.at(1, 1) * (double)c;
    double p11 = A.at(1, 0) * (double)b + A.at(1, 1) * (double)d;
    bool diag = std::fabs(std::fabs(p00) - 1.0) <= kTol && std::fabs(std::fabs(p11) - 1.0) <= kTol;
    if (!diag) return std::nullopt;
    HajosWitness w;
    if (std::fabs(p10) <= kTol) {
      w.lower = false;
    } else if (std::fabs(p01) <= kTol) {
      w.lower = true;
    } else {
      return std::nullopt;
    }
    // normalise column signs so the product diagonal is +1
    i64 s0 = p00 < 0.0 ? -1 : 1, s1 = p11 < 0.0 ? -1 : 1;
    w.B = Mat2i{{{a * s0, b * s1}, {c * s0, d * s1}}};
    return w;
  };
  for (i64 shell = 0; shell <= bmax; ++shell)
    for (i64 a = -shell; a <= shell; ++a)
      for (i64 b = -shell; b <= shell; ++b)
        for (i64 c = -shell; c <= shell; ++c) {
          // only visit triples whose max absolute entry is on the new shell,
          // so smaller witnesses are found first
          i64 m3 = (i64)std::max({std::llabs(a), std::llabs(b), std::llabs(c)});
          for (i64 sgn : {1, -1}) {
            // d from det(B) = sgn
            i64 num = sgn + b * c;
            i64 d;
            if (a != 0) {
              if (num % a != 0) continue;
              d = num / a;
            } else {
              if (b * c != -sgn) continue;
              d = 0;  // free; scan the shell values below
            }
            if (a != 0) {
              if (std::max<i64>(m3, (i64)std::llabs(d)) != shell) continue;
              if (std::llabs(d) > bmax) continue;
              if (auto w = try_b(a, b, c, d)) return w;
            } else {
              for (i64 dv = -shell; dv <= shell; ++dv) {
                if (std::max<i64>(m3, (i64)std::llabs(dv)) != shell) continue;
                if (auto w = try_b(a, b, c, dv)) return w;
              }
            }
          }
        }
  return std::nullopt;
}

RoundoffReport roundoff_statistics(const std::vector<double>& lambdas, i64 R, int bins) {
  if (lambdas.empty()) throw SchemaError("linear: empty factor list");
  if (R < 1) throw SchemaError("linear: radius must be positive");
  for (double l : lambdas)
    if (std::fabs(l) < 1e-12) throw NumericError("linear: zero factor in roundoff sequence");
  int k = (int)lambdas.size();
  u64 samples = (u64)(2 * R + 1);

  RoundoffReport rep;
  rep.k = k;
  rep.samples = samples;

  std::vector<std::vector<double>> eps((std::size_t)k);
  for (auto& e : eps) e.reserve(samples);
  std::vector<i64> finals;
  finals.reserve(samples);

  long double prod = 1.0L;
  for (double l : lambdas) prod *= (long double)l;

  long double se = 0.0L, se2 = 0.0L;
  for (i64 x = -R; x <= R; ++x) {
    double y = (double)x;
    for (int m = 0; m < k; ++m) {
      double t = lambdas[(std::size_t)m] * y;
      if (std::fabs(t) > kExactLimit)
        throw NumericError("linear: roundoff orbit left the exact integer range");
      i64 p = project_int(t);
      eps[(std::size_t)m].push_back((double)p - t);
      y = (double)p;
    }
    finals.push_back((i64)y);
    long double err = (long double)y - prod * (long double)x;
    se += err;
    se2 += err * err;
  }
  long double mean = se / (long double)samples;
  rep.empirical_var = (double)(se2 / (long double)samples - mean * mean);

  // cumulative error E^k = sum_m (prod_{j>m} lambda_j) eps_m: each step's
  // roundoff is propagated by the factors applied after it
  long double pv = 0.0L, tail = 1.0L;
  for (int m = k - 1; m >= 0; --m) {
    pv += tail * tail;
    tail *= (long double)lambdas[(std::size_t)m];
  }
  rep.predicted_var = (double)(pv / 12.0L);
  rep.predicted_discrepancy = std::sqrt(rep.predicted_var);

  for (int m = 0; m < k; ++m) rep.ks.push_back(ks_uniform_half(eps[(std::size_t)m]));

  // near-resonant factor products defeat equidistribution of the roundoffs
  long double suffix = 1.0L;
  for (int m = k - 1; m >= 0; --m) {
    suffix *= (long double)lambdas[(std::size_t)m];
    if (near_rational((double)suffix, 100, 1e-6)) rep.non_generic = true;
  }

  if (bins > 0) {
    rep.histogram.assign((std::size_t)bins, 0);
    for (const auto& step : eps)
      for (double e : step) {
        int b = (int)std::floor((e + 0.5) * (double)bins);
        b = std::clamp(b, 0, bins - 1);
        ++rep.histogram[(std::size_t)b];
      }
  }

  // exact integral discrepancy of the image set against density prod^-1 * Leb:
  // with c = 1/prod, Disc^2 = (1/Rd) int_0^Rd (N(x) - 2 c x)^2 dx where N
  // counts image points in [-x, x]; N is piecewise constant with jumps at the
  // sorted absolute values, so each piece integrates in closed form
  std::sort(finals.begin(), finals.end());
  finals.erase(std::unique(finals.begin(), finals.end()), finals.end());
  long double slack = 0.5L;
  {
    long double t = 1.0L;
    for (int m = k - 1; m >= 1; --m) {
      t *= (long double)lambdas[(std::size_t)m];
      slack += 0.5L * std::fabs((double)t);
    }
  }
  // integration domain: [0, R], clipped to the range where the enumerated
  // image is provably complete (sources beyond R map past |prod| R - slack)
  long double rd = std::fabs((double)prod) * (long double)R - slack - 1.0L;
  if (rd > (long double)R) rd = (long double)R;
  if (rd > 1.0L) {
    std::vector<double> mags;
    mags.reserve(finals.size());
    for (i64 f : finals) mags.push_back((double)std::llabs(f));
    std::sort(mags.begin(), mags.end());
    long double c = 1.0L / std::fabs((double)prod);
    long double integral = 0.0L;
    double lo = 0.0;
    std::size_t i = 0;
    u64 count = 0;
    // points can share a magnitude (f and -f): advance through ties
    while (lo < (double)rd) {
      double hi = (double)rd;
      if (i < mags.size() && mags[i] < hi) hi = mags[i];
      if (hi > lo) {
        // int (count - 2 c x)^2 dx over [lo, hi]
        long double a = (long double)count - 2.0L * c * (long double)lo;
        long double b = (long double)count - 2.0L * c * (long double)hi;
        integral += (a * a * a - b * b * b) / (6.0L * c);
        lo = hi;
      }
      while (i < mags.size() && mags[i] <= lo) {
        ++count;
        ++i;
      }
      if (i >= mags.size() && lo >= (double)rd) break;
    }
    rep.discrepancy = (double)std::sqrt((double)(integral / rd));
  }
  return rep;
}

RoundoffReport2 roundoff_statistics(const MatrixSeq& seq, i64 R) {
  validate_seq(seq);
  if (seq.n != 2) throw SchemaError("linear: matrix roundoff needs a 2-D sequence");
  if (R < 1) throw SchemaError("linear: radius must be positive");
  int k = (int)seq.k();
  u64 samples = (u64)(2 * R + 1) * (u64)(2 * R + 1);

  RoundoffReport2 rep;
  rep.k = k;
  rep.samples = samples;

  // exact product B = A_k ... A_1 and the suffix propagators B_m = A_k ... A_{m+1}
  std::vector<MatN> bm((std::size_t)k + 1);
  bm[(std::size_t)k] = MatN::identity(2);
  for (int m = k - 1; m >= 0; --m)
    bm[(std::size_t)m] = bm[(std::size_t)m + 1].times(seq.maps[(std::size_t)m].A);

  Mat2d pc{};
  for (int m = 1; m <= k; ++m) {
    const MatN& B = bm[(std::size_t)m];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        pc[(std::size_t)i][(std::size_t)j] +=
            (B.at(i, 0) * B.at(j, 0) + B.at(i, 1) * B.at(j, 1)) / 12.0;
  }
  rep.predicted_cov = pc;

  std::array<std::vector<double>, 2> pooled;
  pooled[0].reserve(samples * (u64)k);
  pooled[1].reserve(samples * (u64)k);
  long double s0 = 0.0L, s1 = 0.0L, s00 = 0.0L, s01 = 0.0L, s11 = 0.0L;
  for (i64 x0 = -R; x0 <= R; ++x0)
    for (i64 x1 = -R; x1 <= R; ++x1) {
      double y0 = (double)x0, y1 = (double)x1;
      for (int m = 0; m < k; ++m) {
        const LinearMap& lm = seq.maps[(std::size_t)m];
        double t0 = lm.A.at(0, 0) * y0 + lm.A.at(0, 1) * y1 + lm.shift[0];
        double t1 = lm.A.at(1, 0) * y0 + lm.A.at(1, 1) * y1 + lm.shift[1];
        if (std::fabs(t0) > kExactLimit || std::fabs(t1) > kExactLimit)
          throw NumericError("linear: roundoff orbit left the exact integer range");
        i64 p0 = project_int(t0), p1 = project_int(t1);
        pooled[0].push_back((double)p0 - t0);
        pooled[1].push_back((double)p1 - t1);
        y0 = (double)p0;
        y1 = (double)p1;
      }
      const MatN& B = bm[0];
      double shift_total0 = 0.0, shift_total1 = 0.0;
      for (int m = 0; m < k; ++m) {
        const MatN& P = bm[(std::size_t)m + 1];
        shift_total0 += P.at(0, 0) * seq.maps[(std::size_t)m].shift[0] +
                        P.at(0, 1) * seq.maps[(std::size_t)m].shift[1];
        shift_total1 += P.at(1, 0) * seq.maps[(std::size_t)m].shift[0] +
                        P.at(1, 1) * seq.maps[(std::size_t)m].shift[1];
      }
      double e0 = y0 - (B.at(0, 0) * (double)x0 + B.at(0, 1) * (double)x1 + shift_total0);
      double e1 = y1 - (B.at(1, 0) * (double)x0 + B.at(1, 1) * (double)x1 + shift_total1);
      s0 += e0;
      s1 += e1;
      s00 += e0 * e0;
      s01 += e0 * e1;
      s11 += e1 * e1;
    }
  long double n = (long double)samples;
  double m0 = (double)(s0 / n), m1 = (double)(s1 / n);
  rep.empirical_cov[0][0] = (double)(s00 / n) - m0 * m0;
  rep.empirical_cov[0][1] = (double)(s01 / n) - m0 * m1;
  rep.empirical_cov[1][0] = rep.empirical_cov[0][1];
  rep.empirical_cov[1][1] = (double)(s11 / n) - m1 * m1;

  rep.ks[0] = ks_uniform_half(pooled[0]);
  rep.ks[1] = ks_uniform_half(pooled[1]);

  MatN suffix = MatN::identity(2);
  for (int m = k - 1; m >= 0; --m) {
    suffix = suffix.times(seq.maps[(std::size_t)m].A);
    bool all = true;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) all = all && near_rational(suffix.at(i, j), 100, 1e-6);
    if (all) rep.non_generic = true;
  }
  return rep;
}

double localglobal_estimate(const MapExpr& m, int t, int sample, i64 R, double* std_error) {
  if (m.dim != 2) throw SchemaError("linear: local-global estimate needs a torus map");
  if (t < 1 || sample < 1) throw SchemaError("linear: orbit length and sample must be positive");
  long double s1 = 0.0L, s2 = 0.0L;
  for (int i = 0; i < sample; ++i)
    for (int j = 0; j < sample; ++j) {
      Vec2 p{((double)i + 0.5) / (double)sample, ((double)j + 0.5) / (double)sample};
      MatrixSeq seq;
      seq.n = 2;
      for (int step = 0; step < t; ++step) {
        seq.maps.push_back(LinearMap{MatN::from2(jacobian(m, p)), {}});
        p = eval(m, p);
      }
      double tau = sequence_rate(seq, R, false).tau;
      s1 += tau;
      s2 += tau * tau;
    }
  double count = (double)sample * (double)sample;
  double mean = (double)(s1 / (long double)count);
  if (std_error) {
    double var = (double)(s2 / (long double)count) - mean * mean;
    *std_error = std::sqrt(std::max(0.0, var) / count);
  }
  return mean;
}

MatN rotation2(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  return MatN::from2(c, -s, s, c);
}

MatN random_sl2(Rng& rng, double max_stretch) {
  if (max_stretch < 1.0) throw SchemaError("linear: stretch bound must be at least 1");
  double alpha = rng.uniform(0.0, kTwoPi);
  double beta = rng.uniform(0.0, kTwoPi);
  double s = rng.uniform(1.0, max_stretch);
  MatN d = MatN::from2(s, 0.0, 0.0, 1.0 / s);
  return rotation2(alpha).times(d).times(rotation2(beta));
}

}  // namespace griddyn
