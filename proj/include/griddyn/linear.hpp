#pragma once

#include <array>
#include <optional>
#include <vector>

#include "griddyn/common.hpp"
#include "griddyn/mapexpr.hpp"
#include "griddyn/rng.hpp"

namespace griddyn {

// Dense n x n real matrix for n <= 3, row-major; unused entries stay zero.
struct MatN {
  int n = 2;
  std::array<double, 9> a{};

  static MatN identity(int n);
  static MatN from2(double a00, double a01, double a10, double a11);
  static MatN from2(const Mat2d& m);

  double at(int i, int j) const { return a[(std::size_t)(3 * i + j)]; }
  double& at(int i, int j) { return a[(std::size_t)(3 * i + j)]; }

  MatN times(const MatN& o) const;
  MatN transpose() const;
  std::array<double, 3> apply(const std::array<double, 3>& x) const;
  double det() const;
  MatN inverse() const;   // NumericError when singular
  double norm_inf() const;  // operator norm: max absolute row sum
};

using IVec = std::array<i64, 3>;  // integer point, first n entries meaningful

// x -> A x + shift
struct LinearMap {
  MatN A;
  std::array<double, 3> shift{};
};

// A_1, ..., A_k applied in index order (maps[0] first)
struct MatrixSeq {
  int n = 2;
  std::vector<LinearMap> maps;

  static MatrixSeq single(const MatN& A, std::array<double, 3> shift = {});
  std::size_t k() const { return maps.size(); }
};

// componentwise nearest-integer projection of A x + shift, ties down
IVec apply_hat(const MatN& A, IVec x, std::array<double, 3> shift = {});

// Distinct images of the L-infinity ball [-R, R]^n under the composed
// discretizations, with the rate of injectivity tau = Card(image) / Card(ball)
// and the same estimate at R/2 as a convergence diagnostic.
struct PatternSample {
  int n = 2;
  i64 R = 0;
  u64 source_count = 0;
  std::vector<IVec> points;  // sorted lexicographically, distinct; may be left empty
  double tau = 1.0;
  double tau_coarse = 1.0;
};

PatternSample sequence_rate(const MatrixSeq& seq, i64 R, bool keep_points = true,
                            int threads = 1);

// tau^1, ..., tau^k of every prefix in one sweep
std::vector<double> injectivity_curve(const MatrixSeq& seq, i64 R, int threads = 1);

// density of A-hat(Z^n) inside [-R, R]^n; sources are enumerated in the ball
// of radius R * (1 + |A^-1|_inf) so that no image point in range is missed
double image_density(const MatN& A, i64 R, int threads = 1);

// empirical frequency rho(v) = Card(pattern intersect (pattern - v)) /
// Card(pattern) for every |v|_inf <= V
struct DifferenceTable {
  int n = 2;
  i64 V = 0;
  std::vector<double> rho;  // row-major over v + (V, ..., V)

  double at(IVec v) const;
  double mean() const;
};

DifferenceTable difference_frequencies(const MatrixSeq& seq, i64 R, i64 V, int threads = 1);

// Mean rate of injectivity of a single matrix, computed geometrically: the
// average over the unit box of 1 / psi(x), where psi counts lattice points of
// A Z^2 whose half-open unit cube contains x. Stratified sample x sample grid.
struct MeanRate {
  double value = 0.0;
  double std_error = 0.0;
};

MeanRate mean_rate_geometric(const MatN& A, int sample = 512);

// For sampled integer points x, the brute-force cardinality of the fiber
// A-hat^-1({A-hat(x)}) must equal psi evaluated at the fractional part of Ax.
struct FiberReport {
  bool pass = true;
  u64 checked = 0;
  IVec witness{};       // first mismatching sample when pass is false
  int fiber_brute = 0;  // counts at the witness
  int fiber_psi = 0;
};

FiberReport fiber_cardinality_check(const MatN& A, int samples, u64 seed);

// Monte Carlo density of the union of half-open unit cubes centred on the
// block lattice of the sequence (diagonal A_i, superdiagonal -Id) inside its
// fundamental domain; membership decided by exact block back-substitution.
struct CubeUnionEstimate {
  double density = 0.0;
  double std_error = 0.0;
  u64 samples = 0;
  u64 window_exhausted = 0;  // searches aborted by the node cap (reported, never silent)
};

CubeUnionEstimate cube_union_density(const MatrixSeq& seq, u64 samples, u64 seed);

// weights of the real point u on the vertices of its surrounding unit cube:
// w(v) = prod_i (1 - |u_i - v_i|); zero-weight vertices are dropped
std::vector<std::pair<IVec, double>> weighted_projection(std::array<double, 3> u, int n);

// sum of rho over the box [-s, s]^n against density * Card([-s/2, s/2]^n)
struct MinkowskiReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

MinkowskiReport minkowski_check(const DifferenceTable& t, double density, i64 s);
// exact equality case on the lattice kZ x Z (k odd) with the hexagonal box
// whose integer points are {(i,0): |i| < k} and {+-(i,1): 1 <= i < k}
MinkowskiReport minkowski_lattice_example(i64 k);

// Exhaustive search for B in SL2(Z) with entries bounded by bmax such that
// A B is unit upper or unit lower triangular (the two coordinate orders).
// Present iff the unit cubes centred on A Z^2 tile the plane.
struct HajosWitness {
  Mat2i B{{{1, 0}, {0, 1}}};
  bool lower = false;  // A B is unit lower triangular instead of upper
};

std::optional<HajosWitness> hajos_witness(const MatN& A, i64 bmax);

// Statistics of the roundoff errors of hat(lambda_m * .) iterated over the
// integer segment [-R, R]: per-step distribution, cumulative error variance
// against the (1/12) sum of squared suffix products, and the exact integral
// discrepancy of the image set against its density-matched multiple of
// Lebesgue measure.
struct RoundoffReport {
  int k = 0;
  u64 samples = 0;
  std::vector<double> ks;  // per-step Kolmogorov-Smirnov distance to U(-1/2, 1/2]
  double empirical_var = 0.0;
  double predicted_var = 0.0;
  bool non_generic = false;  // some suffix product is nearly rational (den <= 100)
  double discrepancy = 0.0;
  double predicted_discrepancy = 0.0;  // sqrt(predicted_var)
  std::vector<u64> histogram;          // pooled per-step errors, when bins > 0
};

RoundoffReport roundoff_statistics(const std::vector<double>& lambdas, i64 R, int bins = 0);

// matrix flavour: per-coordinate KS distances and the 2x2 covariance of the
// cumulative error against (1/12) sum of B_m B_m^T over suffix products B_m
struct RoundoffReport2 {
  int k = 0;
  u64 samples = 0;
  std::array<double, 2> ks{};
  Mat2d empirical_cov{};
  Mat2d predicted_cov{};
  bool non_generic = false;
};

RoundoffReport2 roundoff_statistics(const MatrixSeq& seq, i64 R);

// Average over a sample x sample grid of starting points of the rate of
// injectivity of the Jacobian sequence along the orbit segment of length t.
double localglobal_estimate(const MapExpr& m, int t, int sample, i64 R,
                            double* std_error = nullptr);

MatN rotation2(double theta);
// R_alpha diag(s, 1/s) R_beta with s in [1, max_stretch]: bounded, generic
MatN random_sl2(Rng& rng, double max_stretch = 1.8);

namespace detail {
// plain two-pointer counting path, kept as the equivalence reference for the
// packed bit-row fast path used by difference_frequencies
DifferenceTable difference_frequencies_reference(const MatrixSeq& seq, i64 R, i64 V,
                                                 int threads = 1);
}  // namespace detail

}  // namespace griddyn
