#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "griddyn/engine.hpp"
#include "griddyn/linear.hpp"
#include "griddyn/presets.hpp"
#include "griddyn/rng.hpp"

using namespace griddyn;

namespace {

// shear with determinant 1/2: collapses x-pairs, rate 1/2 for generic shifts
MatN half_shear() { return MatN::from2(0.5, -1.0, 0.0, 1.0); }

// determinant-1 sibling used by the quadrant dichotomy: the image difference
// of consecutive x-neighbours is (1/2,1/2), so collisions depend on both
// shift coordinates
MatN half_shear_sl2() { return MatN::from2(0.5, -1.0, 0.5, 1.0); }

MatN cat_matrix() { return MatN::from2(2.0, 1.0, 1.0, 1.0); }

MatrixSeq seq_of(std::initializer_list<MatN> ms) {
  MatrixSeq s;
  s.n = 2;
  for (const MatN& m : ms) s.maps.push_back(LinearMap{m, {0.0, 0.0, 0.0}});
  return s;
}

MatrixSeq shifted(const MatN& a, Vec2 v) {
  MatrixSeq s = MatrixSeq::single(a);
  s.maps[0].shift = {v[0], v[1], 0.0};
  return s;
}

bool unit_triangular(const MatN& p, bool lower, double tol) {
  double off = lower ? p.at(0, 1) : p.at(1, 0);
  return std::fabs(p.at(0, 0) - 1.0) <= tol && std::fabs(p.at(1, 1) - 1.0) <= tol &&
         std::fabs(off) <= tol;
}

}  // namespace

TEST_CASE("matrix helpers: inverse, determinant, norms") {
  MatN a = MatN::from2(2.0, 1.0, 1.0, 1.0);
  CHECK(a.det() == doctest::Approx(1.0).epsilon(1e-15));
  MatN inv = a.inverse();
  MatN prod = a.times(inv);
  CHECK(std::fabs(prod.at(0, 0) - 1.0) <= 1e-14);
  CHECK(std::fabs(prod.at(0, 1)) <= 1e-14);
  CHECK(std::fabs(prod.at(1, 0)) <= 1e-14);
  CHECK(std::fabs(prod.at(1, 1) - 1.0) <= 1e-14);
  CHECK(a.norm_inf() == doctest::Approx(3.0));
  CHECK_THROWS_AS(MatN::from2(1.0, 2.0, 2.0, 4.0).inverse(), NumericError);

  MatN r = rotation2(0.3);
  CHECK(r.det() == doctest::Approx(1.0).epsilon(1e-15));
  Vec2 e1 = {1.0, 0.0};
  std::array<double, 3> y = r.apply({e1[0], e1[1], 0.0});
  CHECK(y[0] == doctest::Approx(std::cos(0.3)));
  CHECK(y[1] == doctest::Approx(std::sin(0.3)));
}

TEST_CASE("apply_hat: identity, ties, integer exactness") {
  // identity on Z^2
  Rng rng(3, 0xa11);
  for (int t = 0; t < 200; ++t) {
    IVec x = {(i64)rng.below(2001) - 1000, (i64)rng.below(2001) - 1000, 0};
    IVec y = apply_hat(MatN::identity(2), x);
    CHECK(y == x);
  }

  // the determinant-1/2 shear maps (1,0) to the tie point (0.5, 0), which
  // rounds down to (0,0) — the same image as (0,0) itself: a collision
  IVec a = apply_hat(half_shear(), {1, 0, 0});
  IVec b = apply_hat(half_shear(), {0, 0, 0});
  CHECK(a == IVec{0, 0, 0});
  CHECK(b == IVec{0, 0, 0});

  // integer matrices act exactly, no rounding
  for (int t = 0; t < 200; ++t) {
    i64 x = (i64)rng.below(2001) - 1000, y = (i64)rng.below(2001) - 1000;
    IVec im = apply_hat(cat_matrix(), {x, y, 0});
    CHECK(im[0] == 2 * x + y);
    CHECK(im[1] == x + y);
  }

  // projection moves each coordinate by at most 1/2
  for (int t = 0; t < 500; ++t) {
    MatN m = random_sl2(rng);
    std::array<double, 3> shift = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0};
    IVec x = {(i64)rng.below(201) - 100, (i64)rng.below(201) - 100, 0};
    IVec y = apply_hat(m, x, shift);
    std::array<double, 3> exact = m.apply({(double)x[0], (double)x[1], 0.0});
    CHECK(std::fabs((double)y[0] - (exact[0] + shift[0])) <= 0.5);
    CHECK(std::fabs((double)y[1] - (exact[1] + shift[1])) <= 0.5);
  }
}

TEST_CASE("sequence_rate: exact rates for the reference matrices") {
  // identity is injective at every radius
  CHECK(sequence_rate(seq_of({MatN::identity(2)}), 50).tau == 1.0);

  // integer unimodular matrices are bijections on Z^2
  CHECK(sequence_rate(seq_of({cat_matrix()}), 60).tau == 1.0);

  // both half-determinant shears collapse x-pairs: tau(R) = (R+1)/(2R+1)
  for (MatN m : {half_shear(), half_shear_sl2()}) {
    PatternSample p = sequence_rate(MatrixSeq::single(m), 1000);
    CHECK(p.tau == doctest::Approx(1001.0 / 2001.0).epsilon(1e-12));
    CHECK(p.tau_coarse == doctest::Approx(501.0 / 1001.0).epsilon(1e-12));
    CHECK(std::fabs(p.tau - 0.5) < 0.01);
  }

  // quadrant dichotomy of the det-1 shear: shifts in ]0,1/2[^2 keep the
  // collisions, shifts in the mixed quadrant remove every one of them
  PatternSample low = sequence_rate(shifted(half_shear_sl2(), {0.2, 0.1}), 1000);
  PatternSample mix = sequence_rate(shifted(half_shear_sl2(), {0.2, 0.7}), 1000);
  CHECK(low.tau == doctest::Approx(1001.0 / 2001.0).epsilon(1e-12));
  CHECK(mix.tau == 1.0);
  PatternSample hi = sequence_rate(shifted(half_shear_sl2(), {0.7, 0.8}), 1000);
  PatternSample mx2 = sequence_rate(shifted(half_shear_sl2(), {0.8, 0.3}), 1000);
  CHECK(hi.tau == doctest::Approx(1001.0 / 2001.0).epsilon(1e-12));
  CHECK(mx2.tau == 1.0);

  // the printed det-1/2 shear ignores the second shift coordinate: rate 1/2
  // in both quadrants
  CHECK(sequence_rate(shifted(half_shear(), {0.2, 0.7}), 1000).tau ==
        doctest::Approx(1001.0 / 2001.0).epsilon(1e-12));

  // sample bookkeeping
  PatternSample p = sequence_rate(seq_of({half_shear()}), 40);
  CHECK(p.source_count == 81 * 81);
  CHECK((u64)p.points.size() == (u64)std::llround(p.tau * (double)p.source_count));
  CHECK(std::is_sorted(p.points.begin(), p.points.end()));
}

TEST_CASE("sequence_rate: input validation and budget") {
  MatrixSeq empty;
  empty.n = 2;
  CHECK_THROWS_AS(sequence_rate(empty, 10), SchemaError);
  MatrixSeq sing = seq_of({MatN::from2(1.0, 2.0, 2.0, 4.0)});
  CHECK_THROWS_AS(sequence_rate(sing, 10), SchemaError);
  CHECK_THROWS_AS(sequence_rate(seq_of({MatN::identity(2)}), 4200), BudgetError);
}

TEST_CASE("injectivity_curve matches per-prefix rates") {
  Rng rng(17, 0xc);
  MatrixSeq seq;
  seq.n = 2;
  for (int i = 0; i < 6; ++i) seq.maps.push_back(LinearMap{random_sl2(rng), {}});
  std::vector<double> curve = injectivity_curve(seq, 60);
  REQUIRE(curve.size() == 6);
  for (int k = 1; k <= 6; ++k) {
    MatrixSeq prefix;
    prefix.n = 2;
    prefix.maps.assign(seq.maps.begin(), seq.maps.begin() + k);
    CHECK(curve[k - 1] == sequence_rate(prefix, 60, false).tau);
  }
  // rates of prefixes never increase
  for (int k = 1; k < 6; ++k) CHECK(curve[k] <= curve[k - 1] + 1e-15);
}

TEST_CASE("image_density: half-determinant shears and unimodular cross-check") {
  // printed shear: image lattice (1/2)Z x Z projects onto all of Z^2
  CHECK(image_density(half_shear(), 100) == 1.0);
  // det-1 sibling: image is the even-sum sublattice, density 1/2
  CHECK(image_density(half_shear_sl2(), 300) == doctest::Approx(0.5).epsilon(1e-4));

  // |det A| * D(image) == tau(A) for generic A
  Rng rng(5, 0x1dd);
  for (int i = 0; i < 4; ++i) {
    MatN a = random_sl2(rng);
    if (i % 2 == 1) a = a.times(MatN::from2(rng.uniform(0.7, 1.4), 0.0, 0.0, 1.0));
    double d = image_density(a, 300);
    double tau = sequence_rate(MatrixSeq::single(a), 1000, false).tau;
    CHECK(std::fabs(std::fabs(a.det()) * d - tau) < 0.005);
  }
}

TEST_CASE("difference_frequencies: lattice values are exact") {
  MatrixSeq lat = seq_of({MatN::from2(3.0, 0.0, 0.0, 1.0)});
  DifferenceTable t = difference_frequencies(lat, 200, 6);
  CHECK(t.n == 2);
  CHECK(t.V == 6);
  CHECK(t.at({0, 0, 0}) == 1.0);
  // lattice differences: present up to the O(V/R) boundary factor
  CHECK(t.at({3, 0, 0}) == 400.0 / 401.0);
  CHECK(t.at({-3, 0, 0}) == 400.0 / 401.0);
  CHECK(t.at({0, 1, 0}) == 400.0 / 401.0);
  CHECK(t.at({6, 2, 0}) == doctest::Approx(399.0 * 399.0 / (401.0 * 401.0)).epsilon(1e-12));
  // non-lattice differences never occur
  CHECK(t.at({1, 0, 0}) == 0.0);
  CHECK(t.at({2, 0, 0}) == 0.0);
  CHECK(t.at({-1, 1, 0}) == 0.0);
  CHECK_THROWS_AS(t.at({7, 0, 0}), SchemaError);

  // closed-form mean over the 13x13 window
  double sx = 401 + 2 * (400 + 399);          // v1 in {0,+-3,+-6}
  double sy = 13 * 401 - 2 * (1 + 2 + 3 + 4 + 5 + 6);  // v2 in [-6,6]
  double expect = sx * sy / (401.0 * 401.0 * 169.0);
  CHECK(t.mean() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("difference_frequencies: symmetry and reference equivalence") {
  Rng rng(31, 0xd1f);
  for (int i = 0; i < 3; ++i) {
    MatrixSeq seq;
    seq.n = 2;
    seq.maps.push_back(LinearMap{random_sl2(rng), {}});
    if (i == 2) seq.maps.push_back(LinearMap{random_sl2(rng), {}});
    DifferenceTable fast = difference_frequencies(seq, 40, 8);
    DifferenceTable ref = detail::difference_frequencies_reference(seq, 40, 8);
    REQUIRE(fast.rho.size() == ref.rho.size());
    for (std::size_t j = 0; j < fast.rho.size(); ++j) CHECK(fast.rho[j] == ref.rho[j]);
    // rho(v) = rho(-v), exactly
    for (i64 a = -8; a <= 8; ++a)
      for (i64 b = -8; b <= 8; ++b)
        CHECK(fast.at({a, b, 0}) == fast.at({-a, -b, 0}));
  }
}

TEST_CASE("difference_frequencies: mean approaches the pattern density") {
  // documentation-scale version of the mean-of-rho identity; the acceptance
  // binary runs the full-size variant (R = 2500, gap < 0.02)
  Rng rng(77, 0x727);
  MatrixSeq seq;
  seq.n = 2;
  seq.maps.push_back(LinearMap{random_sl2(rng), {}});
  DifferenceTable d = difference_frequencies(seq, 600, 50);
  double density = image_density(seq.maps[0].A, 500);
  CHECK(std::fabs(d.mean() - density) < 0.05);
}

TEST_CASE("mean_rate_geometric: closed forms") {
  MeanRate id = mean_rate_geometric(MatN::identity(2), 512);
  CHECK(id.value == 1.0);
  CHECK(id.std_error == 0.0);

  // mean over shifts of the quadrant rates: (1/2+1/2+1+1)/4 = 3/4, and the
  // stratified grid hits it exactly (the strata boundaries are half-integers)
  CHECK(mean_rate_geometric(half_shear_sl2(), 1024).value ==
        doctest::Approx(0.75).epsilon(1e-12));

  // rotation closed form 1 - (cos t + sin t - 1)^2
  for (double th : {kTwoPi / 10.0, kTwoPi / 8.0, kTwoPi / 6.0}) {
    double expect = 1.0 - std::pow(std::cos(th) + std::sin(th) - 1.0, 2);
    CHECK(mean_rate_geometric(rotation2(th), 2048).value ==
          doctest::Approx(expect).epsilon(5e-4));
  }

  // lattice with a short horizontal vector of length l < 1: mean rate = l,
  // for any choice of the complementary basis vector
  CHECK(mean_rate_geometric(MatN::from2(0.8, 0.0, 0.0, 1.25), 2048).value ==
        doctest::Approx(0.8).epsilon(5e-4));
  CHECK(mean_rate_geometric(MatN::from2(0.8, 0.37, 0.0, 1.25), 2048).value ==
        doctest::Approx(0.8).epsilon(5e-4));

  // l in (1,2): two regimes depending on the second vector's x-offset
  CHECK(mean_rate_geometric(MatN::from2(1.5, 0.75, 0.0, 2.0 / 3.0), 2048).value ==
        doctest::Approx(1.5 - 2.0 + 2.0 / 1.5).epsilon(5e-4));
  CHECK(mean_rate_geometric(MatN::from2(1.5, 0.25, 0.0, 2.0 / 3.0), 2048).value ==
        doctest::Approx(1.0 / 1.5 + 0.25 - 0.25 / 1.5).epsilon(5e-4));
}

TEST_CASE("fiber_cardinality_check: brute force equals the window count") {
  Rng rng(7, 0xf1be);
  std::vector<MatN> cases = {MatN::identity(2),
                             half_shear(),
                             half_shear_sl2(),
                             MatN::from2(2.0, 0.0, 0.0, 0.5),
                             rotation2(kTwoPi / 8.0),
                             random_sl2(rng),
                             random_sl2(rng)};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    FiberReport r = fiber_cardinality_check(cases[i], 500, 42 + (u64)i);
    CHECK(r.pass);
    CHECK(r.checked == 500);
  }
}

TEST_CASE("cube_union_density: tilings and collapsing shears") {
  // cubes centered on Z^2 tile the plane
  CubeUnionEstimate id = cube_union_density(seq_of({MatN::identity(2)}), 5000, 1);
  CHECK(id.density == 1.0);
  CHECK(id.window_exhausted == 0);

  // printed shear: centers on (1/2)Z x Z still cover everything
  CubeUnionEstimate ps = cube_union_density(seq_of({half_shear()}), 20000, 2);
  CHECK(ps.density == 1.0);

  // det-1 sibling: chains of cubes overlap 1/4 per neighbour, coverage 3/4
  CubeUnionEstimate cs = cube_union_density(seq_of({half_shear_sl2()}), 200000, 3);
  CHECK(cs.density == doctest::Approx(0.75).epsilon(0.005));
  CHECK(cs.window_exhausted == 0);

  // validation
  MatrixSeq with_shift = shifted(MatN::identity(2), {0.25, 0.0});
  CHECK_THROWS_AS(cube_union_density(with_shift, 100, 1), SchemaError);
  MatrixSeq five = seq_of({MatN::identity(2), MatN::identity(2), MatN::identity(2),
                           MatN::identity(2), MatN::identity(2)});
  CHECK_THROWS_AS(cube_union_density(five, 100, 1), SchemaError);
}

TEST_CASE("cube_union_density agrees with the empirical rate for random pairs") {
  Rng rng(2024, 0xce);
  for (int i = 0; i < 3; ++i) {
    MatrixSeq seq;
    seq.n = 2;
    seq.maps.push_back(LinearMap{random_sl2(rng), {}});
    seq.maps.push_back(LinearMap{random_sl2(rng), {}});
    CubeUnionEstimate c = cube_union_density(seq, 60000, 100 + (u64)i);
    double tau = sequence_rate(seq, 1000, false).tau;
    CHECK(std::fabs(c.density - tau) < 0.02);
    CHECK(c.window_exhausted == 0);
  }
}

TEST_CASE("weighted_projection: interpolation weights on cube vertices") {
  // integer input: a Dirac mass
  auto d = weighted_projection({3.0, -2.0, 0.0}, 2);
  REQUIRE(d.size() == 1);
  CHECK(d[0].first == IVec{3, -2, 0});
  CHECK(d[0].second == 1.0);

  // 1-d linear interpolation
  auto one = weighted_projection({0.25, 0.0, 0.0}, 1);
  std::map<i64, double> w;
  for (auto& [v, p] : one) w[v[0]] = p;
  CHECK(w.at(0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(w.at(1) == doctest::Approx(0.25).epsilon(1e-15));

  // center of a 2-d cell: four equal weights
  auto mid = weighted_projection({0.5, 0.5, 0.0}, 2);
  REQUIRE(mid.size() == 4);
  for (auto& [v, p] : mid) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));

  // weights always sum to one
  Rng rng(9, 0x99);
  for (int t = 0; t < 1000; ++t) {
    std::array<double, 3> u = {rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0), 0.0};
    double total = 0.0;
    for (auto& [v, p] : weighted_projection(u, 2)) {
      CHECK(p > 0.0);
      CHECK(std::fabs((double)v[0] - u[0]) < 1.0);
      CHECK(std::fabs((double)v[1] - u[1]) < 1.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("minkowski_check: box inequality and the odd-lattice equality") {
  // Z^2: every difference occurs, lhs = Card[S] >= Card[S/2]
  DifferenceTable z2 = difference_frequencies(seq_of({MatN::identity(2)}), 60, 10);
  MinkowskiReport b = minkowski_check(z2, 1.0, 5);
  CHECK(b.pass);
  CHECK(b.lhs > b.rhs);

  // kZ x Z with the cross-shaped S: both sides equal 1 exactly
  for (i64 k : {3, 5}) {
    MinkowskiReport ex = minkowski_lattice_example(k);
    CHECK(ex.lhs == 1.0);
    CHECK(ex.rhs == 1.0);
    CHECK(ex.pass);
  }

  // random generic matrices at documentation scale
  Rng rng(99, 0x3333);
  for (int i = 0; i < 3; ++i) {
    MatrixSeq seq;
    seq.n = 2;
    seq.maps.push_back(LinearMap{random_sl2(rng), {}});
    DifferenceTable d = difference_frequencies(seq, 400, 10);
    double tau = sequence_rate(seq, 400, false).tau;
    CHECK(minkowski_check(d, tau, 5).pass);
  }
}

TEST_CASE("hajos_witness: unimodular triangularization") {
  // shears are already unit triangular: a witness exists immediately
  auto up = hajos_witness(MatN::from2(1.0, 0.5, 0.0, 1.0), 20);
  REQUIRE(up.has_value());
  CHECK_FALSE(up->lower);
  auto lo = hajos_witness(MatN::from2(1.0, 0.0, 0.3, 1.0), 20);
  REQUIRE(lo.has_value());
  CHECK(lo->lower);

  // a rotation admits none (its mean rate is < 1)
  CHECK_FALSE(hajos_witness(rotation2(kTwoPi / 8.0), 20).has_value());

  // unimodular base sheared from the left: witness B with
  // (U_x C) B = [[1, 2+x],[0,1]]
  double x = std::sqrt(2.0) - 1.0;
  MatN c = cat_matrix();
  MatN ux = MatN::from2(1.0, x, 0.0, 1.0);
  auto w = hajos_witness(ux.times(c), 20);
  REQUIRE(w.has_value());
  CHECK(w->B[0][0] == 1);
  CHECK(w->B[0][1] == 1);
  CHECK(w->B[1][0] == -1);
  CHECK(w->B[1][1] == 0);
  // verify the product really is unit triangular with B in SL2(Z)
  MatN bm = MatN::from2((double)w->B[0][0], (double)w->B[0][1], (double)w->B[1][0],
                        (double)w->B[1][1]);
  CHECK(bm.det() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(unit_triangular(ux.times(c).times(bm), w->lower, 1e-9));

  // sheared from the right instead: no witness at this bound
  CHECK_FALSE(hajos_witness(c.times(ux), 20).has_value());

  // determinant precondition
  CHECK_THROWS_AS(hajos_witness(half_shear(), 5), SchemaError);

  // every returned witness triangularizes, across random SL2 inputs
  Rng rng(12, 0x8a);
  for (int i = 0; i < 20; ++i) {
    MatN a = random_sl2(rng);
    auto ww = hajos_witness(a, 6);
    if (!ww) continue;
    MatN bb = MatN::from2((double)ww->B[0][0], (double)ww->B[0][1], (double)ww->B[1][0],
                          (double)ww->B[1][1]);
    CHECK(unit_triangular(a.times(bb), ww->lower, 1e-9));
    CHECK(std::llround(bb.det()) == 1);
  }
}

TEST_CASE("roundoff_statistics: variance formula and genericity screen") {
  // lambda = (1): errors vanish identically, flagged non-generic
  RoundoffReport one = roundoff_statistics(std::vector<double>{1.0}, 200);
  CHECK(one.predicted_var == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK(one.empirical_var == 0.0);
  CHECK(one.non_generic);

  // lambda = (2,2): suffix products give 1/12 * (2^2 + 1) = 5/12; integer
  // multipliers produce no error at all, so the tuple is non-generic
  RoundoffReport two = roundoff_statistics(std::vector<double>{2.0, 2.0}, 500);
  CHECK(two.predicted_var == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
  CHECK(two.empirical_var == 0.0);
  CHECK(two.non_generic);

  // a single irrational multiplier: uniform errors, variance 1/12
  RoundoffReport r = roundoff_statistics(std::vector<double>{std::sqrt(2.0)}, 100000);
  CHECK_FALSE(r.non_generic);
  CHECK(r.empirical_var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  CHECK(r.ks[0] < 0.005);
  CHECK(r.predicted_discrepancy == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-12));

  // seeded irrational tuple: empirical variance tracks the suffix-product
  // formula and every step's errors are uniform
  Rng rng(1, 0x901);
  int k = 2 + (int)rng.below(5);
  std::vector<double> ls;
  for (int i = 0; i < k; ++i) ls.push_back(rng.uniform(1.1, 2.0));
  RoundoffReport s = roundoff_statistics(ls, 100000, 32);
  CHECK_FALSE(s.non_generic);
  CHECK(s.empirical_var / s.predicted_var == doctest::Approx(1.0).epsilon(0.01));
  for (double v : s.ks) CHECK(v < 0.005);
  CHECK((int)s.ks.size() == k);
  // per-step errors pooled into a histogram over [-1/2,1/2): flat for a
  // generic tuple
  REQUIRE(s.histogram.size() == 32);
  u64 total = 0, lo = s.histogram[0], hi = s.histogram[0];
  for (u64 c : s.histogram) {
    total += c;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(total == (u64)k * (2 * 100000 + 1));
  CHECK((double)(hi - lo) / (double)(total / 32) < 0.05);

  // validation
  CHECK_THROWS_AS(roundoff_statistics(std::vector<double>{}, 100), SchemaError);
  CHECK_THROWS_AS(roundoff_statistics(std::vector<double>{2.0}, 0), SchemaError);
}

TEST_CASE("roundoff_statistics: matrix version matches its covariance model") {
  Rng mr(4, 0x42);
  MatrixSeq seq;
  seq.n = 2;
  seq.maps.push_back(LinearMap{random_sl2(mr), {}});
  seq.maps.push_back(LinearMap{random_sl2(mr), {}});
  RoundoffReport2 m = roundoff_statistics(seq, 150);
  CHECK_FALSE(m.non_generic);
  for (int i = 0; i < 2; ++i) {
    CHECK(m.ks[i] < 0.01);
    for (int j = 0; j < 2; ++j)
      CHECK(m.empirical_cov[i][j] ==
            doctest::Approx(m.predicted_cov[i][j]).epsilon(0.005));
  }
  // predicted covariance is symmetric positive semidefinite
  CHECK(m.predicted_cov[0][1] == m.predicted_cov[1][0]);
  CHECK(m.predicted_cov[0][0] > 0.0);
  CHECK(m.predicted_cov[0][0] * m.predicted_cov[1][1] >=
        m.predicted_cov[0][1] * m.predicted_cov[1][0]);
}

TEST_CASE("localglobal_estimate: constant derivative reduces to the matrix rate") {
  // identity map: every Jacobian is the identity, rate 1 with zero spread
  double se = -1.0;
  double id = localglobal_estimate(*MapExpr::translation({0.0, 0.0}), 2, 4, 60, &se);
  CHECK(id == 1.0);
  CHECK(se == 0.0);

  // an integer linear map has one Jacobian everywhere and that matrix is a
  // bijection on Z^2: the estimate collapses to rate 1 with zero spread
  MapPtr cat = preset("cat");
  double got = localglobal_estimate(*cat, 3, 4, 60, &se);
  CHECK(got == 1.0);
  CHECK(se == 0.0);
}

TEST_CASE("localglobal_estimate: nonlinear map tracks the grid measurement") {
  MapPtr f5 = preset("f5");
  double se = 0.0;
  double est = localglobal_estimate(*f5, 1, 16, 100, &se);
  Grid g(2, 2048);
  DiscreteMap d = discretize(f5, g);
  double direct = rate_of_injectivity(d, 1);
  CHECK(std::fabs(est - direct) < 0.05);
  CHECK(se < 0.02);
}

TEST_CASE("random_sl2 generates bounded unimodular matrices") {
  Rng rng(8, 0x51);
  for (int i = 0; i < 100; ++i) {
    MatN a = random_sl2(rng);
    CHECK(a.det() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.norm_inf() < 4.0);
  }
}

TEST_CASE("tau curves of random sequences decay") {
  Rng rng(123, 0xc0);
  MatrixSeq seq;
  seq.n = 2;
  for (int i = 0; i < 20; ++i) seq.maps.push_back(LinearMap{random_sl2(rng), {}});
  std::vector<double> curve = injectivity_curve(seq, 250);
  CHECK(curve[19] < curve[0]);
  CHECK(curve[19] < 0.6);

  MatrixSeq rots;
  rots.n = 2;
  Rng rr(5, 0x10);
  for (int i = 0; i < 100; ++i)
    rots.maps.push_back(LinearMap{rotation2(rr.uniform(0.0, kTwoPi)), {}});
  std::vector<double> rc = injectivity_curve(rots, 120);
  CHECK(rc[99] < 0.3);
}
