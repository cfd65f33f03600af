#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/helpers.hpp"
#include "spca/error.hpp"
#include "spca/linalg.hpp"

using namespace spca;
using testing_support::to_mat;
using testing_support::to_sym;

TEST(SymMatrix, RejectsAsymmetricEntries) {
  EXPECT_THROW(SymMatrix(2, {1, 2, 3, 4}), ParameterError);
  EXPECT_THROW(SymMatrix(0), ParameterError);
  EXPECT_NO_THROW(SymMatrix(2, {1, 2, 2, 4}));
}

TEST(TopR, Examples) {
  EXPECT_EQ(top_r(Vec{3, -5, 2, 0}, 2), (Vec{3, -5, 0, 0}));
  EXPECT_EQ(top_r(Vec{1, -1}, 1), (Vec{1, 0}));
  const Vec v{0.3, -0.1, 2.0, 7.0};
  EXPECT_EQ(top_r(v, 4), v);
  EXPECT_THROW(top_r(v, 0), ParameterError);
  EXPECT_THROW(top_r(v, 5), ParameterError);
}

TEST(TopR, MatchesSortOracleAndIsIdempotent) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> small(-3, 3);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t d = 1 + trial % 17;
    Vec v(d);
    // Small integers force plenty of magnitude ties.
    for (double& x : v) x = small(gen);
    const std::size_t r = 1 + trial % d;
    const Vec got = top_r(v, r);
    EXPECT_EQ(got, oracle::truncate(v, r));
    EXPECT_EQ(top_r(got, r), got);
    EXPECT_LE(nnz(got), r);
    double kept_min = INFINITY, dropped_max = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (got[i] != 0) kept_min = std::min(kept_min, std::abs(v[i]));
      else dropped_max = std::max(dropped_max, std::abs(v[i]));
    }
    if (nnz(got) > 0) EXPECT_LE(dropped_max, kept_min);
  }
}

TEST(ThresholdEntries, Examples) {
  const SymMatrix m(2, {1, 0.5, 0.5, 2});
  EXPECT_EQ(threshold_entries(m, 0.6), SymMatrix(2, {1, 0, 0, 2}));
  EXPECT_EQ(threshold_entries(m, 3.0), SymMatrix(2));
  EXPECT_EQ(threshold_entries(m, 0.1), m);
  EXPECT_THROW(threshold_entries(m, 0.0), ParameterError);
  EXPECT_THROW(threshold_entries(m, -1.0), ParameterError);
}

TEST(ThresholdEntries, CommutesWithSymmetricPermutation) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const auto a = oracle::random_symmetric(n, gen);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    oracle::Mat pa(n, oracle::Vec(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) pa[i][j] = a[perm[i]][perm[j]];
    const auto lhs = to_mat(threshold_entries(to_sym(pa), 0.7));
    const auto t = to_mat(threshold_entries(to_sym(a), 0.7));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(lhs[i][j], t[perm[i]][perm[j]]);
  }
}

TEST(Sin2Angle, Examples) {
  EXPECT_DOUBLE_EQ(sin2_angle(Vec{1, 2, 3}, Vec{1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(sin2_angle(Vec{1, 0}, Vec{0, 3}), 1.0);
  const double r = 1 / std::sqrt(2.0);
  EXPECT_NEAR(sin2_angle(Vec{r, r}, Vec{1, 0}), 0.5, 1e-15);
  EXPECT_THROW(sin2_angle(Vec{0, 0}, Vec{1, 0}), ParameterError);
}

TEST(Rayleigh, Examples) {
  std::mt19937_64 gen(3);
  const Vec u = oracle::random_unit(5, gen);
  EXPECT_NEAR(rayleigh(SymMatrix::identity(5), u), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(rayleigh(SymMatrix::diagonal(Vec{2, 1}), Vec{1, 0}), 2.0);
  const double r = 1 / std::sqrt(2.0);
  EXPECT_NEAR(rayleigh(SymMatrix(2, {1, 1, 1, 1}), Vec{r, r}), 2.0, 1e-15);
  EXPECT_THROW(rayleigh(SymMatrix::identity(2), Vec{1, 1}), ParameterError);
}

TEST(EigTopM, Examples) {
  const auto e = eig_top_m(SymMatrix::diagonal(Vec{3, 2, 1}), 2);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_NEAR(e[0].value, 3, 1e-14);
  EXPECT_NEAR(e[1].value, 2, 1e-14);
  EXPECT_LT(max_abs_diff(e[0].vector, Vec{1, 0, 0}), 1e-14);
  EXPECT_LT(max_abs_diff(e[1].vector, Vec{0, 1, 0}), 1e-14);

  const auto f = eig_top_m(SymMatrix(2, {0, 1, 1, 0}), 1);
  const double r = 1 / std::sqrt(2.0);
  EXPECT_NEAR(f[0].value, 1.0, 1e-14);
  EXPECT_LT(max_abs_diff(f[0].vector, Vec{r, r}), 1e-14);
  EXPECT_THROW(eig_top_m(SymMatrix::identity(3), 4), ParameterError);
  EXPECT_THROW(eig_top_m(SymMatrix::identity(3), 0), ParameterError);
}

TEST(EigTopM, MatchesJacobiOracleOnSmallMatrices) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto a = oracle::random_symmetric(n, gen);
    const auto ref = oracle::jacobi(a);
    const auto got = eig_top_m(to_sym(a), n);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(got[k].value, ref.values[k], 1e-8);
      EXPECT_NEAR(norm2(got[k].vector), 1.0, 1e-12);
      // sign convention: largest-magnitude entry positive
      std::size_t best = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (std::abs(got[k].vector[i]) > std::abs(got[k].vector[best])) best = i;
      EXPECT_GT(got[k].vector[best], 0.0);
    }
  }
}

TEST(TopEigenpair, RepeatedTopEigenvalueResolvesToLowestBasisVector) {
  const auto t = top_eigenpair(SymMatrix::identity(3));
  EXPECT_EQ(t.cluster, 3u);
  EXPECT_LT(max_abs_diff(t.pair.vector, Vec{1, 0, 0}), 1e-14);
  const auto u = top_eigenpair(SymMatrix::diagonal(Vec{1, 2, 2}));
  EXPECT_EQ(u.cluster, 2u);
  EXPECT_LT(max_abs_diff(u.pair.vector, Vec{0, 1, 0}), 1e-14);
}

TEST(Opnorm, Examples) {
  EXPECT_EQ(opnorm(SymMatrix(3)), 0.0);
  EXPECT_NEAR(opnorm(SymMatrix::diagonal(Vec{-4, 3})), 4.0, 1e-14);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> unif(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 5 + trial;
    const double tau = 0.3;
    SymMatrix m(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) m.set(i, j, tau * unif(gen));
    EXPECT_LE(opnorm(m), d * tau);
  }
}

TEST(Householder, Examples) {
  const Vec x{0.6, 0.8};
  EXPECT_EQ(householder_to(x, x), SymMatrix::identity(2));
  const SymMatrix q = householder_to(Vec{1, 0}, Vec{0, 1});
  EXPECT_NEAR(q(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(q(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(q(1, 1), 0.0, 1e-15);
  EXPECT_THROW(householder_to(Vec{1, 1}, Vec{1, 0}), ParameterError);
}

TEST(Householder, ReflectsAndIsOrthogonal) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 12;
    const Vec x = oracle::random_unit(d, gen), t = oracle::random_unit(d, gen);
    const SymMatrix q = householder_to(x, t);
    const Vec qx = matvec(q, x);
    EXPECT_LE(max_abs_diff(qx, t), 1e-12);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < d; ++k) s += q(i, k) * q(j, k);
        EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-12);
      }
  }
}

TEST(GoodOrthoBasis, SmallCases) {
  const auto b1 = good_ortho_basis(1);
  ASSERT_EQ(b1.columns.size(), 1u);
  EXPECT_EQ(b1.columns[0], Vec{1.0});

  const auto b2 = good_ortho_basis(2);
  const double r = 1 / std::sqrt(2.0);
  EXPECT_LT(max_abs_diff(b2.columns[0], Vec{r, r}), 1e-15);
  EXPECT_NEAR(b2.columns[1][0], r, 1e-12);
  EXPECT_NEAR(std::abs(b2.columns[1][1]), r, 1e-12);
}

TEST(GoodOrthoBasis, FirstCoordinateIsUniform) {
  for (std::size_t d : {3u, 7u, 16u, 25u, 40u}) {
    const auto b = good_ortho_basis(d);
    ASSERT_EQ(b.columns.size(), d);
    EXPECT_LE(b.gram_error(), 1e-10);
    for (std::size_t i = 1; i < d; ++i) EXPECT_NEAR(b.columns[i][0], 1 / std::sqrt(double(d)), 1e-10);
  }
  const auto b25 = good_ortho_basis(25);
  for (std::size_t i = 1; i < 25; ++i) EXPECT_NEAR(b25.columns[i][0], 0.2, 1e-10);
}

TEST(Restrict, Examples) {
  const SymMatrix m = SymMatrix::diagonal(Vec{1, 2, 3});
  const std::vector<Index> all{0, 1, 2}, sub{0, 2};
  EXPECT_EQ(restrict(m, all), m);
  EXPECT_EQ(restrict(m, sub), SymMatrix::diagonal(Vec{1, 3}));
  EXPECT_THROW(restrict(m, std::vector<Index>{0, 3}), ParameterError);
  EXPECT_THROW(restrict(m, std::vector<Index>{}), ParameterError);

  std::mt19937_64 gen(2);
  const auto a = oracle::random_symmetric(5, gen);
  const SymMatrix r = restrict(to_sym(a), std::vector<Index>{1, 3});
  EXPECT_EQ(r(0, 0), a[1][1]);
  EXPECT_EQ(r(0, 1), a[1][3]);
  EXPECT_EQ(r(1, 1), a[3][3]);
}

namespace {

double truncation_bound(double c, double ratio) {
  const double gap = 1.0 - c * c;
  return std::sqrt(ratio) * std::min(std::sqrt(std::max(gap, 0.0)), (1.0 + std::sqrt(ratio)) * gap);
}

}  // namespace

TEST(Truncation, TwoSidedBoundOnRandomTriples) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::size_t d = 4 + trial % 40;
    const std::size_t s = 1 + trial % std::min<std::size_t>(d, 6);
    const std::size_t r = s + trial % (d - s + 1);
    Vec v = oracle::random_unit(d, gen);
    v = oracle::truncate(v, s);
    normalize(v);
    // Mix u towards v so correlations span the whole range.
    Vec u = oracle::random_unit(d, gen);
    const double mix = (trial % 10) / 10.0;
    for (std::size_t i = 0; i < d; ++i) u[i] = mix * v[i] * 3 + u[i];
    normalize(u);
    const double c = std::abs(oracle::dot(u, v));
    const double ct = std::abs(oracle::dot(top_r(u, r), v));
    EXPECT_LE(std::abs(ct - c), truncation_bound(c, double(s) / double(r)) + 1e-12);
  }
}
