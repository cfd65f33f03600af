#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/helpers.hpp"
#include "../support/naive_algos.hpp"
#include "spca/algos.hpp"
#include "spca/counterexamples.hpp"
#include "spca/error.hpp"

using namespace spca;
using testing_support::to_sym;

namespace {

SymMatrix random_cov(Index d, std::mt19937_64& gen) { return to_sym(oracle::random_psd(d, d + 3, gen)); }

void expect_candidate_ok(const CandidateVector& c) {
  EXPECT_NEAR(norm2(c.values), 1.0, 1e-10);
  EXPECT_LE(c.support.size(), c.budget);
  EXPECT_EQ(c.support, support(c.values));
}

}  // namespace

TEST(RtpmIterate, OneStepRecoveryOnRankOne) {
  const Vec v{0.5, -0.5, 0.5, 0, 0, -0.5};
  SymMatrix m(6);
  m.add_outer(1.0, v);
  const CovOperator op = CovOperator::dense(m);
  const auto res = rtpm_iterate(op, CandidateVector::basis(6, 2), 4);
  EXPECT_FALSE(res.degenerate);
  EXPECT_LE(sin2_angle(res.next.values, v), 1e-15);
  expect_candidate_ok(res.next);
}

TEST(RtpmIterate, FixedPointAndDegenerate) {
  const CovOperator id = CovOperator::dense(SymMatrix::identity(4));
  const auto e1 = CandidateVector::basis(4, 0);
  EXPECT_EQ(rtpm_iterate(id, e1, 2).next.values, e1.values);
  const CovOperator zero = CovOperator::dense(SymMatrix(4));
  const auto res = rtpm_iterate(zero, e1, 2);
  EXPECT_TRUE(res.degenerate);
  EXPECT_EQ(res.next.values, e1.values);
}

TEST(RtpmIterate, ScaleInvariance) {
  std::mt19937_64 gen(3);
  const SymMatrix m = random_cov(15, gen);
  SymMatrix m3 = m;
  m3.scale(3.7);
  const CovOperator a = CovOperator::dense(m), b = CovOperator::dense(m3);
  CandidateVector u = CandidateVector::basis(15, 4), w = u;
  for (int t = 0; t < 20; ++t) {
    u = rtpm_iterate(a, u, 5).next;
    w = rtpm_iterate(b, w, 5).next;
    EXPECT_LE(max_abs_diff(u.values, w.values), 1e-12);
  }
}

TEST(Rtpm, SingleRestartOnRankOneRecoversInOneStep) {
  const Vec v{0, 0.6, 0, 0.8, 0};
  auto m = std::make_shared<SymMatrix>(5);
  m->add_outer(2.0, v);
  RtpmConfig cfg;
  cfg.r = 2;
  cfg.T = 1;
  cfg.restarts = {3};
  const auto res = rtpm(std::make_shared<const CovOperator>(CovOperator::dense(*m)), cfg);
  EXPECT_LE(sin2_angle(res.output.values, v), 1e-15);
  EXPECT_EQ(res.restart, 3u);
}

TEST(Rtpm, DeterministicAcrossThreadCounts) {
  const auto inst = build_spiked_general(40, 4, 0.3);
  const Dataset x = sample_gaussian(inst, 400, 5);
  for (RtpmMode mode : {RtpmMode::full, RtpmMode::disjoint}) {
    RtpmConfig cfg;
    cfg.r = 8;
    cfg.T = 10;
    cfg.mode = mode;
    cfg.threads = 1;
    const auto a = rtpm(x, cfg);
    cfg.threads = 4;
    const auto b = rtpm(x, cfg);
    EXPECT_EQ(a.output.values, b.output.values);
    EXPECT_EQ(a.restart, b.restart);
    EXPECT_EQ(a.score, b.score);
    const auto c = rtpm(x, cfg);
    EXPECT_EQ(a.output.values, c.output.values);
    expect_candidate_ok(a.output);
    EXPECT_LE(a.output.support.size(), 8u);
  }
}

TEST(Rtpm, MatrixFreeMatchesDense) {
  const auto inst = build_spiked_general(50, 5, 0.25);
  const Dataset x = sample_gaussian(inst, 300, 2);
  for (RtpmMode mode : {RtpmMode::full, RtpmMode::disjoint}) {
    RtpmConfig cfg;
    cfg.r = 10;
    cfg.T = 6;
    cfg.mode = mode;
    cfg.checkpoints = {1, 2, 3, 4, 5, 6};
    cfg.backend = OperatorBackend::dense;
    const auto a = rtpm(x, cfg);
    cfg.backend = OperatorBackend::matrix_free;
    const auto b = rtpm(x, cfg);
    ASSERT_EQ(a.checkpoints.size(), b.checkpoints.size());
    for (std::size_t k = 0; k < a.checkpoints.size(); ++k)
      EXPECT_LE(max_abs_diff(a.checkpoints[k].output.values, b.checkpoints[k].output.values), 1e-10);
    EXPECT_EQ(a.samples_used, b.samples_used);
  }
}

TEST(Rtpm, DisjointModeBatching) {
  const Dataset x = sample_gaussian(build_spiked_identity(10, 2), 23, 1);
  RtpmConfig cfg;
  cfg.r = 2;
  cfg.T = 5;
  cfg.mode = RtpmMode::disjoint;
  EXPECT_EQ(rtpm(x, cfg).samples_used, 20u);
  cfg.T = 24;
  EXPECT_THROW(rtpm(x, cfg), ParameterError);
  cfg.T = 1;
  const auto one = rtpm(x, cfg);
  cfg.mode = RtpmMode::full;
  EXPECT_EQ(rtpm(x, cfg).output.values, one.output.values);
}

TEST(Rtpm, RejectsBadConfig) {
  const Dataset x = sample_gaussian(build_spiked_identity(10, 2), 20, 1);
  RtpmConfig cfg;
  cfg.T = 0;
  EXPECT_THROW(rtpm(x, cfg), ParameterError);
  cfg.T = 1;
  cfg.r = 0;
  EXPECT_THROW(rtpm(x, cfg), ParameterError);
  cfg.r = 1;
  cfg.restarts = {10};
  EXPECT_THROW(rtpm(x, cfg), ParameterError);
}

TEST(Rtpm, EarlyStopStillSelects) {
  const Dataset x = sample_gaussian(build_spiked_general(30, 3, 0.5), 3000, 4);
  RtpmConfig cfg;
  cfg.r = 6;
  cfg.T = 100;
  cfg.tolerance = 1e-12;
  const auto res = rtpm(x, cfg);
  EXPECT_LT(res.iterations_used, 100u);
  cfg.tolerance = 0;
  EXPECT_LE(sin2_angle(rtpm(x, cfg).output.values, res.output.values), 1e-10);
}

TEST(Rtpm, PopulationPotentialIsMonotone) {
  for (double gamma : {0.1, 0.3}) {
    SupportSpec spec;
    spec.seed = 3;
    spec.random_signs = true;
    const auto inst = build_spiked_general(60, 6, gamma, spec);
    const CovOperator op = CovOperator::dense(inst.sigma);
    for (Index i = 0; i < 6; ++i) {
      for (Index r : {6u, 12u}) {
        CandidateVector u = CandidateVector::basis(60, i);
        double prev = std::abs(oracle::dot(u.values, inst.v()));
        for (int t = 1; t <= 50; ++t) {
          u = rtpm_iterate(op, u, r).next;
          const double cur = std::abs(oracle::dot(u.values, inst.v()));
          EXPECT_GE(cur, prev - 1e-12);
          prev = cur;
        }
      }
    }
  }
}

TEST(DiagThresh, Examples) {
  const auto c = diag_thresh(SymMatrix::diagonal(Vec{3, 2, 1}), 2);
  EXPECT_EQ(c.support, (std::vector<Index>{0}));
  EXPECT_EQ(c.values, (Vec{1, 0, 0}));
  std::mt19937_64 gen(1);
  const SymMatrix m = random_cov(7, gen);
  EXPECT_LE(sin2_angle(diag_thresh(m, 7).values, top_eigenpair(m).pair.vector), 1e-20);
  SupportSpec spec;
  spec.indices = {0, 1};
  const auto inst = build_spiked_identity(6, 2, spec);
  EXPECT_NEAR(inst.sigma(0, 0), 0.95, 1e-15);
  EXPECT_LE(sin2_angle(diag_thresh(inst.sigma, 2).values, inst.v()), 1e-15);
}

TEST(CovThresh, Examples) {
  std::mt19937_64 gen(2);
  const SymMatrix m = random_cov(6, gen);
  EXPECT_LE(sin2_angle(cov_thresh(m, 1e-9, 0).values, top_eigenpair(m).pair.vector), 1e-20);
  const auto c = cov_thresh(SymMatrix(2, {1, 0.3, 0.3, 1}), 0.5);
  EXPECT_EQ(c.values, (Vec{1, 0}));
  EXPECT_THROW(cov_thresh(SymMatrix(2, {0.1, 0.0, 0.0, 0.1}), 0.5), DegenerateError);
}

TEST(GreedyCorr, Examples) {
  const auto g = greedy_corr_support(SymMatrix::identity(6), 3, 4);
  EXPECT_EQ(g, (std::vector<Index>{0, 1, 4}));
  std::mt19937_64 gen(5);
  const SymMatrix m = random_cov(8, gen);
  EXPECT_LE(sin2_angle(greedy_corr(m, 8, 2).values, top_eigenpair(m).pair.vector), 1e-20);
  EXPECT_THROW(greedy_corr(m, 9, 0), ParameterError);
  EXPECT_THROW(greedy_corr(m, 2, 8), ParameterError);
}

TEST(GreedyCorr, SupportMatchesBruteForceSquare) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 40; ++trial) {
    const Index d = 3 + trial % 28;
    const auto a = oracle::random_psd(d, 4, gen);
    const SymMatrix m = to_sym(a);
    const Eigen::MatrixXd sq = m.as_eigen() * m.as_eigen();
    const Index s = 1 + trial % d, i_star = trial % d;
    std::vector<double> key(d);
    for (Index i = 0; i < d; ++i) key[i] = std::abs(sq(Eigen::Index(i_star), Eigen::Index(i)));
    auto expect = naive::largest(key, s);
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(greedy_corr_support(m, s, i_star), expect);
  }
}

TEST(Baselines, MatchNaiveTranscriptions) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 4 + trial % 20;
    const SymMatrix m = to_sym(oracle::random_psd(d, 2 + trial % 5, gen));
    const Index s = 1 + trial % d;
    const auto dt = diag_thresh(m, s);
    EXPECT_EQ(dt.values, naive::diag_thresh(m, s));
    expect_candidate_ok(dt);
    const auto ct = cov_thresh(m, 0.3);
    EXPECT_EQ(ct.values, naive::cov_thresh(m, 0.3));
    const auto gc = greedy_corr(m, s, trial % d);
    EXPECT_EQ(gc.values, naive::greedy_corr(m, s, trial % d));
    EXPECT_LE(gc.support.size(), s);
  }
}

TEST(TopSProject, Examples) {
  const auto u = CandidateVector::make(Vec{0.8, 0.6, 0, 0}, 4);
  EXPECT_EQ(top_s_project(u, 2).values, u.values);
  EXPECT_EQ(top_s_project(u, 1).values, (Vec{1, 0, 0, 0}));
}

TEST(TopSProject, ProperHypothesisBound) {
  std::mt19937_64 gen(21);
  const double delta = 0.05;
  for (int trial = 0; trial < 500; ++trial) {
    const Index d = 30, s = 1 + trial % 6;
    Vec v = oracle::truncate(oracle::random_unit(d, gen), s);
    normalize(v);
    Vec noise = oracle::random_unit(d, gen);
    const double c = oracle::dot(noise, v);
    for (Index i = 0; i < d; ++i) noise[i] -= c * v[i];
    normalize(noise);
    const double corr2 = 1.0 - delta * (trial % 100) / 100.0;
    Vec u(d);
    for (Index i = 0; i < d; ++i) u[i] = std::sqrt(corr2) * v[i] + std::sqrt(1 - corr2) * noise[i];
    const auto p = top_s_project(CandidateVector::make(u, d), s);
    const double out = oracle::dot(p.values, v);
    EXPECT_GE(out * out, 1 - 5 * delta);
  }
}

TEST(FindGapIndex, Examples) {
  EXPECT_EQ(find_gap_index(Vec{1.0, 0.95}, 1, 0.05), 1u);
  EXPECT_EQ(find_gap_index(Vec{1, 1, 1, 0.5}, 3, 0.3), 3u);
  EXPECT_EQ(find_gap_index(Vec{1.0, 0.9, 0.81, 0.729}, 3, 0.3), 1u);
  EXPECT_THROW(find_gap_index(Vec{1, 1, 1, 1}, 3, 0.3), InstanceError);
  EXPECT_THROW(find_gap_index(Vec{1, 1}, 2, 0.3), ParameterError);
}

TEST(FindGapIndex, GuaranteesHeadRatio) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> unif(0.6, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Index k = 1 + trial % 6;
    const double beta = 0.3;
    Vec lam{1.0};
    for (Index i = 0; i < k; ++i) lam.push_back(lam.back() * unif(gen));
    if (lam[k] / lam[0] > 1 - beta) continue;  // gap condition of the model
    const Index p = find_gap_index(lam, k, beta);
    EXPECT_GE(lam[p - 1] / lam[0], 1 - beta - 1e-12);
  }
}

TEST(Deflation, ExactOracleOnDiagonal) {
  auto op = std::make_shared<const CovOperator>(CovOperator::dense(SymMatrix::diagonal(Vec{3, 2, 1})));
  const auto comps = kspca_deflate(op, 2, exact_oracle());
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_LE(max_abs_diff(comps[0], Vec{1, 0, 0}), 1e-12);
  EXPECT_LE(max_abs_diff(comps[1], Vec{0, 1, 0}), 1e-12);
  const auto single = kspca_deflate(op, 1, [](const CovOperator&) { return Vec{0, 0.6, 0.8}; });
  EXPECT_EQ(single[0], (Vec{0, 0.6, 0.8}));
}

TEST(Deflation, ComponentsOrthonormalAndFailureDetected) {
  std::mt19937_64 gen(10);
  auto op = std::make_shared<const CovOperator>(CovOperator::dense(random_cov(12, gen)));
  RtpmConfig cfg;
  cfg.r = 4;
  cfg.T = 20;
  const auto comps = kspca_deflate(op, 4, rtpm_oracle(cfg));
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (std::size_t j = 0; j < comps.size(); ++j)
      EXPECT_NEAR(oracle::dot(comps[i], comps[j]), i == j ? 1.0 : 0.0, 1e-8);
  const Vec fixed{1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_THROW(kspca_deflate(op, 2, [&](const CovOperator&) { return fixed; }), NumericalError);
}

TEST(Deflation, BarrierSecondRoundIsDense) {
  const auto b = build_deflation_barrier(50, 0.1, 0.2);
  auto op = std::make_shared<const CovOperator>(CovOperator::dense(b.inst.instance.sigma));
  int round = 0;
  Vec second;
  const auto comps = kspca_deflate(op, 2, [&](const CovOperator& m) {
    if (round++ == 0) return b.u;
    second = top_eigenpair(m.to_dense()).pair.vector;
    return second;
  });
  EXPECT_EQ(nnz(second), 50u);
  for (double x : second) EXPECT_GT(std::abs(x), 1e-8);
}
