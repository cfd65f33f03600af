#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "spca/algos.hpp"
#include "spca/counterexamples.hpp"
#include "spca/error.hpp"

using namespace spca;

namespace {

bool cert_passes(const CounterexampleInstance& inst, const std::string& name) {
  for (const auto& c : inst.certificates)
    if (c.name == name) return c.pass();
  ADD_FAILURE() << "missing certificate " << name;
  return false;
}

}  // namespace

TEST(RegularGraph, CompleteGraphOnFour) {
  const auto g = random_regular_graph(4, 3, 1);
  ASSERT_TRUE(g.is_valid());
  const SymMatrix a = g.adjacency();
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) EXPECT_EQ(a(i, j), i == j ? 0.0 : 1.0);
}

TEST(RegularGraph, RowSumsSymmetryAndHollowDiagonal) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto [u, r] : {std::pair<Index, Index>{6, 2}, {10, 3}, {31, 6}, {50, 7}}) {
      if (u * r % 2) continue;
      const auto g = random_regular_graph(u, r, seed);
      ASSERT_TRUE(g.is_valid());
      const SymMatrix a = g.adjacency();
      for (Index i = 0; i < u; ++i) {
        double sum = 0;
        EXPECT_EQ(a(i, i), 0.0);
        for (Index j = 0; j < u; ++j) {
          sum += a(i, j);
          EXPECT_EQ(a(i, j), a(j, i));
        }
        EXPECT_EQ(sum, static_cast<double>(r));
      }
    }
  }
}

TEST(RegularGraph, DeterministicPerSeed) {
  EXPECT_EQ(random_regular_graph(40, 5 + 1, 9).neighbors, random_regular_graph(40, 6, 9).neighbors);
}

TEST(RegularGraph, SpectralBound) {
  const double bound = 3.0 * std::sqrt(24.0);
  const auto g = random_regular_graph(100, 24, 3, bound);
  const Vec ev = eigenvalues(g.adjacency());
  EXPECT_NEAR(ev.front(), 24.0, 1e-9);
  EXPECT_LE(std::max(std::abs(ev[1]), std::abs(ev.back())), bound);
}

TEST(RegularGraph, RejectsBadParameters) {
  EXPECT_THROW(random_regular_graph(5, 3, 1), ParameterError);
  EXPECT_THROW(random_regular_graph(4, 4, 1), ParameterError);
}

TEST(Covthresh, PreconditionViolationNamed) {
  CovthreshParams p;
  p.s = 4;
  p.u = 1000;
  p.tau = 0.02;
  try {
    build_covthresh_instance(p);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("u <= 1/(144 tau^2)"), std::string::npos) << e.what();
  }
}

TEST(Covthresh, DefaultInstanceCertificates) {
  // The preconditions are infeasible below u of roughly 9250; the default size
  // is built relaxed and every lemma inequality is still checked.
  CovthreshParams params;
  params.enforce_preconditions = false;
  const auto inst = build_covthresh_instance(params);
  EXPECT_EQ(inst.family, "covthresh");
  const Certificate* fail = inst.first_failure();
  EXPECT_EQ(fail, nullptr) << (fail ? fail->describe() : "");
  const Index s = 4, u = 1501;
  const double tau = 0.004;
  EXPECT_EQ(inst.instance.sigma.dim(), s + u);
  EXPECT_GE(min_eigenvalue(inst.instance.sigma), -1e-10);
  // S block is ½(I + vvᵀ) with v = 1_s/√s.
  for (Index i = 0; i < s; ++i)
    for (Index j = 0; j < s; ++j) EXPECT_NEAR(inst.instance.sigma(i, j), 0.5 * ((i == j) + 1.0 / s), 1e-15);
  const double r = inst.param("r_deg"), p = r / (u - 1.0);
  for (Index i = s; i < s + 50; ++i)
    for (Index j = i + 1; j < s + 50; ++j) {
      const double x = inst.instance.sigma(i, j);
      EXPECT_TRUE(std::abs(x - 1.5 * tau * (1 - p)) < 1e-15 || std::abs(x + 1.5 * tau * p) < 1e-15) << x;
    }
  const auto rep = verify_instance(inst);
  EXPECT_TRUE(rep.pass());
}

TEST(Covthresh, RelaxedBuildReportsViolations) {
  CovthreshParams p;
  p.s = 4;
  p.u = 201;
  p.tau = 0.02;
  p.enforce_preconditions = false;
  const auto inst = build_covthresh_instance(p);
  EXPECT_FALSE(cert_passes(inst, "precondition 4s + 8/tau <= u"));
  for (const auto& c : inst.certificates)
    if (c.name.rfind("precondition", 0) == 0) EXPECT_TRUE(c.informational);
  const Certificate* fail = inst.first_failure();
  if (fail) EXPECT_EQ(fail->name.rfind("precondition", 0), std::string::npos);
}

TEST(Greedycorr, EigenstructureAndCorrelations) {
  for (Index s : {3u, 4u, 16u}) {
    GreedycorrParams p;
    p.s = s;
    const auto inst = build_greedycorr_instance(p);
    const Certificate* fail = inst.first_failure();
    EXPECT_EQ(fail, nullptr) << (fail ? fail->describe() : "");
    EXPECT_EQ(inst.instance.sigma.dim(), 2 * s - 1);
    const Vec ev = eigenvalues(inst.instance.sigma);
    EXPECT_NEAR(ev[0], 1.0, 1e-10);
    for (Index i = 1; i < s; ++i) EXPECT_NEAR(ev[i], 0.9, 1e-10);
    for (Index i = s; i < 2 * s - 1; ++i) EXPECT_NEAR(ev[i], 0.0, 1e-10);
    EXPECT_TRUE(cert_passes(inst, "Gram({v, u_r}) - I"));
    const auto rep = verify_instance(inst);
    EXPECT_TRUE(rep.pass());
  }
  // At s = 2 the decoy correlation does not exceed the on-support one.
  EXPECT_FALSE(build_greedycorr_instance(GreedycorrParams{2}).certificates_pass());
  EXPECT_THROW(build_greedycorr_instance(GreedycorrParams{1}), ParameterError);
}

TEST(Greedycorr, PopulationGreedyPicksDecoys) {
  const auto inst = build_greedycorr_instance(GreedycorrParams{});
  const auto c = greedy_corr(inst.instance.sigma, 16, 0);
  EXPECT_GE(sin2_angle(c.values, inst.instance.v()), 1.0 - 1.0 / 16);
}

TEST(Diagthresh, DefaultCertificateAndFailure) {
  const auto inst = build_diagthresh_instance(DiagthreshParams{});
  EXPECT_TRUE(inst.certificates_pass());
  ASSERT_EQ(inst.flags.size(), 1u);
  EXPECT_EQ(inst.flags[0], "reconstruction");
  EXPECT_GE(min_eigenvalue(inst.instance.sigma), -1e-10);
  const auto c = diag_thresh(inst.instance.sigma, 8);
  EXPECT_NEAR(sin2_angle(c.values, inst.instance.v()), 1.0, 1e-12);
  for (Index i : c.support) EXPECT_GE(i, 8u);
  EXPECT_LE(sin2_angle(top_eigenpair(inst.instance.sigma).pair.vector, inst.instance.v()), 1e-10);
}

TEST(Diagthresh, SingleSpikeCannotHide) {
  DiagthreshParams p;
  p.d = 100;
  p.s = 1;
  p.lam1 = 10.0;
  EXPECT_THROW(build_diagthresh_instance(p), ConstructionError);
  p.lam1 = 0.4;
  EXPECT_THROW(build_diagthresh_instance(p), ParameterError);
}

TEST(Barrier, ConstructionFacts) {
  const auto b = build_deflation_barrier(50, 0.1, 0.2);
  EXPECT_TRUE(b.inst.certificates_pass());
  const Vec& v1 = b.inst.instance.components.front();
  const double uv = b.u[0] * v1[0] + b.u[1] * v1[1];
  EXPECT_NEAR(uv * uv, 0.9, 1e-15);
  EXPECT_EQ(nnz(b.u), 3u);
  EXPECT_NEAR(b.c(0, 0), 1.0 + 0.8 * 0.9 / 2, 1e-15);
  EXPECT_NEAR(b.c(0, 1), -0.8 * std::sqrt(0.9) / 2, 1e-15);
  EXPECT_NEAR(b.c(1, 1), 0.4, 1e-15);
  const Vec ev = eigenvalues(b.inst.instance.sigma);
  EXPECT_NEAR(ev[0], 10.0, 1e-10);
  EXPECT_NEAR(ev[1], 1.0, 1e-10);
  EXPECT_NEAR(ev[2], 0.8, 1e-10);
  EXPECT_THROW(build_deflation_barrier(3, 0.1, 0.2), ParameterError);
}

TEST(Barrier, VerifierReportsDenseEigenvector) {
  const auto rep = verify_barrier(build_deflation_barrier(50, 0.1, 0.2));
  EXPECT_TRUE(rep.pass());
  double nnz_param = -1;
  for (const auto& [k, v] : rep.params)
    if (k == "nnz") nnz_param = v;
  EXPECT_EQ(nnz_param, 50.0);
}

TEST(VerifyAll, EveryFamilyReported) {
  const auto reps = verify_all();
  ASSERT_EQ(reps.size(), 4u);
  for (const auto& r : reps) EXPECT_TRUE(r.error.empty()) << r.family << ": " << r.error;
}

TEST(InstanceIo, RoundTrip) {
  const auto inst = build_greedycorr_instance(GreedycorrParams{5});
  const auto path = (std::filesystem::temp_directory_path() / "spca_inst_rt.spcx").string();
  write_instance(path, inst);
  const auto back = read_instance(path);
  EXPECT_EQ(back.family, inst.family);
  EXPECT_EQ(back.params, inst.params);
  EXPECT_TRUE(back.instance.sigma == inst.instance.sigma);
  EXPECT_EQ(back.instance.components, inst.instance.components);
  std::remove(path.c_str());
  EXPECT_THROW(read_instance(path), IoError);
}
