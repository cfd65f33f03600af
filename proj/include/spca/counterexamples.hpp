#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spca/linalg.hpp"
#include "spca/models.hpp"

namespace spca {

/// A measured quantity checked against a bound.
struct Certificate {
  enum class Relation { le, ge, lt, gt };
  std::string name;
  double value = 0.0;
  Relation relation = Relation::le;
  double bound = 0.0;
  /// Informational certificates are reported but never fail an instance.
  bool informational = false;

  bool pass() const noexcept;
  std::string describe() const;
};

Certificate make_cert(std::string name, double value, Certificate::Relation rel, double bound,
                      bool informational = false);

struct CounterexampleInstance {
  PlantedInstance instance;
  std::string family;  // covthresh | greedycorr | diagthresh | barrier
  std::vector<std::pair<std::string, double>> params;
  std::vector<Certificate> certificates;
  std::vector<std::string> flags;

  bool certificates_pass() const noexcept;
  /// First failing non-informational certificate, or nullptr.
  const Certificate* first_failure() const noexcept;
  double param(const std::string& key) const;
};

struct RegularGraph {
  Index u = 0;
  Index r_deg = 0;
  std::vector<std::vector<Index>> neighbors;  // sorted
  Index attempts = 0;                          // restarts consumed

  SymMatrix adjacency() const;
  bool is_valid() const;
};

/// Random r-regular simple graph (pairing model, Steger–Wormald variant).
/// With spectral_bound > 0, graphs with max_{i≥2}|λ_i(A)| above it are rejected.
RegularGraph random_regular_graph(Index u, Index r_deg, std::uint64_t seed, double spectral_bound = 0.0);

struct CovthreshParams {
  Index s = 4;
  Index u = 1501;
  double tau = 0.004;
  std::uint64_t seed = 1;
  /// Enforce 4s + 8/τ ≤ u ≤ 1/(144τ²); when false the checks are kept as
  /// informational certificates.
  bool enforce_preconditions = true;
};
CounterexampleInstance build_covthresh_instance(const CovthreshParams& p);

struct GreedycorrParams {
  Index s = 16;
  double lam1 = 1.0;
  double lam2 = 0.9;
  Index embed_dim = 0;  // 0: d = 2s − 1; larger pads with variance lam2
};
CounterexampleInstance build_greedycorr_instance(const GreedycorrParams& p);

struct DiagthreshParams {
  Index d = 1000;
  Index s = 8;
  double lam1 = 1.0;
  double lam2 = 0.5;
  double lam3 = 0.5 / 2.1;
  double lam4 = 0.5 / 2.2;
};
CounterexampleInstance build_diagthresh_instance(const DiagthreshParams& p);

struct BarrierInstance {
  CounterexampleInstance inst;
  Vec u;        // deflation direction, 3-sparse
  SymMatrix c;  // 2×2 compression of PΣP
};
BarrierInstance build_deflation_barrier(Index d, double delta, double gamma);

struct VerificationReport {
  std::string family;
  std::vector<std::pair<std::string, double>> params;
  std::vector<Certificate> certificates;
  std::vector<std::string> flags;
  std::string error;  // set when construction itself failed

  bool pass() const noexcept;
};

VerificationReport verify_barrier(const BarrierInstance& b);
/// Population-level checks for a built instance (its own certificates plus
/// the behaviour of the targeted heuristic on Σ).
VerificationReport verify_instance(const CounterexampleInstance& inst);
/// Every family at default parameters.
std::vector<VerificationReport> verify_all();

// Instance file: "SPCX", family tag, key/value float64 params, dense Σ, planted components.
void write_instance(const std::string& path, const CounterexampleInstance& inst);
CounterexampleInstance read_instance(const std::string& path);

}  // namespace spca
