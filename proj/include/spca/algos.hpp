#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "spca/linalg.hpp"
#include "spca/models.hpp"

namespace spca {

/// Unit vector with its exact support and the sparsity budget it was produced under.
struct CandidateVector {
  Vec values;
  std::vector<Index> support;
  Index budget = 0;

  /// Validates unit norm (1e-10) and nnz ≤ budget; fills `support`.
  static CandidateVector make(Vec values, Index budget);
  static CandidateVector basis(Index d, Index i);
  Index dim() const noexcept { return values.size(); }
};

enum class RtpmMode { full, disjoint };
/// How covariance products are computed. auto_select: dense Σ̂ when d ≤ 4096.
enum class OperatorBackend { auto_select, dense, matrix_free };

struct RtpmConfig {
  Index r = 1;
  Index T = 1;
  RtpmMode mode = RtpmMode::full;
  std::vector<Index> restarts;  // empty: every basis vector
  double tolerance = 0.0;       // early stop on ‖u_t − u_{t−1}‖₂ (0 disables)
  unsigned threads = 1;
  OperatorBackend backend = OperatorBackend::auto_select;
  /// Iteration counts at which the currently selected candidate is recorded.
  std::vector<Index> checkpoints;
};

struct RtpmCheckpoint {
  Index t = 0;
  CandidateVector output;
  Index restart = 0;
  double score = 0.0;
  double elapsed_ms = 0.0;
};

struct RtpmResult {
  CandidateVector output;
  Index restart = 0;     // winning restart index
  double score = 0.0;    // its full-sample Rayleigh quotient
  Index iterations_used = 0;
  bool degenerate = false;        // winning restart hit op·u = 0
  Index degenerate_restarts = 0;
  Index samples_used = 0;         // n (full) or ⌊n/T⌋·T (disjoint)
  std::vector<RtpmCheckpoint> checkpoints;
};

struct IterateResult {
  CandidateVector next;
  bool degenerate = false;
};

/// One truncated power step: top_r(op·u) normalized; op·u = 0 returns u.
IterateResult rtpm_iterate(const CovOperator& op, const CandidateVector& u, Index r);

/// Operator for iteration t (1-based). Called once per t, in order.
using StepOperators = std::function<std::shared_ptr<const CovOperator>(Index t)>;

/// Restarted truncated power method over an arbitrary operator schedule;
/// candidates are ranked by ⟨u, select·u⟩.
RtpmResult rtpm(const StepOperators& steps, const CovOperator& select, const RtpmConfig& cfg);
RtpmResult rtpm(std::shared_ptr<const Dataset> x, const RtpmConfig& cfg);
RtpmResult rtpm(const Dataset& x, const RtpmConfig& cfg);
/// Full mode on a fixed operator (population or precomputed Σ̂).
RtpmResult rtpm(std::shared_ptr<const CovOperator> op, const RtpmConfig& cfg);

CandidateVector diag_thresh(const SymMatrix& cov, Index s);
/// `s` is accepted for signature uniformity and ignored.
CandidateVector cov_thresh(const SymMatrix& cov, double tau, Index s = 0);
/// Greedy support G: the s indices with largest |⟨Σ̂_{i⋆,:}, Σ̂_{i,:}⟩| (ties to smaller index).
std::vector<Index> greedy_corr_support(const SymMatrix& cov, Index s, Index i_star);
CandidateVector greedy_corr(const SymMatrix& cov, Index s, Index i_star);

CandidateVector top_s_project(const CandidateVector& u, Index s);

/// 1-based p = min{i ≤ k : λ_{i+1}/λ_i ≤ 1 − β/k}.
Index find_gap_index(std::span<const double> eigenvalues, Index k, double beta);

/// Returns a unit vector for the operator it is handed.
using DeflationOracle = std::function<Vec(const CovOperator& op)>;

/// Algorithm-5 style deflation: each round runs the oracle on P·Σ·P, projects
/// its output onto range(P), renormalizes and deflates.
std::vector<Vec> kspca_deflate(std::shared_ptr<const CovOperator> base, Index k, const DeflationOracle& oracle);

DeflationOracle exact_oracle(unsigned threads = 1);
DeflationOracle rtpm_oracle(RtpmConfig cfg);

}  // namespace spca
