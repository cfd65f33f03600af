#include "spca/algos.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "spca/error.hpp"
#include "spca/kernels.hpp"
#include "spca/parallel.hpp"

namespace spca {

namespace {

constexpr Index kDenseLimit = 4096;

struct Step {
  Vec next;
  bool degenerate;
};

Step truncated_power_step(const CovOperator& op, std::span<const double> u, Index r) {
  Vec y = op.apply(u);
  if (std::all_of(y.begin(), y.end(), [](double x) { return x == 0.0; })) {
    return {Vec(u.begin(), u.end()), true};
  }
  Vec next(y.size(), 0.0);
  for (Index i : top_r_indices(y, r)) next[i] = y[i];
  normalize(next);
  return {std::move(next), false};
}

double score(const CovOperator& op, std::span<const double> u) {
  return kernels::dot(u, op.apply(u));
}

struct Selection {
  Index slot;
  double score;
};

Selection select_best(const CovOperator& select, const std::vector<Vec>& iterates, unsigned threads) {
  std::vector<double> scores(iterates.size());
  parallel_for(iterates.size(), threads, [&](Index j) { scores[j] = score(select, iterates[j]); });
  Selection best{0, scores[0]};
  for (Index j = 1; j < scores.size(); ++j) {
    if (scores[j] > best.score) best = {j, scores[j]};
  }
  return best;
}

CandidateVector embed_top_eigenvector(const SymMatrix& cov, const std::vector<Index>& subset) {
  const SymMatrix sub = restrict(cov, subset);
  const TopEigen top = top_eigenpair(sub);
  Vec values(cov.dim(), 0.0);
  for (Index a = 0; a < subset.size(); ++a) values[subset[a]] = top.pair.vector[a];
  normalize(values);
  return CandidateVector::make(std::move(values), subset.size());
}

void check_sparsity(Index s, Index d, const char* who) {
  if (s < 1 || s > d) {
    throw ParameterError(std::string(who) + ": s=" + std::to_string(s) + " outside [1, " + std::to_string(d) + "]");
  }
}

}  // namespace

// ---- CandidateVector -------------------------------------------------------

CandidateVector CandidateVector::make(Vec values, Index budget) {
  const double n = norm2(values);
  if (std::abs(n - 1.0) > 1e-10) {
    throw NumericalError("candidate vector is not unit norm (‖u‖ = " + std::to_string(n) + ")");
  }
  CandidateVector c;
  c.support = spca::support(values);
  if (c.support.size() > budget) {
    throw NumericalError("candidate vector has " + std::to_string(c.support.size()) +
                         " nonzeros, budget " + std::to_string(budget));
  }
  c.values = std::move(values);
  c.budget = budget;
  return c;
}

CandidateVector CandidateVector::basis(Index d, Index i) {
  if (i >= d) throw ParameterError("basis index out of range");
  Vec e(d, 0.0);
  e[i] = 1.0;
  return make(std::move(e), 1);
}

// ---- RTPM ------------------------------------------------------------------

IterateResult rtpm_iterate(const CovOperator& op, const CandidateVector& u, Index r) {
  if (u.dim() != op.dim()) throw ParameterError("rtpm_iterate: dimension mismatch");
  if (r < 1) throw ParameterError("rtpm_iterate: r must be at least 1");
  Step s = truncated_power_step(op, u.values, std::min(r, op.dim()));
  if (s.degenerate) return {u, true};
  return {CandidateVector::make(std::move(s.next), r), false};
}

RtpmResult rtpm(const StepOperators& steps, const CovOperator& select, const RtpmConfig& cfg) {
  const Index d = select.dim();
  if (cfg.r < 1) throw ParameterError("rtpm: r must be at least 1");
  if (cfg.T < 1) throw ParameterError("rtpm: T must be at least 1");
  if (cfg.tolerance < 0.0) throw ParameterError("rtpm: tolerance must be nonnegative");
  const Index r = std::min(cfg.r, d);

  std::vector<Index> restarts = cfg.restarts;
  if (restarts.empty()) {
    restarts.resize(d);
    std::iota(restarts.begin(), restarts.end(), Index{0});
  }
  for (Index i : restarts) {
    if (i >= d) throw ParameterError("rtpm: restart index " + std::to_string(i) + " out of range");
  }
  const std::set<Index> checkpoints(cfg.checkpoints.begin(), cfg.checkpoints.end());

  const Index m = restarts.size();
  std::vector<Vec> iterates(m);
  for (Index j = 0; j < m; ++j) {
    iterates[j].assign(d, 0.0);
    iterates[j][restarts[j]] = 1.0;
  }
  std::vector<Index> used(m, 0);
  std::vector<char> active(m, 1), degenerate(m, 0);

  RtpmResult result;
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](Index t) {
    const Selection best = select_best(select, iterates, cfg.threads);
    RtpmCheckpoint cp;
    cp.t = t;
    cp.output = CandidateVector::make(iterates[best.slot], std::max(r, nnz(iterates[best.slot])));
    cp.restart = restarts[best.slot];
    cp.score = best.score;
    cp.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return std::pair{cp, best.slot};
  };

  for (Index t = 1; t <= cfg.T; ++t) {
    const std::shared_ptr<const CovOperator> op = steps(t);
    if (!op || op->dim() != d) throw ParameterError("rtpm: step operator has wrong dimension");
    parallel_for(m, cfg.threads, [&](Index j) {
      if (!active[j]) return;
      Step s = truncated_power_step(*op, iterates[j], r);
      ++used[j];
      if (s.degenerate) {
        degenerate[j] = 1;
        return;
      }
      if (cfg.tolerance > 0.0) {
        Vec diff = s.next;
        kernels::axpy(-1.0, iterates[j], diff);
        if (norm2(diff) <= cfg.tolerance) active[j] = 0;
      }
      iterates[j] = std::move(s.next);
    });
    if (checkpoints.count(t) != 0) result.checkpoints.push_back(finish(t).first);
    // Every restart has converged; remaining checkpoints would repeat the current selection.
    if (std::none_of(active.begin(), active.end(), [](char a) { return a != 0; })) {
      for (Index c : checkpoints) {
        if (c <= t || c > cfg.T) continue;
        auto cp = finish(c).first;
        result.checkpoints.push_back(std::move(cp));
      }
      break;
    }
  }

  auto [final_cp, slot] = finish(cfg.T);
  result.output = std::move(final_cp.output);
  result.restart = final_cp.restart;
  result.score = final_cp.score;
  result.iterations_used = used[slot];
  result.degenerate = degenerate[slot] != 0;
  result.degenerate_restarts = static_cast<Index>(std::count(degenerate.begin(), degenerate.end(), 1));
  result.samples_used = select.samples();
  return result;
}

RtpmResult rtpm(std::shared_ptr<const Dataset> x, const RtpmConfig& cfg) {
  if (!x) throw ParameterError("rtpm: null dataset");
  if (cfg.T < 1) throw ParameterError("rtpm: T must be at least 1");
  const bool dense = cfg.backend == OperatorBackend::dense ||
                     (cfg.backend == OperatorBackend::auto_select && x->d <= kDenseLimit);

  auto full = std::make_shared<const CovOperator>(
      dense ? CovOperator::dense(sample_covariance(*x, cfg.threads)) : CovOperator::data(x, 0, x->n));

  RtpmResult res;
  if (cfg.mode == RtpmMode::full) {
    res = rtpm([&](Index) { return full; }, *full, cfg);
    res.samples_used = x->n;
  } else {
    if (x->n < cfg.T) {
      throw ParameterError("rtpm: disjoint mode needs n >= T (n=" + std::to_string(x->n) +
                           ", T=" + std::to_string(cfg.T) + ")");
    }
    const Index b = x->n / cfg.T;
    StepOperators steps = [&](Index t) {
      const Index lo = (t - 1) * b, hi = t * b;
      return std::make_shared<const CovOperator>(
          dense ? CovOperator::dense(sample_covariance(*x, lo, hi, cfg.threads)) : CovOperator::data(x, lo, hi));
    };
    res = rtpm(steps, *full, cfg);
    res.samples_used = b * cfg.T;
  }
  return res;
}

RtpmResult rtpm(const Dataset& x, const RtpmConfig& cfg) {
  // Non-owning handle; the dataset outlives the call.
  return rtpm(std::shared_ptr<const Dataset>(&x, [](const Dataset*) {}), cfg);
}

RtpmResult rtpm(std::shared_ptr<const CovOperator> op, const RtpmConfig& cfg) {
  if (!op) throw ParameterError("rtpm: null operator");
  if (cfg.mode != RtpmMode::full) throw ParameterError("rtpm: a fixed operator supports full mode only");
  RtpmResult res = rtpm([&](Index) { return op; }, *op, cfg);
  return res;
}

// ---- baselines -------------------------------------------------------------

CandidateVector diag_thresh(const SymMatrix& cov, Index s) {
  const Index d = cov.dim();
  check_sparsity(s, d, "diag_thresh");
  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return cov(a, a) > cov(b, b); });
  std::vector<Index> subset(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
  std::sort(subset.begin(), subset.end());
  return embed_top_eigenvector(cov, subset);
}

CandidateVector cov_thresh(const SymMatrix& cov, double tau, Index /*s*/) {
  const SymMatrix t = threshold_entries(cov, tau);
  const double* p = t.data();
  if (std::all_of(p, p + t.dim() * t.dim(), [](double x) { return x == 0.0; })) {
    throw DegenerateError("cov_thresh: thresholded matrix is identically zero (tau=" + std::to_string(tau) + ")");
  }
  Vec v = top_eigenpair(t).pair.vector;
  return CandidateVector::make(std::move(v), t.dim());
}

std::vector<Index> greedy_corr_support(const SymMatrix& cov, Index s, Index i_star) {
  const Index d = cov.dim();
  check_sparsity(s, d, "greedy_corr");
  if (i_star >= d) throw ParameterError("greedy_corr: i_star out of range");
  const auto& k = kernels::active();
  std::vector<double> corr(d);
  for (Index i = 0; i < d; ++i) corr[i] = std::abs(k.dot(cov.row(i_star).data(), cov.row(i).data(), d));
  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return corr[a] > corr[b]; });
  std::vector<Index> subset(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
  std::sort(subset.begin(), subset.end());
  return subset;
}

CandidateVector greedy_corr(const SymMatrix& cov, Index s, Index i_star) {
  return embed_top_eigenvector(cov, greedy_corr_support(cov, s, i_star));
}

CandidateVector top_s_project(const CandidateVector& u, Index s) {
  if (s < 1) throw ParameterError("top_s_project: s must be at least 1");
  Vec v = top_r(u.values, std::min(s, u.dim()));
  normalize(v);
  return CandidateVector::make(std::move(v), s);
}

Index find_gap_index(std::span<const double> lam, Index k, double beta) {
  if (k < 1) throw ParameterError("find_gap_index: k must be at least 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw ParameterError("find_gap_index: beta must lie in (0, 1]");
  if (lam.size() < k + 1) throw ParameterError("find_gap_index: need k+1 eigenvalues");
  for (Index i = 0; i <= k; ++i) {
    if (!(lam[i] > 0.0)) throw ParameterError("find_gap_index: eigenvalues must be positive");
    if (i > 0 && lam[i] > lam[i - 1]) throw ParameterError("find_gap_index: eigenvalues must be descending");
  }
  // Relative slack absorbs the rounding in λ_{i+1}/λ_i when the ratio sits on the threshold.
  const double threshold = (1.0 - beta / static_cast<double>(k)) * (1.0 + 1e-12);
  for (Index i = 0; i < k; ++i) {
    if (lam[i + 1] / lam[i] <= threshold) return i + 1;
  }
  throw InstanceError("find_gap_index: no ratio λ_{i+1}/λ_i ≤ 1 − β/k for i ≤ k; the spectrum has no gap");
}

// ---- deflation -------------------------------------------------------------

std::vector<Vec> kspca_deflate(std::shared_ptr<const CovOperator> base, Index k, const DeflationOracle& oracle) {
  if (!base) throw ParameterError("kspca_deflate: null operator");
  if (k < 1 || k > base->dim()) throw ParameterError("kspca_deflate: k outside [1, d]");
  std::vector<Vec> comps;
  for (Index i = 0; i < k; ++i) {
    const CovOperator op = comps.empty() ? *base : CovOperator::projected(base, comps);
    Vec u = oracle(op);
    if (u.size() != base->dim()) throw ParameterError("kspca_deflate: oracle returned wrong dimension");
    const auto& kt = kernels::active();
    for (const Vec& p : comps) kt.axpy(-kt.dot(p.data(), u.data(), u.size()), p.data(), u.data(), u.size());
    if (norm2(u) < 1e-8) {
      throw NumericalError("kspca_deflate: oracle output for component " + std::to_string(i + 1) +
                           " lies in the span of earlier components");
    }
    normalize(u);
    comps.push_back(std::move(u));
  }
  return comps;
}

DeflationOracle exact_oracle(unsigned threads) {
  return [threads](const CovOperator& op) {
    return top_eigenpair(op.to_dense(threads)).pair.vector;
  };
}

DeflationOracle rtpm_oracle(RtpmConfig cfg) {
  cfg.mode = RtpmMode::full;
  return [cfg](const CovOperator& op) {
    auto shared = std::make_shared<const CovOperator>(op);
    return rtpm(shared, cfg).output.values;
  };
}

}  // namespace spca
