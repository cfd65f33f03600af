#include "spca/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "spca/algos.hpp"
#include "spca/error.hpp"
#include "spca/kernels.hpp"
#include "spca/parallel.hpp"

namespace spca {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Re-throws `e` with a context prefix, keeping its exit-code category.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string what = context + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::parameter:
      throw ParameterError(what);
    case ErrorKind::numerical:
      throw NumericalError(what);
    case ErrorKind::construction:
      throw ConstructionError(what);
    case ErrorKind::io:
      throw IoError(what);
  }
  throw ConstructionError(what);
}

/// Runs independent jobs and concatenates their records in job order.
std::vector<Record> run_jobs(std::size_t count, unsigned threads,
                             const std::function<std::vector<Record>(std::size_t)>& job) {
  std::vector<std::vector<Record>> slots(count);
  parallel_for(count, threads, [&](std::size_t i) { slots[i] = job(i); });
  std::vector<Record> out;
  for (auto& s : slots)
    for (auto& r : s) out.push_back(std::move(r));
  sort_records(out);
  return out;
}

Record base_record(const BuiltModel& m, const std::string& algorithm) {
  Record r;
  r.algorithm = algorithm;
  r.family = m.family;
  r.d = m.instance.dim();
  r.s = m.instance.s;
  r.k = m.instance.components.size();
  r.gamma = m.instance.gamma;
  r.flags = m.flags;
  return r;
}

Index default_r(const Config& cfg, Index s) { return cfg.get_index("r", cfg.get_index("r_factor", 10) * s); }

const std::set<std::string> kAlgorithms = {"rtpm_full", "rtpm_disjoint", "diag_thresh", "cov_thresh", "greedy_corr"};

std::vector<std::string> algorithm_list(const Config& cfg, const std::vector<std::string>& fallback) {
  auto algos = cfg.get_string_list("algorithms", fallback);
  for (const auto& a : algos) {
    if (!kAlgorithms.count(a)) throw ParameterError("unknown algorithm '" + a + "'");
  }
  return algos;
}

OperatorBackend backend_of(const Config& cfg) {
  const std::string b = cfg.get_string("backend", "auto");
  if (b == "auto") return OperatorBackend::auto_select;
  if (b == "dense") return OperatorBackend::dense;
  if (b == "matrix_free") return OperatorBackend::matrix_free;
  throw ParameterError("backend must be auto, dense or matrix_free");
}

/// Shared per-(model, n, seed) inputs for a batch of algorithms.
struct Inputs {
  std::shared_ptr<const Dataset> data;  // null: population
  std::shared_ptr<const SymMatrix> cov;
  double cov_ms = 0.0;
};

struct Outcome {
  Vec u;
  Index iterations = 0;
  double ms = 0.0;
  std::vector<std::string> flags;
  std::vector<RtpmCheckpoint> checkpoints;
};

struct AlgoParams {
  Index s = 1;
  Index r = 1;
  Index T = 1;
  double tau = 0.0;
  Index i_star = 0;
  double tolerance = 0.0;
  OperatorBackend backend = OperatorBackend::auto_select;
  std::vector<Index> checkpoints;
};

Outcome run_algorithm(const std::string& algo, const Inputs& in, const AlgoParams& p) {
  Outcome out;
  const auto start = Clock::now();
  auto one_shot = [&](auto&& fn) {
    try {
      out.u = fn().values;
    } catch (const DegenerateError&) {
      out.u.clear();
      out.flags.push_back("degenerate");
    }
  };
  if (algo == "rtpm_full" || algo == "rtpm_disjoint") {
    RtpmConfig rc;
    rc.r = p.r;
    rc.T = p.T;
    rc.tolerance = p.tolerance;
    rc.backend = p.backend;
    rc.checkpoints = p.checkpoints;
    RtpmResult res;
    if (algo == "rtpm_disjoint") {
      if (!in.data) throw ParameterError("rtpm_disjoint needs sampled data (population mode is full only)");
      rc.mode = RtpmMode::disjoint;
      res = rtpm(in.data, rc);
      out.flags.push_back("samples_used=" + std::to_string(res.samples_used));
    } else if (in.data && p.backend == OperatorBackend::matrix_free) {
      res = rtpm(in.data, rc);
    } else {
      res = rtpm(std::make_shared<const CovOperator>(CovOperator::dense(in.cov)), rc);
    }
    out.u = res.output.values;
    out.iterations = res.iterations_used;
    out.checkpoints = std::move(res.checkpoints);
    if (res.degenerate) out.flags.push_back("degenerate");
  } else if (algo == "diag_thresh") {
    one_shot([&] { return diag_thresh(*in.cov, p.s); });
  } else if (algo == "cov_thresh") {
    one_shot([&] { return cov_thresh(*in.cov, p.tau, p.s); });
  } else if (algo == "greedy_corr") {
    one_shot([&] { return greedy_corr(*in.cov, p.s, p.i_star); });
  } else {
    throw ParameterError("unknown algorithm '" + algo + "'");
  }
  out.ms = ms_since(start);
  return out;
}

/// sin² to v; a failed solver counts as orthogonal.
double sin2_or_one(const Vec& u, const Vec& v) { return u.empty() ? 1.0 : sin2_angle(u, v); }

Inputs make_inputs(const BuiltModel& m, Index n, std::uint64_t seed, bool keep_data) {
  Inputs in;
  if (n == 0) {
    in.cov = std::make_shared<const SymMatrix>(m.instance.sigma);
    return in;
  }
  auto data = std::make_shared<const Dataset>(sample_gaussian(m.instance, n, seed));
  const auto start = Clock::now();
  in.cov = std::make_shared<const SymMatrix>(sample_covariance(*data));
  in.cov_ms = ms_since(start);
  if (keep_data) in.data = std::move(data);
  return in;
}

double default_tau(const BuiltModel& m, Index n) {
  if (m.tau > 0.0) return m.tau;
  if (n == 0) return 0.1;
  return std::sqrt(std::log(static_cast<double>(m.instance.dim())) / static_cast<double>(n));
}

}  // namespace

// ---- models ----------------------------------------------------------------

BuiltModel build_model(const Config& cfg, std::optional<Index> s_override, std::optional<double> gamma_override) {
  const std::string family = cfg.get_string("family", "spiked_identity");
  BuiltModel m;
  m.family = family;
  auto take_ce = [&](CounterexampleInstance ce) {
    m.instance = ce.instance;
    m.flags = ce.flags;
    m.counterexample = std::move(ce);
  };
  try {
    if (family == "spiked_identity") {
      m.instance = build_spiked_identity(cfg.get_index("d", 200), s_override.value_or(cfg.get_index("s", 8)));
    } else if (family == "spiked") {
      m.instance = build_spiked_general(cfg.get_index("d", 200), s_override.value_or(cfg.get_index("s", 8)),
                                        gamma_override.value_or(cfg.get_double("gamma", 0.2)));
    } else if (family == "covthresh") {
      CovthreshParams p;
      p.s = s_override.value_or(cfg.get_index("s", p.s));
      p.u = cfg.get_index("u", p.u);
      p.tau = cfg.get_double("tau", p.tau);
      p.seed = cfg.get_u64("graph_seed", p.seed);
      p.enforce_preconditions = cfg.get_bool("enforce_preconditions", true);
      m.tau = p.tau;
      take_ce(build_covthresh_instance(p));
    } else if (family == "greedycorr") {
      GreedycorrParams p;
      p.s = s_override.value_or(cfg.get_index("s", p.s));
      p.lam1 = cfg.get_double("lam1", p.lam1);
      p.lam2 = cfg.get_double("lam2", p.lam2);
      p.embed_dim = cfg.get_index("embed_dim", p.embed_dim);
      take_ce(build_greedycorr_instance(p));
    } else if (family == "diagthresh") {
      DiagthreshParams p;
      p.d = cfg.get_index("d", p.d);
      p.s = s_override.value_or(cfg.get_index("s", p.s));
      p.lam1 = cfg.get_double("lam1", p.lam1);
      p.lam2 = cfg.get_double("lam2", p.lam2);
      p.lam3 = cfg.get_double("lam3", p.lam3);
      p.lam4 = cfg.get_double("lam4", p.lam4);
      take_ce(build_diagthresh_instance(p));
    } else if (family == "barrier") {
      auto b = build_deflation_barrier(cfg.get_index("d", 50), cfg.get_double("delta", 0.1),
                                       gamma_override.value_or(cfg.get_double("gamma", 0.2)));
      take_ce(std::move(b.inst));
    } else {
      throw ParameterError("unknown family '" + family + "'");
    }
  } catch (const Error& e) {
    rethrow_with_context(e, "family " + family);
  }
  return m;
}

std::vector<std::uint64_t> seed_list(const Config& cfg) {
  const std::uint64_t base = cfg.get_u64("seed", 1);
  const Index count = cfg.get_index("seeds", 5);
  if (count < 1) throw ParameterError("seeds must be at least 1");
  std::vector<std::uint64_t> out(count);
  for (Index i = 0; i < count; ++i) out[i] = base + i;
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ParameterError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::optional<double> median_with_sentinel(std::vector<std::optional<Index>> values) {
  std::vector<double> x;
  for (const auto& v : values) x.push_back(v ? static_cast<double>(*v) : std::numeric_limits<double>::infinity());
  const double m = median(std::move(x));
  if (std::isinf(m)) return std::nullopt;
  return m;
}

// ---- run ---------------------------------------------------------------------

std::vector<Record> run_recovery(const Config& cfg, const RunOptions& opt) {
  const BuiltModel model = build_model(cfg);
  const auto algos = algorithm_list(cfg, {"rtpm_full"});
  const bool population = cfg.get_bool("population", false);
  const std::vector<Index> grid = population ? std::vector<Index>{0} : cfg.get_index_grid("n_grid", {cfg.get_index("n", 5000)});
  const auto seeds = population ? std::vector<std::uint64_t>{cfg.get_u64("seed", 1)} : seed_list(cfg);
  const Index s = model.instance.s;
  AlgoParams base;
  base.s = s;
  base.r = default_r(cfg, s);
  base.T = cfg.get_index("T", 50);
  base.i_star = cfg.get_index("i_star", 0);
  base.tolerance = cfg.get_double("tolerance", 0.0);
  base.backend = backend_of(cfg);
  const bool keep_data = std::find(algos.begin(), algos.end(), "rtpm_disjoint") != algos.end() ||
                         base.backend == OperatorBackend::matrix_free;

  return run_jobs(grid.size() * seeds.size(), opt.threads, [&](std::size_t j) {
    const Index gi = j / seeds.size();
    const std::uint64_t seed = seeds[j % seeds.size()];
    const Index n = grid[gi];
    const Inputs in = make_inputs(model, n, seed, keep_data);
    AlgoParams p = base;
    p.tau = cfg.get_double("tau", default_tau(model, n));
    std::vector<Record> out;
    for (std::size_t a = 0; a < algos.size(); ++a) {
      const Outcome o = run_algorithm(algos[a], in, p);
      Record r = base_record(model, algos[a]);
      r.n = n;
      r.seed = seed;
      r.mode = population ? "population" : algos[a] == "rtpm_disjoint" ? "disjoint" : algos[a] == "rtpm_full" ? "full" : "one-shot";
      if (algos[a].rfind("rtpm", 0) == 0) {
        r.r = p.r;
        r.T = p.T;
      }
      r.metric = "sin2";
      r.value = sin2_or_one(o.u, model.instance.v());
      r.wall_ms = opt.timing ? o.ms : 0.0;
      r.iterations_used = o.iterations;
      for (const auto& f : o.flags) r.flags.push_back(f);
      r.order = gi * algos.size() + a;
      out.push_back(std::move(r));
    }
    return out;
  });
}

// ---- scaling -----------------------------------------------------------------

ScalingResult run_scaling(const Config& cfg, const RunOptions& opt) {
  const Index s0 = cfg.get_index("s", 8);
  const double g0 = cfg.get_double("gamma", 0.2);
  const double d0 = cfg.get_double("delta", 0.1);
  const auto s_grid = cfg.get_index_grid("s_grid", {4, 8, 16});
  const auto g_grid = cfg.get_double_list("gamma_grid", {0.1, 0.2, 0.4});
  const auto d_grid = cfg.get_double_list("delta_grid", {0.05, 0.1, 0.2});
  const auto n_grid = cfg.get_index_grid("n_grid", parse_index_grid("250:128000:x2", "n_grid"));
  const auto seeds = seed_list(cfg);
  const Index T = cfg.get_index("T", 100);
  const double tolerance = cfg.get_double("tolerance", 1e-10);
  for (double g : g_grid)
    if (!(g > 0.0 && g < 1.0)) throw ParameterError("gamma_grid entries must lie in (0, 1)");
  for (double dl : d_grid)
    if (!(dl > 0.0 && dl < 1.0)) throw ParameterError("delta_grid entries must lie in (0, 1)");

  ScalingResult res;
  for (Index s : s_grid) res.points.push_back({"s", s, g0, d0, {}, {}});
  for (double g : g_grid) res.points.push_back({"gamma", s0, g, d0, {}, {}});
  for (double dl : d_grid) res.points.push_back({"delta", s0, g0, dl, {}, {}});

  // Points sharing (s, γ) share one nested run that stops at the smallest Δ.
  std::vector<std::pair<Index, double>> groups;
  std::vector<double> group_delta;
  std::vector<std::size_t> point_group;
  for (const auto& p : res.points) {
    std::size_t g = 0;
    while (g < groups.size() && !(groups[g].first == p.s && groups[g].second == p.gamma)) ++g;
    if (g == groups.size()) {
      groups.emplace_back(p.s, p.gamma);
      group_delta.push_back(p.delta);
    }
    group_delta[g] = std::min(group_delta[g], p.delta);
    point_group.push_back(g);
  }

  Config model_cfg = cfg;
  model_cfg.set("family", "spiked");
  const Index d = cfg.get_index("d", 400);
  model_cfg.set("d", std::to_string(d));

  // trace[g][seed] = sin² at each evaluated grid n (prefix of n_grid).
  std::vector<std::vector<std::vector<double>>> trace(groups.size(), std::vector<std::vector<double>>(seeds.size()));
  std::vector<Record> recs = run_jobs(groups.size() * seeds.size(), opt.threads, [&](std::size_t j) {
    const std::size_t g = j / seeds.size(), si = j % seeds.size();
    const auto [s, gamma] = groups[g];
    const BuiltModel model = build_model(model_cfg, s, gamma);
    const GaussianSampler sampler(model.instance);
    CovarianceAccumulator acc(d);
    RtpmConfig rc;
    rc.r = default_r(cfg, s);
    rc.T = T;
    rc.tolerance = tolerance;
    std::vector<double> buf;
    std::vector<Record> out;
    Index have = 0;
    for (Index n : n_grid) {
      buf.assign((n - have) * d, 0.0);
      sampler.sample_rows(seeds[si], have, n, buf);
      acc.add_rows(buf);
      have = n;
      const auto start = Clock::now();
      auto op = std::make_shared<const CovOperator>(CovOperator::dense(acc.covariance()));
      const RtpmResult rr = rtpm(op, rc);
      const double ms = ms_since(start);
      const double e = sin2_angle(rr.output.values, model.instance.v());
      trace[g][si].push_back(e);
      Record r = base_record(model, "rtpm_full");
      r.delta = group_delta[g];
      r.n = n;
      r.seed = seeds[si];
      r.mode = "full";
      r.r = rc.r;
      r.T = T;
      r.metric = "sin2";
      r.value = e;
      r.wall_ms = opt.timing ? ms : 0.0;
      r.iterations_used = rr.iterations_used;
      r.order = g;
      out.push_back(std::move(r));
      if (e <= group_delta[g]) break;
    }
    return out;
  });
  res.records = std::move(recs);

  for (std::size_t pi = 0; pi < res.points.size(); ++pi) {
    ScalingPoint& p = res.points[pi];
    const std::size_t g = point_group[pi];
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      std::optional<Index> ns;
      const auto& t = trace[g][si];
      for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] <= p.delta) {
          ns = n_grid[k];
          break;
        }
      }
      p.n_scale.push_back(ns);
      Record r;
      r.algorithm = "rtpm_full";
      r.family = "spiked";
      r.d = d;
      r.s = p.s;
      r.gamma = p.gamma;
      r.delta = p.delta;
      r.n = ns.value_or(0);
      r.seed = seeds[si];
      r.mode = "full";
      r.r = default_r(cfg, p.s);
      r.T = T;
      r.metric = "n_scale";
      r.value = ns ? static_cast<double>(*ns) : std::numeric_limits<double>::infinity();
      r.flags = {"axis=" + p.axis};
      if (!ns) r.flags.push_back("above-grid");
      r.order = groups.size() + pi;
      res.records.push_back(std::move(r));
    }
    p.median = median_with_sentinel(p.n_scale);
  }
  sort_records(res.records);
  return res;
}

// ---- runtime / accuracy --------------------------------------------------------

RuntimeResult run_runtime_accuracy(const Config& cfg, const RunOptions& opt) {
  const BuiltModel model = build_model(cfg);
  const auto algos = algorithm_list(cfg, {"rtpm_full", "diag_thresh", "cov_thresh", "greedy_corr"});
  const Index n = cfg.get_index("n", 5000);
  const auto seeds = seed_list(cfg);
  const auto checkpoints = cfg.get_index_grid("checkpoints", {1, 2, 3, 5, 10, 20, 50, 100});
  const Index T = cfg.get_index("T", checkpoints.back());
  const Index s = model.instance.s;

  RuntimeResult res;
  std::vector<std::string> run_algos;
  for (const auto& a : algos) {
    if (a.rfind("rtpm", 0) == 0 && T == 0) {
      res.notes.push_back(a + ": empty trajectory (T = 0)");
      continue;
    }
    run_algos.push_back(a);
  }
  AlgoParams base;
  base.s = s;
  base.r = default_r(cfg, s);
  base.T = T;
  base.i_star = cfg.get_index("i_star", 0);
  base.backend = backend_of(cfg);
  for (Index c : checkpoints)
    if (c <= T) base.checkpoints.push_back(c);
  const bool keep_data = std::find(run_algos.begin(), run_algos.end(), "rtpm_disjoint") != run_algos.end();

  res.records = run_jobs(seeds.size(), opt.threads, [&](std::size_t j) {
    const Inputs in = make_inputs(model, n, seeds[j], keep_data);
    AlgoParams p = base;
    p.tau = cfg.get_double("tau", default_tau(model, n));
    std::vector<Record> out;
    for (std::size_t a = 0; a < run_algos.size(); ++a) {
      const std::string& algo = run_algos[a];
      const Outcome o = run_algorithm(algo, in, p);
      Record r = base_record(model, algo);
      r.n = n;
      r.seed = seeds[j];
      r.metric = "correlation2";
      r.order = a;
      for (const auto& f : o.flags) r.flags.push_back(f);
      if (algo.rfind("rtpm", 0) == 0) {
        r.mode = algo == "rtpm_full" ? "full" : "disjoint";
        r.r = p.r;
        for (const auto& cp : o.checkpoints) {
          Record c = r;
          c.T = cp.t;
          c.value = 1.0 - sin2_angle(cp.output.values, model.instance.v());
          c.wall_ms = opt.timing ? in.cov_ms + cp.elapsed_ms : 0.0;
          c.iterations_used = cp.t;
          out.push_back(std::move(c));
        }
      } else {
        r.mode = "one-shot";
        r.value = 1.0 - sin2_or_one(o.u, model.instance.v());
        r.wall_ms = opt.timing ? in.cov_ms + o.ms : 0.0;
        out.push_back(std::move(r));
      }
    }
    return out;
  });
  return res;
}

// ---- counterexample sweep ---------------------------------------------------

std::vector<Record> run_counterexample_sweep(const Config& cfg, const RunOptions& opt) {
  const std::string family = cfg.get_string("family", "greedycorr");
  if (family != "covthresh" && family != "greedycorr" && family != "diagthresh") {
    throw ParameterError("counterexample sweep: family must be covthresh, greedycorr or diagthresh");
  }
  const BuiltModel model = build_model(cfg);
  const std::string heuristic = family == "covthresh" ? "cov_thresh" : family == "greedycorr" ? "greedy_corr" : "diag_thresh";
  const bool population = cfg.get_bool("population", false);
  const Index s = model.instance.s;
  const Index d = model.instance.dim();
  const Index default_n = static_cast<Index>(std::llround(10.0 * s * s * std::log(static_cast<double>(d))));
  const std::vector<Index> grid = population ? std::vector<Index>{0} : cfg.get_index_grid("n_grid", {cfg.get_index("n", default_n)});
  const auto seeds = population ? std::vector<std::uint64_t>{cfg.get_u64("seed", 1)} : seed_list(cfg);
  const auto algos = algorithm_list(cfg, {heuristic, "rtpm_full"});

  AlgoParams base;
  base.s = s;
  base.r = cfg.get_index("r", 2 * s);
  base.T = cfg.get_index("T", 40);
  base.i_star = cfg.get_index("i_star", 0);
  base.tolerance = cfg.get_double("tolerance", 0.0);
  base.backend = backend_of(cfg);
  const bool keep_data = std::find(algos.begin(), algos.end(), "rtpm_disjoint") != algos.end();

  return run_jobs(grid.size() * seeds.size(), opt.threads, [&](std::size_t j) {
    const Index gi = j / seeds.size();
    const std::uint64_t seed = seeds[j % seeds.size()];
    const Index n = grid[gi];
    const Inputs in = make_inputs(model, n, seed, keep_data);
    AlgoParams p = base;
    p.tau = cfg.get_double("tau", default_tau(model, n));
    std::vector<Record> out;
    for (std::size_t a = 0; a < algos.size(); ++a) {
      Outcome o;
      try {
        o = run_algorithm(algos[a], in, p);
      } catch (const Error& e) {
        rethrow_with_context(e, "family " + family + ", algorithm " + algos[a]);
      }
      Record r = base_record(model, algos[a]);
      r.n = n;
      r.seed = seed;
      r.mode = population ? "population" : algos[a] == "rtpm_full" ? "full" : algos[a] == "rtpm_disjoint" ? "disjoint" : "one-shot";
      if (algos[a].rfind("rtpm", 0) == 0) {
        r.r = p.r;
        r.T = p.T;
      }
      r.metric = "sin2";
      r.value = sin2_or_one(o.u, model.instance.v());
      r.wall_ms = opt.timing ? o.ms : 0.0;
      r.iterations_used = o.iterations;
      for (const auto& f : o.flags) r.flags.push_back(f);
      r.order = gi * algos.size() + a;
      out.push_back(std::move(r));
    }
    return out;
  });
}

// ---- ablation ---------------------------------------------------------------

std::vector<Record> run_ablation(const Config& user_cfg, const RunOptions& opt) {
  // The reference ablation runs the greedy-correlation instance padded to d = 200 with r = 5s.
  Config cfg = user_cfg;
  cfg.set_default("family", "greedycorr");
  cfg.set_default("s", "8");
  if (cfg.get_string("family", "") == "greedycorr") cfg.set_default("embed_dim", "200");
  cfg.set_default("r_factor", "5");
  const BuiltModel model = build_model(cfg);
  const Index n = cfg.get_index("n", 20000);
  const auto t_grid = cfg.get_index_grid("T_grid", {5, 10, 20});
  if (n < t_grid.back()) {
    throw ParameterError("ablation: n = " + std::to_string(n) + " is smaller than the largest T = " +
                         std::to_string(t_grid.back()));
  }
  const auto seeds = seed_list(cfg);
  const Index s = model.instance.s;
  const Index r_val = default_r(cfg, s);
  const OperatorBackend backend = backend_of(cfg);

  return run_jobs(seeds.size(), opt.threads, [&](std::size_t j) {
    const Inputs in = make_inputs(model, n, seeds[j], true);
    std::vector<Record> out;
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      for (int m = 0; m < 2; ++m) {
        AlgoParams p;
        p.s = s;
        p.r = r_val;
        p.T = t_grid[ti];
        p.backend = backend;
        const std::string algo = m == 0 ? "rtpm_full" : "rtpm_disjoint";
        const Outcome o = run_algorithm(algo, in, p);
        Record r = base_record(model, algo);
        r.n = n;
        r.seed = seeds[j];
        r.mode = m == 0 ? "full" : "disjoint";
        r.r = r_val;
        r.T = p.T;
        r.metric = "sin2";
        r.value = sin2_angle(o.u, model.instance.v());
        r.wall_ms = opt.timing ? o.ms : 0.0;
        r.iterations_used = o.iterations;
        for (const auto& f : o.flags) r.flags.push_back(f);
        if (m == 0) r.flags.push_back("samples_used=" + std::to_string(n));
        r.order = ti * 2 + m;
        out.push_back(std::move(r));
      }
    }
    return out;
  });
}

// ---- text --------------------------------------------------------------------

TextRunResult run_text(const Config& cfg, const RunOptions& opt) {
  const auto docword = cfg.raw("docword");
  const auto vocab = cfg.raw("vocab");
  if (!docword || !vocab) throw ParameterError("text: config keys 'docword' and 'vocab' are required");
  const std::string ranking = cfg.get_string("vocab_ranking", "total_count");
  VocabRanking vr;
  if (ranking == "total_count") {
    vr = VocabRanking::total_count;
  } else if (ranking == "doc_frequency") {
    vr = VocabRanking::doc_frequency;
  } else {
    throw ParameterError("vocab_ranking must be total_count or doc_frequency");
  }

  TextRunResult out;
  out.corpus = load_bagofwords(*docword, *vocab, cfg.get_index("n_docs", 10000), cfg.get_index("vocab_size", 20000), vr);
  TextConfig tc;
  tc.k = cfg.get_index("k", 4);
  tc.r = cfg.get_index("r", 50);
  tc.T = cfg.get_index("T", 50);
  tc.restart_budget = cfg.get_index("restart_budget", 200);
  tc.top_words = cfg.get_index("top_words", 10);
  tc.threads = opt.threads;
  const auto start = Clock::now();
  out.result = text_pipeline(out.corpus, tc);
  const double ms = ms_since(start);

  Vec mean;
  auto x = log_features(out.corpus, mean);
  const CovOperator op = CovOperator::sparse_data(x, mean);
  double trace = 0.0;
  for (std::size_t p = 0; p < x->col.size(); ++p) trace += x->val[p] * x->val[p];
  trace /= static_cast<double>(x->n);
  for (double m : mean) trace -= m * m;

  for (std::size_t c = 0; c < out.result.components.size(); ++c) {
    const auto& comp = out.result.components[c];
    Record r;
    r.algorithm = "kspca_rtpm";
    r.family = "text";
    r.d = out.corpus.vocab_size;
    r.s = comp.nnz;
    r.k = tc.k;
    r.n = out.corpus.n_docs;
    r.seed = 0;
    r.mode = "full";
    r.r = tc.r;
    r.T = tc.T;
    r.metric = "variance_fraction";
    const Vec su = op.apply(comp.values);
    r.value = trace > 0.0 ? std::clamp(kernels::dot(comp.values, su) / trace, 0.0, 1.0) : 0.0;
    r.wall_ms = opt.timing ? ms : 0.0;
    r.iterations_used = tc.T;
    r.flags = {"component=" + std::to_string(c + 1), "restart_budget=" + std::to_string(out.result.restarts.size()),
               "centered"};
    r.order = c;
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace spca
