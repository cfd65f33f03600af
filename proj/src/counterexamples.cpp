#include "spca/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spca/algos.hpp"
#include "spca/error.hpp"
#include "spca/kernels.hpp"
#include "spca/rng.hpp"

namespace spca {

using Rel = Certificate::Relation;

// ---- certificates ----------------------------------------------------------

bool Certificate::pass() const noexcept {
  switch (relation) {
    case Rel::le: return value <= bound;
    case Rel::ge: return value >= bound;
    case Rel::lt: return value < bound;
    case Rel::gt: return value > bound;
  }
  return false;
}

std::string Certificate::describe() const {
  static const char* ops[] = {"<=", ">=", "<", ">"};
  std::ostringstream os;
  os.precision(12);
  os << name << ": " << value << ' ' << ops[static_cast<int>(relation)] << ' ' << bound << " -> "
     << (pass() ? "ok" : (informational ? "not met (info)" : "FAILED"));
  return os.str();
}

Certificate make_cert(std::string name, double value, Rel rel, double bound, bool informational) {
  return Certificate{std::move(name), value, rel, bound, informational};
}

bool CounterexampleInstance::certificates_pass() const noexcept { return first_failure() == nullptr; }

const Certificate* CounterexampleInstance::first_failure() const noexcept {
  for (const auto& c : certificates) {
    if (!c.informational && !c.pass()) return &c;
  }
  return nullptr;
}

double CounterexampleInstance::param(const std::string& key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  throw ParameterError("instance has no parameter '" + key + "'");
}

bool VerificationReport::pass() const noexcept {
  if (!error.empty()) return false;
  return std::all_of(certificates.begin(), certificates.end(),
                     [](const Certificate& c) { return c.informational || c.pass(); });
}

// ---- random regular graphs -------------------------------------------------

SymMatrix RegularGraph::adjacency() const {
  SymMatrix a(u);
  for (Index i = 0; i < u; ++i) {
    for (Index j : neighbors[i]) a.set(i, j, 1.0);
  }
  return a;
}

bool RegularGraph::is_valid() const {
  if (neighbors.size() != u) return false;
  for (Index i = 0; i < u; ++i) {
    const auto& nb = neighbors[i];
    if (nb.size() != r_deg) return false;
    for (Index k = 0; k < nb.size(); ++k) {
      if (nb[k] == i || nb[k] >= u) return false;
      if (k > 0 && nb[k] == nb[k - 1]) return false;
      if (!std::binary_search(neighbors[nb[k]].begin(), neighbors[nb[k]].end(), i)) return false;
    }
  }
  return true;
}

namespace {

// One pairing attempt. Stubs are paired uniformly at random as long as the
// pair is suitable (distinct, not yet adjacent); when random draws keep
// failing, suitable pairs are enumerated and one is drawn with stub weights.
// Returns false when the remaining stubs admit no suitable pair.
bool pair_stubs(Index u, Index r, CounterRng& rng, std::vector<std::vector<Index>>& nb) {
  nb.assign(u, {});
  std::vector<bool> adj(u * u, false);
  std::vector<Index> stubs;
  stubs.reserve(u * r);
  for (Index v = 0; v < u; ++v) stubs.insert(stubs.end(), r, v);
  std::vector<Index> left(u, r);

  auto connect = [&](Index a, Index b) {
    adj[a * u + b] = adj[b * u + a] = true;
    nb[a].push_back(b);
    nb[b].push_back(a);
    --left[a];
    --left[b];
  };
  auto remove_stub = [&](Index pos) {
    stubs[pos] = stubs.back();
    stubs.pop_back();
  };

  Index misses = 0;
  while (!stubs.empty()) {
    if (misses < 64) {
      const auto i = static_cast<Index>(rng.uniform_index(stubs.size()));
      const auto j = static_cast<Index>(rng.uniform_index(stubs.size()));
      const Index a = stubs[i], b = stubs[j];
      if (i == j || a == b || adj[a * u + b]) {
        ++misses;
        continue;
      }
      connect(a, b);
      remove_stub(std::max(i, j));
      remove_stub(std::min(i, j));
      misses = 0;
      continue;
    }
    std::vector<Index> open;
    for (Index v = 0; v < u; ++v) {
      if (left[v] > 0) open.push_back(v);
    }
    double total = 0.0;
    for (Index x = 0; x < open.size(); ++x) {
      for (Index y = x + 1; y < open.size(); ++y) {
        if (!adj[open[x] * u + open[y]]) total += static_cast<double>(left[open[x]] * left[open[y]]);
      }
    }
    if (total == 0.0) return false;
    double target = rng.uniform() * total;
    Index pa = open[0], pb = open[0];
    for (Index x = 0; x < open.size() && pa == pb; ++x) {
      for (Index y = x + 1; y < open.size(); ++y) {
        if (adj[open[x] * u + open[y]]) continue;
        target -= static_cast<double>(left[open[x]] * left[open[y]]);
        pa = open[x];
        pb = open[y];
        if (target <= 0.0) break;
      }
    }
    connect(pa, pb);
    remove_stub(static_cast<Index>(std::find(stubs.begin(), stubs.end(), pa) - stubs.begin()));
    remove_stub(static_cast<Index>(std::find(stubs.begin(), stubs.end(), pb) - stubs.begin()));
    misses = 0;
  }
  return true;
}

constexpr Index kGraphRestartCap = 1000;

}  // namespace

RegularGraph random_regular_graph(Index u, Index r_deg, std::uint64_t seed, double spectral_bound) {
  if (u < 1) throw ParameterError("random_regular_graph: need at least one vertex");
  if (r_deg >= u) throw ParameterError("random_regular_graph: degree must be smaller than the vertex count");
  if ((u * r_deg) % 2 != 0) throw ParameterError("random_regular_graph: u * r_deg must be even");

  RegularGraph g;
  g.u = u;
  g.r_deg = r_deg;
  CounterRng rng(seed, 0x6a09e667u);
  for (Index attempt = 1; attempt <= kGraphRestartCap; ++attempt) {
    if (!pair_stubs(u, r_deg, rng, g.neighbors)) continue;
    for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());
    g.attempts = attempt;
    if (spectral_bound > 0.0 && u > 1) {
      const Vec ev = eigenvalues(g.adjacency());
      const double second = std::max(std::abs(ev[1]), std::abs(ev.back()));
      if (second > spectral_bound) continue;
    }
    return g;
  }
  throw ConstructionError("random_regular_graph: no valid graph after " + std::to_string(kGraphRestartCap) +
                          " restarts (u=" + std::to_string(u) + ", r=" + std::to_string(r_deg) + ")");
}

// ---- covariance thresholding -------------------------------------------------

CounterexampleInstance build_covthresh_instance(const CovthreshParams& p) {
  const Index s = p.s, u = p.u;
  const double tau = p.tau;
  if (s < 1) throw ParameterError("covthresh: s must be at least 1");
  if (u < 2) throw ParameterError("covthresh: u must be at least 2");
  if (!(tau > 0.0)) throw ParameterError("covthresh: tau must be positive");

  const double lower = 4.0 * static_cast<double>(s) + 8.0 / tau;
  const double upper = 1.0 / (144.0 * tau * tau);
  const auto ud = static_cast<double>(u);
  if (p.enforce_preconditions) {
    if (!(lower <= ud)) {
      throw ParameterError("covthresh: precondition 4s + 8/tau <= u violated (4s + 8/tau = " +
                           std::to_string(lower) + ", u = " + std::to_string(u) + ")");
    }
    if (!(ud <= upper)) {
      throw ParameterError("covthresh: precondition u <= 1/(144 tau^2) violated (u = " + std::to_string(u) +
                           ", 1/(144 tau^2) = " + std::to_string(upper) + ")");
    }
  }

  // Degree: nearest integer to (u−1)/4, nudged by one when u·r would be odd.
  auto r = static_cast<Index>(std::llround((ud - 1.0) / 4.0));
  if (r == 0) r = 1;
  if ((u * r) % 2 != 0) r = (r + 1 < u) ? r + 1 : r - 1;
  if (r == 0) throw ParameterError("covthresh: no regular degree available for u = " + std::to_string(u));
  const double pr = static_cast<double>(r) / (ud - 1.0);
  const double root_bound = 3.0 * std::sqrt(static_cast<double>(r));

  const RegularGraph g = random_regular_graph(u, r, p.seed, root_bound);
  const SymMatrix a = g.adjacency();

  SymMatrix h(u);
  for (Index i = 0; i < u; ++i) {
    for (Index j = i + 1; j < u; ++j) h.set(i, j, a(i, j) - pr);
  }

  const Index d = s + u;
  SymMatrix sigma(d);
  const double vs = 1.0 / static_cast<double>(s);
  for (Index i = 0; i < s; ++i) {
    for (Index j = i; j < s; ++j) sigma.set(i, j, 0.5 * ((i == j ? 1.0 : 0.0) + vs));
  }
  SymMatrix sigma_uu(u);
  for (Index i = 0; i < u; ++i) {
    for (Index j = i; j < u; ++j) {
      const double val = 0.5 * ((i == j ? 1.0 : 0.0) + 3.0 * tau * h(i, j));
      sigma_uu.set(i, j, val);
      sigma.set(s + i, s + j, val);
    }
  }

  CounterexampleInstance out;
  out.family = "covthresh";
  out.params = {{"s", static_cast<double>(s)}, {"u", ud},         {"tau", tau},
                {"seed", static_cast<double>(p.seed)}, {"r_deg", static_cast<double>(r)}, {"p", pr},
                {"graph_attempts", static_cast<double>(g.attempts)}};
  auto& certs = out.certificates;
  const bool info = !p.enforce_preconditions;
  certs.push_back(make_cert("precondition 4s + 8/tau <= u", lower, Rel::le, ud, info));
  certs.push_back(make_cert("precondition u <= 1/(144 tau^2)", ud, Rel::le, upper, info));

  const Vec ev_a = eigenvalues(a);
  certs.push_back(make_cert("|lambda_1(A) - r|", std::abs(ev_a.front() - static_cast<double>(r)), Rel::le, 1e-8));
  certs.push_back(make_cert("max_{i>=2} |lambda_i(A)|", std::max(std::abs(ev_a[1]), std::abs(ev_a.back())),
                            Rel::le, root_bound));

  const Vec ones(u, 1.0);
  certs.push_back(make_cert("||H 1||", norm2(matvec(h, ones)), Rel::le, 1e-10));
  const Vec ev_h = eigenvalues(h);
  certs.push_back(make_cert("||H||op", std::max(std::abs(ev_h.front()), std::abs(ev_h.back())), Rel::le,
                            2.0 * std::sqrt(ud)));

  const Vec ev_uu = eigenvalues(sigma_uu);
  certs.push_back(make_cert("min lambda_i(Sigma_UU)", ev_uu.back(), Rel::ge, 0.25));
  certs.push_back(make_cert("max lambda_i(Sigma_UU)", ev_uu.front(), Rel::le, 0.75));

  const Vec ev = eigenvalues(sigma);
  certs.push_back(make_cert("lambda_1(Sigma) / lambda_2(Sigma)", ev[0] / ev[1], Rel::ge, 4.0 / 3.0));
  certs.push_back(make_cert("min lambda_i(Sigma)", ev.back(), Rel::ge, -tolerances().psd_slack));

  // Off-diagonal U entries must take exactly the two values of the construction.
  const double hi_real = 1.5 * tau * (1.0 - pr), lo_real = -1.5 * tau * pr;
  const double hi_q = 9.0 * tau / 8.0, lo_q = -3.0 * tau / 8.0;
  double dev_real = 0.0, dev_q = 0.0;
  for (Index i = 0; i < u; ++i) {
    for (Index j = i + 1; j < u; ++j) {
      const double x = sigma_uu(i, j);
      const bool edge = a(i, j) != 0.0;
      dev_real = std::max(dev_real, std::abs(x - (edge ? hi_real : lo_real)));
      dev_q = std::max(dev_q, std::abs(x - (edge ? hi_q : lo_q)));
    }
  }
  certs.push_back(make_cert("off-diagonal U values vs {3tau(1-p)/2, -3tau p/2}", dev_real, Rel::le, 1e-12));
  // The quarter-density values shift by 3τ|p − ¼|/2 when the degree had to be rounded.
  certs.push_back(make_cert("off-diagonal U values vs {9tau/8, -3tau/8}", dev_q, Rel::le,
                            1e-12 + 1.5 * tau * std::abs(pr - 0.25)));

  const SymMatrix t = threshold_entries(sigma, tau);
  std::vector<Index> s_idx(s), u_idx(u);
  for (Index i = 0; i < s; ++i) s_idx[i] = i;
  for (Index i = 0; i < u; ++i) u_idx[i] = s + i;
  certs.push_back(make_cert("||T_tau(Sigma)_UU||op", opnorm(restrict(t, u_idx)), Rel::ge,
                            0.25 + tau * static_cast<double>(r)));
  certs.push_back(make_cert("||T_tau(Sigma)_SS||op", opnorm(restrict(t, s_idx)), Rel::le,
                            1.5 + static_cast<double>(s) * tau));

  Vec v(d, 0.0);
  for (Index i = 0; i < s; ++i) v[i] = 1.0 / std::sqrt(static_cast<double>(s));
  out.instance.sigma = std::move(sigma);
  out.instance.components = {v};
  out.instance.s = s;
  out.instance.gamma = 1.0 - ev[1] / ev[0];
  out.instance.label = "covthresh";
  return out;
}

// ---- greedy correlation ------------------------------------------------------

CounterexampleInstance build_greedycorr_instance(const GreedycorrParams& p) {
  const Index s = p.s;
  if (s < 2) throw ParameterError("greedycorr: s must be at least 2");
  if (!(p.lam1 > p.lam2 && p.lam2 > 0.0)) throw ParameterError("greedycorr: need lam1 > lam2 > 0");
  const Index d0 = 2 * s - 1;
  if (p.embed_dim != 0 && p.embed_dim < d0) {
    throw ParameterError("greedycorr: embed_dim must be 0 or at least 2s - 1 = " + std::to_string(d0));
  }
  const Index d = std::max(d0, p.embed_dim);

  const OrthonormalBasis basis = good_ortho_basis(s);
  const double rs = 1.0 / std::sqrt(static_cast<double>(s));
  const double r2 = 1.0 / std::sqrt(2.0);
  Vec v(d, 0.0);
  for (Index i = 0; i < s; ++i) v[i] = rs;
  std::vector<Vec> us;
  for (Index r = 1; r < s; ++r) {
    Vec ur(d, 0.0);
    for (Index i = 0; i < s; ++i) ur[i] = r2 * basis.columns[r][i];
    ur[s + r - 1] = r2;  // decoy coordinate s + r (1-based)
    us.push_back(std::move(ur));
  }

  SymMatrix sigma(d);
  sigma.add_outer(p.lam1, v);
  for (const Vec& ur : us) sigma.add_outer(p.lam2, ur);
  for (Index i = d0; i < d; ++i) sigma.add(i, i, p.lam2);

  CounterexampleInstance out;
  out.family = "greedycorr";
  out.params = {{"s", static_cast<double>(s)}, {"d", static_cast<double>(d)}, {"lam1", p.lam1}, {"lam2", p.lam2}};
  auto& certs = out.certificates;

  OrthonormalBasis set;
  set.dim = d;
  set.columns.push_back(v);
  set.columns.insert(set.columns.end(), us.begin(), us.end());
  certs.push_back(make_cert("Gram({v, u_r}) - I", set.gram_error(), Rel::le, 1e-10));

  Vec expected;
  expected.push_back(p.lam1);
  expected.insert(expected.end(), (s - 1) + (d - d0), p.lam2);
  expected.insert(expected.end(), s - 1, 0.0);
  certs.push_back(make_cert("spectrum deviation from {lam1, lam2 x (s-1), 0 x (s-1)}",
                            max_abs_diff(eigenvalues(sigma), expected), Rel::le, 1e-10));

  SymMatrix sq(d);
  {
    const auto m = sigma.as_eigen();
    sq = SymMatrix::from_eigen(m * m);
  }
  double true_max = 0.0, decoy_min = INFINITY;
  for (Index j = 1; j < s; ++j) true_max = std::max(true_max, std::abs(sq(0, j)));
  for (Index j = s; j < d0; ++j) decoy_min = std::min(decoy_min, std::abs(sq(0, j)));
  certs.push_back(make_cert("max_{2<=j<=s} |(Sigma^2)_1j|", true_max, Rel::le, 1.0 / static_cast<double>(s)));
  certs.push_back(make_cert("min_{s<j<=2s-1} |(Sigma^2)_1j|", decoy_min, Rel::ge, 0.4 * rs));
  certs.push_back(make_cert("decoy minus true-support correlation", decoy_min - true_max, Rel::gt, 0.0));

  SqrtFactor f;
  f.a.assign(d, 0.0);
  for (Index i = d0; i < d; ++i) f.a[i] = std::sqrt(p.lam2);
  f.w.push_back(v);
  f.c.push_back(std::sqrt(p.lam1));
  for (const Vec& ur : us) {
    f.w.push_back(ur);
    f.c.push_back(std::sqrt(p.lam2));
  }

  out.instance.sigma = std::move(sigma);
  out.instance.components = {std::move(v)};
  out.instance.s = s;
  out.instance.gamma = 1.0 - p.lam2 / p.lam1;
  out.instance.label = "greedycorr";
  out.instance.factor = std::move(f);
  return out;
}

// ---- diagonal thresholding (reconstruction) -----------------------------------

CounterexampleInstance build_diagthresh_instance(const DiagthreshParams& p) {
  const Index d = p.d, s = p.s;
  if (s < 1 || s + 2 > d) throw ParameterError("diagthresh: need 1 <= s and s + 2 <= d");
  if (!(p.lam1 > p.lam2 && p.lam2 >= p.lam3 && p.lam3 >= p.lam4 && p.lam4 > 0.0)) {
    throw ParameterError("diagthresh: need lam1 > lam2 >= lam3 >= lam4 > 0");
  }
  const Index u = d - s;

  Vec v(d, 0.0), w2(d, 0.0), w3(d, 0.0);
  for (Index i = 0; i < s; ++i) v[i] = 1.0 / std::sqrt(static_cast<double>(s));
  const Index alt = u - (u % 2);  // alternating-sign block, orthogonal to the constant vector
  for (Index i = 0; i < u; ++i) {
    w2[s + i] = 1.0 / std::sqrt(static_cast<double>(u));
    if (i < alt) w3[s + i] = (i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(alt));
  }

  SymMatrix sigma(d);
  sigma.add_outer(p.lam1, v);
  for (Index i = s; i < d; ++i) sigma.add(i, i, p.lam4);
  sigma.add_outer(p.lam2 - p.lam4, w2);
  sigma.add_outer(p.lam3 - p.lam4, w3);

  double support_max = 0.0, decoy_min = INFINITY;
  for (Index i = 0; i < s; ++i) support_max = std::max(support_max, sigma(i, i));
  for (Index i = s; i < d; ++i) decoy_min = std::min(decoy_min, sigma(i, i));
  const double margin = decoy_min - support_max;
  if (!(margin > 0.0)) {
    throw ConstructionError("diagthresh: certificate 'min decoy diagonal - max support diagonal' = " +
                            std::to_string(margin) + " is not positive; these parameters cannot hide the support");
  }

  CounterexampleInstance out;
  out.family = "diagthresh";
  out.flags = {"reconstruction"};
  out.params = {{"d", static_cast<double>(d)}, {"s", static_cast<double>(s)}, {"lam1", p.lam1},
                {"lam2", p.lam2},              {"lam3", p.lam3},              {"lam4", p.lam4}};
  out.certificates.push_back(make_cert("min decoy diagonal - max support diagonal", margin, Rel::gt, 0.0));
  const Vec ev = eigenvalues(sigma);
  out.certificates.push_back(make_cert("lambda_1(Sigma) - lam1", std::abs(ev[0] - p.lam1), Rel::le, 1e-10));
  out.certificates.push_back(make_cert("lambda_2(Sigma) / lambda_1(Sigma)", ev[1] / ev[0], Rel::lt, 1.0));
  out.certificates.push_back(make_cert("min lambda_i(Sigma)", ev.back(), Rel::ge, -tolerances().psd_slack));

  SqrtFactor f;
  f.a.assign(d, 0.0);
  for (Index i = s; i < d; ++i) f.a[i] = std::sqrt(p.lam4);
  f.w = {v, w2, w3};
  f.c = {std::sqrt(p.lam1), std::sqrt(p.lam2) - std::sqrt(p.lam4), std::sqrt(p.lam3) - std::sqrt(p.lam4)};

  out.instance.sigma = std::move(sigma);
  out.instance.components = {std::move(v)};
  out.instance.s = s;
  out.instance.gamma = 1.0 - p.lam2 / p.lam1;
  out.instance.label = "diagthresh";
  out.instance.factor = std::move(f);
  return out;
}

// ---- deflation barrier -------------------------------------------------------

BarrierInstance build_deflation_barrier(Index d, double delta, double gamma) {
  if (d < 4) throw ParameterError("barrier: d must be at least 4");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("barrier: delta must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("barrier: gamma must lie in (0, 1)");

  const double r2 = 1.0 / std::sqrt(2.0);
  Vec v1(d, 0.0), v2(d, 0.0), w(d, 0.0), e3(d, 0.0);
  v1[0] = v1[1] = r2;
  v2[0] = r2;
  v2[1] = -r2;
  e3[2] = 1.0;
  const double qn = 1.0 / std::sqrt(static_cast<double>(d - 3));
  w[2] = r2;
  for (Index i = 3; i < d; ++i) w[i] = r2 * qn;

  SymMatrix sigma(d);
  sigma.add_outer(1.0 / delta, v1);
  sigma.add_outer(1.0, v2);
  sigma.add_outer(1.0 - gamma, w);

  Vec u(d, 0.0);
  const double a = std::sqrt(1.0 - delta), b = std::sqrt(delta);
  for (Index i = 0; i < d; ++i) u[i] = a * v1[i] + b * e3[i];

  const double g1 = 1.0 - gamma;
  SymMatrix c(2, {1.0 + g1 * (1.0 - delta) / 2.0, -g1 * a / 2.0, -g1 * a / 2.0, g1 / 2.0});

  BarrierInstance out{CounterexampleInstance{}, u, c};
  auto& inst = out.inst;
  inst.family = "barrier";
  inst.params = {{"d", static_cast<double>(d)}, {"delta", delta}, {"gamma", gamma}};
  const double uv = kernels::dot(u, v1);
  inst.certificates.push_back(make_cert("|<u, v1>^2 - (1 - delta)|", std::abs(uv * uv - (1.0 - delta)), Rel::le, 1e-12));
  inst.certificates.push_back(make_cert("nnz(u)", static_cast<double>(nnz(u)), Rel::le, 3.0));
  Vec expected(d, 0.0);
  expected[0] = 1.0 / delta;
  expected[1] = 1.0;
  expected[2] = 1.0 - gamma;
  inst.certificates.push_back(
      make_cert("spectrum deviation from {1/delta, 1, 1-gamma, 0...}", max_abs_diff(eigenvalues(sigma), expected),
                Rel::le, 1e-10 * std::max(1.0, 1.0 / delta)));

  SqrtFactor f;
  f.a.assign(d, 0.0);
  f.w = {v1, v2, w};
  f.c = {1.0 / std::sqrt(delta), 1.0, std::sqrt(1.0 - gamma)};

  inst.instance.sigma = std::move(sigma);
  inst.instance.components = {std::move(v1), std::move(v2)};
  inst.instance.s = 2;
  inst.instance.gamma = 1.0 - delta;
  inst.instance.label = "barrier";
  inst.instance.factor = std::move(f);
  return out;
}

VerificationReport verify_barrier(const BarrierInstance& b) {
  const SymMatrix& sigma = b.inst.instance.sigma;
  const Index d = sigma.dim();
  VerificationReport rep;
  rep.family = "barrier";
  rep.params = b.inst.params;
  rep.certificates = b.inst.certificates;

  const Eigen::Map<const Eigen::VectorXd> u(b.u.data(), static_cast<Eigen::Index>(d));
  const Eigen::MatrixXd p =
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) - u * u.transpose();
  const SymMatrix m = SymMatrix::from_eigen(p * sigma.as_eigen() * p);
  const TopEigen top = top_eigenpair(m);
  const Vec& x = top.pair.vector;

  double min_abs = INFINITY;
  Index count = 0;
  for (double xi : x) {
    min_abs = std::min(min_abs, std::abs(xi));
    if (std::abs(xi) > 1e-8) ++count;
  }
  rep.params.emplace_back("nnz", static_cast<double>(count));
  rep.params.emplace_back("lambda_1(P Sigma P)", top.pair.value);

  const double lam_c = eig_top_m(b.c, 1).front().value;
  rep.params.emplace_back("lambda_1(C)", lam_c);
  rep.certificates.push_back(make_cert("min_i |v_1(P Sigma P)_i|", min_abs, Rel::gt, 1e-8));
  rep.certificates.push_back(make_cert("lambda_1(P Sigma P)", top.pair.value, Rel::gt, 1.0));
  rep.certificates.push_back(make_cert("|lambda_1(P Sigma P) - lambda_1(C)|", std::abs(top.pair.value - lam_c), Rel::le, 1e-10));

  const Vec& v2 = b.inst.instance.components.at(1);
  Vec mv2 = matvec(m, v2);
  kernels::axpy(-1.0, v2, mv2);
  rep.certificates.push_back(make_cert("||P Sigma P v2 - v2||", norm2(mv2), Rel::le, 1e-10));
  if (top.gap < tolerances().multiplicity) rep.flags.push_back("repeated-top-eigenvalue");
  return rep;
}

VerificationReport verify_instance(const CounterexampleInstance& inst) {
  if (inst.family == "barrier") {
    return verify_barrier(build_deflation_barrier(static_cast<Index>(inst.param("d")), inst.param("delta"),
                                                  inst.param("gamma")));
  }
  VerificationReport rep;
  rep.family = inst.family;
  rep.params = inst.params;
  rep.certificates = inst.certificates;
  rep.flags = inst.flags;
  const SymMatrix& sigma = inst.instance.sigma;
  const Vec& v = inst.instance.v();
  const auto s = static_cast<Index>(inst.param("s"));

  const TopEigen top = top_eigenpair(sigma);
  rep.certificates.push_back(make_cert("sin^2(v_1(Sigma), v)", sin2_angle(top.pair.vector, v), Rel::le, 1e-10));
  if (top.gap < tolerances().multiplicity) rep.flags.push_back("repeated-top-eigenvalue");

  if (inst.family == "covthresh") {
    const CandidateVector c = cov_thresh(sigma, inst.param("tau"), s);
    double s_mass = 0.0;
    for (Index i = 0; i < s; ++i) s_mass = std::max(s_mass, std::abs(c.values[i]));
    rep.certificates.push_back(make_cert("cov_thresh: max_{i in S} |u_i|", s_mass, Rel::le, 1e-8));
    rep.certificates.push_back(make_cert("cov_thresh: sin^2(u, v)", sin2_angle(c.values, v), Rel::ge, 1.0 - 1e-12));
  } else if (inst.family == "greedycorr") {
    const std::vector<Index> g = greedy_corr_support(sigma, s, 0);
    const auto decoys = static_cast<double>(std::count_if(g.begin(), g.end(), [&](Index i) { return i >= s; }));
    rep.certificates.push_back(make_cert("greedy_corr: decoys in G", decoys, Rel::ge, static_cast<double>(s - 1)));
    const CandidateVector c = greedy_corr(sigma, s, 0);
    rep.certificates.push_back(make_cert("greedy_corr: sin^2(u, v)", sin2_angle(c.values, v), Rel::ge,
                                         1.0 - 1.0 / static_cast<double>(s) - 1e-12));
  } else if (inst.family == "diagthresh") {
    const CandidateVector c = diag_thresh(sigma, s);
    const auto hits = static_cast<double>(std::count_if(c.support.begin(), c.support.end(),
                                                        [&](Index i) { return v[i] != 0.0; }));
    rep.certificates.push_back(make_cert("diag_thresh: |supp(u) ∩ supp(v)|", hits, Rel::le, 0.0));
    rep.certificates.push_back(make_cert("diag_thresh: sin^2(u, v)", sin2_angle(c.values, v), Rel::ge, 1.0 - 1e-12));
  }
  return rep;
}

std::vector<VerificationReport> verify_all() {
  std::vector<VerificationReport> out;
  auto guarded = [&](const std::string& family, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const Error& e) {
      VerificationReport rep;
      rep.family = family;
      rep.error = e.what();
      out.push_back(std::move(rep));
    }
  };
  guarded("barrier", [] { return verify_barrier(build_deflation_barrier(50, 0.1, 0.2)); });
  guarded("greedycorr", [] { return verify_instance(build_greedycorr_instance({})); });
  guarded("covthresh", [] {
    CovthreshParams p;
    p.enforce_preconditions = false;
    return verify_instance(build_covthresh_instance(p));
  });
  guarded("diagthresh", [] { return verify_instance(build_diagthresh_instance({})); });
  return out;
}

}  // namespace spca
