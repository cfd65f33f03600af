#include "spca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "spca/error.hpp"
#include "spca/kernels.hpp"

namespace spca {

namespace {

Tolerances g_tolerances;

void require_dim(Index dim) {
  if (dim == 0) throw ParameterError("matrix dimension must be at least 1");
}

void require_same_size(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw ParameterError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(const SymMatrix& m, bool vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      m.as_eigen(), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge (dim " + std::to_string(m.dim()) + ")");
  }
  return es;
}

}  // namespace

const Tolerances& tolerances() noexcept { return g_tolerances; }
void set_tolerances(const Tolerances& tol) noexcept { g_tolerances = tol; }

// ---- SymMatrix -------------------------------------------------------------

SymMatrix::SymMatrix(Index dim) : dim_(dim) {
  require_dim(dim);
  a_.assign(dim * dim, 0.0);
}

SymMatrix::SymMatrix(Index dim, std::vector<double> entries) : dim_(dim), a_(std::move(entries)) {
  require_dim(dim);
  if (a_.size() != dim * dim) {
    throw ParameterError("SymMatrix: expected " + std::to_string(dim * dim) + " entries, got " +
                         std::to_string(a_.size()));
  }
  for (Index i = 0; i < dim; ++i) {
    for (Index j = i + 1; j < dim; ++j) {
      if (a_[i * dim + j] != a_[j * dim + i]) {
        throw ParameterError("SymMatrix: entries (" + std::to_string(i) + "," + std::to_string(j) +
                             ") and its transpose differ");
      }
    }
  }
}

SymMatrix SymMatrix::identity(Index dim) {
  SymMatrix m(dim);
  for (Index i = 0; i < dim; ++i) m.a_[i * dim + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (Index i = 0; i < diag.size(); ++i) m.a_[i * diag.size() + i] = diag[i];
  return m;
}

SymMatrix SymMatrix::from_upper(Index dim, std::vector<double> entries) {
  require_dim(dim);
  if (entries.size() != dim * dim) throw ParameterError("SymMatrix::from_upper: size mismatch");
  for (Index i = 0; i < dim; ++i) {
    for (Index j = i + 1; j < dim; ++j) entries[j * dim + i] = entries[i * dim + j];
  }
  SymMatrix m(dim);
  m.a_ = std::move(entries);
  return m;
}

SymMatrix SymMatrix::from_eigen(const Eigen::MatrixXd& e) {
  if (e.rows() != e.cols()) throw ParameterError("SymMatrix::from_eigen: matrix is not square");
  const auto d = static_cast<Index>(e.rows());
  SymMatrix m(d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      m.set(i, j, 0.5 * (e(ii, jj) + e(jj, ii)));
    }
  }
  return m;
}

void SymMatrix::add_outer(double alpha, std::span<const double> x) {
  if (x.size() != dim_) throw ParameterError("SymMatrix::add_outer: dimension mismatch");
  for (Index i = 0; i < dim_; ++i) {
    const double xi = alpha * x[i];
    if (xi == 0.0) continue;
    for (Index j = i; j < dim_; ++j) a_[i * dim_ + j] += xi * x[j];
  }
  for (Index i = 0; i < dim_; ++i) {
    for (Index j = i + 1; j < dim_; ++j) a_[j * dim_ + i] = a_[i * dim_ + j];
  }
}

void SymMatrix::scale(double alpha) noexcept {
  for (double& x : a_) x *= alpha;
}

double SymMatrix::trace() const noexcept {
  double t = 0.0;
  for (Index i = 0; i < dim_; ++i) t += a_[i * dim_ + i];
  return t;
}

double OrthonormalBasis::gram_error() const {
  double worst = 0.0;
  for (Index i = 0; i < columns.size(); ++i) {
    for (Index j = i; j < columns.size(); ++j) {
      const double g = kernels::dot(columns[i], columns[j]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

// ---- vectors ---------------------------------------------------------------

double norm2(std::span<const double> v) { return std::sqrt(kernels::sum_squares(v)); }

double normalize(std::span<double> v) {
  const double n = norm2(v);
  if (n > 0.0) kernels::scale(1.0 / n, v);
  return n;
}

Index nnz(std::span<const double> v) noexcept {
  return static_cast<Index>(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }));
}

std::vector<Index> support(std::span<const double> v) {
  std::vector<Index> s;
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) s.push_back(i);
  }
  return s;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b, "max_abs_diff");
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::vector<Index> top_r_indices(std::span<const double> v, Index r) {
  if (r < 1 || r > v.size()) {
    throw ParameterError("top_r: r=" + std::to_string(r) + " outside [1, " + std::to_string(v.size()) + "]");
  }
  std::vector<Index> idx(v.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  if (r < v.size()) {
    auto before = [&](Index a, Index b) {
      const double fa = std::abs(v[a]), fb = std::abs(v[b]);
      return fa > fb || (fa == fb && a < b);
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(r), idx.end(), before);
    idx.resize(r);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

Vec top_r(std::span<const double> v, Index r) {
  Vec out(v.size(), 0.0);
  for (Index i : top_r_indices(v, r)) out[i] = v[i];
  return out;
}

// ---- matrix operations -----------------------------------------------------

SymMatrix threshold_entries(const SymMatrix& m, double tau) {
  if (!(tau > 0.0)) throw ParameterError("threshold_entries: tau must be positive");
  const Index d = m.dim();
  std::vector<double> out(m.data(), m.data() + d * d);
  for (double& x : out) {
    if (!(std::abs(x) >= tau)) x = 0.0;
  }
  return SymMatrix(d, std::move(out));
}

double sin2_angle(std::span<const double> u, std::span<const double> v) {
  require_same_size(u, v, "sin2_angle");
  const double uu = kernels::sum_squares(u);
  const double vv = kernels::sum_squares(v);
  if (!(uu > 0.0) || !(vv > 0.0)) throw ParameterError("sin2_angle: zero vector");
  const double uv = kernels::dot(u, v);
  return std::clamp(1.0 - (uv * uv) / (uu * vv), 0.0, 1.0);
}

Vec matvec(const SymMatrix& m, std::span<const double> u) {
  if (u.size() != m.dim()) throw ParameterError("matvec: dimension mismatch");
  const Index d = m.dim();
  const auto& k = kernels::active();
  Vec out(d);
  for (Index i = 0; i < d; ++i) out[i] = k.dot(m.data() + i * d, u.data(), d);
  return out;
}

Vec matvec_sparse(const SymMatrix& m, std::span<const double> u) {
  if (u.size() != m.dim()) throw ParameterError("matvec: dimension mismatch");
  std::vector<Index> idx = support(u);
  Vec coeffs(idx.size());
  for (Index k = 0; k < idx.size(); ++k) coeffs[k] = u[idx[k]];
  Vec out(m.dim(), 0.0);
  kernels::active().row_combination(m.data(), m.dim(), idx.data(), coeffs.data(), idx.size(),
                                    out.data(), m.dim());
  return out;
}

double rayleigh(const SymMatrix& m, std::span<const double> u) {
  if (u.size() != m.dim()) throw ParameterError("rayleigh: dimension mismatch");
  const double n = norm2(u);
  if (std::abs(n - 1.0) > tolerances().unit_norm) {
    throw ParameterError("rayleigh: vector is not unit norm (‖u‖ = " + std::to_string(n) + ")");
  }
  return kernels::dot(u, matvec_sparse(m, u));
}

void canonical_sign(std::span<double> v) noexcept {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (!v.empty() && v[best] < 0.0) {
    for (double& x : v) x = -x;
  }
}

std::vector<EigPair> eig_top_m(const SymMatrix& m, Index count) {
  const Index d = m.dim();
  if (count < 1 || count > d) {
    throw ParameterError("eig_top_m: m=" + std::to_string(count) + " outside [1, " + std::to_string(d) + "]");
  }
  const auto es = solve(m, true);
  std::vector<EigPair> out;
  out.reserve(count);
  for (Index k = 0; k < count; ++k) {
    const auto col = static_cast<Eigen::Index>(d - 1 - k);  // Eigen sorts ascending
    EigPair p{es.eigenvalues()(col), Vec(d)};
    for (Index i = 0; i < d; ++i) p.vector[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), col);
    normalize(p.vector);
    canonical_sign(p.vector);
    Vec mv = matvec(m, p.vector);
    kernels::axpy(-p.value, p.vector, mv);
    const double residual = norm2(mv);
    if (residual > tolerances().eig_residual * std::max(1.0, std::abs(p.value))) {
      throw NumericalError("eig_top_m: residual " + std::to_string(residual) + " above tolerance", residual);
    }
    out.push_back(std::move(p));
  }
  return out;
}

TopEigen top_eigenpair(const SymMatrix& m) {
  const Index d = m.dim();
  const auto es = solve(m, true);
  const auto& lam = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  const auto last = static_cast<Eigen::Index>(d - 1);
  const double top = lam(last);
  const double tol = tolerances().multiplicity * std::max(1.0, std::abs(top));

  TopEigen out;
  out.gap = d > 1 ? top - lam(last - 1) : 0.0;
  Index cluster = 1;
  while (cluster < d && top - lam(last - static_cast<Eigen::Index>(cluster)) <= tol) ++cluster;
  out.cluster = cluster;

  Vec v(d, 0.0);
  if (cluster == 1) {
    for (Index i = 0; i < d; ++i) v[i] = vecs(static_cast<Eigen::Index>(i), last);
  } else {
    const Eigen::MatrixXd basis = vecs.rightCols(static_cast<Eigen::Index>(cluster));
    for (Index j = 0; j < d; ++j) {
      const Eigen::VectorXd proj = basis * basis.row(static_cast<Eigen::Index>(j)).transpose();
      if (proj.norm() > 1e-8) {
        for (Index i = 0; i < d; ++i) v[i] = proj(static_cast<Eigen::Index>(i));
        break;
      }
    }
  }
  normalize(v);
  canonical_sign(v);
  Vec mv = matvec(m, v);
  kernels::axpy(-top, v, mv);
  const double residual = norm2(mv);
  if (residual > tolerances().eig_residual * std::max(1.0, std::abs(top))) {
    throw NumericalError("top_eigenpair: residual " + std::to_string(residual) + " above tolerance", residual);
  }
  out.pair = EigPair{top, std::move(v)};
  return out;
}

Vec eigenvalues(const SymMatrix& m) {
  const auto es = solve(m, false);
  Vec out(m.dim());
  for (Index i = 0; i < m.dim(); ++i) out[i] = es.eigenvalues()(static_cast<Eigen::Index>(m.dim() - 1 - i));
  return out;
}

double opnorm(const SymMatrix& m) {
  const Vec ev = eigenvalues(m);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

double min_eigenvalue(const SymMatrix& m) { return eigenvalues(m).back(); }

SymMatrix householder_to(std::span<const double> x, std::span<const double> t) {
  require_same_size(x, t, "householder_to");
  const double tol = tolerances().householder_unit;
  if (std::abs(norm2(x) - 1.0) > tol || std::abs(norm2(t) - 1.0) > tol) {
    throw ParameterError("householder_to: inputs must be unit vectors");
  }
  const Index d = x.size();
  Vec u(x.begin(), x.end());
  kernels::axpy(-1.0, t, u);
  const double uu = kernels::sum_squares(u);
  if (std::sqrt(uu) < tolerances().householder_same) return SymMatrix::identity(d);
  SymMatrix q = SymMatrix::identity(d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j) q.add(i, j, -2.0 * u[i] * u[j] / uu);
  }
  return q;
}

OrthonormalBasis good_ortho_basis(Index d) {
  if (d < 1) throw ParameterError("good_ortho_basis: d must be at least 1");
  OrthonormalBasis basis;
  basis.dim = d;
  const double inv = 1.0 / std::sqrt(static_cast<double>(d));
  basis.columns.emplace_back(d, inv);
  if (d == 1) return basis;

  // V: an orthonormal complement of u1, taken from the reflector e1 -> u1.
  Vec e1(d, 0.0);
  e1[0] = 1.0;
  const SymMatrix h = householder_to(e1, basis.columns[0]);

  // w = e1 projected off u1, expressed in V-coordinates.
  Vec w = e1;
  kernels::axpy(-inv, basis.columns[0], w);
  const Index m = d - 1;
  Vec x(m);
  for (Index c = 0; c < m; ++c) {
    double acc = 0.0;
    for (Index i = 0; i < d; ++i) acc += h(i, c + 1) * w[i];
    x[c] = acc;
  }
  normalize(x);
  const Vec t(m, 1.0 / std::sqrt(static_cast<double>(m)));
  const SymMatrix q = householder_to(x, t);

  for (Index c = 0; c < m; ++c) {
    Vec col(d, 0.0);
    for (Index k = 0; k < m; ++k) {
      const double coef = q(k, c);
      for (Index i = 0; i < d; ++i) col[i] += h(i, k + 1) * coef;
    }
    basis.columns.push_back(std::move(col));
  }
  return basis;
}

SymMatrix restrict(const SymMatrix& m, std::span<const Index> subset) {
  if (subset.empty()) throw ParameterError("restrict: index set is empty");
  std::vector<bool> seen(m.dim(), false);
  for (Index i : subset) {
    if (i >= m.dim()) throw ParameterError("restrict: index " + std::to_string(i) + " out of range");
    if (seen[i]) throw ParameterError("restrict: duplicate index " + std::to_string(i));
    seen[i] = true;
  }
  const Index k = subset.size();
  std::vector<double> out(k * k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) out[a * k + b] = m(subset[a], subset[b]);
  }
  return SymMatrix(k, std::move(out));
}

}  // namespace spca
