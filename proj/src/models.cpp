#include "spca/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "spca/error.hpp"
#include "spca/kernels.hpp"
#include "spca/parallel.hpp"
#include "spca/rng.hpp"

namespace spca {

namespace {

constexpr Index kRowBlock = 64;

void check_support_args(Index d, Index s) {
  if (d < 1) throw ParameterError("d must be at least 1");
  if (s < 1 || s > d) {
    throw ParameterError("s=" + std::to_string(s) + " must lie in [1, d=" + std::to_string(d) + "]");
  }
}

// Splits [0, d) into contiguous row ranges of roughly equal upper-triangle work.
std::vector<std::pair<Index, Index>> triangle_ranges(Index d, Index parts) {
  std::vector<std::pair<Index, Index>> out;
  const double total = 0.5 * static_cast<double>(d) * static_cast<double>(d + 1);
  double acc = 0.0;
  Index start = 0;
  for (Index i = 0; i < d; ++i) {
    acc += static_cast<double>(d - i);
    if (acc >= total * static_cast<double>(out.size() + 1) / static_cast<double>(parts) || i + 1 == d) {
      out.emplace_back(start, i + 1);
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

// ---- Dataset ---------------------------------------------------------------

Dataset::Dataset(Index n_, Index d_, std::vector<double> rows_, std::uint64_t seed_)
    : n(n_), d(d_), rows(std::move(rows_)), seed(seed_) {
  if (n < 1 || d < 1) throw ParameterError("dataset must have n >= 1 and d >= 1");
  if (rows.size() != n * d) throw ParameterError("dataset: row buffer size does not match n*d");
  for (Index i = 0; i < rows.size(); ++i) {
    if (!std::isfinite(rows[i])) {
      throw ParameterError("dataset: non-finite value in row " + std::to_string(i / d));
    }
  }
}

Dataset Dataset::slice(Index begin, Index end) const {
  if (begin >= end || end > n) throw ParameterError("dataset slice out of range");
  return Dataset(end - begin, d,
                 std::vector<double>(rows.begin() + static_cast<std::ptrdiff_t>(begin * d),
                                     rows.begin() + static_cast<std::ptrdiff_t>(end * d)),
                 seed);
}

// ---- SqrtFactor ------------------------------------------------------------

void SqrtFactor::apply(std::span<const double> z, std::span<double> out) const {
  for (Index i = 0; i < a.size(); ++i) out[i] = a[i] * z[i];
  const auto& k = kernels::active();
  for (Index j = 0; j < w.size(); ++j) {
    k.axpy(c[j] * k.dot(w[j].data(), z.data(), z.size()), w[j].data(), out.data(), out.size());
  }
}

SymMatrix SqrtFactor::square() const {
  const Index d = a.size();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Index i = 0; i < d; ++i) r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = a[i];
  for (Index j = 0; j < w.size(); ++j) {
    const Eigen::Map<const Eigen::VectorXd> wj(w[j].data(), static_cast<Eigen::Index>(d));
    r += c[j] * wj * wj.transpose();
  }
  return SymMatrix::from_eigen(r * r);
}

// ---- planted models --------------------------------------------------------

Vec planted_vector(Index d, Index s, const SupportSpec& spec) {
  check_support_args(d, s);
  std::vector<Index> idx = spec.indices;
  CounterRng rng(spec.seed, 0x5u);
  if (idx.empty()) {
    if (spec.random_support) {
      std::vector<Index> all(d);
      std::iota(all.begin(), all.end(), Index{0});
      rng.shuffle(all);
      idx.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(s));
      std::sort(idx.begin(), idx.end());
    } else {
      idx.resize(s);
      std::iota(idx.begin(), idx.end(), Index{0});
    }
  }
  if (idx.size() != s) throw ParameterError("support must list exactly s indices");
  Vec v(d, 0.0);
  const double mag = 1.0 / std::sqrt(static_cast<double>(s));
  for (Index i : idx) {
    if (i >= d) throw ParameterError("support index " + std::to_string(i) + " out of range");
    if (v[i] != 0.0) throw ParameterError("duplicate support index " + std::to_string(i));
    v[i] = (spec.random_signs && (rng.next_u32() & 1u)) ? -mag : mag;
  }
  return v;
}

PlantedInstance build_spiked_from_vector(Vec v, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in (0, 1)");
  if (std::abs(norm2(v) - 1.0) > 1e-12) throw ParameterError("planted vector must be unit");
  const Index d = v.size();
  const double base = 1.0 - gamma;
  SymMatrix sigma(d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j) sigma.set(i, j, (i == j ? base : 0.0) + gamma * v[i] * v[j]);
  }
  PlantedInstance inst;
  inst.sigma = std::move(sigma);
  inst.s = nnz(v);
  inst.gamma = gamma;
  inst.label = "spiked";
  const double root = std::sqrt(base);
  inst.factor = SqrtFactor{Vec(d, root), {v}, {1.0 - root}};
  inst.components = {std::move(v)};
  return inst;
}

PlantedInstance build_spiked_general(Index d, Index s, double gamma, const SupportSpec& spec) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in (0, 1)");
  return build_spiked_from_vector(planted_vector(d, s, spec), gamma);
}

PlantedInstance build_spiked_identity(Index d, Index s, const SupportSpec& spec) {
  PlantedInstance inst = build_spiked_general(d, s, 0.1, spec);
  inst.label = "spiked_identity";
  return inst;
}

// ---- sampling --------------------------------------------------------------

SymMatrix psd_sqrt(const SymMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma.as_eigen());
  if (es.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigensolver did not converge");
  Eigen::VectorXd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -tolerances().psd_slack) {
      throw ParameterError("covariance is not positive semidefinite (eigenvalue " +
                           std::to_string(lam(i)) + ")");
    }
    lam(i) = std::sqrt(std::max(lam(i), 0.0));
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  return SymMatrix::from_eigen(v * lam.asDiagonal() * v.transpose());
}

GaussianSampler::GaussianSampler(const SymMatrix& sigma) : d_(sigma.dim()) {
  const SymMatrix r = psd_sqrt(sigma);
  root_.assign(r.data(), r.data() + d_ * d_);
}

GaussianSampler::GaussianSampler(const PlantedInstance& inst) : d_(inst.dim()) {
  if (inst.factor) {
    factor_ = inst.factor;
  } else {
    const SymMatrix r = psd_sqrt(inst.sigma);
    root_.assign(r.data(), r.data() + d_ * d_);
  }
}

void GaussianSampler::sample_rows(std::uint64_t seed, Index begin, Index end, std::span<double> out) const {
  if (out.size() != (end - begin) * d_) throw ParameterError("sample_rows: output buffer size mismatch");
  Vec z(d_);
  const auto& k = kernels::active();
  for (Index i = begin; i < end; ++i) {
    fill_gaussian_row(seed, i, z);
    double* x = out.data() + (i - begin) * d_;
    if (factor_) {
      factor_->apply(z, {x, d_});
    } else {
      for (Index j = 0; j < d_; ++j) x[j] = k.dot(root_.data() + j * d_, z.data(), d_);
    }
  }
}

Dataset GaussianSampler::sample(Index n, std::uint64_t seed, unsigned threads) const {
  if (n < 1) throw ParameterError("sample size n must be at least 1");
  std::vector<double> rows(n * d_);
  const Index chunks = std::max<Index>(1, std::min<Index>(n, Index{threads} * 4));
  const Index per = (n + chunks - 1) / chunks;
  parallel_for(chunks, threads, [&](Index c) {
    const Index b = std::min(n, c * per), e = std::min(n, b + per);
    if (b < e) sample_rows(seed, b, e, {rows.data() + b * d_, (e - b) * d_});
  });
  return Dataset(n, d_, std::move(rows), seed);
}

Dataset sample_gaussian(const SymMatrix& sigma, Index n, std::uint64_t seed, unsigned threads) {
  return GaussianSampler(sigma).sample(n, seed, threads);
}

Dataset sample_gaussian(const PlantedInstance& inst, Index n, std::uint64_t seed, unsigned threads) {
  return GaussianSampler(inst).sample(n, seed, threads);
}

// ---- covariance ------------------------------------------------------------

CovarianceAccumulator::CovarianceAccumulator(Index d, unsigned threads)
    : d_(d), threads_(threads == 0 ? 1 : threads), upper_(d * d, 0.0) {
  if (d < 1) throw ParameterError("covariance dimension must be at least 1");
}

void CovarianceAccumulator::add_rows(std::span<const double> rows) {
  if (rows.size() % d_ != 0) throw ParameterError("add_rows: buffer is not a whole number of rows");
  const Index m = rows.size() / d_;
  const auto& k = kernels::active();
  const auto ranges = triangle_ranges(d_, std::max<Index>(1, Index{threads_} * 2));
  for (Index b = 0; b < m; b += kRowBlock) {
    const Index cnt = std::min(kRowBlock, m - b);
    const double* x = rows.data() + b * d_;
    parallel_for(ranges.size(), threads_, [&](Index p) {
      k.syrk_upper(x, cnt, d_, upper_.data(), ranges[p].first, ranges[p].second);
    });
  }
  n_ += m;
}

SymMatrix CovarianceAccumulator::covariance() const {
  if (n_ == 0) throw ParameterError("covariance of zero samples");
  std::vector<double> out = upper_;
  const double inv = 1.0 / static_cast<double>(n_);
  for (double& x : out) x *= inv;
  return SymMatrix::from_upper(d_, std::move(out));
}

SymMatrix sample_covariance(const Dataset& x, Index begin, Index end, unsigned threads) {
  if (begin >= end || end > x.n) throw ParameterError("sample_covariance: empty or out-of-range row range");
  CovarianceAccumulator acc(x.d, threads);
  acc.add_rows({x.rows.data() + begin * x.d, (end - begin) * x.d});
  return acc.covariance();
}

SymMatrix sample_covariance(const Dataset& x, unsigned threads) { return sample_covariance(x, 0, x.n, threads); }

// ---- CovOperator -----------------------------------------------------------

CovOperator CovOperator::dense(std::shared_ptr<const SymMatrix> m) {
  if (!m) throw ParameterError("dense operator: null matrix");
  const Index d = m->dim();
  return CovOperator(d, Dense{std::move(m)});
}

CovOperator CovOperator::dense(SymMatrix m) { return dense(std::make_shared<const SymMatrix>(std::move(m))); }

CovOperator CovOperator::data(std::shared_ptr<const Dataset> x, Index begin, Index end, Vec mean) {
  if (!x) throw ParameterError("data operator: null dataset");
  if (begin >= end || end > x->n) throw ParameterError("data operator: empty or out-of-range row range");
  if (!mean.empty() && mean.size() != x->d) throw ParameterError("data operator: mean has wrong dimension");
  const Index d = x->d;
  return CovOperator(d, Data{std::move(x), begin, end, std::move(mean)});
}

CovOperator CovOperator::sparse_data(std::shared_ptr<const SparseRows> x, Vec mean) {
  if (!x || x->n == 0) throw ParameterError("sparse operator: empty data");
  if (!mean.empty() && mean.size() != x->d) throw ParameterError("sparse operator: mean has wrong dimension");
  const Index d = x->d;
  return CovOperator(d, Sparse{std::move(x), std::move(mean)});
}

CovOperator CovOperator::projected(std::shared_ptr<const CovOperator> base, std::vector<Vec> directions) {
  if (!base) throw ParameterError("projected operator: null base");
  for (const Vec& p : directions) {
    if (p.size() != base->dim()) throw ParameterError("projected operator: direction has wrong dimension");
  }
  const Index d = base->dim();
  return CovOperator(d, Projected{std::move(base), std::move(directions)});
}

const SymMatrix* CovOperator::dense_matrix() const noexcept {
  if (const auto* p = std::get_if<Dense>(&kind_)) return p->m.get();
  return nullptr;
}

Index CovOperator::samples() const noexcept {
  if (const auto* p = std::get_if<Data>(&kind_)) return p->end - p->begin;
  if (const auto* p = std::get_if<Sparse>(&kind_)) return p->x->n;
  if (const auto* p = std::get_if<Projected>(&kind_)) return p->base->samples();
  return 0;
}

namespace {

void project_out(const std::vector<Vec>& dirs, std::span<double> x) {
  const auto& k = kernels::active();
  for (const Vec& p : dirs) k.axpy(-k.dot(p.data(), x.data(), x.size()), p.data(), x.data(), x.size());
}

}  // namespace

Vec CovOperator::apply(std::span<const double> u) const {
  if (u.size() != d_) {
    throw ParameterError("cov_apply: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                         std::to_string(d_) + ")");
  }
  const auto& k = kernels::active();
  return std::visit(
      [&](const auto& op) -> Vec {
        using K = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<K, Dense>) {
          return matvec_sparse(*op.m, u);
        } else if constexpr (std::is_same_v<K, Data>) {
          const Dataset& x = *op.x;
          const Index b = op.end - op.begin;
          const double* base = x.rows.data() + op.begin * d_;
          std::vector<Index> idx = support(u);
          Vec y(b);
          if (idx.size() * 2 <= d_) {
            Vec coeffs(idx.size());
            for (Index j = 0; j < idx.size(); ++j) coeffs[j] = u[idx[j]];
            k.gather_dot_rows(base, d_, b, idx.data(), coeffs.data(), idx.size(), y.data());
          } else {
            for (Index i = 0; i < b; ++i) y[i] = k.dot(base + i * d_, u.data(), d_);
          }
          double ysum = 0.0;
          if (!op.mean.empty()) {
            const double mu_u = k.dot(op.mean.data(), u.data(), d_);
            for (double& yi : y) yi -= mu_u;
            for (double yi : y) ysum += yi;
          }
          std::vector<Index> rows(b);
          std::iota(rows.begin(), rows.end(), Index{0});
          Vec out(d_, 0.0);
          k.row_combination(base, d_, rows.data(), y.data(), b, out.data(), d_);
          if (!op.mean.empty()) k.axpy(-ysum, op.mean.data(), out.data(), d_);
          k.scale(1.0 / static_cast<double>(b), out.data(), d_);
          return out;
        } else if constexpr (std::is_same_v<K, Sparse>) {
          const SparseRows& x = *op.x;
          const double mu_u = op.mean.empty() ? 0.0 : k.dot(op.mean.data(), u.data(), d_);
          Vec out(d_, 0.0);
          double ysum = 0.0;
          for (Index i = 0; i < x.n; ++i) {
            double yi = -mu_u;
            for (Index p = x.row_ptr[i]; p < x.row_ptr[i + 1]; ++p) yi += x.val[p] * u[x.col[p]];
            if (yi == 0.0) continue;
            ysum += yi;
            for (Index p = x.row_ptr[i]; p < x.row_ptr[i + 1]; ++p) out[x.col[p]] += yi * x.val[p];
          }
          if (!op.mean.empty()) k.axpy(-ysum, op.mean.data(), out.data(), d_);
          k.scale(1.0 / static_cast<double>(x.n), out.data(), d_);
          return out;
        } else {
          Vec w(u.begin(), u.end());
          project_out(op.directions, w);
          Vec out = op.base->apply(w);
          project_out(op.directions, out);
          return out;
        }
      },
      kind_);
}

SymMatrix CovOperator::to_dense(unsigned threads) const {
  if (const auto* p = std::get_if<Dense>(&kind_)) return *p->m;
  if (const auto* p = std::get_if<Data>(&kind_); p != nullptr && p->mean.empty()) {
    return sample_covariance(*p->x, p->begin, p->end, threads);
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_));
  parallel_for(d_, threads, [&](Index j) {
    Vec e(d_, 0.0);
    e[j] = 1.0;
    const Vec col = apply(e);
    for (Index i = 0; i < d_; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  });
  return SymMatrix::from_eigen(m);
}

Vec cov_apply(const CovOperator& op, std::span<const double> u) { return op.apply(u); }

std::vector<CovOperator> batch_covariances(std::shared_ptr<const Dataset> x, Index t) {
  if (!x) throw ParameterError("batch_covariances: null dataset");
  if (t < 1) throw ParameterError("batch_covariances: T must be at least 1");
  if (x->n < t) {
    throw ParameterError("batch_covariances: n=" + std::to_string(x->n) + " is smaller than T=" + std::to_string(t));
  }
  const Index b = x->n / t;
  std::vector<CovOperator> ops;
  ops.reserve(t);
  for (Index i = 0; i < t; ++i) ops.push_back(CovOperator::data(x, i * b, (i + 1) * b));
  return ops;
}

}  // namespace spca
