#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spca/linalg.hpp"

namespace spca {

/// n×d sample matrix, row-major.
struct Dataset {
  Index n = 0;
  Index d = 0;
  std::vector<double> rows;
  std::uint64_t seed = 0;

  Dataset() = default;
  Dataset(Index n, Index d, std::vector<double> rows, std::uint64_t seed);

  std::span<const double> row(Index i) const noexcept { return {rows.data() + i * d, d}; }
  /// Copy of rows [begin, end).
  Dataset slice(Index begin, Index end) const;
};

/// Exact structured square root: √Σ = diag(a) + Σ_k c_k w_k w_kᵀ.
/// Each w_k is unit and lies where `a` is constant, and the w_k are mutually
/// orthogonal, so applying it costs O(d·k) per sample.
struct SqrtFactor {
  Vec a;
  std::vector<Vec> w;
  Vec c;

  void apply(std::span<const double> z, std::span<double> out) const;
  SymMatrix square() const;
};

struct PlantedInstance {
  SymMatrix sigma{1};
  /// Orthonormal planted component(s); components[0] is v.
  std::vector<Vec> components;
  Index s = 0;
  double gamma = 0.0;
  std::string label;
  std::optional<SqrtFactor> factor;

  const Vec& v() const { return components.front(); }
  Index dim() const noexcept { return sigma.dim(); }
};

/// Support + signs for a planted s-sparse vector.
struct SupportSpec {
  std::vector<Index> indices;  // empty: first s coordinates
  std::uint64_t seed = 0;      // random signs (and indices when `random_support`)
  bool random_signs = false;
  bool random_support = false;
};

/// s-sparse unit vector with entries ±1/√s on the requested support.
Vec planted_vector(Index d, Index s, const SupportSpec& spec);

PlantedInstance build_spiked_identity(Index d, Index s, const SupportSpec& spec = {});
PlantedInstance build_spiked_general(Index d, Index s, double gamma, const SupportSpec& spec = {});
/// Σ = (1−γ)(I − vvᵀ) + vvᵀ for a given unit v (no sparsity requirement on input).
PlantedInstance build_spiked_from_vector(Vec v, double gamma);

/// Gaussian sampler for a fixed covariance. Row i of every dataset it emits is
/// a function of (seed, i) only, so datasets are prefix-stable in n and
/// independent of the thread count.
class GaussianSampler {
 public:
  explicit GaussianSampler(const SymMatrix& sigma);
  explicit GaussianSampler(const PlantedInstance& inst);

  Index dim() const noexcept { return d_; }
  Dataset sample(Index n, std::uint64_t seed, unsigned threads = 1) const;
  /// Writes rows [begin, end) of the dataset for `seed` into out (row-major).
  void sample_rows(std::uint64_t seed, Index begin, Index end, std::span<double> out) const;

 private:
  Index d_;
  std::optional<SqrtFactor> factor_;
  std::vector<double> root_;  // dense symmetric root when no factor
};

Dataset sample_gaussian(const SymMatrix& sigma, Index n, std::uint64_t seed, unsigned threads = 1);
Dataset sample_gaussian(const PlantedInstance& inst, Index n, std::uint64_t seed, unsigned threads = 1);

/// Symmetric PSD square root; eigenvalues in [−psd_slack, 0) are clipped.
SymMatrix psd_sqrt(const SymMatrix& sigma);

/// Running XᵀX over appended rows (upper triangle, blocked).
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(Index d, unsigned threads = 1);
  void add_rows(std::span<const double> rows);
  Index count() const noexcept { return n_; }
  /// (1/count)·XᵀX
  SymMatrix covariance() const;

 private:
  Index d_;
  unsigned threads_;
  Index n_ = 0;
  std::vector<double> upper_;
};

SymMatrix sample_covariance(const Dataset& x, unsigned threads = 1);
/// (1/(end−begin))·Σ x_i x_iᵀ over rows [begin, end).
SymMatrix sample_covariance(const Dataset& x, Index begin, Index end, unsigned threads = 1);

/// Compressed sparse rows (used for bag-of-words features).
struct SparseRows {
  Index n = 0;
  Index d = 0;
  std::vector<Index> row_ptr{0};
  std::vector<Index> col;
  std::vector<double> val;
};

/// Σ̂·u provider. All kinds are immutable and safe to share across threads.
class CovOperator {
 public:
  /// Dense covariance.
  static CovOperator dense(std::shared_ptr<const SymMatrix> m);
  static CovOperator dense(SymMatrix m);
  /// (1/B)·Σ_{i∈[begin,end)} (x_i − μ)(x_i − μ)ᵀ, never materialized. Empty μ: no centering.
  static CovOperator data(std::shared_ptr<const Dataset> x, Index begin, Index end, Vec mean = {});
  static CovOperator sparse_data(std::shared_ptr<const SparseRows> x, Vec mean = {});
  /// P·base·P with P = I − Σ_j p_j p_jᵀ (orthonormal p_j).
  static CovOperator projected(std::shared_ptr<const CovOperator> base, std::vector<Vec> directions);

  Index dim() const noexcept { return d_; }
  Vec apply(std::span<const double> u) const;
  /// Materializes the operator as a dense matrix (O(d) applications for
  /// non-dense kinds, direct accumulation for data kinds).
  SymMatrix to_dense(unsigned threads = 1) const;

  bool is_dense() const noexcept { return std::holds_alternative<Dense>(kind_); }
  const SymMatrix* dense_matrix() const noexcept;
  /// Number of samples backing a data kind (0 for dense).
  Index samples() const noexcept;

 private:
  struct Dense {
    std::shared_ptr<const SymMatrix> m;
  };
  struct Data {
    std::shared_ptr<const Dataset> x;
    Index begin, end;
    Vec mean;
  };
  struct Sparse {
    std::shared_ptr<const SparseRows> x;
    Vec mean;
  };
  struct Projected {
    std::shared_ptr<const CovOperator> base;
    std::vector<Vec> directions;
  };

  CovOperator(Index d, std::variant<Dense, Data, Sparse, Projected> kind) : d_(d), kind_(std::move(kind)) {}

  Index d_;
  std::variant<Dense, Data, Sparse, Projected> kind_;
};

/// Free-function form of op.apply(u).
Vec cov_apply(const CovOperator& op, std::span<const double> u);

/// T data-backed operators over consecutive blocks of B = ⌊n/T⌋ rows; the
/// trailing n − BT rows are unused.
std::vector<CovOperator> batch_covariances(std::shared_ptr<const Dataset> x, Index t);

// Binary dataset format: "SPCA", u32 n, u32 d, u64 seed, n·d f64 row-major (little endian).
void write_dataset(const std::string& path, const Dataset& x);
Dataset read_dataset(const std::string& path);

}  // namespace spca
