#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace spca {

using Vec = std::vector<double>;
using Index = std::size_t;

/// Numerical tolerances shared by the library. Defaults are the documented
/// contract values; the experiment config may override them per run.
struct Tolerances {
  double unit_norm = 1e-8;           // rayleigh() input check
  double householder_unit = 1e-10;   // householder_to() input check
  double householder_same = 1e-12;   // ‖x − t‖ below this returns I
  double eig_residual = 1e-8;        // relative residual for eig_top_m
  double psd_slack = 1e-10;          // eigenvalues above −slack are clipped to 0
  double multiplicity = 1e-10;       // |λ1 − λ2| below this is flagged
};

const Tolerances& tolerances() noexcept;
void set_tolerances(const Tolerances& tol) noexcept;

/// Dense symmetric matrix, row-major full storage. Symmetry is exact: every
/// constructor either checks it or writes both triangles.
class SymMatrix {
 public:
  explicit SymMatrix(Index dim);
  /// Throws ParameterError unless `entries` is dim×dim and exactly symmetric.
  SymMatrix(Index dim, std::vector<double> entries);

  static SymMatrix identity(Index dim);
  static SymMatrix diagonal(std::span<const double> diag);
  /// Copies the upper triangle of a row-major dim×dim buffer into both halves.
  static SymMatrix from_upper(Index dim, std::vector<double> entries);
  static SymMatrix from_eigen(const Eigen::MatrixXd& m);

  Index dim() const noexcept { return dim_; }
  double operator()(Index i, Index j) const noexcept { return a_[i * dim_ + j]; }
  const double* data() const noexcept { return a_.data(); }
  std::span<const double> row(Index i) const noexcept { return {a_.data() + i * dim_, dim_}; }

  void set(Index i, Index j, double value) noexcept {
    a_[i * dim_ + j] = value;
    a_[j * dim_ + i] = value;
  }
  void add(Index i, Index j, double value) noexcept {
    a_[i * dim_ + j] += value;
    if (i != j) a_[j * dim_ + i] += value;
  }
  /// this += alpha · x xᵀ
  void add_outer(double alpha, std::span<const double> x);
  void scale(double alpha) noexcept;

  Eigen::Map<const Eigen::MatrixXd> as_eigen() const noexcept {
    return {a_.data(), static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_)};
  }

  double trace() const noexcept;
  bool operator==(const SymMatrix& other) const noexcept = default;

 private:
  Index dim_;
  std::vector<double> a_;
};

struct EigPair {
  double value;
  Vec vector;
};

struct OrthonormalBasis {
  Index dim = 0;
  std::vector<Vec> columns;

  /// max |GᵢⱼG − δᵢⱼ| over the Gram matrix.
  double gram_error() const;
};

// Vector helpers.
double norm2(std::span<const double> v);
/// Scales v to unit length; returns the original norm.
double normalize(std::span<double> v);
Index nnz(std::span<const double> v) noexcept;
std::vector<Index> support(std::span<const double> v);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// Indices of the r largest |v_i| (ties to the smaller index), ascending.
std::vector<Index> top_r_indices(std::span<const double> v, Index r);
/// v with everything outside top_r_indices zeroed.
Vec top_r(std::span<const double> v, Index r);

SymMatrix threshold_entries(const SymMatrix& m, double tau);
double sin2_angle(std::span<const double> u, std::span<const double> v);
double rayleigh(const SymMatrix& m, std::span<const double> u);

/// M·u (dense).
Vec matvec(const SymMatrix& m, std::span<const double> u);
/// M·u exploiting the zeros of u: Σ_k u_k · M[k, :].
Vec matvec_sparse(const SymMatrix& m, std::span<const double> u);

/// The m largest eigenpairs, descending. Eigenvectors are unit with their
/// largest-magnitude entry positive (ties to the smaller index).
std::vector<EigPair> eig_top_m(const SymMatrix& m, Index count);
/// Top eigenpair with a basis-independent choice inside a repeated top
/// eigenvalue: the normalized projection of e_j onto the top eigenspace for the
/// smallest j where it is nonzero. `cluster` reports the multiplicity found.
struct TopEigen {
  EigPair pair;
  Index cluster = 1;
  double gap = 0.0;  // λ1 − λ2 (0 when dim = 1)
};
TopEigen top_eigenpair(const SymMatrix& m);

/// All eigenvalues, descending.
Vec eigenvalues(const SymMatrix& m);
double opnorm(const SymMatrix& m);
/// Smallest eigenvalue.
double min_eigenvalue(const SymMatrix& m);

SymMatrix householder_to(std::span<const double> x, std::span<const double> t);
OrthonormalBasis good_ortho_basis(Index d);
SymMatrix restrict(const SymMatrix& m, std::span<const Index> subset);

/// Flips v so its largest-magnitude entry (first on ties) is positive.
void canonical_sign(std::span<double> v) noexcept;

}  // namespace spca
