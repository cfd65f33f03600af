// Scalar reference kernels. These define the semantics the SIMD variants are
// tested against; keep them plain.

#include "kernels_impl.hpp"

namespace spca::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void row_combination(const double* mat, std::size_t stride, const std::size_t* idx,
                     const double* coeffs, std::size_t count, double* y, std::size_t n) {
  for (std::size_t k = 0; k < count; ++k) {
    const double* row = mat + idx[k] * stride;
    const double c = coeffs[k];
    for (std::size_t j = 0; j < n; ++j) y[j] += c * row[j];
  }
}

void gather_dot_rows(const double* mat, std::size_t stride, std::size_t rows,
                     const std::size_t* idx, const double* coeffs, std::size_t count, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = mat + i * stride;
    double acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) acc += row[idx[k]] * coeffs[k];
    y[i] = acc;
  }
}

void syrk_upper(const double* x, std::size_t rows, std::size_t d, double* s,
                std::size_t row_begin, std::size_t row_end) {
  for (std::size_t i = row_begin; i < row_end; ++i) {
    double* srow = s + i * d;
    for (std::size_t k = 0; k < rows; ++k) {
      const double* xk = x + k * d;
      const double xi = xk[i];
      for (std::size_t j = i; j < d; ++j) srow[j] += xi * xk[j];
    }
  }
}

}  // namespace spca::kernels::scalar
