#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference implementation
// and, on x86-64, an AVX2/FMA variant; the active table is chosen once at
// startup from CPUID (override with SPCA_SIMD=scalar|avx2).

#include <cstddef>
#include <span>
#include <string_view>

namespace spca::kernels {

struct KernelTable {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
  // y += sum_k coeffs[k] * mat[idx[k], :]   (row-major, row length n)
  void (*row_combination)(const double* mat, std::size_t stride, const std::size_t* idx,
                          const double* coeffs, std::size_t count, double* y, std::size_t n);
  // y[i] = sum_k mat[i, idx[k]] * coeffs[k]   for i < rows
  void (*gather_dot_rows)(const double* mat, std::size_t stride, std::size_t rows,
                          const std::size_t* idx, const double* coeffs, std::size_t count,
                          double* y);
  // s[i, j] += sum_k x[k, i] * x[k, j]  for i in [row_begin, row_end), j >= i.
  // x is rows×d row-major, s is d×d row-major.
  void (*syrk_upper)(const double* x, std::size_t rows, std::size_t d, double* s,
                     std::size_t row_begin, std::size_t row_end);
};

enum class Backend { scalar, avx2 };

const KernelTable& scalar_table() noexcept;
/// nullptr when AVX2 was not compiled in or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table() noexcept;

const KernelTable& active() noexcept;
/// Forces a backend; returns false (and leaves the selection unchanged) if unavailable.
bool select_backend(Backend backend) noexcept;
std::string_view active_name() noexcept;

// Span conveniences over the active table.

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }

inline double sum_squares(std::span<const double> x) { return dot(x, x); }

}  // namespace spca::kernels
