#pragma once

#include <cstddef>

#include "spca/kernels.hpp"

namespace spca::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void row_combination(const double* mat, std::size_t stride, const std::size_t* idx,
                     const double* coeffs, std::size_t count, double* y, std::size_t n);
void gather_dot_rows(const double* mat, std::size_t stride, std::size_t rows,
                     const std::size_t* idx, const double* coeffs, std::size_t count, double* y);
void syrk_upper(const double* x, std::size_t rows, std::size_t d, double* s,
                std::size_t row_begin, std::size_t row_end);
}  // namespace scalar

#if defined(SPCA_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void row_combination(const double* mat, std::size_t stride, const std::size_t* idx,
                     const double* coeffs, std::size_t count, double* y, std::size_t n);
void gather_dot_rows(const double* mat, std::size_t stride, std::size_t rows,
                     const std::size_t* idx, const double* coeffs, std::size_t count, double* y);
void syrk_upper(const double* x, std::size_t rows, std::size_t d, double* s,
                std::size_t row_begin, std::size_t row_end);
}  // namespace avx2
#endif

}  // namespace spca::kernels
