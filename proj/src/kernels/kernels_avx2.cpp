// AVX2/FMA variants. Compiled with -mavx2 -mfma; only reached through the
// dispatch table after a CPUID check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace spca::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void row_combination(const double* mat, std::size_t stride, const std::size_t* idx,
                     const double* coeffs, std::size_t count, double* y, std::size_t n) {
  // Four rows per pass so y is loaded/stored once per four FMAs.
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    const double* r0 = mat + idx[k] * stride;
    const double* r1 = mat + idx[k + 1] * stride;
    const double* r2 = mat + idx[k + 2] * stride;
    const double* r3 = mat + idx[k + 3] * stride;
    const __m256d c0 = _mm256_set1_pd(coeffs[k]);
    const __m256d c1 = _mm256_set1_pd(coeffs[k + 1]);
    const __m256d c2 = _mm256_set1_pd(coeffs[k + 2]);
    const __m256d c3 = _mm256_set1_pd(coeffs[k + 3]);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      __m256d acc = _mm256_loadu_pd(y + j);
      acc = _mm256_fmadd_pd(c0, _mm256_loadu_pd(r0 + j), acc);
      acc = _mm256_fmadd_pd(c1, _mm256_loadu_pd(r1 + j), acc);
      acc = _mm256_fmadd_pd(c2, _mm256_loadu_pd(r2 + j), acc);
      acc = _mm256_fmadd_pd(c3, _mm256_loadu_pd(r3 + j), acc);
      _mm256_storeu_pd(y + j, acc);
    }
    for (; j < n; ++j) {
      y[j] += coeffs[k] * r0[j];
      y[j] += coeffs[k + 1] * r1[j];
      y[j] += coeffs[k + 2] * r2[j];
      y[j] += coeffs[k + 3] * r3[j];
    }
  }
  for (; k < count; ++k) axpy(coeffs[k], mat + idx[k] * stride, y, n);
}

void gather_dot_rows(const double* mat, std::size_t stride, std::size_t rows,
                     const std::size_t* idx, const double* coeffs, std::size_t count, double* y) {
  static_assert(sizeof(std::size_t) == sizeof(long long));
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = mat + i * stride;
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
      const __m256i vi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(idx + k));
      const __m256d g = _mm256_i64gather_pd(row, vi, 8);
      acc = _mm256_fmadd_pd(g, _mm256_loadu_pd(coeffs + k), acc);
    }
    double s = hsum(acc);
    for (; k < count; ++k) s += row[idx[k]] * coeffs[k];
    y[i] = s;
  }
}

void syrk_upper(const double* x, std::size_t rows, std::size_t d, double* s,
                std::size_t row_begin, std::size_t row_end) {
  for (std::size_t i = row_begin; i < row_end; ++i) {
    double* srow = s + i * d;
    std::size_t j = i;
    for (; j + 8 <= d; j += 8) {
      __m256d a0 = _mm256_loadu_pd(srow + j);
      __m256d a1 = _mm256_loadu_pd(srow + j + 4);
      for (std::size_t k = 0; k < rows; ++k) {
        const double* xk = x + k * d;
        const __m256d xi = _mm256_set1_pd(xk[i]);
        a0 = _mm256_fmadd_pd(xi, _mm256_loadu_pd(xk + j), a0);
        a1 = _mm256_fmadd_pd(xi, _mm256_loadu_pd(xk + j + 4), a1);
      }
      _mm256_storeu_pd(srow + j, a0);
      _mm256_storeu_pd(srow + j + 4, a1);
    }
    for (; j < d; ++j) {
      double acc = srow[j];
      for (std::size_t k = 0; k < rows; ++k) acc += x[k * d + i] * x[k * d + j];
      srow[j] = acc;
    }
  }
}

}  // namespace spca::kernels::avx2
