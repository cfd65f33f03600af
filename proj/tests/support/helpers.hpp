#pragma once

#include <random>

#include "oracles.hpp"
#include "spca/linalg.hpp"

namespace testing_support {

inline spca::SymMatrix to_sym(const oracle::Mat& a) {
  const std::size_t n = a.size();
  std::vector<double> e(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e[i * n + j] = a[i][j];
  return spca::SymMatrix(n, std::move(e));
}

inline oracle::Mat to_mat(const spca::SymMatrix& m) {
  oracle::Mat a(m.dim(), oracle::Vec(m.dim()));
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) a[i][j] = m(i, j);
  return a;
}

}  // namespace testing_support
