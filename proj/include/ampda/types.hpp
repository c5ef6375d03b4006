#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ampda {

using Vector = std::vector<double>;
using ConstSpan = std::span<const double>;

/// Dense row-major matrix. The only matrix storage used by the solver;
/// no factorizations are ever computed, only products.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows * cols entries

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  ConstSpan row(std::size_t i) const { return ConstSpan(data.data() + i * cols, cols); }

  /// Explicit transpose copy; kept so transpose-products can run as plain
  /// row-parallel products with the same per-entry summation order.
  DenseMatrix transposed() const {
    DenseMatrix t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
};

}  // namespace ampda
