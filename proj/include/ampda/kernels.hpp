#pragma once

#include <cstddef>
#include <span>

#include "ampda/types.hpp"

namespace ampda::kernels {

/// Backend selection for the data-parallel kernels. `parallel` uses OpenMP
/// when compiled in; `serial` forces the reference implementations. Both
/// produce bit-identical results: parallel loops only split independent
/// output elements, never a single floating-point reduction.
enum class Backend { serial, parallel };

Backend backend();
void set_backend(Backend b);

/// True when OpenMP support was compiled in.
bool parallel_available();

// Reference implementations. Kept callable directly so tests and the
// benchmark can compare them against the dispatched versions.
namespace serial {
void matvec(const DenseMatrix& m, ConstSpan x, std::span<double> out);
void residual(const DenseMatrix& m, ConstSpan x, ConstSpan b, std::span<double> out);
void soft_threshold_clamp(ConstSpan v, double w, ConstSpan lower, ConstSpan upper,
                          std::span<double> out);
}  // namespace serial

// OpenMP implementations (plain loops when OpenMP is unavailable).
namespace par {
void matvec(const DenseMatrix& m, ConstSpan x, std::span<double> out);
void residual(const DenseMatrix& m, ConstSpan x, ConstSpan b, std::span<double> out);
void soft_threshold_clamp(ConstSpan v, double w, ConstSpan lower, ConstSpan upper,
                          std::span<double> out);
}  // namespace par

/// out = m * x   (row-major m, out length m.rows)
void matvec(const DenseMatrix& m, ConstSpan x, std::span<double> out);

/// out = m * x - b
void residual(const DenseMatrix& m, ConstSpan x, ConstSpan b, std::span<double> out);

/// Componentwise clamp(sign(v)*max(|v|-w,0), lower, upper).
void soft_threshold_clamp(ConstSpan v, double w, ConstSpan lower, ConstSpan upper,
                          std::span<double> out);

/// out = m^T * x without forming the transpose; accumulates rows in index
/// order, so the per-entry summation order matches matvec(m.transposed(), x).
void matvec_transpose(const DenseMatrix& m, ConstSpan x, std::span<double> out);

// Small serial helpers. Reductions stay serial on purpose: splitting a sum
// across threads would make results depend on the thread count.
double dot(ConstSpan a, ConstSpan b);
double norm2(ConstSpan a);
double norm2_squared(ConstSpan a);
double norm1(ConstSpan a);
double norm_inf(ConstSpan a);
double diff_norm2(ConstSpan a, ConstSpan b);  // ||a - b||_2

}  // namespace ampda::kernels
