#include "ampda/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ampda::kernels {

namespace {

std::atomic<Backend> g_backend{
#ifdef _OPENMP
    Backend::parallel
#else
    Backend::serial
#endif
};

// Work thresholds below which threading overhead dominates.
constexpr std::size_t kMatvecGrain = 1u << 15;
constexpr std::size_t kElementGrain = 1u << 15;

bool in_parallel_region() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

bool use_parallel(std::size_t work, std::size_t grain) {
#ifdef _OPENMP
  return g_backend.load(std::memory_order_relaxed) == Backend::parallel &&
         work >= grain && !in_parallel_region();
#else
  (void)work;
  (void)grain;
  return false;
#endif
}

inline double row_dot(const double* row, const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
  return acc;
}

inline double clamp_soft(double v, double w, double lo, double hi) {
  const double mag = std::abs(v) - w;
  const double s = mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
  return std::min(std::max(s, lo), hi);
}

}  // namespace

Backend backend() { return g_backend.load(std::memory_order_relaxed); }
void set_backend(Backend b) { g_backend.store(b, std::memory_order_relaxed); }

bool parallel_available() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

namespace serial {

void matvec(const DenseMatrix& m, ConstSpan x, std::span<double> out) {
  const double* a = m.data.data();
  for (std::size_t i = 0; i < m.rows; ++i)
    out[i] = row_dot(a + i * m.cols, x.data(), m.cols);
}

void residual(const DenseMatrix& m, ConstSpan x, ConstSpan b, std::span<double> out) {
  const double* a = m.data.data();
  for (std::size_t i = 0; i < m.rows; ++i)
    out[i] = row_dot(a + i * m.cols, x.data(), m.cols) - b[i];
}

void soft_threshold_clamp(ConstSpan v, double w, ConstSpan lower, ConstSpan upper,
                          std::span<double> out) {
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = clamp_soft(v[i], w, lower[i], upper[i]);
}

}  // namespace serial

namespace par {

void matvec(const DenseMatrix& m, ConstSpan x, std::span<double> out) {
  const double* a = m.data.data();
  const double* xp = x.data();
  double* o = out.data();
  const std::int64_t rows = static_cast<std::int64_t>(m.rows);
  const std::size_t cols = m.cols;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i)
    o[i] = row_dot(a + static_cast<std::size_t>(i) * cols, xp, cols);
}

void residual(const DenseMatrix& m, ConstSpan x, ConstSpan b, std::span<double> out) {
  const double* a = m.data.data();
  const double* xp = x.data();
  const double* bp = b.data();
  double* o = out.data();
  const std::int64_t rows = static_cast<std::int64_t>(m.rows);
  const std::size_t cols = m.cols;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i)
    o[i] = row_dot(a + static_cast<std::size_t>(i) * cols, xp, cols) - bp[i];
}

void soft_threshold_clamp(ConstSpan v, double w, ConstSpan lower, ConstSpan upper,
                          std::span<double> out) {
  const std::int64_t n = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[i] = clamp_soft(v[i], w, lower[i], upper[i]);
}

}  // namespace par

void matvec(const DenseMatrix& m, ConstSpan x, std::span<double> out) {
  if (use_parallel(m.rows * m.cols, kMatvecGrain))
    par::matvec(m, x, out);
  else
    serial::matvec(m, x, out);
}

void residual(const DenseMatrix& m, ConstSpan x, ConstSpan b, std::span<double> out) {
  if (use_parallel(m.rows * m.cols, kMatvecGrain))
    par::residual(m, x, b, out);
  else
    serial::residual(m, x, b, out);
}

void soft_threshold_clamp(ConstSpan v, double w, ConstSpan lower, ConstSpan upper,
                          std::span<double> out) {
  if (use_parallel(v.size(), kElementGrain))
    par::soft_threshold_clamp(v, w, lower, upper, out);
  else
    serial::soft_threshold_clamp(v, w, lower, upper, out);
}

void matvec_transpose(const DenseMatrix& m, ConstSpan x, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const double* a = m.data.data();
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double xi = x[i];
    const double* row = a + i * m.cols;
    for (std::size_t j = 0; j < m.cols; ++j) out[j] += xi * row[j];
  }
}

double dot(ConstSpan a, ConstSpan b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2_squared(ConstSpan a) { return dot(a, a); }

double norm2(ConstSpan a) { return std::sqrt(norm2_squared(a)); }

double norm1(ConstSpan a) {
  double acc = 0.0;
  for (double v : a) acc += std::abs(v);
  return acc;
}

double norm_inf(ConstSpan a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double diff_norm2(ConstSpan a, ConstSpan b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace ampda::kernels
