#include "ampda/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>

#include "ampda/errors.hpp"
#include "ampda/kernels.hpp"

namespace ampda {

namespace {

// Indices of the k largest-magnitude entries, lowest index first among equal
// magnitudes. Expected O(n) partial selection; the tie rule, not the
// algorithm, defines the result.
std::vector<std::uint32_t> select_top_indices(ConstSpan z, std::size_t k) {
  const std::size_t n = z.size();
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  if (k == 0) return {};
  auto prefer = [&](std::uint32_t a, std::uint32_t b) {
    const double ma = std::abs(z[a]);
    const double mb = std::abs(z[b]);
    return ma > mb || (ma == mb && a < b);
  };
  if (k < n)
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k) - 1,
                     idx.end(), prefer);
  idx.resize(k);
  // Ascending order makes downstream sums run in index order, so pairings
  // like <x, y> reproduce the selected-entry sum bit for bit.
  std::sort(idx.begin(), idx.end());
  return idx;
}

SmoothParts smooth_parts_impl(const RecoveryInstance& inst, const DenseMatrix* At,
                              ConstSpan x) {
  if (x.size() != inst.n())
    throw ArgumentError("h_oracles: point length does not match instance");
  const std::size_t m = inst.m();
  Vector r(m);
  kernels::residual(inst.A, x, inst.b, r);

  SmoothParts parts;
  parts.h1 = 0.5 * inst.lambda * kernels::norm2_squared(r);

  Vector t = truncate_mu(r, inst.mu);
  parts.h2 = 0.5 * inst.lambda * kernels::norm2_squared(t);

  parts.grad_h1.resize(inst.n());
  parts.subgrad_h2.resize(inst.n());
  if (At != nullptr) {
    kernels::matvec(*At, r, parts.grad_h1);
    kernels::matvec(*At, t, parts.subgrad_h2);
  } else {
    kernels::matvec_transpose(inst.A, r, parts.grad_h1);
    kernels::matvec_transpose(inst.A, t, parts.subgrad_h2);
  }
  for (double& v : parts.grad_h1) v *= inst.lambda;
  for (double& v : parts.subgrad_h2) v *= inst.lambda;
  return parts;
}

}  // namespace

void RecoveryInstance::validate() const {
  if (A.rows == 0 || A.cols == 0) throw ArgumentError("instance: empty sensing matrix");
  if (A.data.size() != A.rows * A.cols) throw ArgumentError("instance: matrix storage size mismatch");
  if (b.size() != m()) throw ArgumentError("instance: measurement length mismatch");
  if (lower.size() != n() || upper.size() != n())
    throw ArgumentError("instance: bound length mismatch");
  for (std::size_t i = 0; i < n(); ++i)
    if (lower[i] > upper[i]) throw ArgumentError("instance: lower bound exceeds upper bound");
  if (!(lambda > 0.0)) throw ArgumentError("instance: lambda must be positive");
  if (mu > m()) throw ArgumentError("instance: mu exceeds measurement length");
  if (K && (*K == 0 || *K > n())) throw ArgumentError("instance: K out of range");
}

double l1_norm(ConstSpan x) { return kernels::norm1(x); }

NormSubgrad l2_norm_subgrad(ConstSpan x) {
  const double value = kernels::norm2(x);
  if (value == 0.0) throw DomainError("l2_norm_subgrad: zero point has no gradient");
  NormSubgrad out;
  out.value = value;
  out.subgrad.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.subgrad[i] = x[i] / value;
  return out;
}

double topk_norm(ConstSpan x, std::size_t k) {
  if (k == 0 || k > x.size()) throw ArgumentError("topk_norm: K out of range");
  const auto idx = select_top_indices(x, k);
  double sum = 0.0;
  for (auto i : idx) sum += std::abs(x[i]);
  return sum;
}

NormSubgrad topk_norm_subgrad(ConstSpan x, std::size_t k) {
  if (k == 0 || k > x.size()) throw ArgumentError("topk_norm_subgrad: K out of range");
  const auto idx = select_top_indices(x, k);
  NormSubgrad out;
  out.subgrad.assign(x.size(), 0.0);
  double sum = 0.0;
  for (auto i : idx) {
    sum += std::abs(x[i]);
    out.subgrad[i] = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 1.0);
  }
  out.value = sum;
  return out;
}

Vector truncate_mu(ConstSpan z, std::size_t mu) {
  if (mu > z.size()) throw ArgumentError("truncate_mu: mu exceeds vector length");
  Vector out(z.size(), 0.0);
  for (auto i : select_top_indices(z, mu)) out[i] = z[i];
  return out;
}

double dist2_sparse(ConstSpan z, std::size_t mu) {
  if (mu > z.size()) throw ArgumentError("dist2_sparse: mu exceeds vector length");
  const auto idx = select_top_indices(z, mu);
  std::vector<bool> kept(z.size(), false);
  for (auto i : idx) kept[i] = true;
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (!kept[i]) sum += z[i] * z[i];
  return sum;
}

SmoothParts h_oracles(const RecoveryInstance& instance, ConstSpan x) {
  return smooth_parts_impl(instance, nullptr, x);
}

Vector prox_weighted_l1_box(ConstSpan v, double w, ConstSpan lower, ConstSpan upper) {
  if (lower.size() != v.size() || upper.size() != v.size())
    throw ArgumentError("prox_weighted_l1_box: size mismatch");
  if (w < 0.0) throw ArgumentError("prox_weighted_l1_box: negative weight");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (lower[i] > upper[i])
      throw ArgumentError("prox_weighted_l1_box: lower bound exceeds upper bound");
  Vector out(v.size());
  kernels::soft_threshold_clamp(v, w, lower, upper, out);
  return out;
}

FractionalProblem build_problem(const RecoveryInstance& instance, DenominatorVariant variant) {
  instance.validate();
  if (variant == DenominatorVariant::l1_over_topk && !instance.K)
    throw ArgumentError("build_problem: top-K variant requires K");

  struct Data {
    RecoveryInstance inst;
    DenseMatrix At;
  };
  auto data = std::make_shared<const Data>(Data{instance, instance.A.transposed()});
  const std::size_t n = instance.n();

  FractionalProblem p;
  p.dimension = n;
  p.eval_f = [](ConstSpan x) { return l1_norm(x); };

  if (variant == DenominatorVariant::l1_over_l2) {
    p.eval_g = [](ConstSpan x) { return kernels::norm2(x); };
    p.subgrad_g = [](ConstSpan x) { return l2_norm_subgrad(x).subgrad; };
    p.fenchel_residual_g = [](ConstSpan x, ConstSpan y) {
      const double g = kernels::norm2(x);
      const double pairing = std::abs(kernels::dot(x, y) - g) / (1.0 + g);
      return pairing + std::max(0.0, kernels::norm2(y) - 1.0);
    };
  } else {
    const std::size_t k = *instance.K;
    p.eval_g = [k](ConstSpan x) { return topk_norm(x, k); };
    p.subgrad_g = [k](ConstSpan x) { return topk_norm_subgrad(x, k).subgrad; };
    p.fenchel_residual_g = [k](ConstSpan x, ConstSpan y) {
      const double g = topk_norm(x, k);
      const double pairing = std::abs(kernels::dot(x, y) - g) / (1.0 + g);
      return pairing + std::max(0.0, kernels::norm_inf(y) - 1.0) +
             std::max(0.0, kernels::norm1(y) - static_cast<double>(k));
    };
  }

  p.eval_h1 = [data](ConstSpan x) {
    Vector r(data->inst.m());
    kernels::residual(data->inst.A, x, data->inst.b, r);
    return 0.5 * data->inst.lambda * kernels::norm2_squared(r);
  };
  p.grad_h1 = [data](ConstSpan x) {
    Vector r(data->inst.m());
    kernels::residual(data->inst.A, x, data->inst.b, r);
    Vector g(data->inst.n());
    kernels::matvec(data->At, r, g);
    for (double& v : g) v *= data->inst.lambda;
    return g;
  };
  p.eval_h2 = [data](ConstSpan x) {
    Vector r(data->inst.m());
    kernels::residual(data->inst.A, x, data->inst.b, r);
    return 0.5 * data->inst.lambda * kernels::norm2_squared(truncate_mu(r, data->inst.mu));
  };
  p.subgrad_h2 = [data](ConstSpan x) {
    Vector r(data->inst.m());
    kernels::residual(data->inst.A, x, data->inst.b, r);
    Vector t = truncate_mu(r, data->inst.mu);
    Vector z(data->inst.n());
    kernels::matvec(data->At, t, z);
    for (double& v : z) v *= data->inst.lambda;
    return z;
  };
  p.smooth_parts = [data](ConstSpan x) { return smooth_parts_impl(data->inst, &data->At, x); };

  p.prox_fC = [data](ConstSpan v, double w) {
    return prox_weighted_l1_box(v, w, data->inst.lower, data->inst.upper);
  };
  p.in_omega = [](ConstSpan x) {
    for (double v : x)
      if (v != 0.0) return true;
    return false;
  };
  p.in_C = [data](ConstSpan x) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < data->inst.lower[i] || x[i] > data->inst.upper[i]) return false;
    return true;
  };
  return p;
}

}  // namespace ampda
