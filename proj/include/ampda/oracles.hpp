#pragma once

#include <cstddef>
#include <optional>

#include "ampda/problem.hpp"
#include "ampda/types.hpp"

namespace ampda {

/// One sparse-recovery model instance: data fit (lambda/2) * dist^2 to the
/// set of mu-sparse residuals, L1 numerator, L2 or top-K denominator, box
/// constraint. mu = 0 recovers plain least squares.
struct RecoveryInstance {
  DenseMatrix A;               // m x n sensing matrix
  Vector b;                    // length m measurement
  double lambda = 1.0;         // data-fit weight, > 0
  std::size_t mu = 0;          // impulsive-noise sparsity, <= m
  std::optional<std::size_t> K;  // top-K denominator order, <= n
  Vector lower;                // box bounds, length n
  Vector upper;

  std::size_t m() const { return A.rows; }
  std::size_t n() const { return A.cols; }

  /// Throws ArgumentError on any size or range inconsistency.
  void validate() const;
};

enum class DenominatorVariant { l1_over_l2, l1_over_topk };

struct NormSubgrad {
  double value = 0.0;
  Vector subgrad;
};

double l1_norm(ConstSpan x);

/// L2 norm and its gradient x/||x||. Throws DomainError at x = 0, where the
/// ratio domain is violated anyway.
NormSubgrad l2_norm_subgrad(ConstSpan x);

/// Sum of the K largest absolute entries (the top-K norm).
double topk_norm(ConstSpan x, std::size_t k);

/// Top-K norm with a deterministic subgradient: sign(x_i) on the K selected
/// indices and 0 elsewhere. Ties in magnitude select the lowest index; a
/// zero entry forced into the selection gets coefficient +1 (still a valid
/// subgradient: it contributes nothing to <x, y> and stays inside the dual
/// ball). The output satisfies <x,y> = value, ||y||_inf <= 1, ||y||_1 <= K.
NormSubgrad topk_norm_subgrad(ConstSpan x, std::size_t k);

/// Projection onto mu-sparse vectors: keeps the mu largest-magnitude
/// entries (lowest index wins ties), zeroes the rest.
Vector truncate_mu(ConstSpan z, std::size_t mu);

/// Squared distance from z to the mu-sparse set: the sum of squared entries
/// outside the kept support, equal to ||z||^2 - ||truncate_mu(z, mu)||^2.
double dist2_sparse(ConstSpan z, std::size_t mu);

/// Smooth objective parts for one instance:
///   h1 = (lambda/2) ||Ax - b||^2,         grad h1 = lambda A^T (Ax - b),
///   h2 = (lambda/2) ||T_mu(Ax - b)||^2,   subgrad  = lambda A^T T_mu(Ax - b).
/// The h2 subgradient is valid because h2 is a pointwise max of convex
/// quadratics over support selections.
SmoothParts h_oracles(const RecoveryInstance& instance, ConstSpan x);

/// Unique minimizer of w ||z||_1 + (1/2)||z - v||^2 over the box, computed
/// componentwise as clamp(soft_threshold(v_i, w), lower_i, upper_i); the
/// objective is separable so soft-threshold-then-clamp is exact.
Vector prox_weighted_l1_box(ConstSpan v, double w, ConstSpan lower, ConstSpan upper);

/// Wires the model oracles into a FractionalProblem bundle. The bundle owns
/// a copy of the instance plus a cached transpose of A so the fused smooth
/// evaluation runs as two row-parallel products.
FractionalProblem build_problem(const RecoveryInstance& instance, DenominatorVariant variant);

}  // namespace ampda
