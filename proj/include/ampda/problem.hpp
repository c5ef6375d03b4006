#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include "ampda/errors.hpp"
#include "ampda/types.hpp"

namespace ampda {

/// Gradient and value of the smooth difference h = h1 - h2 at one point,
/// bundled so implementations can share the common residual computation.
struct SmoothParts {
  double h1 = 0.0;
  Vector grad_h1;
  double h2 = 0.0;
  Vector subgrad_h2;
};

/// Oracle bundle defining one instance of the fractional program
///
///   minimize  f(x)/g(x) + h1(x) - h2(x)   over  x in Omega ∩ C,
///
/// with f, g >= 0, g convex, h2 convex, and Omega = {x : g(x) != 0}.
/// Oracles are total over R^n; infeasibility is reported only through the
/// membership predicates. Instances are immutable after construction and
/// all oracles are pure, so unsynchronized concurrent evaluation is safe.
struct FractionalProblem {
  std::size_t dimension = 0;

  std::function<double(ConstSpan)> eval_f;      // numerator, >= 0
  std::function<double(ConstSpan)> eval_g;      // denominator, convex, >= 0
  std::function<Vector(ConstSpan)> subgrad_g;   // element of ∂g(x)
  std::function<double(ConstSpan)> eval_h1;     // smooth part
  std::function<Vector(ConstSpan)> grad_h1;
  std::function<double(ConstSpan)> eval_h2;     // convex correction
  std::function<Vector(ConstSpan)> subgrad_h2;  // element of ∂h2(x)

  /// prox of w*f + indicator(C) at v, w >= 0. Single-valued for every
  /// shipped instance; a selection rule for multi-valued proxes is left to
  /// future instances.
  std::function<Vector(ConstSpan, double)> prox_fC;

  std::function<bool(ConstSpan)> in_omega;  // g(x) != 0
  std::function<bool(ConstSpan)> in_C;

  /// Fused evaluation of (h1, grad h1, h2, subgrad h2); optional fast path
  /// that shares intermediate products. Falls back to the individual
  /// oracles when absent.
  std::function<SmoothParts(ConstSpan)> smooth_parts;

  /// Optional audit hook: Fenchel-Young residual |<x,y> - g(x) - g*(y)|
  /// (scaled) plus any dual-feasibility excess of y, for y meant to lie in
  /// ∂g(x). Wired by the concrete models where g* has a closed form.
  std::function<double(ConstSpan, ConstSpan)> fenchel_residual_g;

  SmoothParts eval_smooth_parts(ConstSpan x) const;
};

/// Extended-real objective value. The infinity flag is explicit; reading any
/// numeric field of a flagged value throws rather than returning a sentinel.
class ObjectiveValue {
 public:
  static ObjectiveValue infinite() { return ObjectiveValue(); }
  static ObjectiveValue finite(double numerator, double denominator, double smooth_part) {
    ObjectiveValue v;
    v.finite_ = true;
    v.numerator_ = numerator;
    v.denominator_ = denominator;
    v.smooth_part_ = smooth_part;
    v.value_ = numerator / denominator + smooth_part;
    return v;
  }

  bool is_finite() const { return finite_; }
  double value() const { return guarded(value_); }
  double numerator() const { return guarded(numerator_); }
  double denominator() const { return guarded(denominator_); }
  double smooth_part() const { return guarded(smooth_part_); }

  /// Value with +inf substituted for the flag; for display only.
  double value_or_infinity() const {
    return finite_ ? value_ : std::numeric_limits<double>::infinity();
  }

 private:
  double guarded(double v) const {
    if (!finite_) throw DomainError("arithmetic on an infinite objective value");
    return v;
  }

  bool finite_ = false;
  double value_ = 0.0;
  double numerator_ = 0.0;
  double denominator_ = 0.0;
  double smooth_part_ = 0.0;
};

/// Full objective f(x)/g(x) + h1(x) - h2(x), infinity-flagged outside
/// Omega ∩ C. Throws EvalError when an oracle returns a non-finite number.
ObjectiveValue eval_F(const FractionalProblem& problem, ConstSpan x);

/// Exact maximizer c = 1/g(x) of the concave parabola c -> 2c f - c^2 f g.
/// Requires x in Omega.
double eval_c(const FractionalProblem& problem, ConstSpan x);

/// Scalarized objective 2c f(x) - c^2 f(x) g(x) + h1(x) - h2(x), infinity
/// outside Omega ∩ C (returned as +inf double; never used in arithmetic).
double eval_F_tilde(const FractionalProblem& problem, ConstSpan x, double c);

}  // namespace ampda
