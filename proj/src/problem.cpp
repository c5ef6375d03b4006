#include "ampda/problem.hpp"

#include <cmath>
#include <string>

namespace ampda {

namespace {

double checked(double v, const char* oracle) {
  if (!std::isfinite(v))
    throw EvalError(std::string("oracle ") + oracle + " returned a non-finite value");
  return v;
}

void check_dimension(const FractionalProblem& problem, ConstSpan x) {
  if (x.size() != problem.dimension)
    throw ArgumentError("point length " + std::to_string(x.size()) +
                        " does not match problem dimension " +
                        std::to_string(problem.dimension));
}

}  // namespace

SmoothParts FractionalProblem::eval_smooth_parts(ConstSpan x) const {
  if (smooth_parts) return smooth_parts(x);
  SmoothParts parts;
  parts.h1 = eval_h1(x);
  parts.grad_h1 = grad_h1(x);
  parts.h2 = eval_h2(x);
  parts.subgrad_h2 = subgrad_h2(x);
  return parts;
}

ObjectiveValue eval_F(const FractionalProblem& problem, ConstSpan x) {
  check_dimension(problem, x);
  if (!problem.in_omega(x) || !problem.in_C(x)) return ObjectiveValue::infinite();
  const double f = checked(problem.eval_f(x), "eval_f");
  const double g = checked(problem.eval_g(x), "eval_g");
  const double h1 = checked(problem.eval_h1(x), "eval_h1");
  const double h2 = checked(problem.eval_h2(x), "eval_h2");
  ObjectiveValue value = ObjectiveValue::finite(f, g, h1 - h2);
  checked(value.value(), "objective assembly");
  return value;
}

double eval_c(const FractionalProblem& problem, ConstSpan x) {
  check_dimension(problem, x);
  if (!problem.in_omega(x)) throw DomainError("eval_c: point outside Omega (g vanishes)");
  const double g = checked(problem.eval_g(x), "eval_g");
  return checked(1.0 / g, "eval_c reciprocal");
}

double eval_F_tilde(const FractionalProblem& problem, ConstSpan x, double c) {
  check_dimension(problem, x);
  if (!problem.in_omega(x) || !problem.in_C(x))
    return std::numeric_limits<double>::infinity();
  const double f = checked(problem.eval_f(x), "eval_f");
  const double g = checked(problem.eval_g(x), "eval_g");
  const double h1 = checked(problem.eval_h1(x), "eval_h1");
  const double h2 = checked(problem.eval_h2(x), "eval_h2");
  return checked(2.0 * c * f - c * c * f * g + h1 - h2, "F_tilde assembly");
}

}  // namespace ampda
