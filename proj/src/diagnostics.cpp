#include "ampda/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "ampda/errors.hpp"
#include "ampda/kernels.hpp"
#include "ampda/rng.hpp"

namespace ampda {

namespace {

struct PointValues {
  double f = 0.0, g = 0.0, h1 = 0.0, h2 = 0.0;
  bool feasible = false;
  double F() const { return f / g + h1 - h2; }
};

PointValues evaluate_point(const FractionalProblem& problem, ConstSpan x) {
  PointValues v;
  if (!problem.in_omega(x) || !problem.in_C(x)) return v;
  v.feasible = true;
  v.f = problem.eval_f(x);
  v.g = problem.eval_g(x);
  v.h1 = problem.eval_h1(x);
  v.h2 = problem.eval_h2(x);
  return v;
}

// Scaled violation of h2(w) >= h2(x) + <z, w - x> at sampled points w.
double h2_inequality_residual(const FractionalProblem& problem, const IterateState& s,
                              double h2_x, Rng& rng, std::size_t samples) {
  double worst = 0.0;
  Vector w(s.x.size());
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = s.x[i] + rng.normal();
    double inner = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) inner += s.z[i] * (w[i] - s.x[i]);
    const double h2_w = problem.eval_h2(w);
    const double gap = h2_x + inner - h2_w;
    worst = std::max(worst, gap / (1.0 + std::abs(h2_x) + std::abs(h2_w)));
  }
  return worst;
}

double fd_check_subset(const FractionalProblem& problem, ConstSpan x, double step,
                       std::size_t coord_budget) {
  const std::size_t n = x.size();
  const Vector grad = problem.grad_h1(x);
  Vector probe(x.begin(), x.end());
  const std::size_t count = (coord_budget == 0 || coord_budget >= n) ? n : coord_budget;
  const std::size_t stride = n / count == 0 ? 1 : n / count;
  double worst = 0.0;
  for (std::size_t taken = 0, i = 0; taken < count && i < n; ++taken, i += stride) {
    const double saved = probe[i];
    probe[i] = saved + step;
    const double hi = problem.eval_h1(probe);
    probe[i] = saved - step;
    const double lo = problem.eval_h1(probe);
    probe[i] = saved;
    const double fd = (hi - lo) / (2.0 * step);
    worst = std::max(worst, std::abs(fd - grad[i]) / (1.0 + std::abs(grad[i])));
  }
  return worst;
}

}  // namespace

double criticality_measure(const FractionalProblem& problem, ConstSpan x, double alpha) {
  if (!(alpha > 0.0)) throw ArgumentError("criticality_measure: alpha must be positive");
  if (!problem.in_C(x)) throw DomainError("criticality_measure: point outside C");
  IterateState s = make_iterate_state(problem, x);  // rejects points outside Omega
  const Vector p = proximal_step(problem, s, alpha);
  return kernels::diff_norm2(s.x, p);
}

CriticalityReport audit_trace(const FractionalProblem& problem,
                              const std::vector<IterateState>& trace, double sigma,
                              const AuditOptions& options) {
  if (trace.empty()) throw ArgumentError("audit_trace: empty trace");

  CriticalityReport report;
  Rng rng(options.sample_seed);
  const double tol = options.tolerance;

  std::vector<PointValues> values(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    values[i] = evaluate_point(problem, trace[i].x);
    if (!values[i].feasible) {
      ++report.descent_violations;  // every recorded iterate must be feasible
      continue;
    }
    if (problem.fenchel_residual_g)
      report.fenchel_residual_g = std::max(
          report.fenchel_residual_g, problem.fenchel_residual_g(trace[i].x, trace[i].y));
    report.fenchel_residual_h2 =
        std::max(report.fenchel_residual_h2,
                 h2_inequality_residual(problem, trace[i], values[i].h2, rng,
                                        options.h2_samples));
  }

  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    if (!values[i].feasible || !values[i + 1].feasible) continue;
    const IterateState& prev = trace[i];
    const double f_next = values[i + 1].F();
    const double f_prev = values[i].F();
    const double dist = kernels::diff_norm2(trace[i + 1].x, prev.x);
    const double margin = 0.5 * sigma * dist * dist;

    // merit value of the accepted candidate against the recorded selections
    const double ratio = values[i + 1].f / (values[i + 1].g * values[i + 1].g);
    double inner = 0.0;
    for (std::size_t j = 0; j < prev.x.size(); ++j)
      inner += (prev.x[j] - trace[i + 1].x[j]) * (prev.z[j] + ratio * prev.y[j]);
    const double q = ratio * (2.0 * values[i + 1].g - values[i].g) + values[i + 1].h1 -
                     values[i].h2 + inner;

    if (f_next + margin > f_prev + tol * (1.0 + std::abs(f_prev))) ++report.descent_violations;
    if (q + margin > f_prev + tol * (1.0 + std::abs(f_prev))) ++report.descent_violations;
    if (f_next > q + tol * (1.0 + std::abs(q))) ++report.descent_violations;
  }

  const IterateState& last = trace.back();
  const double alpha_last = last.alpha_accepted > 0.0 ? last.alpha_accepted : 1.0;
  const double at_last = criticality_measure(problem, last.x, alpha_last);
  const double at_unit = criticality_measure(problem, last.x, 1.0);
  if (at_last <= at_unit) {
    report.eps_measure = at_last;
    report.alpha_used = alpha_last;
  } else {
    report.eps_measure = at_unit;
    report.alpha_used = 1.0;
  }
  report.grad_check_relerr =
      fd_check_subset(problem, last.x, options.fd_step, options.fd_coords);
  return report;
}

double fd_gradient_check(const FractionalProblem& problem, ConstSpan x, double step) {
  if (!(step > 0.0)) throw ArgumentError("fd_gradient_check: step must be positive");
  if (!problem.in_omega(x)) throw DomainError("fd_gradient_check: point outside Omega");
  return fd_check_subset(problem, x, step, 0);
}

}  // namespace ampda
