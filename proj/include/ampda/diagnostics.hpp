#pragma once

#include <cstddef>
#include <vector>

#include "ampda/problem.hpp"
#include "ampda/solver.hpp"
#include "ampda/types.hpp"

namespace ampda {

/// Post-hoc verification summary for one solve.
struct CriticalityReport {
  double eps_measure = 0.0;       // prox fixed-point residual at the final iterate
  double alpha_used = 0.0;        // stepsize at which eps_measure was taken
  std::size_t descent_violations = 0;
  double fenchel_residual_g = 0.0;   // max over the trace, scaled
  double fenchel_residual_h2 = 0.0;  // max subgradient-inequality violation, scaled
  double grad_check_relerr = 0.0;
};

struct AuditOptions {
  double tolerance = 1e-10;      // scaled by 1 + |reference value|
  std::size_t h2_samples = 8;    // subgradient-inequality samples per iterate
  std::size_t fd_coords = 32;    // coordinate budget for the gradient check
                                 // (0 = all coordinates)
  double fd_step = 1e-5;
  std::uint64_t sample_seed = 0x5EEDu;
};

/// Violation of the first-order fixed-point condition at x: the distance
/// from x to one proximal step taken at stepsize alpha with the oracle's
/// deterministic subgradient selections. Zero exactly at critical points.
double criticality_measure(const FractionalProblem& problem, ConstSpan x, double alpha);

/// Re-derives every inequality a correct solve must satisfy from the raw
/// trace vectors: the objective descent margin, the merit-descent condition
/// actually enforced by the line search, the merit upper bound on the next
/// objective value, subgradient Fenchel-Young residuals, and a finite-
/// difference probe of the smooth gradient. All objective values are
/// recomputed from the recorded points, so a tampered trace is caught.
/// The final criticality measure is evaluated at the last accepted stepsize
/// and at alpha = 1, reporting the smaller (the condition quantifies over
/// stepsizes, so any witness is valid).
CriticalityReport audit_trace(const FractionalProblem& problem,
                              const std::vector<IterateState>& trace, double sigma,
                              const AuditOptions& options = {});

/// Max over coordinates of the scaled error between grad h1 and central
/// finite differences of h1 with the given spacing.
double fd_gradient_check(const FractionalProblem& problem, ConstSpan x, double step);

}  // namespace ampda
