#pragma once

#include <cstddef>
#include <vector>

#include "ampda/problem.hpp"
#include "ampda/types.hpp"

namespace ampda {

/// Solver hyperparameters. Defaults follow the standard experimental
/// configuration: stepsize clamp [1e-4, 1e4], descent margin sigma = 1e-5,
/// halving line search, relative-step termination at 1e-6.
struct SolverConfig {
  double alpha_min = 1e-4;
  double alpha_max = 1e4;
  double sigma = 1e-5;
  double gamma = 0.5;          // backtracking shrink factor, in (0,1)
  double term_tol = 1e-6;      // relative step tolerance
  std::size_t max_iters = 100000;
  std::size_t max_backtracks = 200;
  double criticality_eps = 1e-4;  // reporting threshold only
  bool record_trace = false;      // keep full per-iteration vectors

  void validate() const;  // throws ArgumentError on inconsistent settings
};

/// Snapshot of one accepted iterate with every quantity the next step and
/// the post-hoc audits need. grad_h1 is cached alongside the scalar values
/// so the proximal step does not re-evaluate it.
struct IterateState {
  Vector x;
  double c = 0.0;        // 1/g(x)
  Vector y;              // chosen element of ∂g(x)
  Vector z;              // chosen element of ∂h2(x)
  Vector grad_h1;
  double f_val = 0.0;
  double g_val = 0.0;
  double h1_val = 0.0;
  double h2_val = 0.0;
  double F_val = 0.0;
  double alpha_trial = 1.0;
  double alpha_accepted = 1.0;
  std::size_t backtracks = 0;
  double step_norm = 0.0;  // ||x_{k+1} - x_k|| once the step is taken
};

enum class SolveStatus { converged, max_iters, line_search_failure, invalid_start };

const char* to_string(SolveStatus status);

/// Scalar record for one iterate: its objective value, the step taken from
/// it (zero fields on the final iterate), and the wall clock at which it
/// became available. Always kept; the full vector trace is optional.
struct IterationScalars {
  double F_val = 0.0;
  double step_norm = 0.0;
  double alpha_trial = 1.0;
  double alpha_accepted = 1.0;
  std::size_t backtracks = 0;
  double elapsed_s = 0.0;
};

struct SolveResult {
  Vector final_x;
  double final_F = 0.0;  // +inf for invalid_start
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::max_iters;
  std::vector<IterateState> trace;        // iterations + 1 entries when
                                          // recorded; the last entry is the
                                          // final iterate with step_norm 0
  std::vector<IterationScalars> history;  // iterations + 1 entries, one per
                                          // iterate (empty on invalid_start)
  double wall_time = 0.0;
};

/// Spectral trial stepsize: ||dx||^2 / |<dx, dgrad>| clamped to
/// [alpha_min, alpha_max]; returns 1 when dx is absent (first iteration) or
/// the curvature pairing vanishes.
double bb_trial_stepsize(ConstSpan dx, ConstSpan dgrad, double alpha_min, double alpha_max);

/// Builds a fully evaluated state at x (assumed inside Omega ∩ C).
IterateState make_iterate_state(const FractionalProblem& problem, ConstSpan x);

/// One proximal step from `state` at stepsize alpha:
///   prox_{alpha c f_C}( x - alpha (grad h1(x) - z - c^2 f(x) y) ).
Vector proximal_step(const FractionalProblem& problem, const IterateState& state, double alpha);

/// Conjugate-free evaluation of the line-search merit at a candidate:
///   (f(xh)/g(xh)^2) (2 g(xh) - g(x)) + h1(xh) - h2(x)
///     + < x - xh, z + (f(xh)/g(xh)^2) y >,
/// which equals the conjugate form of the merit because (y, z) are
/// subgradients at x, where Fenchel-Young holds with equality. Throws
/// DomainError when x_hat leaves Omega.
double q_linesearch_value(const FractionalProblem& problem, ConstSpan x_hat,
                          const IterateState& state);

struct LineSearchResult {
  bool success = false;
  Vector x_next;
  double alpha_accepted = 0.0;
  std::size_t backtracks = 0;
  double step_norm = 0.0;
  // candidate values cached for the caller
  double f_val = 0.0;
  double g_val = 0.0;
  double h1_val = 0.0;
};

/// Backtracking search from state.alpha_trial: accepts the first candidate
/// inside Omega with merit + (sigma/2)||step||^2 <= F(x); otherwise shrinks
/// alpha by gamma. Fails after more than max_backtracks rejections.
LineSearchResult line_search(const FractionalProblem& problem, const IterateState& state,
                             const SolverConfig& config);

/// Full solve loop: closed-form maximizer update c = 1/g, subgradient
/// selection, spectral trial stepsize, backtracking proximal descent, and
/// relative-step termination. Every accepted step satisfies
/// F(x_{k+1}) + (sigma/2)||x_{k+1} - x_k||^2 <= F(x_k).
SolveResult solve(const FractionalProblem& problem, const Vector& x0,
                  const SolverConfig& config);

}  // namespace ampda
