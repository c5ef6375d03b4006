#include "ampda/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "ampda/kernels.hpp"

namespace ampda {

namespace {

constexpr double kNormFloor = 1e-300;  // below this, the relative step is meaningless

// x - alpha * (grad_h1 - z - c^2 f y), the prox argument.
Vector prox_argument(const IterateState& s, double alpha) {
  const double coeff = s.c * s.c * s.f_val;
  Vector v(s.x.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = s.x[i] - alpha * (s.grad_h1[i] - s.z[i] - coeff * s.y[i]);
  return v;
}

double q_value_from(double f_hat, double g_hat, double h1_hat, ConstSpan x_hat,
                    const IterateState& s) {
  const double ratio = f_hat / (g_hat * g_hat);
  double inner = 0.0;
  for (std::size_t i = 0; i < x_hat.size(); ++i)
    inner += (s.x[i] - x_hat[i]) * (s.z[i] + ratio * s.y[i]);
  return ratio * (2.0 * g_hat - s.g_val) + h1_hat - s.h2_val + inner;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(alpha_min > 0.0) || !(alpha_max > 0.0) || alpha_min > alpha_max)
    throw ArgumentError("config: need 0 < alpha_min <= alpha_max");
  if (!(sigma > 0.0)) throw ArgumentError("config: sigma must be positive");
  if (!(gamma > 0.0) || !(gamma < 1.0)) throw ArgumentError("config: gamma must lie in (0,1)");
  if (!(term_tol > 0.0)) throw ArgumentError("config: term_tol must be positive");
  if (max_iters == 0) throw ArgumentError("config: max_iters must be positive");
  if (max_backtracks == 0) throw ArgumentError("config: max_backtracks must be positive");
  if (!(criticality_eps > 0.0)) throw ArgumentError("config: criticality_eps must be positive");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::line_search_failure: return "line_search_failure";
    case SolveStatus::invalid_start: return "invalid_start";
  }
  return "unknown";
}

double bb_trial_stepsize(ConstSpan dx, ConstSpan dgrad, double alpha_min, double alpha_max) {
  if (dx.empty() || dgrad.empty()) return 1.0;
  const double pairing = std::abs(kernels::dot(dx, dgrad));
  if (pairing == 0.0) return 1.0;
  const double raw = kernels::norm2_squared(dx) / pairing;
  return std::max(alpha_min, std::min(alpha_max, raw));
}

IterateState make_iterate_state(const FractionalProblem& problem, ConstSpan x) {
  IterateState s;
  s.x.assign(x.begin(), x.end());
  s.f_val = problem.eval_f(x);
  s.g_val = problem.eval_g(x);
  s.c = eval_c(problem, x);
  s.y = problem.subgrad_g(x);
  SmoothParts smooth = problem.eval_smooth_parts(x);
  s.h1_val = smooth.h1;
  s.h2_val = smooth.h2;
  s.grad_h1 = std::move(smooth.grad_h1);
  s.z = std::move(smooth.subgrad_h2);
  s.F_val = s.f_val / s.g_val + s.h1_val - s.h2_val;
  return s;
}

Vector proximal_step(const FractionalProblem& problem, const IterateState& state, double alpha) {
  if (!(alpha > 0.0)) throw ArgumentError("proximal_step: alpha must be positive");
  return problem.prox_fC(prox_argument(state, alpha), alpha * state.c);
}

double q_linesearch_value(const FractionalProblem& problem, ConstSpan x_hat,
                          const IterateState& state) {
  if (!problem.in_omega(x_hat))
    throw DomainError("q_linesearch_value: candidate outside Omega");
  const double f_hat = problem.eval_f(x_hat);
  const double g_hat = problem.eval_g(x_hat);
  const double h1_hat = problem.eval_h1(x_hat);
  return q_value_from(f_hat, g_hat, h1_hat, x_hat, state);
}

LineSearchResult line_search(const FractionalProblem& problem, const IterateState& state,
                             const SolverConfig& config) {
  LineSearchResult res;
  double alpha = state.alpha_trial;
  for (std::size_t rejections = 0;; ++rejections) {
    Vector x_hat = problem.prox_fC(prox_argument(state, alpha), alpha * state.c);
    if (problem.in_omega(x_hat)) {
      const double f_hat = problem.eval_f(x_hat);
      const double g_hat = problem.eval_g(x_hat);
      const double h1_hat = problem.eval_h1(x_hat);
      const double q = q_value_from(f_hat, g_hat, h1_hat, x_hat, state);
      const double dist = kernels::diff_norm2(x_hat, state.x);
      if (q + 0.5 * config.sigma * dist * dist <= state.F_val) {
        res.success = true;
        res.x_next = std::move(x_hat);
        res.alpha_accepted = alpha;
        res.backtracks = rejections;
        res.step_norm = dist;
        res.f_val = f_hat;
        res.g_val = g_hat;
        res.h1_val = h1_hat;
        return res;
      }
    }
    if (rejections + 1 > config.max_backtracks) {
      res.success = false;
      res.backtracks = rejections + 1;
      return res;
    }
    alpha *= config.gamma;
  }
}

SolveResult solve(const FractionalProblem& problem, const Vector& x0,
                  const SolverConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  SolveResult result;
  if (!eval_F(problem, x0).is_finite()) {
    result.final_x = x0;
    result.final_F = std::numeric_limits<double>::infinity();
    result.status = SolveStatus::invalid_start;
    result.wall_time = elapsed();
    return result;
  }

  IterateState state = make_iterate_state(problem, x0);
  Vector prev_x;
  Vector prev_grad;
  result.status = SolveStatus::max_iters;
  result.history.push_back({state.F_val, 0.0, 1.0, 1.0, 0, elapsed()});

  for (std::size_t k = 0; k < config.max_iters; ++k) {
    if (k == 0) {
      state.alpha_trial = 1.0;
    } else {
      Vector dx(state.x.size());
      Vector dgrad(state.x.size());
      for (std::size_t i = 0; i < dx.size(); ++i) {
        dx[i] = state.x[i] - prev_x[i];
        dgrad[i] = state.grad_h1[i] - prev_grad[i];
      }
      state.alpha_trial = bb_trial_stepsize(dx, dgrad, config.alpha_min, config.alpha_max);
    }

    LineSearchResult step = line_search(problem, state, config);
    if (!step.success) {
      result.status = SolveStatus::line_search_failure;
      break;
    }

    state.alpha_accepted = step.alpha_accepted;
    state.backtracks = step.backtracks;
    state.step_norm = step.step_norm;
    if (config.record_trace) result.trace.push_back(state);
    IterationScalars& taken = result.history.back();
    taken.step_norm = step.step_norm;
    taken.alpha_trial = state.alpha_trial;
    taken.alpha_accepted = step.alpha_accepted;
    taken.backtracks = step.backtracks;

    // Advance to the accepted candidate, reusing its line-search values.
    prev_x = std::move(state.x);
    prev_grad = std::move(state.grad_h1);
    IterateState next;
    next.x = std::move(step.x_next);
    next.f_val = step.f_val;
    next.g_val = step.g_val;
    next.c = 1.0 / step.g_val;
    next.y = problem.subgrad_g(next.x);
    SmoothParts smooth = problem.eval_smooth_parts(next.x);
    next.h1_val = smooth.h1;
    next.h2_val = smooth.h2;
    next.grad_h1 = std::move(smooth.grad_h1);
    next.z = std::move(smooth.subgrad_h2);
    next.F_val = next.f_val / next.g_val + next.h1_val - next.h2_val;
    next.alpha_trial = state.alpha_trial;
    next.alpha_accepted = state.alpha_accepted;
    state = std::move(next);

    result.iterations = k + 1;
    result.history.push_back({state.F_val, 0.0, state.alpha_trial, state.alpha_accepted,
                              0, elapsed()});

    const double x_norm = kernels::norm2(state.x);
    if (x_norm >= kNormFloor && step.step_norm / x_norm < config.term_tol) {
      result.status = SolveStatus::converged;
      break;
    }
  }

  state.step_norm = 0.0;
  state.backtracks = 0;
  if (config.record_trace) result.trace.push_back(state);
  result.final_x = state.x;
  result.final_F = state.F_val;
  result.wall_time = elapsed();
  return result;
}

}  // namespace ampda
