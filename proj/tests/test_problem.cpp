#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <string>

#include "ampda/oracles.hpp"
#include "ampda/problem.hpp"
#include "ampda/rng.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace ampda;

namespace {

// 1x2 toy: A = [1 0], b = [1], lambda = 1, mu = 0, box [-10,10]^2.
RecoveryInstance toy_instance() {
  RecoveryInstance inst;
  inst.A = DenseMatrix(1, 2);
  inst.A(0, 0) = 1.0;
  inst.A(0, 1) = 0.0;
  inst.b = {1.0};
  inst.lambda = 1.0;
  inst.mu = 0;
  inst.lower = {-10.0, -10.0};
  inst.upper = {10.0, 10.0};
  return inst;
}

}  // namespace

TEST_CASE("eval_F on the hand-checked toy") {
  const auto problem = build_problem(toy_instance(), DenominatorVariant::l1_over_l2);

  const ObjectiveValue at_solution = eval_F(problem, Vector{1.0, 0.0});
  REQUIRE(at_solution.is_finite());
  CHECK(at_solution.value() == 1.0);  // ||x||_1/||x||_2 = 1, residual = 0
  CHECK(at_solution.numerator() == 1.0);
  CHECK(at_solution.denominator() == 1.0);
  CHECK(at_solution.smooth_part() == 0.0);

  CHECK_FALSE(eval_F(problem, Vector{11.0, 0.0}).is_finite());  // outside the box
  CHECK_FALSE(eval_F(problem, Vector{0.0, 0.0}).is_finite());   // g(0) = 0
}

TEST_CASE("infinite objective values trap numeric access") {
  const ObjectiveValue inf = ObjectiveValue::infinite();
  CHECK_FALSE(inf.is_finite());
  CHECK(inf.value_or_infinity() == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(inf.value(), DomainError);
  CHECK_THROWS_AS(inf.numerator(), DomainError);
}

TEST_CASE("finite objective value decomposes consistently") {
  const ObjectiveValue v = ObjectiveValue::finite(3.0, 2.0, -0.25);
  CHECK(v.value() == 3.0 / 2.0 - 0.25);
}

TEST_CASE("eval_c is the reciprocal denominator") {
  const auto problem = build_problem(toy_instance(), DenominatorVariant::l1_over_l2);
  CHECK(eval_c(problem, Vector{0.0, 2.0}) == 0.5);
  CHECK(eval_c(problem, Vector{1.0, 0.0}) == 1.0);
  CHECK(eval_c(problem, Vector{3.0, -4.0}) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(eval_c(problem, Vector{0.0, 0.0}), DomainError);
}

TEST_CASE("eval_F_tilde: vertex at c = 1/g and domination by F") {
  const auto problem = build_problem(toy_instance(), DenominatorVariant::l1_over_l2);
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Vector x = testutil::random_vector(rng, 2, 2.0);
    if (x[0] == 0.0 && x[1] == 0.0) continue;
    const double f_val = eval_F(problem, x).value();
    const double c_star = eval_c(problem, x);

    CHECK(eval_F_tilde(problem, x, c_star) == doctest::Approx(f_val).epsilon(1e-12));
    CHECK(eval_F_tilde(problem, x, 0.0) ==
          doctest::Approx(problem.eval_h1(x) - problem.eval_h2(x)).epsilon(1e-12));

    // grid sweep: the vertex dominates and F dominates everything
    double best = -std::numeric_limits<double>::infinity();
    for (double c = -3.0; c <= 3.0; c += 0.01) {
      const double val = eval_F_tilde(problem, x, c);
      best = std::max(best, val);
      CHECK(val <= f_val + 1e-12 * (1.0 + std::abs(f_val)));
    }
    CHECK(best <= eval_F_tilde(problem, x, c_star) + 1e-12 * (1.0 + std::abs(best)));
  }
}

TEST_CASE("eval_F_tilde is +inf off the domain") {
  const auto problem = build_problem(toy_instance(), DenominatorVariant::l1_over_l2);
  CHECK(std::isinf(eval_F_tilde(problem, Vector{0.0, 0.0}, 1.0)));
  CHECK(std::isinf(eval_F_tilde(problem, Vector{20.0, 0.0}, 1.0)));
}

TEST_CASE("dimension mismatches are rejected") {
  const auto problem = build_problem(toy_instance(), DenominatorVariant::l1_over_l2);
  CHECK_THROWS_AS(eval_F(problem, Vector{1.0}), ArgumentError);
  CHECK_THROWS_AS(eval_c(problem, Vector{1.0, 2.0, 3.0}), ArgumentError);
}

TEST_CASE("non-finite oracle output raises an evaluation error naming the oracle") {
  auto problem = build_problem(toy_instance(), DenominatorVariant::l1_over_l2);
  problem.eval_h1 = [](ConstSpan) { return std::numeric_limits<double>::quiet_NaN(); };
  try {
    eval_F(problem, Vector{1.0, 0.0});
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(std::string(e.what()).find("eval_h1") != std::string::npos);
  }
}

TEST_CASE("subgradient inequalities hold for the g and h2 selections") {
  const auto gen = testutil::make_small_instance(21, 12, 30, 5, 2, 2.0, 3, 6);
  for (auto variant : {DenominatorVariant::l1_over_l2, DenominatorVariant::l1_over_topk}) {
    const auto problem = build_problem(gen.instance, variant);
    Rng rng(22);
    for (int trial = 0; trial < 1000; ++trial) {
      Vector x = testutil::random_vector(rng, 30);
      Vector w = testutil::random_vector(rng, 30);
      const double g_x = problem.eval_g(x);
      const Vector y = problem.subgrad_g(x);
      double inner = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) inner += y[i] * (w[i] - x[i]);
      CHECK(problem.eval_g(w) >= g_x + inner - 1e-10 * (1.0 + std::abs(g_x)));

      const double h2_x = problem.eval_h2(x);
      const Vector z = problem.subgrad_h2(x);
      inner = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) inner += z[i] * (w[i] - x[i]);
      CHECK(problem.eval_h2(w) >= h2_x + inner - 1e-10 * (1.0 + std::abs(h2_x)));
    }
  }
}
