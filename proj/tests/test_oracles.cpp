#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "ampda/kernels.hpp"
#include "ampda/oracles.hpp"
#include "ampda/rng.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace ampda;

TEST_CASE("l1_norm") {
  CHECK(l1_norm(Vector{0.0, 0.0, 0.0}) == 0.0);
  CHECK(l1_norm(Vector{3.0, -4.0}) == 7.0);
  CHECK(l1_norm(Vector{-1.0, -1.0, -1.0}) == 3.0);
}

TEST_CASE("l2_norm_subgrad") {
  const auto a = l2_norm_subgrad(Vector{3.0, -4.0});
  CHECK(a.value == 5.0);
  CHECK(a.subgrad == Vector{0.6, -0.8});

  const auto b = l2_norm_subgrad(Vector{1.0, 0.0, 0.0});
  CHECK(b.value == 1.0);
  CHECK(b.subgrad == Vector{1.0, 0.0, 0.0});

  CHECK_THROWS_AS(l2_norm_subgrad(Vector{0.0, 0.0}), DomainError);

  // subgradient inequality against random directions
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Vector x = testutil::random_vector(rng, 6);
    const auto ns = l2_norm_subgrad(x);
    for (int probe = 0; probe < 100; ++probe) {
      Vector w = testutil::random_vector(rng, 6);
      double inner = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) inner += ns.subgrad[i] * (w[i] - x[i]);
      CHECK(kernels::norm2(w) >= ns.value + inner - 1e-10 * (1.0 + ns.value));
    }
  }
}

TEST_CASE("topk_norm_subgrad hand cases") {
  const auto a = topk_norm_subgrad(Vector{3.0, -1.0, 2.0}, 2);
  CHECK(a.value == 5.0);
  CHECK(a.subgrad == Vector{1.0, 0.0, 1.0});

  // K = n reduces to the L1 norm
  const Vector x{0.5, -2.0, 0.0, 1.5};
  CHECK(topk_norm(x, 4) == l1_norm(x));

  // ties resolve to the lowest index
  const auto b = topk_norm_subgrad(Vector{1.0, 1.0, 1.0}, 1);
  CHECK(b.value == 1.0);
  CHECK(b.subgrad == Vector{1.0, 0.0, 0.0});

  // a zero entry forced into the selection carries +1
  const auto c = topk_norm_subgrad(Vector{1.0, 0.0, 0.0}, 2);
  CHECK(c.value == 1.0);
  CHECK(c.subgrad == Vector{1.0, 1.0, 0.0});

  CHECK_THROWS_AS(topk_norm_subgrad(Vector{1.0}, 2), ArgumentError);
  CHECK_THROWS_AS(topk_norm_subgrad(Vector{1.0}, 0), ArgumentError);
}

TEST_CASE("topk subgradient lies in the conjugate domain with exact pairing") {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.uniform_below(12);
    const std::size_t k = 1 + rng.uniform_below(n);
    Vector x = testutil::random_vector(rng, n);
    if (trial % 3 == 0) x[rng.uniform_below(n)] = 0.0;  // exercise zero entries
    const auto ns = topk_norm_subgrad(x, k);
    CHECK(kernels::dot(x, ns.subgrad) == ns.value);  // bit-exact pairing
    CHECK(kernels::norm_inf(ns.subgrad) <= 1.0);
    CHECK(kernels::norm1(ns.subgrad) <= static_cast<double>(k));

    // subgradient inequality
    for (int probe = 0; probe < 20; ++probe) {
      Vector w = testutil::random_vector(rng, n);
      double inner = 0.0;
      for (std::size_t i = 0; i < n; ++i) inner += ns.subgrad[i] * (w[i] - x[i]);
      CHECK(topk_norm(w, k) >= ns.value + inner - 1e-10 * (1.0 + ns.value));
    }
  }
}

TEST_CASE("truncate_mu") {
  CHECK(truncate_mu(Vector{3.0, -4.0, 1.0}, 1) == Vector{0.0, -4.0, 0.0});
  CHECK(truncate_mu(Vector{3.0, -4.0, 1.0}, 0) == Vector{0.0, 0.0, 0.0});
  CHECK(truncate_mu(Vector{3.0, -4.0, 1.0}, 3) == Vector{3.0, -4.0, 1.0});
  CHECK(truncate_mu(Vector{2.0, -2.0, 1.0}, 1) == Vector{2.0, 0.0, 0.0});  // tie rule
  CHECK_THROWS_AS(truncate_mu(Vector{1.0}, 2), ArgumentError);

  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_below(10);
    const std::size_t mu = rng.uniform_below(n + 1);
    const Vector z = testutil::random_vector(rng, n);
    const Vector once = truncate_mu(z, mu);
    CHECK(truncate_mu(once, mu) == once);  // idempotent
  }
}

TEST_CASE("dist2_sparse equals the exhaustive minimum and the norm identity") {
  CHECK(dist2_sparse(Vector{3.0, -4.0, 1.0}, 1) == 10.0);
  CHECK(dist2_sparse(Vector{3.0, -4.0, 1.0}, 3) == 0.0);

  Rng rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_below(8);
    const std::size_t mu = rng.uniform_below(n + 1);
    const Vector z = testutil::random_vector(rng, n);
    const double val = dist2_sparse(z, mu);
    const double brute = testutil::dist2_bruteforce(z, mu);
    CHECK(val == doctest::Approx(brute).epsilon(1e-12));

    const Vector t = truncate_mu(z, mu);
    CHECK(val + kernels::norm2_squared(t) ==
          doctest::Approx(kernels::norm2_squared(z)).epsilon(1e-12));
  }
}

TEST_CASE("h_oracles: vanishing residual, mu = 0, gradient and subgradient checks") {
  const auto gen = testutil::make_small_instance(31, 10, 25, 4, 2, 1.5, 3, 5);
  const RecoveryInstance& inst = gen.instance;

  SUBCASE("Ax = b zeroes every output") {
    // choose b := A x for a fixed x so the residual vanishes bitwise
    RecoveryInstance exact = inst;
    Vector x = testutil::random_vector(Rng(32), 25);
    Vector ax(exact.m());
    kernels::matvec(exact.A, x, ax);
    exact.b = ax;
    const SmoothParts parts = h_oracles(exact, x);
    CHECK(parts.h1 == 0.0);
    CHECK(parts.h2 == 0.0);
    CHECK(parts.grad_h1 == Vector(25, 0.0));
    CHECK(parts.subgrad_h2 == Vector(25, 0.0));
  }

  SUBCASE("mu = 0 kills the h2 leg") {
    RecoveryInstance ls = inst;
    ls.mu = 0;
    const SmoothParts parts = h_oracles(ls, gen.x_true);
    CHECK(parts.h2 == 0.0);
    CHECK(parts.subgrad_h2 == Vector(25, 0.0));
  }

  SUBCASE("grad_h1 against central differences") {
    Rng rng(33);
    const Vector x = testutil::random_vector(rng, 25);
    const SmoothParts parts = h_oracles(inst, x);
    Vector probe = x;
    const double step = 1e-5;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      probe[i] = x[i] + step;
      RecoveryInstance plain = inst;
      plain.mu = 0;  // h1 alone
      const double hi = h_oracles(plain, probe).h1;
      probe[i] = x[i] - step;
      const double lo = h_oracles(plain, probe).h1;
      probe[i] = x[i];
      const double fd = (hi - lo) / (2.0 * step);
      CHECK(std::abs(fd - parts.grad_h1[i]) / (1.0 + std::abs(parts.grad_h1[i])) < 1e-5);
    }
  }

  SUBCASE("subgrad_h2 satisfies the convex inequality; h2 is midpoint-convex") {
    Rng rng(34);
    for (int trial = 0; trial < 100; ++trial) {
      const Vector x = testutil::random_vector(rng, 25);
      const Vector w = testutil::random_vector(rng, 25);
      const SmoothParts at_x = h_oracles(inst, x);
      const SmoothParts at_w = h_oracles(inst, w);
      double inner = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) inner += at_x.subgrad_h2[i] * (w[i] - x[i]);
      CHECK(at_w.h2 >= at_x.h2 + inner - 1e-10 * (1.0 + std::abs(at_x.h2)));

      const double t = rng.uniform();
      Vector mix(25);
      for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = t * x[i] + (1.0 - t) * w[i];
      CHECK(h_oracles(inst, mix).h2 <= t * at_x.h2 + (1.0 - t) * at_w.h2 + 1e-10);
    }
  }

  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(h_oracles(inst, Vector{1.0, 2.0}), ArgumentError);
  }
}

TEST_CASE("prox_weighted_l1_box") {
  SUBCASE("hand cases") {
    CHECK(prox_weighted_l1_box(Vector{2.0, -3.0}, 1.0, Vector{-10.0, -10.0},
                               Vector{10.0, 10.0}) == Vector{1.0, -2.0});
    // w = 0 is plain clamping
    CHECK(prox_weighted_l1_box(Vector{15.0, -0.5}, 0.0, Vector{-1.0, -1.0},
                               Vector{1.0, 1.0}) == Vector{1.0, -0.5});
    CHECK_THROWS_AS(prox_weighted_l1_box(Vector{1.0}, 1.0, Vector{2.0}, Vector{1.0}),
                    ArgumentError);
    CHECK_THROWS_AS(prox_weighted_l1_box(Vector{1.0}, -0.1, Vector{0.0}, Vector{1.0}),
                    ArgumentError);
  }

  SUBCASE("matches the grid search oracle") {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + rng.uniform_below(3);
      Vector lower(n), upper(n), v(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double a = 4.0 * rng.uniform() - 2.0;
        const double b = 4.0 * rng.uniform() - 2.0;
        lower[i] = std::min(a, b);
        upper[i] = std::max(a, b);
        v[i] = 6.0 * rng.uniform() - 3.0;
      }
      const double w = 2.0 * rng.uniform();
      const Vector got = prox_weighted_l1_box(v, w, lower, upper);
      const Vector grid = testutil::grid_prox(v, w, lower, upper, 1e-3);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - grid[i]) <= 2e-3);
      CHECK(testutil::prox_box_objective(got, v, w) <=
            testutil::prox_box_objective(grid, v, w) + 1e-12);
    }
  }

  SUBCASE("nonexpansive in v") {
    Rng rng(42);
    const Vector lower(5, -1.5), upper(5, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      const Vector v1 = testutil::random_vector(rng, 5, 2.0);
      const Vector v2 = testutil::random_vector(rng, 5, 2.0);
      const double w = 3.0 * rng.uniform();
      const Vector p1 = prox_weighted_l1_box(v1, w, lower, upper);
      const Vector p2 = prox_weighted_l1_box(v2, w, lower, upper);
      CHECK(kernels::diff_norm2(p1, p2) <= kernels::diff_norm2(v1, v2) + 1e-15);
    }
  }
}

TEST_CASE("build_problem wires the full model") {
  const auto gen = testutil::make_small_instance(51, 14, 32, 5, 3, 2.5, 4, 7);

  SUBCASE("bundle evaluation equals the monolithic objective") {
    Rng rng(52);
    for (auto variant :
         {DenominatorVariant::l1_over_l2, DenominatorVariant::l1_over_topk}) {
      const auto problem = build_problem(gen.instance, variant);
      for (int trial = 0; trial < 50; ++trial) {
        const Vector x = testutil::random_feasible(rng, gen.instance);
        const double via_bundle = eval_F(problem, x).value();
        const double direct = testutil::monolithic_objective(gen.instance, variant, x);
        CHECK(via_bundle == doctest::Approx(direct).epsilon(1e-10));
      }
    }
  }

  SUBCASE("mu = 0 gives the least-squares objective") {
    RecoveryInstance ls = gen.instance;
    ls.mu = 0;
    const auto problem = build_problem(ls, DenominatorVariant::l1_over_l2);
    Rng rng(53);
    const Vector x = testutil::random_feasible(rng, ls);
    Vector r(ls.m());
    kernels::residual(ls.A, x, ls.b, r);
    const double expected =
        l1_norm(x) / kernels::norm2(x) + 0.5 * ls.lambda * kernels::norm2_squared(r);
    CHECK(eval_F(problem, x).value() == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("the zero point is outside Omega for both variants") {
    for (auto variant :
         {DenominatorVariant::l1_over_l2, DenominatorVariant::l1_over_topk}) {
      const auto problem = build_problem(gen.instance, variant);
      CHECK_FALSE(problem.in_omega(Vector(32, 0.0)));
    }
  }

  SUBCASE("fused smooth evaluation matches the individual oracles bit for bit") {
    const auto problem = build_problem(gen.instance, DenominatorVariant::l1_over_topk);
    Rng rng(54);
    const Vector x = testutil::random_feasible(rng, gen.instance);
    const SmoothParts fused = problem.smooth_parts(x);
    CHECK(fused.h1 == problem.eval_h1(x));
    CHECK(fused.h2 == problem.eval_h2(x));
    CHECK(fused.grad_h1 == problem.grad_h1(x));
    CHECK(fused.subgrad_h2 == problem.subgrad_h2(x));
    // and both match the transpose-free path
    const SmoothParts standalone = h_oracles(gen.instance, x);
    CHECK(fused.grad_h1 == standalone.grad_h1);
    CHECK(fused.subgrad_h2 == standalone.subgrad_h2);
  }

  SUBCASE("top-K variant requires K") {
    RecoveryInstance no_k = gen.instance;
    no_k.K.reset();
    CHECK_THROWS_AS(build_problem(no_k, DenominatorVariant::l1_over_topk), ArgumentError);
  }
}
