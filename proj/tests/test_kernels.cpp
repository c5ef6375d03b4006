#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "ampda/kernels.hpp"
#include "ampda/rng.hpp"
#include "doctest.h"
#include "oracle_helpers.hpp"

using namespace ampda;

namespace {

DenseMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  DenseMatrix m(rows, cols);
  for (double& v : m.data) v = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("matvec matches a naive triple loop") {
  Rng rng(1);
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {3, 7}, {40, 17}}) {
    const DenseMatrix m = random_matrix(rng, rows, cols);
    const Vector x = testutil::random_vector(rng, cols);
    Vector out(rows);
    kernels::matvec(m, x, out);
    for (std::size_t i = 0; i < rows; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < cols; ++j) acc += m(i, j) * x[j];
      CHECK(out[i] == doctest::Approx(acc).epsilon(1e-14));
    }
  }
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  Rng rng(2);
  const DenseMatrix m = random_matrix(rng, 250, 300);  // above the grain size
  const Vector x = testutil::random_vector(rng, 300);
  const Vector b = testutil::random_vector(rng, 250);

  Vector serial_out(250), par_out(250);
  kernels::serial::matvec(m, x, serial_out);
  kernels::par::matvec(m, x, par_out);
  CHECK(serial_out == par_out);

  kernels::serial::residual(m, x, b, serial_out);
  kernels::par::residual(m, x, b, par_out);
  CHECK(serial_out == par_out);

  const Vector v = testutil::random_vector(rng, 40000);
  const Vector lower(40000, -0.5);
  const Vector upper(40000, 0.75);
  Vector s_soft(40000), p_soft(40000);
  kernels::serial::soft_threshold_clamp(v, 0.3, lower, upper, s_soft);
  kernels::par::soft_threshold_clamp(v, 0.3, lower, upper, p_soft);
  CHECK(s_soft == p_soft);
}

TEST_CASE("dispatch is backend-independent in value") {
  Rng rng(3);
  const DenseMatrix m = random_matrix(rng, 300, 200);
  const Vector x = testutil::random_vector(rng, 200);
  Vector with_parallel(300), with_serial(300);

  const kernels::Backend saved = kernels::backend();
  kernels::set_backend(kernels::Backend::parallel);
  kernels::matvec(m, x, with_parallel);
  kernels::set_backend(kernels::Backend::serial);
  kernels::matvec(m, x, with_serial);
  kernels::set_backend(saved);
  CHECK(with_parallel == with_serial);
}

TEST_CASE("matvec_transpose matches the explicit transpose product bit for bit") {
  Rng rng(4);
  const DenseMatrix m = random_matrix(rng, 60, 45);
  const DenseMatrix mt = m.transposed();
  const Vector r = testutil::random_vector(rng, 60);
  Vector via_accumulate(45), via_transpose(45);
  kernels::matvec_transpose(m, r, via_accumulate);
  kernels::serial::matvec(mt, r, via_transpose);
  CHECK(via_accumulate == via_transpose);
}

TEST_CASE("residual equals matvec minus b") {
  Rng rng(5);
  const DenseMatrix m = random_matrix(rng, 12, 9);
  const Vector x = testutil::random_vector(rng, 9);
  const Vector b = testutil::random_vector(rng, 12);
  Vector r(12), ax(12);
  kernels::residual(m, x, b, r);
  kernels::matvec(m, x, ax);
  for (std::size_t i = 0; i < 12; ++i) CHECK(r[i] == ax[i] - b[i]);
}

TEST_CASE("soft_threshold_clamp handles signs, zeros and binding bounds") {
  const Vector v{2.0, -3.0, 0.5, -0.2, 10.0};
  const Vector lower{-10.0, -10.0, -10.0, -10.0, -1.0};
  const Vector upper{10.0, 10.0, 10.0, 10.0, 1.0};
  Vector out(5);
  kernels::soft_threshold_clamp(v, 1.0, lower, upper, out);
  CHECK(out == Vector{1.0, -2.0, 0.0, 0.0, 1.0});

  kernels::soft_threshold_clamp(v, 0.0, lower, upper, out);
  CHECK(out == Vector{2.0, -3.0, 0.5, -0.2, 1.0});  // pure projection
}

TEST_CASE("norm helpers") {
  const Vector v{3.0, -4.0};
  CHECK(kernels::norm2(v) == 5.0);
  CHECK(kernels::norm1(v) == 7.0);
  CHECK(kernels::norm_inf(v) == 4.0);
  CHECK(kernels::norm2_squared(v) == 25.0);
  CHECK(kernels::dot(v, v) == 25.0);
  CHECK(kernels::diff_norm2(v, Vector{0.0, 0.0}) == 5.0);
}
