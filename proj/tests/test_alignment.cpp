#include <doctest.h>

#include "specfx/alignment.hpp"
#include "test_support.hpp"

using namespace specfx;

TEST_CASE("aligning a vector to itself is the identity map") {
  std::mt19937_64 rng(1);
  const Eigen::VectorXd t = testsup::random_centered_unit(9, rng);
  const AffineAlignment a = align_to_target(t, t);
  CHECK(a.c == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.d == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("exact affine inverse: x = 2*target + 3*1 gives c=0.5, d=-1.5") {
  std::mt19937_64 rng(2);
  const Eigen::VectorXd t = testsup::random_centered_unit(7, rng);
  const Eigen::VectorXd x = (2.0 * t).array() + 3.0;
  const AffineAlignment a = align_to_target(x, t);
  CHECK(a.c == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.d == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("closed form matches the 2-D grid-search oracle") {
  std::mt19937_64 rng(3);
  const Eigen::VectorXd x = testsup::randn(6, rng);
  const Eigen::VectorXd t = testsup::randn(6, rng);
  const AffineAlignment a = align_to_target(x, t);
  const double objective = testsup::naive_affine_residual(x, t, a.c, a.d);

  const testsup::AlignOracle oracle = testsup::align_grid_oracle(x, t);
  // oracle self-check: its expanded objective agrees with the naive loop
  CHECK(oracle.objective ==
        doctest::Approx(testsup::naive_affine_residual(x, t, oracle.c, oracle.d)).epsilon(1e-10));
  CHECK(std::abs(objective - oracle.objective) <= 1e-6);
}

TEST_CASE("residual is orthogonal to span{x, 1}") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = testsup::randn(11, rng);
    const Eigen::VectorXd t = testsup::randn(11, rng);
    const AffineAlignment a = align_to_target(x, t);
    const Eigen::VectorXd r = a.c * x + Eigen::VectorXd::Constant(11, a.d) - t;
    CHECK(std::abs(x.dot(r)) <= 1e-8 * x.norm() * (r.norm() + 1e-30));
    CHECK(std::abs(r.sum()) <= 1e-8 * std::sqrt(11.0) * (r.norm() + 1e-30));
  }
}

TEST_CASE("constant signals are rejected") {
  const Eigen::VectorXd flat = Eigen::VectorXd::Constant(5, 3.0);
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
  CHECK_THROWS_AS(align_to_target(flat, t, "flat"), DegenerateSignal);
  try {
    align_to_target(flat, t, "flat");
  } catch (const DegenerateSignal& e) {
    CHECK(e.label == "flat");
  }
}
