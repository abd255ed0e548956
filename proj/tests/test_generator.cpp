#include <doctest.h>

#include "specfx/generator.hpp"
#include "test_support.hpp"

using namespace specfx;

namespace {

GenerativeParams small_params(Eigen::Index p = 8) {
  GenerativeParams params(WavenumberGrid(650.0, 4000.0, p));
  params.template_values = builtin_template(params.grid);
  return params;
}

}  // namespace

TEST_CASE("builtin shapes satisfy the model constraints") {
  const WavenumberGrid grid(650.0, 4000.0, 1798);
  for (const Eigen::VectorXd& v : {builtin_template(grid), builtin_pattern(grid)}) {
    CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
    CHECK(std::abs(v.sum()) <= 1e-12);
  }
  // the pattern is sparse-ish: most coordinates carry almost no mass
  const Eigen::VectorXd g = builtin_pattern(grid);
  const double peak = g.cwiseAbs().maxCoeff();
  const Eigen::Index active = (g.cwiseAbs().array() > 0.05 * peak).count();
  CHECK(active < grid.count() / 5);
}

TEST_CASE("noise-free generation is an exact affine image of the template") {
  GenerativeParams params = small_params();
  params.sigma = 0.0;

  SUBCASE("identity laws reproduce the template exactly") {
    params.scale_law = DistributionSpec::constant(1.0);
    params.offset_law = DistributionSpec::constant(0.0);
    const GeneratedSet gen = generate_pretreatment(params, 4, 7);
    for (Eigen::Index i = 0; i < gen.set.n(); ++i)
      CHECK((gen.set.signal_values(i) - params.template_values).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("constant scale 2 and offset 3") {
    params.scale_law = DistributionSpec::constant(2.0);
    params.offset_law = DistributionSpec::constant(3.0);
    const GeneratedSet gen = generate_pretreatment(params, 3, 7);
    const Eigen::VectorXd expected = (2.0 * params.template_values).array() + 3.0;
    for (Eigen::Index i = 0; i < gen.set.n(); ++i)
      CHECK((gen.set.signal_values(i) - expected).cwiseAbs().maxCoeff() <= 1e-15);
  }

  SUBCASE("random laws still give exact affine images (2x2 least squares)") {
    const GeneratedSet gen = generate_pretreatment(params, 6, 123);
    for (Eigen::Index i = 0; i < gen.set.n(); ++i) {
      const Eigen::VectorXd x = gen.set.signal_values(i);
      // solve x ~ k*template + m*1 and check the residual vanishes
      const double k = gen.scales[std::size_t(i)], m = gen.offsets[std::size_t(i)];
      CHECK((x - (k * params.template_values).array().matrix() -
             Eigen::VectorXd::Constant(x.size(), m))
                .norm() <= 1e-12);
    }
  }
}

TEST_CASE("per-coordinate moments match the model law (Monte Carlo, 5%)") {
  GenerativeParams params(WavenumberGrid(0.0, 3.0, 4));
  Eigen::VectorXd tpl(4);
  tpl << 3, -1, -1, -1;
  params.template_values = tpl / tpl.norm();
  params.scale_law = DistributionSpec::constant(1.7);
  params.offset_law = DistributionSpec::constant(0.4);
  params.sigma = 0.05;

  const int n = 10000;
  const GeneratedSet gen = generate_pretreatment(params, n, 99);
  const double expected_var = 1.7 * 1.7 * 0.05 * 0.05;
  for (Eigen::Index j = 0; j < 4; ++j) {
    const Eigen::VectorXd column = gen.set.values().col(j);
    const double mean = column.mean();
    const double var = (column.array() - mean).square().sum() / double(n - 1);
    CHECK(std::abs(mean - (1.7 * params.template_values[j] + 0.4)) <= 0.05 * 0.4 + 0.005);
    CHECK(std::abs(var - expected_var) <= 0.05 * expected_var);
  }
}

TEST_CASE("post-treatment generation") {
  GenerativeParams params = small_params(12);
  std::mt19937_64 rng(5);
  params.pattern = testsup::random_feasible_pattern(params.template_values, rng);

  SUBCASE("paper-sized effect vector gives 27 signals with coupon labels") {
    params.effects = Eigen::VectorXd(9);
    params.effects << 8, 5, 3, 2, 2, 2, 2, 2, 2;
    params.replicates = 3;
    params.sigma = default_sigma(params.template_values);
    const GeneratedSet gen = generate_posttreatment(params, 42);
    CHECK(gen.set.n() == 27);
    CHECK(gen.set.label(0) == "c1_d8");
    CHECK(gen.set.label(2) == "c1_d8");   // replicates share the coupon label
    CHECK(gen.set.label(3) == "c2_d5");
    CHECK(gen.set.label(26) == "c9_d2");
  }

  SUBCASE("zero effect and zero noise reproduce the template") {
    params.effects = Eigen::VectorXd::Zero(3);
    params.sigma = 0.0;
    params.scale_law = DistributionSpec::constant(1.0);
    params.offset_law = DistributionSpec::constant(0.0);
    const GeneratedSet gen = generate_posttreatment(params, 1);
    for (Eigen::Index i = 0; i < gen.set.n(); ++i)
      CHECK((gen.set.signal_values(i) - params.template_values).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("deterministic shift by delta * g") {
    GenerativeParams tiny(WavenumberGrid(0.0, 4.0, 5));
    Eigen::VectorXd tpl(5);
    tpl << 2, -1, 1, -2, 0;
    tiny.template_values = tpl / tpl.norm();
    Eigen::VectorXd g(5);
    g << 1, -1, 0, 0, 0;  // unit after normalize, not required to be feasible
    tiny.pattern = g / g.norm();
    tiny.effects = Eigen::VectorXd::Constant(1, 2.0);
    tiny.sigma = 0.0;
    tiny.scale_law = DistributionSpec::constant(1.0);
    tiny.offset_law = DistributionSpec::constant(0.0);
    const GeneratedSet gen = generate_posttreatment(tiny, 3);
    REQUIRE(gen.set.n() == 1);
    CHECK((gen.set.signal_values(0) - tiny.template_values - 2.0 * tiny.pattern)
              .cwiseAbs()
              .maxCoeff() <= 1e-15);
  }

  SUBCASE("missing pattern or effects is an error") {
    GenerativeParams bare = small_params(12);
    bare.effects = Eigen::VectorXd::Constant(1, 1.0);
    CHECK_THROWS_AS(generate_posttreatment(bare, 1), InvalidParams);
  }
}

TEST_CASE("generation is bit-identical for identical seed and independent of n") {
  GenerativeParams params = small_params(16);
  params.sigma = default_sigma(params.template_values);
  const GeneratedSet a = generate_pretreatment(params, 5, 2024);
  const GeneratedSet b = generate_pretreatment(params, 5, 2024);
  CHECK(a.set.values() == b.set.values());

  // per-signal streams: the first signals do not change when n grows
  const GeneratedSet c = generate_pretreatment(params, 7, 2024);
  CHECK(c.set.values().topRows(5) == a.set.values());

  const GeneratedSet d = generate_pretreatment(params, 5, 2025);
  CHECK(a.set.values() != d.set.values());
}

TEST_CASE("non-positive scale draws are rejected and eventually abort") {
  GenerativeParams params = small_params();
  params.scale_law = DistributionSpec::constant(-1.0);
  CHECK_THROWS_AS(generate_pretreatment(params, 1, 1), InvalidParams);

  // a law straddling zero keeps only positive draws
  params.scale_law = DistributionSpec::uniform(-0.5, 0.5);
  const GeneratedSet gen = generate_pretreatment(params, 50, 11);
  for (double a : gen.scales) CHECK(a > 0.0);
}
