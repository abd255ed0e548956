#include "specfx/generator.hpp"

#include <cmath>
#include <random>

#include "specfx/csv.hpp"

namespace specfx {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream 0 = pre-treatment, stream 1 = post-treatment; signal i gets its own
// engine so generation order (or future parallelism) cannot change the draws.
uint64_t signal_seed(uint64_t seed, uint64_t stream, uint64_t i) {
  uint64_t h = splitmix64(seed ^ (0xA0761D6478BD642FULL * (stream + 1)));
  return splitmix64(h ^ (0xE7037ED1A0B428DBULL * (i + 1)));
}

double sample(const DistributionSpec& law, std::mt19937_64& rng) {
  switch (law.kind) {
    case DistributionSpec::Kind::Constant:
      return law.a;
    case DistributionSpec::Kind::Uniform:
      return std::uniform_real_distribution<double>(law.a, law.b)(rng);
    case DistributionSpec::Kind::Normal:
      if (law.b == 0.0) return law.a;
      return law.a + law.b * std::normal_distribution<double>(0.0, 1.0)(rng);
  }
  throw InvalidParams("unknown distribution kind");
}

double sample_positive(const DistributionSpec& law, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double v = sample(law, rng);
    if (v > 0.0) return v;
  }
  throw InvalidParams("scale law produced 1000 non-positive draws in a row");
}

Eigen::VectorXd gaussian_mixture(const WavenumberGrid& grid, const double (*peaks)[3], int k) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.count());
  for (int m = 0; m < k; ++m) {
    const double center = peaks[m][0], width = peaks[m][1], amp = peaks[m][2];
    for (Eigen::Index j = 0; j < grid.count(); ++j) {
      const double z = (grid.point(j) - center) / width;
      v[j] += amp * std::exp(-0.5 * z * z);
    }
  }
  // Two centering/normalization passes leave |sum| and |norm-1| at rounding level.
  for (int pass = 0; pass < 2; ++pass) {
    v.array() -= v.mean();
    const double norm = v.norm();
    if (!(norm > 1e-12)) throw InvalidParams("built-in shape degenerates on this grid");
    v /= norm;
  }
  return v;
}

}  // namespace

DistributionSpec DistributionSpec::uniform(double low, double high) {
  if (!(low <= high)) throw InvalidParams("uniform law needs low <= high");
  return {Kind::Uniform, low, high};
}

DistributionSpec DistributionSpec::normal(double mean, double sd) {
  if (!(sd >= 0.0)) throw InvalidParams("normal law needs sd >= 0");
  return {Kind::Normal, mean, sd};
}

Eigen::VectorXd builtin_template(const WavenumberGrid& grid) {
  static const double peaks[6][3] = {
      {1015.0, 80.0, 0.75}, {1250.0, 60.0, 0.55}, {1460.0, 50.0, 0.45},
      {1730.0, 45.0, 0.90}, {2920.0, 70.0, 1.00}, {3420.0, 160.0, 0.65},
  };
  return gaussian_mixture(grid, peaks, 6);
}

Eigen::VectorXd builtin_pattern(const WavenumberGrid& grid) {
  // Bumps sit in the template's quiet 1900-2700 band so the simulated pattern
  // has little overlap with the template direction.
  static const double bumps[3][3] = {
      {2000.0, 35.0, 1.00}, {2260.0, 28.0, 0.70}, {2550.0, 40.0, 0.55},
  };
  return gaussian_mixture(grid, bumps, 3);
}

double default_sigma(const Eigen::VectorXd& template_values) {
  return 0.02 * (template_values.maxCoeff() - template_values.minCoeff());
}

void GenerativeParams::validate(bool need_post_fields) const {
  if (template_values.size() != grid.count())
    throw DimensionMismatch("template length does not match grid count");
  if (std::abs(template_values.norm() - 1.0) > 1e-12)
    throw InvalidParams("template must have unit norm");
  if (std::abs(template_values.sum()) > 1e-12)
    throw InvalidParams("template must have zero mean");
  if (!(sigma >= 0.0)) throw InvalidParams("sigma must be nonnegative");
  if (replicates < 1) throw InvalidParams("replicates must be positive");
  if (pattern.size() > 0) {
    if (pattern.size() != grid.count())
      throw DimensionMismatch("pattern length does not match grid count");
    if (std::abs(pattern.norm() - 1.0) > 1e-12)
      throw InvalidParams("pattern must have unit norm");
  }
  if (need_post_fields) {
    if (pattern.size() == 0) throw InvalidParams("post-treatment generation needs a pattern");
    if (effects.size() == 0) throw InvalidParams("post-treatment generation needs effects");
  }
}

namespace {

void draw_signal(const GenerativeParams& params, uint64_t stream_seed,
                 const Eigen::VectorXd& clean, Eigen::Ref<Eigen::RowVectorXd> out,
                 double& scale, double& offset) {
  std::mt19937_64 rng(stream_seed);
  scale = sample_positive(params.scale_law, rng);
  offset = sample(params.offset_law, rng);
  const Eigen::Index p = clean.size();
  if (params.sigma == 0.0) {
    out = (scale * clean).transpose().array() + offset;
    return;
  }
  std::normal_distribution<double> noise(0.0, params.sigma);
  for (Eigen::Index j = 0; j < p; ++j) out[j] = scale * (clean[j] + noise(rng)) + offset;
}

}  // namespace

GeneratedSet generate_pretreatment(const GenerativeParams& params, int n, std::uint64_t seed) {
  params.validate();
  if (n < 1) throw InvalidParams("need at least one pre-treatment signal");

  Eigen::MatrixXd values(n, params.grid.count());
  std::vector<std::string> labels(std::size_t(n));
  std::vector<double> scales(std::size_t(n)), offsets(std::size_t(n));
  const int width = int(std::to_string(n).size());
  for (int i = 0; i < n; ++i) {
    draw_signal(params, signal_seed(seed, 0, uint64_t(i)), params.template_values,
                values.row(i), scales[std::size_t(i)], offsets[std::size_t(i)]);
    std::string idx = std::to_string(i + 1);
    labels[std::size_t(i)] = "pre" + std::string(std::size_t(width) - idx.size(), '0') + idx;
  }
  return {SpectrumSet(params.grid, std::move(values), std::move(labels)),
          std::move(scales), std::move(offsets)};
}

GeneratedSet generate_posttreatment(const GenerativeParams& params, std::uint64_t seed) {
  params.validate(/*need_post_fields=*/true);

  const Eigen::Index coupons = params.effects.size();
  const Eigen::Index total = coupons * params.replicates;
  Eigen::MatrixXd values(total, params.grid.count());
  std::vector<std::string> labels(std::size_t(total));
  std::vector<double> scales(std::size_t(total)), offsets(std::size_t(total));
  for (Eigen::Index k = 0; k < coupons; ++k) {
    const double delta = params.effects[k];
    const Eigen::VectorXd clean = params.template_values + delta * params.pattern;
    const std::string label = "c" + std::to_string(k + 1) + "_d" + format_double(delta);
    for (int r = 0; r < params.replicates; ++r) {
      const Eigen::Index i = k * params.replicates + r;
      draw_signal(params, signal_seed(seed, 1, uint64_t(i)), clean, values.row(i),
                  scales[std::size_t(i)], offsets[std::size_t(i)]);
      labels[std::size_t(i)] = label;
    }
  }
  return {SpectrumSet(params.grid, std::move(values), std::move(labels)),
          std::move(scales), std::move(offsets)};
}

}  // namespace specfx
