#pragma once

#include <cstdint>
#include <vector>

#include "specfx/spectrum.hpp"

namespace specfx {

/// Sampling law for the per-signal scale and offset draws.
struct DistributionSpec {
  enum class Kind { Constant, Uniform, Normal };
  Kind kind = Kind::Constant;
  double a = 1.0;  // value | low | mean
  double b = 0.0;  // unused | high | stddev

  static DistributionSpec constant(double value) { return {Kind::Constant, value, 0.0}; }
  static DistributionSpec uniform(double low, double high);
  static DistributionSpec normal(double mean, double sd);
};

struct GenerativeParams {
  explicit GenerativeParams(WavenumberGrid grid_) : grid(grid_) {}

  WavenumberGrid grid;
  Eigen::VectorXd template_values;  // unit norm, zero mean
  DistributionSpec scale_law = DistributionSpec::uniform(0.7, 1.3);
  DistributionSpec offset_law = DistributionSpec::uniform(-0.1, 0.1);
  double sigma = 0.0;        // per-coordinate noise std before scaling
  Eigen::VectorXd pattern;   // unit norm; size 0 when absent
  Eigen::VectorXd effects;   // one magnitude per coupon; size 0 when absent
  int replicates = 1;

  /// Throws InvalidParams on any violated invariant.
  void validate(bool need_post_fields = false) const;
};

/// Smooth synthetic template: six Gaussian peaks, centered and normalized.
Eigen::VectorXd builtin_template(const WavenumberGrid& grid);

/// Sparse synthetic modification pattern: three Gaussian bumps covering roughly
/// a tenth of the grid, centered and normalized.
Eigen::VectorXd builtin_pattern(const WavenumberGrid& grid);

/// Default noise level: per-coordinate std at 2% of the template's peak-to-peak range.
double default_sigma(const Eigen::VectorXd& template_values);

struct GeneratedSet {
  SpectrumSet set;
  std::vector<double> scales;   // the a_i draw behind each emitted signal
  std::vector<double> offsets;  // the b_i draw
};

/// n replicate signals a_i*(x0 + eps_i) + b_i*1. Same (params, n, seed) is
/// bit-identical. Per-signal streams are derived as hash(seed, i), so signal i
/// does not depend on how many signals precede it.
GeneratedSet generate_pretreatment(const GenerativeParams& params, int n, std::uint64_t seed);

/// For each effect magnitude, `replicates` signals a*(x0 + delta_i*g + eps) + b*1.
/// Labels carry the coupon index and magnitude and are shared by replicates.
GeneratedSet generate_posttreatment(const GenerativeParams& params, std::uint64_t seed);

}  // namespace specfx
