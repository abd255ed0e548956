#include "specfx/msc.hpp"

#include <cmath>

namespace specfx {

MscFit msc_correct(const SpectrumSet& signals) {
  if (signals.n() < 2) throw InvalidParams("scatter correction needs at least 2 signals");
  for (Eigen::Index i = 0; i < signals.n(); ++i)
    if (is_constant_signal(signals.signal_values(i)))
      throw DegenerateSignal(signals.label(i), "signal '" + signals.label(i) + "' is constant");

  const Eigen::VectorXd reference = signals.values().colwise().mean().transpose();
  if (is_constant_signal(reference))
    throw DegenerateSignal("reference", "mean spectrum is constant; cannot regress on it");

  const double ref_mean = reference.mean();
  const Eigen::VectorXd ref_centered = reference.array() - ref_mean;
  const double ref_var = ref_centered.squaredNorm();

  Eigen::MatrixXd corrected(signals.n(), signals.p());
  std::vector<AffineAlignment> alignments;
  alignments.reserve(std::size_t(signals.n()));
  for (Eigen::Index i = 0; i < signals.n(); ++i) {
    const Eigen::VectorXd x = signals.signal_values(i);
    const double slope = ref_centered.dot(x) / ref_var;
    const double intercept = x.mean() - slope * ref_mean;
    if (std::abs(slope) < 1e-10)
      throw NearZeroSlope("signal '" + signals.label(i) + "' has near-zero regression slope");
    alignments.push_back({slope, intercept});
    corrected.row(i) = ((x.array() - intercept) / slope).transpose();
  }
  return {reference, std::move(alignments),
          SpectrumSet(signals.grid(), std::move(corrected), signals.labels())};
}

}  // namespace specfx
