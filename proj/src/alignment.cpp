#include "specfx/alignment.hpp"

#include "specfx/spectrum.hpp"

namespace specfx {

AffineAlignment align_to_target(const Eigen::VectorXd& x, const Eigen::VectorXd& target,
                                const std::string& label) {
  if (x.size() != target.size())
    throw DimensionMismatch("alignment: signal length " + std::to_string(x.size()) +
                            " vs target length " + std::to_string(target.size()));
  if (is_constant_signal(x))
    throw DegenerateSignal(label, "signal '" + label + "' is constant and cannot be aligned");

  // Centered solution of the normal equations: c = <x-mx, t>/||x-mx||^2, d = mt - c*mx.
  const double mean_x = x.mean();
  const Eigen::VectorXd xc = x.array() - mean_x;
  const double c = xc.dot(target) / xc.squaredNorm();
  const double d = target.mean() - c * mean_x;
  return {c, d};
}

}  // namespace specfx
