#pragma once

#include <Eigen/Core>
#include <string>

#include "specfx/errors.hpp"

namespace specfx {

/// Coefficients of the per-signal affine fit  c*x + d*1 ~ target.
struct AffineAlignment {
  double c = 1.0;
  double d = 0.0;
};

/// Exact minimizer of ||c*x + d*1 - target||^2, solved from the 2x2 normal
/// equations [[x'x, x'1],[1'x, p]] in centered form. The residual is
/// orthogonal to span{x, 1}. Throws DegenerateSignal when x is constant.
AffineAlignment align_to_target(const Eigen::VectorXd& x, const Eigen::VectorXd& target,
                                const std::string& label = {});

}  // namespace specfx
