#pragma once

#include <vector>

#include "specfx/alignment.hpp"
#include "specfx/spectrum.hpp"

namespace specfx {

/// Multiplicative scatter correction result. Each signal is regressed on the
/// mean spectrum, x_i ~ c_i * reference + d_i, and inverted:
/// corrected_i = (x_i - d_i) / c_i. The alignments store (c_i, d_i) in that
/// regression direction.
struct MscFit {
  Eigen::VectorXd reference;  // coordinatewise mean of the inputs
  std::vector<AffineAlignment> alignments;
  SpectrumSet corrected;
};

MscFit msc_correct(const SpectrumSet& signals);

}  // namespace specfx
