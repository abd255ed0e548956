#pragma once

#include <vector>

#include "specfx/spectrum.hpp"

namespace specfx {

/// Rotation frame {g~, 1/sqrt(p), x0}: mutually orthogonal unit vectors.
/// The rotated pattern is
///   g(theta, phi) = g~ cos(phi) + (1/sqrt(p)) cos(theta) sin(phi) 1
///                 + x0 sin(theta) sin(phi),
/// which has unit norm for every angle pair.
struct PatternFrame {
  Eigen::VectorXd g_tilde;
  Eigen::VectorXd template_values;

  /// Throws FrameNotOrthonormal when any norm or cosine is off by more than 1e-8.
  void validate() const;
};

/// The rotated pattern at (theta, phi).
Eigen::VectorXd pattern_at(const PatternFrame& frame, double theta, double phi);

/// L1 norm of the rotated pattern; asserts the unit-norm identity to 1e-9.
double pattern_l1(double theta, double phi, const PatternFrame& frame);

struct LandscapeMinimum {
  int theta_index = 0;
  int phi_index = 0;
  double theta = 0.0;
  double phi = 0.0;
  double value = 0.0;
  double cos_phi = 1.0;
};

struct Landscape {
  std::vector<double> thetas;  // periodic axis, grid over [0, 2*pi)
  std::vector<double> phis;    // clamped axis, grid over [0, pi] inclusive
  Eigen::MatrixXd values;      // phis.size() x thetas.size()
  std::vector<LandscapeMinimum> minima;  // one representative per plateau component
};

/// Full-grid evaluation of the L1 objective. A cell is a local minimum when it
/// is <= all existing neighbors (theta wraps, phi edges have fewer neighbors);
/// connected flat plateaus collapse to their centroid cell.
Landscape scan_landscape(const PatternFrame& frame, int grid_theta, int grid_phi);

struct SparsifiedPattern {
  double theta = 0.0;  // in [0, 2*pi]
  double phi = 0.0;    // in [0, pi]
  Eigen::VectorXd pattern;
  double l1_value = 0.0;
  double cos_phi = 1.0;
  double effective_floor = 0.5;  // |cos(phi)| filter actually applied
  bool floor_relaxed = false;    // the filter had to be halved to keep a candidate
  std::vector<LandscapeMinimum> candidates;
};

/// Keeps candidates with |cos(phi)| >= cos_phi_floor (halving the floor, with a
/// flag, while none survive), picks the smallest objective among survivors and
/// polishes it by alternating golden-section line searches on theta and phi
/// until both move less than 1e-8 rad. Polishing never increases the objective.
SparsifiedPattern select_and_polish(const std::vector<LandscapeMinimum>& candidates,
                                    const PatternFrame& frame, double cos_phi_floor = 0.5);

}  // namespace specfx
