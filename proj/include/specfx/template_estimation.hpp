#pragma once

#include <vector>

#include "specfx/alignment.hpp"
#include "specfx/spectrum.hpp"

namespace specfx {

/// The profiled template objective as an implicit symmetric PSD operator M:
///   v'Mv = sum_i min_{c,d} ||c*x_i + d*1 - v||^2
/// i.e. M = sum_i (I - P_i) with P_i the orthogonal projector onto span{x_i, 1}.
/// Applied matrix-free as  M v = n v - U'(U v) - (n/p)(1'v) 1,  where the rows
/// of U are the centered, normalized signals. The p x p matrix is never formed.
class QuadraticForm {
 public:
  explicit QuadraticForm(const SpectrumSet& signals);

  Eigen::Index n() const { return basis_.rows(); }
  Eigen::Index p() const { return basis_.cols(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  double quad(const Eigen::VectorXd& v) const;
  const Eigen::MatrixXd& row_basis() const { return basis_; }

 private:
  Eigen::MatrixXd basis_;  // U, n x p
};

QuadraticForm build_quadratic_form(const SpectrumSet& signals);

struct TemplateFit {
  Eigen::VectorXd template_values;  // unit norm, zero mean
  std::vector<AffineAlignment> alignments;
  double objective = 0.0;   // sum_i ||c_i x_i + d_i 1 - x0||^2 at the solution
  double eigenvalue = 0.0;  // smallest admissible eigenvalue of the centered operator
  double eigen_gap = 0.0;   // distance to the next admissible eigenvalue
  bool eigen_gap_warning = false;  // gap below 1e-10: template direction not unique
};

/// Minimizes sum_i ||c_i x_i + d_i 1 - x0||^2 over (x0, c, d) subject to
/// 1'x0 = 0 and ||x0|| = 1. On the feasible set the objective equals
/// n - ||U x0||^2, so the solution is the leading right singular vector of U;
/// the trivial direction along 1 is excluded by construction. The sign is
/// fixed by sum_i c_i > 0.
TemplateFit estimate_template(const SpectrumSet& signals);

/// The per-signal affine images c_i*x_i + d_i*1, for plotting and residuals.
SpectrumSet aligned_signals(const TemplateFit& fit, const SpectrumSet& signals);

}  // namespace specfx
