#pragma once

#include <functional>
#include <vector>

#include "specfx/alignment.hpp"
#include "specfx/spectrum.hpp"

namespace specfx {

struct BcdOptions {
  double rel_tol = 1e-10;  // stop when the relative objective decrease falls below this
  int max_iter = 500;
  // Optional per-iteration hook (iteration, current pattern, objective); used by
  // property tests to watch constraint feasibility along the descent.
  std::function<void(int, const Eigen::VectorXd&, double)> observer;
};

struct EffectFit {
  Eigen::VectorXd pattern_tilde;  // unit norm, orthogonal to 1 and x0; empty when no_effect
  Eigen::VectorXd effects;        // per-signal magnitudes, sum >= 0 by convention
  std::vector<AffineAlignment> alignments;
  std::vector<double> objective_trace;  // one entry per outer iteration, nonincreasing
  bool converged = false;
  int iterations = 0;
  bool no_effect = false;  // projected residual vanished; effects are zero, pattern absent
};

struct Rank1Result {
  Eigen::VectorXd delta;
  Eigen::VectorXd pattern;
  double top_singular_value = 0.0;
  double projected_norm = 0.0;  // Frobenius norm of the row-projected residual matrix
  double input_norm = 0.0;      // Frobenius norm of the input matrix
  bool rank_deficient = false;  // top singular value below 1e-12
};

/// Best rank-1 fit delta*g' to the residual matrix under the pattern
/// constraints g'1 = g'x0 = 0, ||g|| = 1: every row of `residuals` is projected
/// onto the orthogonal complement of span{1, x0} and the top singular pair of
/// the projected matrix is returned (g the right vector, delta = lambda1 * u1,
/// sign fixed by sum(delta) >= 0).
Rank1Result rank1_step(const Eigen::MatrixXd& residuals, const Eigen::VectorXd& template_values);

/// Per-signal closed-form alignment against x0 + delta_i * g.
std::vector<AffineAlignment> refit_alignments(const SpectrumSet& signals,
                                              const Eigen::VectorXd& template_values,
                                              const Eigen::VectorXd& effects,
                                              const Eigen::VectorXd& pattern);

/// Block-wise coordinate descent on
///   sum_i ||c_i x_i + d_i 1 - (x0 + delta_i g)||^2
/// alternating the per-signal (c,d) solves with the constrained rank-1 update.
/// The template is treated as known and must satisfy its constraints to 1e-8.
EffectFit bcd_fit(const SpectrumSet& signals, const Eigen::VectorXd& template_values,
                  const BcdOptions& options = {});

}  // namespace specfx
