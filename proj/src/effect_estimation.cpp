#include "specfx/effect_estimation.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace specfx {

namespace {

void require_feasible_template(const Eigen::VectorXd& x0) {
  const double p = double(x0.size());
  if (std::abs(x0.norm() - 1.0) > 1e-8 || std::abs(x0.sum()) / std::sqrt(p) > 1e-8)
    throw InvalidParams("template must have unit norm and zero mean");
}

}  // namespace

Rank1Result rank1_step(const Eigen::MatrixXd& residuals, const Eigen::VectorXd& template_values) {
  require_feasible_template(template_values);
  const Eigen::Index p = template_values.size();
  if (residuals.cols() != p)
    throw DimensionMismatch("residual matrix width does not match template length");

  // Orthonormal basis of span{1, x0} in signal space.
  const Eigen::VectorXd q1 = Eigen::VectorXd::Constant(p, 1.0 / std::sqrt(double(p)));
  Eigen::VectorXd q2 = template_values - (q1.dot(template_values)) * q1;
  q2 /= q2.norm();

  Eigen::MatrixXd projected = residuals;
  projected.noalias() -= (residuals * q1) * q1.transpose();
  projected.noalias() -= (residuals * q2) * q2.transpose();

  Rank1Result out;
  out.input_norm = residuals.norm();
  out.projected_norm = projected.norm();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(projected, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.top_singular_value = svd.singularValues()[0];
  if (out.top_singular_value < 1e-12) {
    out.rank_deficient = true;
    out.delta = Eigen::VectorXd::Zero(residuals.rows());
    return out;
  }
  out.pattern = svd.matrixV().col(0);
  out.delta = out.top_singular_value * svd.matrixU().col(0);
  if (out.delta.sum() < 0.0) {
    out.delta = -out.delta;
    out.pattern = -out.pattern;
  }
  return out;
}

std::vector<AffineAlignment> refit_alignments(const SpectrumSet& signals,
                                              const Eigen::VectorXd& template_values,
                                              const Eigen::VectorXd& effects,
                                              const Eigen::VectorXd& pattern) {
  require_feasible_template(template_values);
  if (template_values.size() != signals.p())
    throw DimensionMismatch("template length does not match signal length");
  const bool with_pattern = pattern.size() > 0;
  if (with_pattern && pattern.size() != signals.p())
    throw DimensionMismatch("pattern length does not match signal length");
  if (with_pattern && effects.size() != signals.n())
    throw DimensionMismatch("one effect magnitude per signal is required");

  std::vector<AffineAlignment> out;
  out.reserve(std::size_t(signals.n()));
  for (Eigen::Index i = 0; i < signals.n(); ++i) {
    Eigen::VectorXd target = template_values;
    if (with_pattern && effects[i] != 0.0) target += effects[i] * pattern;
    out.push_back(align_to_target(signals.signal_values(i), target, signals.label(i)));
  }
  return out;
}

EffectFit bcd_fit(const SpectrumSet& signals, const Eigen::VectorXd& template_values,
                  const BcdOptions& options) {
  require_feasible_template(template_values);
  if (signals.n() < 2) throw InvalidParams("effect estimation needs at least 2 signals");
  if (template_values.size() != signals.p())
    throw DimensionMismatch("template length does not match signal length");
  if (options.rel_tol < 0.0 || options.max_iter < 1)
    throw InvalidParams("invalid solver options");

  const Eigen::Index n = signals.n();
  EffectFit fit;
  fit.effects = Eigen::VectorXd::Zero(n);

  Eigen::MatrixXd residuals(n, signals.p());
  double prev_objective = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    // Per-signal alignment against x0 + delta_i * g (with delta = 0 this is
    // just the template, so no initial pattern is needed).
    fit.alignments = refit_alignments(signals, template_values, fit.effects, fit.pattern_tilde);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& a = fit.alignments[std::size_t(i)];
      residuals.row(i) =
          (a.c * signals.values().row(i)).array() + a.d - template_values.transpose().array();
    }

    const Rank1Result step = rank1_step(residuals, template_values);
    if (step.rank_deficient || step.projected_norm <= 1e-10 * step.input_norm) {
      fit.no_effect = true;
      fit.converged = true;
      fit.effects.setZero();
      fit.pattern_tilde.resize(0);
      fit.objective_trace.push_back(step.input_norm * step.input_norm);
      fit.iterations = iter;
      return fit;
    }

    fit.effects = step.delta;
    fit.pattern_tilde = step.pattern;
    const double objective = (residuals - fit.effects * fit.pattern_tilde.transpose()).squaredNorm();
    fit.objective_trace.push_back(objective);
    fit.iterations = iter;
    if (options.observer) options.observer(iter, fit.pattern_tilde, objective);

    if (std::isfinite(prev_objective) &&
        prev_objective - objective <=
            options.rel_tol * std::max(prev_objective, std::numeric_limits<double>::min())) {
      fit.converged = true;
      break;
    }
    prev_objective = objective;
  }
  return fit;
}

}  // namespace specfx
