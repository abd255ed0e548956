#include "specfx/template_estimation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace specfx {

QuadraticForm::QuadraticForm(const SpectrumSet& signals) : basis_(signals.n(), signals.p()) {
  for (Eigen::Index i = 0; i < signals.n(); ++i) {
    Eigen::VectorXd row = signals.signal_values(i);
    if (is_constant_signal(row))
      throw DegenerateSignal(signals.label(i),
                             "signal '" + signals.label(i) + "' is constant and cannot be aligned");
    row.array() -= row.mean();
    basis_.row(i) = row.transpose() / row.norm();
  }
}

Eigen::VectorXd QuadraticForm::apply(const Eigen::VectorXd& v) const {
  if (v.size() != p()) throw DimensionMismatch("quadratic form applied to wrong-sized vector");
  Eigen::VectorXd out = double(n()) * v;
  out.noalias() -= basis_.transpose() * (basis_ * v);
  out.array() -= double(n()) / double(p()) * v.sum();
  return out;
}

double QuadraticForm::quad(const Eigen::VectorXd& v) const {
  if (v.size() != p()) throw DimensionMismatch("quadratic form applied to wrong-sized vector");
  const double s = v.sum();
  return double(n()) * v.squaredNorm() - (basis_ * v).squaredNorm() -
         double(n()) / double(p()) * s * s;
}

QuadraticForm build_quadratic_form(const SpectrumSet& signals) { return QuadraticForm(signals); }

TemplateFit estimate_template(const SpectrumSet& signals) {
  if (signals.n() < 2) throw InvalidParams("template estimation needs at least 2 signals");
  if (signals.p() < 3) throw InvalidParams("template estimation needs at least 3 grid points");

  const QuadraticForm form(signals);
  const Eigen::MatrixXd& basis = form.row_basis();
  const Eigen::Index n = signals.n();

  // Leading right singular vector of U via the n x n Gram matrix (n << p).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(basis * basis.transpose());
  if (solver.info() != Eigen::Success) throw Error("eigen decomposition failed");
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  Eigen::VectorXd tpl = basis.transpose() * solver.eigenvectors().col(n - 1);
  tpl /= tpl.norm();
  // Rows of U are zero-mean, so tpl already is; one centering pass removes the
  // accumulated rounding in the sum.
  tpl.array() -= tpl.mean();
  tpl /= tpl.norm();

  TemplateFit fit;
  fit.eigenvalue = std::max(0.0, double(n) - evals[n - 1]);
  fit.objective = fit.eigenvalue;
  fit.eigen_gap = evals[n - 1] - evals[n - 2];
  fit.eigen_gap_warning = fit.eigen_gap < 1e-10;

  fit.alignments.reserve(std::size_t(n));
  double c_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    fit.alignments.push_back(align_to_target(signals.signal_values(i), tpl, signals.label(i)));
    c_sum += fit.alignments.back().c;
  }
  if (c_sum < 0.0) {
    tpl = -tpl;
    for (auto& a : fit.alignments) {
      a.c = -a.c;
      a.d = -a.d;
    }
  }
  fit.template_values = std::move(tpl);
  return fit;
}

SpectrumSet aligned_signals(const TemplateFit& fit, const SpectrumSet& signals) {
  if (Eigen::Index(fit.alignments.size()) != signals.n())
    throw DimensionMismatch("fit was computed for a different number of signals");
  if (fit.template_values.size() != signals.p())
    throw DimensionMismatch("fit was computed for a different grid");
  Eigen::MatrixXd out(signals.n(), signals.p());
  for (Eigen::Index i = 0; i < signals.n(); ++i) {
    const auto& a = fit.alignments[std::size_t(i)];
    out.row(i) = (a.c * signals.values().row(i)).array() + a.d;
  }
  return SpectrumSet(signals.grid(), std::move(out), signals.labels());
}

}  // namespace specfx
