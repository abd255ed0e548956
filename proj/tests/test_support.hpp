#pragma once

// Shared helpers for the test suites: deterministic RNG utilities, statistics,
// and the independent oracles the solver tests compare against. Every oracle
// here deliberately re-derives its answer through a different arithmetic path
// than the library (dense projectors, explicit grid scans, generic LS solves).

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "specfx/spectrum.hpp"

namespace testsup {

inline double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

inline double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::ArrayXd xc = x.array() - x.mean();
  const Eigen::ArrayXd yc = y.array() - y.mean();
  return (xc * yc).sum() / std::sqrt(xc.square().sum() * yc.square().sum());
}

inline Eigen::VectorXd randn(Eigen::Index p, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(p);
  for (Eigen::Index i = 0; i < p; ++i) v[i] = nd(rng);
  return v;
}

/// Random unit vector orthogonal to 1.
inline Eigen::VectorXd random_centered_unit(Eigen::Index p, std::mt19937_64& rng) {
  Eigen::VectorXd v = randn(p, rng);
  v.array() -= v.mean();
  return v / v.norm();
}

/// Random unit vector orthogonal to both 1 and x0.
inline Eigen::VectorXd random_feasible_pattern(const Eigen::VectorXd& x0, std::mt19937_64& rng) {
  Eigen::VectorXd v = randn(x0.size(), rng);
  for (int pass = 0; pass < 2; ++pass) {
    v.array() -= v.mean();
    v -= v.dot(x0) / x0.squaredNorm() * x0;
    v /= v.norm();
  }
  return v;
}

/// Dense projector onto span{1, x0} built the long way (normal equations).
inline Eigen::MatrixXd span_projector(const Eigen::VectorXd& x0) {
  Eigen::MatrixXd basis(x0.size(), 2);
  basis.col(0).setOnes();
  basis.col(1) = x0;
  return basis * (basis.transpose() * basis).inverse() * basis.transpose();
}

// ---------------------------------------------------------------------------
// Oracle 1: 2-D grid search for the affine alignment, step 1e-3 over
// [-5,5]^2, refined by alternating coordinate bisection.

struct AlignOracle {
  double c = 0.0;
  double d = 0.0;
  double objective = std::numeric_limits<double>::infinity();
};

inline AlignOracle align_grid_oracle(const Eigen::VectorXd& x, const Eigen::VectorXd& target) {
  const double p = double(x.size());
  const double sxx = x.squaredNorm(), sx = x.sum();
  const double sxt = x.dot(target), st = target.sum(), stt = target.squaredNorm();
  const auto f = [&](double c, double d) {
    return c * c * sxx + 2.0 * c * d * sx + d * d * p - 2.0 * c * sxt - 2.0 * d * st + stt;
  };

  AlignOracle best;
  const double step = 1e-3;
  for (double c = -5.0; c <= 5.0 + step / 2; c += step) {
    for (double d = -5.0; d <= 5.0 + step / 2; d += step) {
      const double value = f(c, d);
      if (value < best.objective) best = {c, d, value};
    }
  }
  // Coordinate bisection inside the best cell.
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (int axis = 0; axis < 2; ++axis) {
      double lo = (axis == 0 ? best.c : best.d) - step;
      double hi = (axis == 0 ? best.c : best.d) + step;
      for (int it = 0; it < 80; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        const double f1 = axis == 0 ? f(m1, best.d) : f(best.c, m1);
        const double f2 = axis == 0 ? f(m2, best.d) : f(best.c, m2);
        if (f1 < f2)
          hi = m2;
        else
          lo = m1;
      }
      const double mid = (lo + hi) / 2.0;
      if (axis == 0)
        best.c = mid;
      else
        best.d = mid;
      best.objective = f(best.c, best.d);
    }
  }
  return best;
}

/// Direct, unoptimized evaluation of ||c*x + d*1 - t||^2 for oracle self-checks.
inline double naive_affine_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& t, double c,
                                    double d) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double r = c * x[j] + d - t[j];
    sum += r * r;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Oracle 2: exhaustive two-angle scan of the template objective on the
// feasible sphere for p = 4 (the centered subspace is 3-dimensional, so the
// feasible set is exactly a 2-sphere). Resolution 1e-3 rad.

inline double template_angular_oracle(const Eigen::MatrixXd& signals) {
  const Eigen::Index n = signals.rows(), p = signals.cols();
  if (p != 4) throw std::logic_error("angular oracle is built for p = 4");

  // Orthonormal basis of {v : 1'v = 0} from a QR factorization of [1 | I].
  Eigen::MatrixXd pre(p, p);
  pre.col(0).setOnes();
  pre.rightCols(p - 1).setIdentity();
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(pre).householderQ();
  const Eigen::MatrixXd basis = q.rightCols(3);  // p x 3

  // Per-signal sufficient statistics: residual_i = 1 - p*(x_i'v)^2 / det_i.
  Eigen::MatrixXd projected(n, 3);
  Eigen::VectorXd weight(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = signals.row(i).transpose();
    const double det = double(p) * x.squaredNorm() - x.sum() * x.sum();
    weight[i] = double(p) / det;
    projected.row(i) = (basis.transpose() * x).transpose();
  }

  double best = std::numeric_limits<double>::infinity();
  const double step = 1e-3;
  Eigen::Vector3d s;
  for (double phi = 0.0; phi <= std::numbers::pi + step / 2; phi += step) {
    const double sphi = std::sin(phi), cphi = std::cos(phi);
    for (double theta = 0.0; theta < 2.0 * std::numbers::pi; theta += step) {
      s << sphi * std::cos(theta), sphi * std::sin(theta), cphi;
      const double captured = (projected * s).array().square().matrix().dot(weight);
      best = std::min(best, double(n) - captured);
    }
  }
  return best;
}

/// Same objective at one feasible vector, via per-signal 2x2 solves with a
/// generic LU factorization (for cross-checking the fast form above).
inline double template_objective_naive(const Eigen::MatrixXd& signals, const Eigen::VectorXd& v) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < signals.rows(); ++i) {
    const Eigen::VectorXd x = signals.row(i).transpose();
    Eigen::Matrix2d normal;
    normal << x.squaredNorm(), x.sum(), x.sum(), double(x.size());
    Eigen::Vector2d rhs(x.dot(v), v.sum());
    const Eigen::Vector2d cd = normal.fullPivLu().solve(rhs);
    total += (cd[0] * x + Eigen::VectorXd::Constant(x.size(), cd[1]) - v).squaredNorm();
  }
  return total;
}

// ---------------------------------------------------------------------------
// Oracle 3: constrained rank-1 fit by alternating least squares from random
// restarts, with the span projector formed densely.

inline double rank1_als_oracle(const Eigen::MatrixXd& m, const Eigen::VectorXd& x0, int restarts,
                               std::mt19937_64& rng) {
  const Eigen::MatrixXd h = span_projector(x0);
  const Eigen::MatrixXd r = m - m * h;  // rows projected off span{1, x0}
  double best = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < restarts; ++restart) {
    Eigen::VectorXd g = randn(x0.size(), rng);
    g -= h * g;
    if (g.norm() < 1e-12) continue;
    g /= g.norm();
    for (int iter = 0; iter < 500; ++iter) {
      const Eigen::VectorXd delta = r * g;
      Eigen::VectorXd next = r.transpose() * delta;
      next -= h * next;
      if (next.norm() < 1e-300) break;
      next /= next.norm();
      const double move = std::min((next - g).norm(), (next + g).norm());
      g = next;
      if (move < 1e-14) break;
    }
    const Eigen::VectorXd delta = r * g;
    best = std::min(best, (r - delta * g.transpose()).squaredNorm());
  }
  return best;
}

// ---------------------------------------------------------------------------
// Oracle 4: independent block-alternating solver for the full effect fit,
// restarted from random (delta, g) pairs; uses generic QR solves per signal
// and a JacobiSVD on the densely projected residual.

inline double effect_multistart_oracle(const specfx::SpectrumSet& set, const Eigen::VectorXd& x0,
                                       int restarts, std::mt19937_64& rng) {
  const Eigen::Index n = set.n(), p = set.p();
  const Eigen::MatrixXd h = span_projector(x0);
  double best = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < restarts; ++restart) {
    Eigen::VectorXd delta = randn(n, rng);
    Eigen::VectorXd g = randn(p, rng);
    g -= h * g;
    g /= g.norm();
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 500; ++iter) {
      Eigen::MatrixXd residuals(n, p);
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::MatrixXd design(p, 2);
        design.col(0) = set.signal_values(i);
        design.col(1).setOnes();
        const Eigen::VectorXd target = x0 + delta[i] * g;
        const Eigen::Vector2d cd = design.colPivHouseholderQr().solve(target);
        residuals.row(i) = (cd[0] * design.col(0) + Eigen::VectorXd::Constant(p, cd[1]) - x0)
                               .transpose();
      }
      const Eigen::MatrixXd projected = residuals - residuals * h;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(projected,
                                            Eigen::ComputeThinU | Eigen::ComputeThinV);
      delta = svd.singularValues()[0] * svd.matrixU().col(0);
      g = svd.matrixV().col(0);
      const double objective = (residuals - delta * g.transpose()).squaredNorm();
      if (std::isfinite(prev) && prev - objective <= 1e-13 * std::max(prev, 1e-300)) {
        prev = objective;
        break;
      }
      prev = objective;
    }
    best = std::min(best, prev);
  }
  return best;
}

/// L1 norm summed the pedestrian way (independent of Eigen reductions).
inline double l1_naive(const Eigen::VectorXd& v) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += std::fabs(v[i]);
  return sum;
}

// ---------------------------------------------------------------------------
// Process helpers for the CLI-facing tests.

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline CommandResult run_command(const std::string& command, const std::string& scratch) {
  const std::string out_file = scratch + "/cmd_stdout.txt";
  const std::string err_file = scratch + "/cmd_stderr.txt";
  const std::string full = command + " > " + out_file + " 2> " + err_file;
  const int status = std::system(full.c_str());
  CommandResult result;
  result.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

}  // namespace testsup
