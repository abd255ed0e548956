#include "specfx/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace specfx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double objective_raw(const PatternFrame& frame, double theta, double phi) {
  const double cphi = std::cos(phi), sphi = std::sin(phi);
  const double along_ones = std::cos(theta) * sphi / std::sqrt(double(frame.g_tilde.size()));
  return ((cphi * frame.g_tilde + (std::sin(theta) * sphi) * frame.template_values).array() +
          along_ones)
      .abs()
      .sum();
}

// Golden-section minimization over [lo, hi] that tracks the best point seen,
// seeded with the incumbent so a stationary start is returned unchanged.
template <class F>
std::pair<double, double> golden_min(const F& f, double lo, double hi, double x0, double f0) {
  constexpr double ratio = 0.6180339887498949;
  constexpr double xtol = 1e-9;
  double best_x = x0, best_f = f0;
  auto consider = [&](double x, double v) {
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  };
  double a = lo, b = hi;
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  double f1 = f(x1), f2 = f(x2);
  consider(x1, f1);
  consider(x2, f2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
      consider(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
      consider(x2, f2);
    }
  }
  return {best_x, best_f};
}

}  // namespace

void PatternFrame::validate() const {
  if (g_tilde.size() != template_values.size() || g_tilde.size() < 1)
    throw FrameNotOrthonormal("frame vectors must share one length");
  const double root_p = std::sqrt(double(g_tilde.size()));
  const double checks[] = {
      std::abs(g_tilde.norm() - 1.0),
      std::abs(template_values.norm() - 1.0),
      std::abs(g_tilde.dot(template_values)),
      std::abs(g_tilde.sum()) / root_p,
      std::abs(template_values.sum()) / root_p,
  };
  for (double c : checks)
    if (!(c <= 1e-8)) throw FrameNotOrthonormal("frame vectors are not orthonormal");
}

Eigen::VectorXd pattern_at(const PatternFrame& frame, double theta, double phi) {
  const double cphi = std::cos(phi), sphi = std::sin(phi);
  const double along_ones = std::cos(theta) * sphi / std::sqrt(double(frame.g_tilde.size()));
  return (cphi * frame.g_tilde + (std::sin(theta) * sphi) * frame.template_values).array() +
         along_ones;
}

double pattern_l1(double theta, double phi, const PatternFrame& frame) {
  frame.validate();
  const Eigen::VectorXd g = pattern_at(frame, theta, phi);
  if (std::abs(g.norm() - 1.0) > 1e-9)
    throw FrameNotOrthonormal("rotated pattern lost unit norm; frame is not orthonormal");
  return g.array().abs().sum();
}

Landscape scan_landscape(const PatternFrame& frame, int grid_theta, int grid_phi) {
  frame.validate();
  if (grid_theta < 16 || grid_phi < 16) throw InvalidParams("landscape grid counts must be >= 16");

  Landscape out;
  out.thetas.resize(std::size_t(grid_theta));
  for (int i = 0; i < grid_theta; ++i) out.thetas[std::size_t(i)] = kTwoPi * i / grid_theta;
  out.phis.resize(std::size_t(grid_phi));
  for (int j = 0; j < grid_phi; ++j)
    out.phis[std::size_t(j)] = std::numbers::pi * j / (grid_phi - 1);

  out.values.resize(grid_phi, grid_theta);
  for (int j = 0; j < grid_phi; ++j)
    for (int i = 0; i < grid_theta; ++i)
      out.values(j, i) = objective_raw(frame, out.thetas[std::size_t(i)], out.phis[std::size_t(j)]);

  // Local minima: <= all 8 neighbors, theta wrapping, phi clamped.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> is_min(grid_phi, grid_theta);
  for (int j = 0; j < grid_phi; ++j) {
    for (int i = 0; i < grid_theta; ++i) {
      bool ok = true;
      for (int dj = -1; dj <= 1 && ok; ++dj) {
        const int jj = j + dj;
        if (jj < 0 || jj >= grid_phi) continue;
        for (int di = -1; di <= 1; ++di) {
          if (dj == 0 && di == 0) continue;
          const int ii = (i + di + grid_theta) % grid_theta;
          if (out.values(j, i) > out.values(jj, ii)) {
            ok = false;
            break;
          }
        }
      }
      is_min(j, i) = ok;
    }
  }

  // Adjacent minima are plateau cells with equal value; collapse each connected
  // component to the member nearest its centroid (circular mean on theta).
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(grid_phi, grid_theta, false);
  for (int j0 = 0; j0 < grid_phi; ++j0) {
    for (int i0 = 0; i0 < grid_theta; ++i0) {
      if (!is_min(j0, i0) || seen(j0, i0)) continue;
      std::vector<std::pair<int, int>> component{{j0, i0}};
      seen(j0, i0) = true;
      for (std::size_t k = 0; k < component.size(); ++k) {
        const auto [j, i] = component[k];
        for (int dj = -1; dj <= 1; ++dj) {
          const int jj = j + dj;
          if (jj < 0 || jj >= grid_phi) continue;
          for (int di = -1; di <= 1; ++di) {
            const int ii = (i + di + grid_theta) % grid_theta;
            if (!seen(jj, ii) && is_min(jj, ii)) {
              seen(jj, ii) = true;
              component.push_back({jj, ii});
            }
          }
        }
      }

      double phi_mean = 0.0, cos_mean = 0.0, sin_mean = 0.0;
      for (const auto& [j, i] : component) {
        phi_mean += j;
        cos_mean += std::cos(kTwoPi * i / grid_theta);
        sin_mean += std::sin(kTwoPi * i / grid_theta);
      }
      phi_mean /= double(component.size());
      double theta_mean_idx = 0.0;
      if (std::hypot(cos_mean, sin_mean) > 1e-12) {
        theta_mean_idx = std::atan2(sin_mean, cos_mean) / kTwoPi * grid_theta;
        if (theta_mean_idx < 0.0) theta_mean_idx += grid_theta;
      }
      std::pair<int, int> rep = component.front();
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [j, i] : component) {
        double dth = std::abs(i - theta_mean_idx);
        dth = std::min(dth, grid_theta - dth);
        const double dist = std::hypot(j - phi_mean, dth);
        if (dist < best - 1e-12 ||
            (dist < best + 1e-12 && std::pair(j, i) < rep)) {
          best = dist;
          rep = {j, i};
        }
      }
      out.minima.push_back({rep.second, rep.first, out.thetas[std::size_t(rep.second)],
                            out.phis[std::size_t(rep.first)], out.values(rep.first, rep.second),
                            std::cos(out.phis[std::size_t(rep.first)])});
    }
  }
  std::sort(out.minima.begin(), out.minima.end(), [](const auto& a, const auto& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.phi_index != b.phi_index) return a.phi_index < b.phi_index;
    return a.theta_index < b.theta_index;
  });
  return out;
}

SparsifiedPattern select_and_polish(const std::vector<LandscapeMinimum>& candidates,
                                    const PatternFrame& frame, double cos_phi_floor) {
  frame.validate();
  if (candidates.empty()) throw EmptyCandidates("no landscape minima to select from");
  if (!(cos_phi_floor >= 0.0 && cos_phi_floor <= 1.0))
    throw InvalidParams("cos-phi floor must lie in [0, 1]");

  SparsifiedPattern out;
  out.candidates = candidates;
  out.effective_floor = cos_phi_floor;
  const LandscapeMinimum* chosen = nullptr;
  while (true) {
    for (const auto& c : candidates) {
      if (std::abs(c.cos_phi) < out.effective_floor) continue;
      if (!chosen || c.value < chosen->value) chosen = &c;
    }
    if (chosen) break;
    out.floor_relaxed = true;
    out.effective_floor = out.effective_floor < 1e-6 ? 0.0 : out.effective_floor / 2.0;
  }

  // Half-degree search window, re-centered every round, so the crawl can cross
  // several windows on coarse scan grids while still descending monotonically.
  const double step_theta = kTwoPi / 720.0, step_phi = std::numbers::pi / 359.0;
  double theta = chosen->theta, phi = chosen->phi;
  double value = pattern_l1(theta, phi, frame);
  for (int round = 0; round < 200; ++round) {
    const auto [theta_next, value_theta] =
        golden_min([&](double t) { return objective_raw(frame, t, phi); }, theta - step_theta,
                   theta + step_theta, theta, value);
    const auto [phi_next, value_phi] = golden_min(
        [&](double q) { return objective_raw(frame, theta_next, q); },
        std::max(0.0, phi - step_phi), std::min(std::numbers::pi, phi + step_phi), phi,
        value_theta);
    const double moved = std::max(std::abs(theta_next - theta), std::abs(phi_next - phi));
    theta = theta_next;
    phi = phi_next;
    value = value_phi;
    if (moved < 1e-8) break;
  }

  if (theta < 0.0) theta += kTwoPi;
  if (theta > kTwoPi) theta -= kTwoPi;
  out.theta = theta;
  out.phi = phi;
  out.pattern = pattern_at(frame, theta, phi);
  out.l1_value = out.pattern.array().abs().sum();
  out.cos_phi = std::cos(phi);
  return out;
}

}  // namespace specfx
