#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "specfx/errors.hpp"

namespace specfx {

/// Equidistant wavenumber axis: point(j) = start + j*(end-start)/(count-1).
class WavenumberGrid {
 public:
  WavenumberGrid(double start, double end, Eigen::Index count);

  double start() const { return start_; }
  double end() const { return end_; }
  Eigen::Index count() const { return count_; }
  double spacing() const { return (end_ - start_) / double(count_ - 1); }
  double point(Eigen::Index j) const { return start_ + double(j) * spacing(); }
  Eigen::VectorXd points() const;

  friend bool operator==(const WavenumberGrid& a, const WavenumberGrid& b) {
    return a.start_ == b.start_ && a.end_ == b.end_ && a.count_ == b.count_;
  }

 private:
  double start_;
  double end_;
  Eigen::Index count_;
};

/// One measured signal on a wavenumber grid.
struct Spectrum {
  Spectrum(WavenumberGrid grid_, Eigen::VectorXd values_, std::string label_ = {});

  WavenumberGrid grid;
  Eigen::VectorXd values;
  std::string label;
};

/// A stack of n spectra sharing one grid, stored as the rows of an n x p matrix.
class SpectrumSet {
 public:
  SpectrumSet(WavenumberGrid grid, Eigen::MatrixXd values, std::vector<std::string> labels);
  static SpectrumSet from_spectra(const std::vector<Spectrum>& spectra);

  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index p() const { return values_.cols(); }
  const WavenumberGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Eigen::Index i) const { return labels_[std::size_t(i)]; }
  Eigen::VectorXd signal_values(Eigen::Index i) const { return values_.row(i).transpose(); }
  Spectrum spectrum(Eigen::Index i) const { return {grid_, signal_values(i), label(i)}; }

 private:
  WavenumberGrid grid_;
  Eigen::MatrixXd values_;  // n x p, one signal per row
  std::vector<std::string> labels_;
};

struct SetIssue {
  enum class Kind { NonFinite, ConstantSignal };
  Kind kind;
  Eigen::Index signal;
  Eigen::Index coord;  // first offending coordinate for NonFinite, -1 otherwise
};

struct SetDiagnostics {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  std::vector<SetIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// Report-only health check: per-signal finiteness plus constant (zero-variance)
/// signals, which break affine alignment.
SetDiagnostics validate_set(const SpectrumSet& set);

/// True when the signal has (numerically) zero sample variance.
bool is_constant_signal(const Eigen::VectorXd& values);

}  // namespace specfx
