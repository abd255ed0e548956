#include "specfx/spectrum.hpp"

#include <cmath>

namespace specfx {

WavenumberGrid::WavenumberGrid(double start, double end, Eigen::Index count)
    : start_(start), end_(end), count_(count) {
  if (count < 3) throw InvalidParams("wavenumber grid needs at least 3 points");
  if (!(end > start)) throw InvalidParams("wavenumber grid end must exceed start");
  if (!std::isfinite(start) || !std::isfinite(end))
    throw InvalidParams("wavenumber grid bounds must be finite");
}

Eigen::VectorXd WavenumberGrid::points() const {
  Eigen::VectorXd w(count_);
  for (Eigen::Index j = 0; j < count_; ++j) w[j] = point(j);
  return w;
}

Spectrum::Spectrum(WavenumberGrid grid_, Eigen::VectorXd values_, std::string label_)
    : grid(grid_), values(std::move(values_)), label(std::move(label_)) {
  if (values.size() != grid.count())
    throw DimensionMismatch("spectrum has " + std::to_string(values.size()) +
                            " values for a grid of " + std::to_string(grid.count()) + " points");
}

SpectrumSet::SpectrumSet(WavenumberGrid grid, Eigen::MatrixXd values,
                         std::vector<std::string> labels)
    : grid_(grid), values_(std::move(values)), labels_(std::move(labels)) {
  if (values_.rows() < 1) throw InvalidParams("spectrum set needs at least one signal");
  if (values_.cols() != grid_.count())
    throw DimensionMismatch("signal length " + std::to_string(values_.cols()) +
                            " does not match grid count " + std::to_string(grid_.count()));
  if (Eigen::Index(labels_.size()) != values_.rows())
    throw DimensionMismatch("label count does not match signal count");
}

SpectrumSet SpectrumSet::from_spectra(const std::vector<Spectrum>& spectra) {
  if (spectra.empty()) throw InvalidParams("spectrum set needs at least one signal");
  const WavenumberGrid& grid = spectra.front().grid;
  Eigen::MatrixXd values(Eigen::Index(spectra.size()), grid.count());
  std::vector<std::string> labels;
  labels.reserve(spectra.size());
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    if (!(spectra[i].grid == grid))
      throw DimensionMismatch("signal '" + spectra[i].label + "' is on a different grid");
    values.row(Eigen::Index(i)) = spectra[i].values.transpose();
    labels.push_back(spectra[i].label);
  }
  return SpectrumSet(grid, std::move(values), std::move(labels));
}

bool is_constant_signal(const Eigen::VectorXd& values) {
  const double mean = values.mean();
  const double sd = std::sqrt((values.array() - mean).square().sum() / double(values.size()));
  return !(sd > 1e-12 * (1.0 + std::abs(mean)));
}

SetDiagnostics validate_set(const SpectrumSet& set) {
  SetDiagnostics diag;
  diag.n = set.n();
  diag.p = set.p();
  for (Eigen::Index i = 0; i < set.n(); ++i) {
    bool finite = true;
    for (Eigen::Index j = 0; j < set.p(); ++j) {
      if (!std::isfinite(set.values()(i, j))) {
        diag.issues.push_back({SetIssue::Kind::NonFinite, i, j});
        finite = false;
        break;
      }
    }
    if (finite && is_constant_signal(set.signal_values(i)))
      diag.issues.push_back({SetIssue::Kind::ConstantSignal, i, -1});
  }
  return diag;
}

}  // namespace specfx
