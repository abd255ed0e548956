#include "specfx/json_io.hpp"

#include <cmath>

#include "specfx/csv.hpp"

namespace specfx {

using nlohmann::json;

json grid_to_json(const WavenumberGrid& grid) {
  return {{"start", grid.start()}, {"end", grid.end()}, {"count", grid.count()}};
}

WavenumberGrid grid_from_json(const json& j) {
  return WavenumberGrid(j.at("start").get<double>(), j.at("end").get<double>(),
                        j.at("count").get<Eigen::Index>());
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(Eigen::Index(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(std::size_t(i)).get<double>();
  return v;
}

namespace {

json alignments_to_json(const std::vector<AffineAlignment>& alignments,
                        const std::vector<std::string>& labels) {
  json a = json::array();
  for (std::size_t i = 0; i < alignments.size(); ++i)
    a.push_back({{"label", labels[i]}, {"c", alignments[i].c}, {"d", alignments[i].d}});
  return a;
}

}  // namespace

json template_to_json(const TemplateFit& fit, const SpectrumSet& signals) {
  return {{"grid", grid_to_json(signals.grid())},
          {"template", vector_to_json(fit.template_values)},
          {"alignments", alignments_to_json(fit.alignments, signals.labels())},
          {"objective", fit.objective},
          {"eigenvalue", fit.eigenvalue},
          {"eigen_gap", fit.eigen_gap},
          {"eigen_gap_warning", fit.eigen_gap_warning}};
}

TemplateArtifact template_from_json(const json& j) {
  return {grid_from_json(j.at("grid")), vector_from_json(j.at("template"))};
}

json effect_to_json(const EffectFit& fit, const SpectrumSet& signals) {
  const double max_abs = fit.effects.size() ? fit.effects.cwiseAbs().maxCoeff() : 0.0;
  json effects = json::array();
  for (Eigen::Index i = 0; i < fit.effects.size(); ++i)
    effects.push_back({{"label", signals.label(i)},
                       {"delta", fit.effects[i]},
                       {"delta_norm", max_abs > 0.0 ? fit.effects[i] / max_abs : 0.0}});
  return {{"grid", grid_to_json(signals.grid())},
          {"no_effect", fit.no_effect},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"objective_trace", fit.objective_trace},
          {"pattern_tilde", vector_to_json(fit.pattern_tilde)},
          {"effects", effects},
          {"alignments", alignments_to_json(fit.alignments, signals.labels())}};
}

EffectArtifact effect_from_json(const json& j) {
  EffectArtifact out{grid_from_json(j.at("grid")), j.at("no_effect").get<bool>(),
                     vector_from_json(j.at("pattern_tilde")), {}, {}};
  const auto& effects = j.at("effects");
  out.effects.resize(Eigen::Index(effects.size()));
  for (std::size_t i = 0; i < effects.size(); ++i) {
    out.effects[Eigen::Index(i)] = effects.at(i).at("delta").get<double>();
    out.labels.push_back(effects.at(i).at("label").get<std::string>());
  }
  return out;
}

json sparsified_to_json(const SparsifiedPattern& pattern, const WavenumberGrid& grid) {
  json candidates = json::array();
  for (const auto& c : pattern.candidates)
    candidates.push_back(
        {{"theta", c.theta}, {"phi", c.phi}, {"value", c.value}, {"cos_phi", c.cos_phi}});
  return {{"grid", grid_to_json(grid)},
          {"theta", pattern.theta},
          {"phi", pattern.phi},
          {"cos_phi", pattern.cos_phi},
          {"l1", pattern.l1_value},
          {"effective_cos_phi_floor", pattern.effective_floor},
          {"floor_relaxed", pattern.floor_relaxed},
          {"pattern", vector_to_json(pattern.pattern)},
          {"candidates", candidates}};
}

json msc_to_json(const MscFit& fit, const SpectrumSet& signals) {
  return {{"grid", grid_to_json(signals.grid())},
          {"reference", vector_to_json(fit.reference)},
          {"alignments", alignments_to_json(fit.alignments, signals.labels())}};
}

DistributionSpec distribution_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") return DistributionSpec::constant(j.at("value").get<double>());
  if (type == "uniform")
    return DistributionSpec::uniform(j.at("low").get<double>(), j.at("high").get<double>());
  if (type == "normal")
    return DistributionSpec::normal(j.at("mean").get<double>(), j.at("sd").get<double>());
  throw InvalidParams("unknown distribution type '" + type + "'");
}

json distribution_to_json(const DistributionSpec& law) {
  switch (law.kind) {
    case DistributionSpec::Kind::Constant:
      return {{"type", "constant"}, {"value", law.a}};
    case DistributionSpec::Kind::Uniform:
      return {{"type", "uniform"}, {"low", law.a}, {"high", law.b}};
    case DistributionSpec::Kind::Normal:
      return {{"type", "normal"}, {"mean", law.a}, {"sd", law.b}};
  }
  throw InvalidParams("unknown distribution kind");
}

namespace {

// Loads a single-column spectra CSV; centering is only applied to templates,
// every loaded shape is normalized to unit norm to meet the model constraints.
Spectrum load_shape_csv(const std::string& path, bool center) {
  const SpectrumSet set = read_spectra_csv(path);
  if (set.n() != 1) throw InvalidParams("'" + path + "' must contain exactly one signal column");
  Eigen::VectorXd v = set.signal_values(0);
  for (int pass = 0; pass < 2; ++pass) {
    if (center) v.array() -= v.mean();
    const double norm = v.norm();
    if (!(norm > 1e-12)) throw InvalidParams("'" + path + "' holds a zero shape");
    v /= norm;
  }
  return {set.grid(), std::move(v)};
}

}  // namespace

SimulationConfig simulation_config_from_json(const json& j) {
  // A template file defines the simulation grid; otherwise the grid key or the
  // default 650-4000 cm^-1 axis with 1798 points is used.
  WavenumberGrid grid =
      j.contains("grid") ? grid_from_json(j.at("grid")) : WavenumberGrid(650.0, 4000.0, 1798);

  Eigen::VectorXd template_values;
  if (j.contains("template_file")) {
    Spectrum tpl = load_shape_csv(j.at("template_file").get<std::string>(), /*center=*/true);
    grid = tpl.grid;
    template_values = std::move(tpl.values);
  } else {
    template_values = builtin_template(grid);
  }

  Eigen::VectorXd pattern;
  if (j.contains("pattern_file")) {
    Spectrum shape = load_shape_csv(j.at("pattern_file").get<std::string>(), /*center=*/false);
    if (!(shape.grid == grid)) throw InvalidParams("pattern file grid does not match the template grid");
    pattern = std::move(shape.values);
  } else if (!j.contains("pattern_builtin") || j.at("pattern_builtin").get<bool>()) {
    pattern = builtin_pattern(grid);
  }

  SimulationConfig config{GenerativeParams(grid)};
  config.params.template_values = std::move(template_values);
  config.params.pattern = std::move(pattern);
  if (j.contains("scale_law")) config.params.scale_law = distribution_from_json(j.at("scale_law"));
  if (j.contains("offset_law"))
    config.params.offset_law = distribution_from_json(j.at("offset_law"));
  if (j.contains("sigma") && !j.at("sigma").is_null())
    config.params.sigma = j.at("sigma").get<double>();
  else
    config.params.sigma = default_sigma(config.params.template_values);
  if (j.contains("effects"))
    config.params.effects = vector_from_json(j.at("effects"));
  else {
    config.params.effects = Eigen::VectorXd(9);
    config.params.effects << 8, 5, 3, 2, 2, 2, 2, 2, 2;
  }
  config.params.replicates = j.value("replicates", 3);
  config.pre_count = j.value("pre_count", 33);
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (config.pre_count < 1) throw InvalidParams("pre_count must be positive");
  config.params.validate();
  return config;
}

}  // namespace specfx
