#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specfx/effect_estimation.hpp"
#include "specfx/generator.hpp"
#include "specfx/msc.hpp"
#include "specfx/sparsify.hpp"
#include "specfx/spectrum.hpp"
#include "specfx/template_estimation.hpp"

namespace specfx {

nlohmann::json grid_to_json(const WavenumberGrid& grid);
WavenumberGrid grid_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

nlohmann::json template_to_json(const TemplateFit& fit, const SpectrumSet& signals);
nlohmann::json effect_to_json(const EffectFit& fit, const SpectrumSet& signals);
nlohmann::json sparsified_to_json(const SparsifiedPattern& pattern, const WavenumberGrid& grid);
nlohmann::json msc_to_json(const MscFit& fit, const SpectrumSet& signals);

struct TemplateArtifact {
  WavenumberGrid grid;
  Eigen::VectorXd template_values;
};
TemplateArtifact template_from_json(const nlohmann::json& j);

struct EffectArtifact {
  WavenumberGrid grid;
  bool no_effect = false;
  Eigen::VectorXd pattern_tilde;
  Eigen::VectorXd effects;
  std::vector<std::string> labels;
};
EffectArtifact effect_from_json(const nlohmann::json& j);

/// Generator configuration parsed from the JSON document described in the
/// README (template_file | template_builtin, scale_law, offset_law, sigma,
/// pattern_file | pattern_builtin, effects, replicates, seed, plus grid and
/// pre_count). Absent keys fall back to the built-in simulation defaults.
struct SimulationConfig {
  explicit SimulationConfig(GenerativeParams p) : params(std::move(p)) {}

  GenerativeParams params;
  int pre_count = 33;
  std::optional<std::uint64_t> seed;
};
SimulationConfig simulation_config_from_json(const nlohmann::json& j);

DistributionSpec distribution_from_json(const nlohmann::json& j);
nlohmann::json distribution_to_json(const DistributionSpec& law);

}  // namespace specfx
