// specfx: estimate a template spectrum from replicate signals and decompose
// treatment effects into a shared modification pattern and per-signal
// magnitudes. Subcommands: simulate | template | effect | sparsify | msc |
// pipeline. Artifacts land in --out; stdout prints the run report path only.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specfx/csv.hpp"
#include "specfx/effect_estimation.hpp"
#include "specfx/generator.hpp"
#include "specfx/json_io.hpp"
#include "specfx/msc.hpp"
#include "specfx/sparsify.hpp"
#include "specfx/template_estimation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace specfx;

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitDegenerate = 4;
constexpr int kExitNoCandidates = 5;
constexpr int kExitRefuseOverwrite = 6;

struct Options {
  std::string config_path;
  std::string pre_path;
  std::string post_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> exclude_labels;
  bool force = false;
  bool with_msc = false;
  double tol = 1e-10;
  int max_iter = 500;
  int grid_theta = 720;
  int grid_phi = 360;
  double cos_phi_floor = 0.5;
  json config = json::object();

  std::string template_json_path;  // defaults to <out>/template.json
  std::string effect_json_path;    // defaults to <out>/effect.json
};

struct RunReport {
  std::string command;
  json inputs = json::array();
  json artifacts = json::array();
  json timings = json::object();
  std::vector<std::string> warnings;

  void add_input(const std::string& path) {
    inputs.push_back({{"path", path}, {"digest", "fnv1a64:" + fnv1a64_file(path)}});
  }
  void add_artifact(const std::string& path, const std::string& role) {
    artifacts.push_back({{"path", path}, {"role", role}});
  }
};

class StageTimer {
 public:
  StageTimer(RunReport& report, std::string stage)
      : report_(report), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    report_.timings[stage_] =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
  }

 private:
  RunReport& report_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

std::string out_path(const Options& opt, const std::string& name) {
  return (fs::path(opt.out_dir) / name).string();
}

void load_config(Options& opt) {
  if (opt.config_path.empty()) return;
  std::ifstream in(opt.config_path);
  if (!in) throw IoError("cannot open config '" + opt.config_path + "'");
  opt.config = json::parse(in);  // json::exception maps to exit 2
}

// Config values apply only where the command line left the default.
void merge_config(Options& opt, const CLI::App* cmd) {
  const json& c = opt.config;
  auto given = [&](const std::string& flag) {
    return cmd->count(flag) > 0;
  };
  if (!given("--tol") && c.contains("tol")) opt.tol = c.at("tol").get<double>();
  if (!given("--max-iter") && c.contains("max_iter")) opt.max_iter = c.at("max_iter").get<int>();
  if (!given("--grid-theta") && c.contains("grid_theta"))
    opt.grid_theta = c.at("grid_theta").get<int>();
  if (!given("--grid-phi") && c.contains("grid_phi")) opt.grid_phi = c.at("grid_phi").get<int>();
  if (!given("--cos-phi-floor") && c.contains("cos_phi_floor"))
    opt.cos_phi_floor = c.at("cos_phi_floor").get<double>();
  if (!given("--exclude-labels") && c.contains("exclude_labels"))
    opt.exclude_labels = c.at("exclude_labels").get<std::vector<std::string>>();
  if (!opt.seed && c.contains("seed")) opt.seed = c.at("seed").get<std::uint64_t>();
  if (c.contains("with_msc")) opt.with_msc = opt.with_msc || c.at("with_msc").get<bool>();
  opt.template_json_path = c.value("template_json", out_path(opt, "template.json"));
  opt.effect_json_path = c.value("effect_json", out_path(opt, "effect.json"));
  if (!(opt.tol > 0.0)) throw InvalidParams("--tol must be positive");
  if (opt.max_iter < 1) throw InvalidParams("--max-iter must be positive");
  if (!(opt.cos_phi_floor >= 0.0 && opt.cos_phi_floor <= 1.0))
    throw InvalidParams("--cos-phi-floor must lie in [0, 1]");
}

void require_inputs_exist(const std::vector<std::string>& paths) {
  for (const auto& path : paths)
    if (!fs::exists(path)) throw ParseError(0, "input '" + path + "' does not exist");
}

int check_overwrite(const Options& opt, const std::vector<std::string>& artifact_names) {
  for (const auto& name : artifact_names) {
    const std::string path = out_path(opt, name);
    if (fs::exists(path)) {
      if (!opt.force) {
        std::cerr << "refusing to overwrite '" << path << "' (pass --force)\n";
        return kExitRefuseOverwrite;
      }
    }
  }
  return 0;
}

void ensure_out_dir(const Options& opt) {
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec || !fs::is_directory(opt.out_dir))
    throw IoError("cannot create output directory '" + opt.out_dir + "'");
}

void write_json_artifact(const std::string& path, json j, const RunReport& report) {
  j["inputs"] = report.inputs;  // stale-mix detection: artifacts name their inputs
  write_text_atomic(path, j.dump(2) + "\n");
}

int finish(const Options& opt, RunReport& report) {
  const std::string path = out_path(opt, "run_report.json");
  report.add_artifact(path, "report");
  json j{{"command", report.command},
         {"inputs", report.inputs},
         {"artifacts", report.artifacts},
         {"timings_ms", report.timings},
         {"warnings", report.warnings}};
  write_text_atomic(path, j.dump(2) + "\n");
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << path << "\n";
  return 0;
}

SpectrumSet load_signals(const std::string& path, const Options& opt, RunReport& report,
                         bool flag_constant_as_degenerate = true) {
  report.add_input(path);
  SpectrumSet set = read_spectra_csv(path, opt.exclude_labels);
  const SetDiagnostics diag = validate_set(set);
  for (const auto& issue : diag.issues) {
    if (issue.kind == SetIssue::Kind::NonFinite)
      throw ParseError(0, "signal '" + set.label(issue.signal) +
                              "' has a non-finite value at coordinate " +
                              std::to_string(issue.coord));
    if (issue.kind == SetIssue::Kind::ConstantSignal && flag_constant_as_degenerate)
      throw DegenerateSignal(set.label(issue.signal),
                             "signal '" + set.label(issue.signal) + "' is constant");
  }
  return set;
}

// ---------------------------------------------------------------------------
// Stages (shared between the single commands and the pipeline command)

TemplateFit stage_template(const Options& opt, RunReport& report, const SpectrumSet& pre) {
  StageTimer timer(report, "template");
  TemplateFit fit = estimate_template(pre);
  if (fit.eigen_gap_warning)
    report.warnings.push_back("template eigen gap below 1e-10; template direction is not unique");
  write_json_artifact(out_path(opt, "template.json"), template_to_json(fit, pre), report);
  report.add_artifact(out_path(opt, "template.json"), "template");
  write_spectra_csv(out_path(opt, "aligned.csv"), aligned_signals(fit, pre));
  report.add_artifact(out_path(opt, "aligned.csv"), "aligned-signals");
  return fit;
}

EffectFit stage_effect(const Options& opt, RunReport& report, const SpectrumSet& post,
                       const Eigen::VectorXd& template_values) {
  StageTimer timer(report, "effect");
  BcdOptions bcd;
  bcd.rel_tol = opt.tol;
  bcd.max_iter = opt.max_iter;
  EffectFit fit = bcd_fit(post, template_values, bcd);
  if (fit.no_effect)
    report.warnings.push_back("projected residual is numerically zero: no treatment effect");
  else if (!fit.converged)
    report.warnings.push_back("effect fit hit max-iter before reaching the tolerance");
  write_json_artifact(out_path(opt, "effect.json"), effect_to_json(fit, post), report);
  report.add_artifact(out_path(opt, "effect.json"), "effect");

  // Per-signal magnitudes plus the per-label (coupon) mean, in input order.
  const double max_abs = fit.effects.size() ? fit.effects.cwiseAbs().maxCoeff() : 0.0;
  std::map<std::string, std::pair<double, int>> by_label;
  for (Eigen::Index i = 0; i < post.n(); ++i) {
    auto& acc = by_label[post.label(i)];
    acc.first += fit.effects[i];
    acc.second += 1;
  }
  std::string csv = "label,delta,delta_norm,label_mean\n";
  for (Eigen::Index i = 0; i < post.n(); ++i) {
    const auto& acc = by_label[post.label(i)];
    csv += post.label(i) + ',' + format_double(fit.effects[i]) + ',' +
           format_double(max_abs > 0.0 ? fit.effects[i] / max_abs : 0.0) + ',' +
           format_double(acc.first / acc.second) + '\n';
  }
  write_text_atomic(out_path(opt, "delta.csv"), csv);
  report.add_artifact(out_path(opt, "delta.csv"), "effects-table");
  return fit;
}

void stage_sparsify(const Options& opt, RunReport& report, const PatternFrame& frame,
                    const WavenumberGrid& grid) {
  StageTimer timer(report, "sparsify");
  const Landscape landscape = scan_landscape(frame, opt.grid_theta, opt.grid_phi);
  const SparsifiedPattern result =
      select_and_polish(landscape.minima, frame, opt.cos_phi_floor);
  if (result.floor_relaxed)
    report.warnings.push_back("no landscape minimum met the cos-phi floor; floor relaxed to " +
                              format_double(result.effective_floor));

  write_json_artifact(out_path(opt, "pattern.json"), sparsified_to_json(result, grid), report);
  report.add_artifact(out_path(opt, "pattern.json"), "pattern");

  write_spectra_csv(out_path(opt, "pattern.csv"),
                    SpectrumSet(grid, result.pattern.transpose(), {"g"}));
  report.add_artifact(out_path(opt, "pattern.csv"), "pattern-curve");

  std::string csv = "theta,phi,G\n";
  csv.reserve(landscape.thetas.size() * landscape.phis.size() * 24);
  for (std::size_t j = 0; j < landscape.phis.size(); ++j)
    for (std::size_t i = 0; i < landscape.thetas.size(); ++i)
      csv += format_double(landscape.thetas[i]) + ',' + format_double(landscape.phis[j]) + ',' +
             format_double(landscape.values(Eigen::Index(j), Eigen::Index(i))) + '\n';
  write_text_atomic(out_path(opt, "landscape.csv"), csv);
  report.add_artifact(out_path(opt, "landscape.csv"), "landscape");
}

void stage_msc(const Options& opt, RunReport& report, const SpectrumSet& signals) {
  StageTimer timer(report, "msc");
  const MscFit fit = msc_correct(signals);
  write_json_artifact(out_path(opt, "msc.json"), msc_to_json(fit, signals), report);
  report.add_artifact(out_path(opt, "msc.json"), "msc");
  write_spectra_csv(out_path(opt, "corrected.csv"), fit.corrected);
  report.add_artifact(out_path(opt, "corrected.csv"), "msc-corrected");
}

// ---------------------------------------------------------------------------
// Commands

int cmd_simulate(Options& opt) {
  if (!opt.seed) {
    std::cerr << "simulate needs --seed (or a seed key in the config); there is no wall-clock"
                 " default\n";
    return kExitBadInput;
  }
  if (const int rc = check_overwrite(opt, {"pre.csv", "post.csv", "truth.json"})) return rc;
  ensure_out_dir(opt);

  RunReport report;
  report.command = "simulate";
  if (!opt.config_path.empty()) report.add_input(opt.config_path);

  const SimulationConfig sim = simulation_config_from_json(opt.config);
  StageTimer timer(report, "simulate");
  const GeneratedSet pre = generate_pretreatment(sim.params, sim.pre_count, *opt.seed);
  const GeneratedSet post = generate_posttreatment(sim.params, *opt.seed);

  write_spectra_csv(out_path(opt, "pre.csv"), pre.set);
  report.add_artifact(out_path(opt, "pre.csv"), "pre-treatment");
  write_spectra_csv(out_path(opt, "post.csv"), post.set);
  report.add_artifact(out_path(opt, "post.csv"), "post-treatment");

  json truth{{"seed", *opt.seed},
             {"grid", grid_to_json(sim.params.grid)},
             {"sigma", sim.params.sigma},
             {"replicates", sim.params.replicates},
             {"scale_law", distribution_to_json(sim.params.scale_law)},
             {"offset_law", distribution_to_json(sim.params.offset_law)},
             {"template", vector_to_json(sim.params.template_values)},
             {"pattern", vector_to_json(sim.params.pattern)},
             {"effects", vector_to_json(sim.params.effects)},
             {"pre", {{"scales", pre.scales}, {"offsets", pre.offsets}}},
             {"post", {{"scales", post.scales}, {"offsets", post.offsets}}}};
  write_json_artifact(out_path(opt, "truth.json"), std::move(truth), report);
  report.add_artifact(out_path(opt, "truth.json"), "truth");
  return finish(opt, report);
}

int cmd_template(Options& opt) {
  if (opt.pre_path.empty()) {
    std::cerr << "template needs --pre\n";
    return kExitBadInput;
  }
  require_inputs_exist({opt.pre_path});
  if (const int rc = check_overwrite(opt, {"template.json", "aligned.csv"})) return rc;
  ensure_out_dir(opt);

  RunReport report;
  report.command = "template";
  const SpectrumSet pre = load_signals(opt.pre_path, opt, report);
  stage_template(opt, report, pre);
  return finish(opt, report);
}

int cmd_effect(Options& opt) {
  if (opt.post_path.empty()) {
    std::cerr << "effect needs --post\n";
    return kExitBadInput;
  }
  require_inputs_exist({opt.post_path, opt.template_json_path});
  if (const int rc = check_overwrite(opt, {"effect.json", "delta.csv"})) return rc;
  ensure_out_dir(opt);

  RunReport report;
  report.command = "effect";
  const SpectrumSet post = load_signals(opt.post_path, opt, report);
  report.add_input(opt.template_json_path);
  const TemplateArtifact tpl = template_from_json(json::parse(read_text(opt.template_json_path)));
  if (!(tpl.grid == post.grid()))
    throw InvalidParams("template grid does not match the post-treatment grid");
  stage_effect(opt, report, post, tpl.template_values);
  return finish(opt, report);
}

int cmd_sparsify(Options& opt) {
  require_inputs_exist({opt.template_json_path, opt.effect_json_path});
  if (const int rc = check_overwrite(opt, {"pattern.json", "pattern.csv", "landscape.csv"}))
    return rc;
  ensure_out_dir(opt);

  RunReport report;
  report.command = "sparsify";
  report.add_input(opt.template_json_path);
  report.add_input(opt.effect_json_path);
  const TemplateArtifact tpl = template_from_json(json::parse(read_text(opt.template_json_path)));
  const EffectArtifact effect = effect_from_json(json::parse(read_text(opt.effect_json_path)));
  if (effect.no_effect)
    throw InvalidParams("effect fit reported no effect; there is no pattern to sparsify");
  if (!(effect.grid == tpl.grid))
    throw InvalidParams("effect and template artifacts are on different grids");
  stage_sparsify(opt, report, {effect.pattern_tilde, tpl.template_values}, tpl.grid);
  return finish(opt, report);
}

int cmd_msc(Options& opt) {
  if (opt.pre_path.empty()) {
    std::cerr << "msc needs --pre\n";
    return kExitBadInput;
  }
  require_inputs_exist({opt.pre_path});
  if (const int rc = check_overwrite(opt, {"msc.json", "corrected.csv"})) return rc;
  ensure_out_dir(opt);

  RunReport report;
  report.command = "msc";
  const SpectrumSet pre = load_signals(opt.pre_path, opt, report);
  stage_msc(opt, report, pre);
  return finish(opt, report);
}

int cmd_pipeline(Options& opt) {
  if (opt.pre_path.empty() || opt.post_path.empty()) {
    std::cerr << "pipeline needs --pre and --post\n";
    return kExitBadInput;
  }
  require_inputs_exist({opt.pre_path, opt.post_path});
  std::vector<std::string> artifacts = {"template.json", "aligned.csv", "effect.json",
                                        "delta.csv",     "pattern.json", "pattern.csv",
                                        "landscape.csv"};
  if (opt.with_msc) {
    artifacts.push_back("msc.json");
    artifacts.push_back("corrected.csv");
  }
  if (const int rc = check_overwrite(opt, artifacts)) return rc;
  ensure_out_dir(opt);

  RunReport report;
  report.command = "pipeline";
  const SpectrumSet pre = load_signals(opt.pre_path, opt, report);
  const SpectrumSet post = load_signals(opt.post_path, opt, report);
  if (!(pre.grid() == post.grid()))
    throw InvalidParams("pre- and post-treatment sets are on different grids");

  const TemplateFit tpl = stage_template(opt, report, pre);
  const EffectFit effect = stage_effect(opt, report, post, tpl.template_values);
  if (effect.no_effect)
    report.warnings.push_back("skipping sparsify: effect fit reported no effect");
  else
    stage_sparsify(opt, report, {effect.pattern_tilde, tpl.template_values}, pre.grid());
  if (opt.with_msc) stage_msc(opt, report, pre);
  return finish(opt, report);
}

int dispatch(const std::string& name, Options& opt) {
  if (name == "simulate") return cmd_simulate(opt);
  if (name == "template") return cmd_template(opt);
  if (name == "effect") return cmd_effect(opt);
  if (name == "sparsify") return cmd_sparsify(opt);
  if (name == "msc") return cmd_msc(opt);
  return cmd_pipeline(opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"template estimation and treatment-effect decomposition for replicate spectra"};
  app.require_subcommand(1);

  Options opt;
  std::uint64_t seed_value = 0;
  std::vector<CLI::App*> commands;
  for (const char* name : {"simulate", "template", "effect", "sparsify", "msc", "pipeline"}) {
    CLI::App* cmd = app.add_subcommand(name);
    cmd->add_option("--config", opt.config_path, "JSON configuration file");
    cmd->add_option("--pre", opt.pre_path, "pre-treatment spectra CSV");
    cmd->add_option("--post", opt.post_path, "post-treatment spectra CSV");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", seed_value, "generator seed");
    cmd->add_option("--exclude-labels", opt.exclude_labels, "signal labels to drop")
        ->delimiter(',');
    cmd->add_flag("--force", opt.force, "overwrite existing artifacts");
    cmd->add_flag("--with-msc", opt.with_msc, "also run scatter correction (pipeline)");
    cmd->add_option("--tol", opt.tol, "relative objective tolerance for the effect fit");
    cmd->add_option("--max-iter", opt.max_iter, "iteration cap for the effect fit");
    cmd->add_option("--grid-theta", opt.grid_theta, "landscape grid size along theta");
    cmd->add_option("--grid-phi", opt.grid_phi, "landscape grid size along phi");
    cmd->add_option("--cos-phi-floor", opt.cos_phi_floor, "candidate filter |cos(phi)| floor");
    commands.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitBadInput;
  }

  CLI::App* active = app.get_subcommands().front();
  if (active->count("--seed") > 0) opt.seed = seed_value;
  try {
    load_config(opt);
    merge_config(opt, active);
    if (opt.grid_theta < 16 || opt.grid_phi < 16)
      throw InvalidParams("landscape grid sizes must be at least 16");
    return dispatch(active->get_name(), opt);
  } catch (const DegenerateSignal& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const NearZeroSlope& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const EmptyCandidates& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoCandidates;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
}
