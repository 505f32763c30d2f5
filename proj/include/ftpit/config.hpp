#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ftpit/collocation.hpp"
#include "ftpit/controller.hpp"
#include "ftpit/faults.hpp"
#include "ftpit/problems.hpp"

namespace ftpit {

struct LevelConfig {
  int N = 0;
  int M = 0;
  int sweeps = 1;
  PreconditionerKind preconditioner = PreconditionerKind::ImplicitEuler;
};

/// Everything a run needs. Read from a flat JSON object; unknown keys are
/// rejected so typos do not silently fall back to defaults.
struct RunConfig {
  std::string run_id = "run";
  std::string problem = "heat";

  double nu = 0.5;          // heat
  double c = 1.0;           // advection
  int stencil_order = 2;    // advection
  GrayScottParams grayscott;
  double lambda = -1.0;     // dahlquist

  NodeKind nodes = NodeKind::GaussLobatto;
  std::vector<LevelConfig> levels;  // finest first
  int prolong_order = 6;
  bool full_weighting = true;

  int P = 16;
  double dt = 0.5;
  int steps = 16;
  double tolerance = 1e-9;
  int k_max = 50;

  RecoveryKind strategy = RecoveryKind::TwoSidedCorr;
  std::string fault_mode = "none";  // none | explicit | bernoulli
  std::vector<std::pair<int, int>> fault_events;
  double fault_p = 0.03;
  std::string fault_plan_file;
  std::uint64_t seed = 0;

  int blocks() const { return steps / P; }
  void validate() const;
};

/// Defaults for one of the named problems before overrides apply.
RunConfig default_config(const std::string& problem);

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

/// Text listing every key with its default, for --help.
std::string config_help();

/// Problem, level stack and transfers built from a configuration.
struct Setup {
  ProblemPtr problem;
  std::unique_ptr<Hierarchy> hierarchy;
  ControllerOptions options;
  int steps = 0;

  Vector initial_value() const { return problem->initial_condition(0.0); }
};

Setup build_setup(const RunConfig& config);

}  // namespace ftpit
