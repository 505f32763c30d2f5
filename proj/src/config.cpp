#include "ftpit/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ftpit/errors.hpp"

namespace ftpit {

using nlohmann::json;

RunConfig default_config(const std::string& problem) {
  RunConfig c;
  c.problem = problem;
  c.run_id = problem;
  if (problem == "heat") {
    c.levels = {{255, 5, 1, PreconditionerKind::ImplicitEuler},
                {127, 5, 1, PreconditionerKind::ImplicitEuler}};
    c.P = 16;
    c.dt = 0.5;
    c.steps = 16;
    c.tolerance = 1e-9;
  } else if (problem == "advection") {
    c.levels = {{256, 5, 1, PreconditionerKind::ImplicitEuler},
                {128, 5, 1, PreconditionerKind::ImplicitEuler}};
    c.P = 16;
    c.dt = 0.125;
    c.steps = 16;
    c.tolerance = 1e-9;
  } else if (problem == "grayscott") {
    c.nodes = NodeKind::GaussRadauRight;
    c.levels = {{129, 3, 1, PreconditionerKind::LU}, {65, 3, 1, PreconditionerKind::LU}};
    c.P = 8;
    c.dt = 2.0;
    c.steps = 32;
    c.tolerance = 1e-7;
    c.fault_p = 0.03;
  } else if (problem == "dahlquist") {
    c.nodes = NodeKind::GaussRadauRight;
    c.levels = {{1, 3, 1, PreconditionerKind::ImplicitEuler},
                {1, 3, 1, PreconditionerKind::ImplicitEuler}};
    c.P = 4;
    c.dt = 0.1;
    c.steps = 4;
    c.tolerance = 1e-12;
  } else {
    throw ConfigError("unknown problem '" + problem + "' (heat, advection, grayscott, dahlquist)");
  }
  return c;
}

void RunConfig::validate() const {
  if (levels.empty()) throw ConfigError("at least one level is required");
  for (const auto& l : levels) {
    if (l.N < 1) throw ConfigError("grid sizes must be positive");
    if (l.M < 2) throw ConfigError("every level needs at least 2 collocation nodes");
    if (l.sweeps < 1) throw ConfigError("sweep counts must be at least 1");
  }
  if (P < 1) throw ConfigError("P must be at least 1");
  if (steps < 1 || steps % P != 0) {
    throw ConfigError("number of steps (" + std::to_string(steps) + ") must be a positive multiple of P");
  }
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  if (!(tolerance > 0)) throw ConfigError("tolerance must be positive");
  if (k_max < 1) throw ConfigError("k_max must be at least 1");
  if (fault_mode != "none" && fault_mode != "explicit" && fault_mode != "bernoulli") {
    throw ConfigError("fault_mode must be none, explicit or bernoulli");
  }
  if (!(fault_p >= 0 && fault_p <= 1)) throw ConfigError("fault_p must lie in [0, 1]");
  if (prolong_order != 2 && prolong_order != 4 && prolong_order != 6 && prolong_order != 8) {
    throw ConfigError("prolong_order must be 2, 4, 6 or 8");
  }
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "run_id", "problem", "nu", "c", "stencil_order", "A", "B", "D", "L", "decay",
      "newton_atol", "newton_rtol", "newton_max_iter", "lambda", "nodes", "grid", "M", "sweeps",
      "preconditioner", "prolong_order", "restriction", "P", "dt", "T", "steps", "tolerance",
      "k_max", "strategy", "fault_mode", "fault_events", "fault_p", "fault_plan", "seed"};
  return keys;
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

// A scalar applies to every level, an array gives one entry per level.
template <class T>
std::vector<T> per_level(const json& j, const char* key, size_t n) {
  const json& v = j.at(key);
  if (!v.is_array()) return std::vector<T>(n, get<T>(j, key));
  if (v.size() != n) {
    throw ConfigError(std::string("config key '") + key + "' needs one entry per grid level");
  }
  std::vector<T> out;
  for (const auto& e : v) {
    try {
      out.push_back(e.get<T>());
    } catch (const json::exception& ex) {
      throw ConfigError(std::string("config key '") + key + "': " + ex.what());
    }
  }
  return out;
}

}  // namespace

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig c = default_config(j.contains("problem") ? get<std::string>(j, "problem") : "heat");

  if (j.contains("run_id")) c.run_id = get<std::string>(j, "run_id");
  if (j.contains("nu")) c.nu = get<double>(j, "nu");
  if (j.contains("c")) c.c = get<double>(j, "c");
  if (j.contains("stencil_order")) c.stencil_order = get<int>(j, "stencil_order");
  auto& gs = c.grayscott;
  if (j.contains("A")) gs.A = get<double>(j, "A");
  if (j.contains("B")) gs.B = get<double>(j, "B");
  if (j.contains("D")) gs.D = get<double>(j, "D");
  if (j.contains("L")) gs.L = get<double>(j, "L");
  if (j.contains("decay")) gs.decay = parse_decay_variant(get<std::string>(j, "decay"));
  if (j.contains("newton_atol")) gs.newton_atol = get<double>(j, "newton_atol");
  if (j.contains("newton_rtol")) gs.newton_rtol = get<double>(j, "newton_rtol");
  if (j.contains("newton_max_iter")) gs.newton_max_iter = get<int>(j, "newton_max_iter");
  if (j.contains("lambda")) c.lambda = get<double>(j, "lambda");
  if (j.contains("nodes")) c.nodes = parse_node_kind(get<std::string>(j, "nodes"));

  if (j.contains("grid")) {
    const auto grid = j.at("grid").is_array() ? get<std::vector<int>>(j, "grid")
                                              : std::vector<int>{get<int>(j, "grid")};
    const LevelConfig proto = c.levels.front();
    c.levels.assign(grid.size(), proto);
    for (size_t l = 0; l < grid.size(); ++l) c.levels[l].N = grid[l];
  }
  const size_t n = c.levels.size();
  if (j.contains("M")) {
    const auto v = per_level<int>(j, "M", n);
    for (size_t l = 0; l < n; ++l) c.levels[l].M = v[l];
  }
  if (j.contains("sweeps")) {
    const auto v = per_level<int>(j, "sweeps", n);
    for (size_t l = 0; l < n; ++l) c.levels[l].sweeps = v[l];
  }
  if (j.contains("preconditioner")) {
    const auto v = per_level<std::string>(j, "preconditioner", n);
    for (size_t l = 0; l < n; ++l) c.levels[l].preconditioner = parse_preconditioner_kind(v[l]);
  }
  if (j.contains("prolong_order")) c.prolong_order = get<int>(j, "prolong_order");
  if (j.contains("restriction")) {
    const auto r = get<std::string>(j, "restriction");
    if (r == "injection") c.full_weighting = false;
    else if (r == "full-weighting") c.full_weighting = true;
    else throw ConfigError("restriction must be injection or full-weighting");
  }

  if (j.contains("P")) c.P = get<int>(j, "P");
  if (j.contains("dt")) c.dt = get<double>(j, "dt");
  if (j.contains("steps") && j.contains("T")) throw ConfigError("give either steps or T, not both");
  if (j.contains("steps")) c.steps = get<int>(j, "steps");
  if (j.contains("T")) {
    const double ratio = get<double>(j, "T") / c.dt;
    const double r = std::round(ratio);
    if (std::abs(ratio - r) > 1e-9 * std::max(1.0, r)) {
      throw ConfigError("T must be a whole multiple of dt");
    }
    c.steps = static_cast<int>(r);
  }
  if (j.contains("tolerance")) c.tolerance = get<double>(j, "tolerance");
  if (j.contains("k_max")) c.k_max = get<int>(j, "k_max");

  if (j.contains("strategy")) c.strategy = parse_recovery_kind(get<std::string>(j, "strategy"));
  if (j.contains("fault_mode")) c.fault_mode = get<std::string>(j, "fault_mode");
  if (j.contains("fault_events")) {
    c.fault_events.clear();
    for (const auto& e : j.at("fault_events")) {
      if (!e.is_array() || e.size() != 2) {
        throw ConfigError("fault_events entries must be [step, iteration] pairs");
      }
      c.fault_events.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }
  if (j.contains("fault_p")) c.fault_p = get<double>(j, "fault_p");
  if (j.contains("fault_plan")) c.fault_plan_file = get<std::string>(j, "fault_plan");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");

  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["run_id"] = c.run_id;
  j["problem"] = c.problem;
  if (c.problem == "heat") j["nu"] = c.nu;
  if (c.problem == "advection") {
    j["c"] = c.c;
    j["stencil_order"] = c.stencil_order;
  }
  if (c.problem == "grayscott") {
    j["A"] = c.grayscott.A;
    j["B"] = c.grayscott.B;
    j["D"] = c.grayscott.D;
    j["L"] = c.grayscott.L;
    j["decay"] = to_string(c.grayscott.decay);
    j["newton_atol"] = c.grayscott.newton_atol;
    j["newton_rtol"] = c.grayscott.newton_rtol;
    j["newton_max_iter"] = c.grayscott.newton_max_iter;
  }
  if (c.problem == "dahlquist") j["lambda"] = c.lambda;
  j["nodes"] = to_string(c.nodes);
  json grid = json::array(), M = json::array(), sweeps = json::array(), pre = json::array();
  for (const auto& l : c.levels) {
    grid.push_back(l.N);
    M.push_back(l.M);
    sweeps.push_back(l.sweeps);
    pre.push_back(to_string(l.preconditioner));
  }
  j["grid"] = grid;
  j["M"] = M;
  j["sweeps"] = sweeps;
  j["preconditioner"] = pre;
  j["prolong_order"] = c.prolong_order;
  j["restriction"] = c.full_weighting ? "full-weighting" : "injection";
  j["P"] = c.P;
  j["dt"] = c.dt;
  j["steps"] = c.steps;
  j["tolerance"] = c.tolerance;
  j["k_max"] = c.k_max;
  j["strategy"] = to_string(c.strategy);
  j["fault_mode"] = c.fault_mode;
  json events = json::array();
  for (const auto& [s, k] : c.fault_events) events.push_back({s, k});
  j["fault_events"] = events;
  j["fault_p"] = c.fault_p;
  if (!c.fault_plan_file.empty()) j["fault_plan"] = c.fault_plan_file;
  j["seed"] = c.seed;
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string config_help() {
  std::ostringstream o;
  o << "Config keys (flat JSON object; defaults depend on \"problem\"):\n"
       "  problem          heat | advection | grayscott | dahlquist   [heat]\n"
       "  run_id           label written to every record               [problem name]\n"
       "  nu               heat diffusion coefficient                  [0.5]\n"
       "  c                advection speed                             [1.0]\n"
       "  stencil_order    advection centered stencil, 2 or 4          [2]\n"
       "  A B D L          gray-scott feed, decay, diffusion, length   [0.09 0.086 0.01 100]\n"
       "  decay            gray-scott decay term, as-printed | standard [as-printed]\n"
       "  newton_atol newton_rtol newton_max_iter                      [1e-9 1e-8 50]\n"
       "  lambda           dahlquist coefficient                       [-1]\n"
       "  nodes            gauss-lobatto | gauss-radau-right           [lobatto; radau for gray-scott]\n"
       "  grid             grid sizes, finest first                    [heat 255,127; advection"
       " 256,128; gray-scott 129,65]\n"
       "  M                nodes per level (number or list)            [5; 3 for gray-scott]\n"
       "  sweeps           sweeps per level and iteration              [1]\n"
       "  preconditioner   implicit-euler | lu | explicit-euler        [implicit-euler; lu for"
       " gray-scott]\n"
       "  prolong_order    spatial interpolation order 2, 4, 6, 8      [6]\n"
       "  restriction      injection | full-weighting                  [full-weighting]\n"
       "  P                time-parallel ranks per block               [16; 8 for gray-scott]\n"
       "  dt               step size                                   [0.5; 0.125 advection; 2"
       " gray-scott]\n"
       "  steps or T       number of steps or final time               [16; 32 for gray-scott]\n"
       "  tolerance        residual tolerance                          [1e-9; 1e-7 gray-scott]\n"
       "  k_max            iteration cap per block                     [50]\n"
       "  strategy         restart-block | one-sided | one-sided-corr | two-sided |"
       " two-sided-corr [two-sided-corr]\n"
       "  fault_mode       none | explicit | bernoulli                 [none]\n"
       "  fault_events     [[step, iteration], ...] for explicit mode  [[]]\n"
       "  fault_p          fault probability per step and iteration    [0.03]\n"
       "  fault_plan       plan file to load instead of generating     []\n"
       "  seed             fault plan seed                             [0]\n";
  return o.str();
}

Setup build_setup(const RunConfig& config) {
  config.validate();
  Setup s;
  const int N0 = config.levels.front().N;
  if (config.problem == "heat") {
    s.problem = std::make_shared<HeatProblem>(config.nu, N0);
  } else if (config.problem == "advection") {
    s.problem = std::make_shared<AdvectionProblem>(config.c, N0, config.stencil_order);
  } else if (config.problem == "grayscott") {
    s.problem = std::make_shared<GrayScottProblem>(config.grayscott, N0);
  } else if (config.problem == "dahlquist") {
    s.problem = std::make_shared<DahlquistProblem>(config.lambda);
  } else {
    throw ConfigError("unknown problem '" + config.problem + "'");
  }
  std::vector<LevelSpecPtr> specs;
  for (size_t l = 0; l < config.levels.size(); ++l) {
    const auto& lc = config.levels[l];
    ProblemPtr prob = l == 0 ? s.problem : s.problem->with_resolution(lc.N);
    specs.push_back(LevelSpec::make(prob, config.nodes, lc.M, lc.preconditioner, lc.sweeps));
  }
  s.hierarchy = std::make_unique<Hierarchy>(std::move(specs), config.prolong_order, config.full_weighting);
  s.options.P = config.P;
  s.options.dt = config.dt;
  s.options.tolerance = config.tolerance;
  s.options.k_max = config.k_max;
  s.steps = config.steps;
  return s;
}

}  // namespace ftpit
