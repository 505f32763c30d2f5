// Command line driver: run, sweep-faults, stress, overhead.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ftpit/config.hpp"
#include "ftpit/errors.hpp"
#include "ftpit/experiments.hpp"
#include "ftpit/overhead.hpp"

namespace {

using namespace ftpit;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kBlockFailure = 1;
constexpr int kUsage = 2;

struct CommonArgs {
  std::string config;
  std::string strategy;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string baseline;
  bool per_step = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_baseline) {
  cmd->add_option("--config", a.config, "JSON config file")->required();
  cmd->add_option("--strategy", a.strategy,
                  "restart-block, one-sided, one-sided-corr, two-sided, two-sided-corr; "
                  "comma separated or 'all' for sweeps");
  cmd->add_option("--seed", a.seed, "fault plan seed (overrides the config)");
  cmd->add_option("--out", a.out, "output directory")->capture_default_str();
  if (with_baseline) cmd->add_option("--baseline", a.baseline, "summary.json of a no-fault run");
}

RunConfig resolve(const CommonArgs& a) {
  RunConfig c = load_config(a.config);
  if (a.seed) c.seed = *a.seed;
  if (!a.strategy.empty() && a.strategy.find(',') == std::string::npos && a.strategy != "all") {
    c.strategy = parse_recovery_kind(a.strategy);
  }
  return c;
}

std::vector<RecoveryKind> strategy_list(const std::string& arg, std::vector<RecoveryKind> fallback) {
  if (arg.empty()) return fallback;
  if (arg == "all") return all_recovery_kinds();
  std::vector<RecoveryKind> out;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_recovery_kind(item));
  return out;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << j.dump(2) << "\n";
}

int do_run(const CommonArgs& a) {
  const RunConfig c = resolve(a);
  std::optional<json> baseline;
  if (!a.baseline.empty()) baseline = read_json(a.baseline);
  const RunOutcome r = cmd_run(c, baseline);
  write_run_outputs(a.out, r);
  for (const auto& b : r.summary["blocks"]) {
    std::cout << "block " << b["block"] << ": K = " << b["k_last_rank"]
              << (b["converged"].get<bool>() ? "" : " (not converged)");
    if (b.contains("k_add") && !b["k_add"].is_null()) std::cout << ", K_add = " << b["k_add"];
    std::cout << ", faults = " << b["n_faults"] << "\n";
  }
  return r.summary["failed"].get<bool>() ? kBlockFailure : kOk;
}

int do_sweep(const CommonArgs& a) {
  const RunConfig c = resolve(a);
  const auto kinds = strategy_list(a.strategy, all_recovery_kinds());
  const SweepOutcome s = cmd_sweep_faults(c, kinds, default_thread_count(), a.per_step);
  fs::create_directories(a.out);
  {
    std::ofstream f(fs::path(a.out) / "heatmap.csv");
    if (!f) throw ConfigError("cannot write heatmap.csv");
    write_heatmap_csv(f, s.rows);
  }
  json summary;
  summary["run_id"] = c.run_id;
  summary["config"] = config_to_json(c);
  summary["baseline_k_last_rank"] = s.baseline.blocks[0].k_last_rank();
  summary["per_step"] = a.per_step;
  json per = json::object();
  bool any_failed = false;
  for (const auto kind : kinds) {
    int lo = 0, hi = 0, n = 0, failed = 0;
    bool first = true;
    for (const auto& row : s.rows) {
      if (row.strategy != kind) continue;
      lo = first ? row.k_add : std::min(lo, row.k_add);
      hi = first ? row.k_add : std::max(hi, row.k_add);
      first = false;
      ++n;
      if (!row.converged) ++failed;
    }
    per[to_string(kind)] = {{"cells", n}, {"k_add_min", lo}, {"k_add_max", hi}, {"failed_cells", failed}};
    any_failed = any_failed || failed > 0;
    std::cout << to_string(kind) << ": K_add in [" << lo << ", " << hi << "] over " << n << " cells\n";
  }
  summary["strategies"] = per;
  write_json(fs::path(a.out) / "sweep_summary.json", summary);
  return any_failed ? kBlockFailure : kOk;
}

int do_stress(const CommonArgs& a) {
  const RunConfig c = resolve(a);
  const std::vector<RecoveryKind> four = {RecoveryKind::OneSided, RecoveryKind::OneSidedCorr,
                                          RecoveryKind::TwoSided, RecoveryKind::TwoSidedCorr};
  const auto kinds = strategy_list(a.strategy, four);
  const StressOutcome s = cmd_stress(c, kinds, default_thread_count());
  fs::create_directories(a.out);
  {
    std::ofstream f(fs::path(a.out) / "stress.csv");
    if (!f) throw ConfigError("cannot write stress.csv");
    write_stress_csv(f, s.rows);
  }
  save_fault_plan((fs::path(a.out) / "fault_plan.txt").string(), s.plan);
  const json summary = stress_summary(c, s);
  write_json(fs::path(a.out) / "stress_summary.json", summary);
  bool failed = false;
  for (const auto& r : s.runs) {
    failed = failed || r.sim.failed;
    std::cout << to_string(r.strategy) << ": " << (r.sim.failed ? "FAILED" : "converged")
              << ", max |u - u_nofault| = " << r.final_max_diff << "\n";
  }
  std::cout << s.plan.size() << " planned faults\n";
  return failed ? kBlockFailure : kOk;
}

struct OverheadArgs {
  CostModel m;
  std::string baseline;
  std::string faulty;
};

CostModel model_from_runs(const OverheadArgs& a) {
  CostModel m = a.m;
  const json base = read_json(a.baseline);
  const json faulty = read_json(a.faulty);
  const auto bk = summary_k_last(base);
  const auto& blocks = faulty.at("blocks");
  for (const auto& b : blocks) {
    if (b.at("n_faults").get<int>() == 0) continue;
    const int idx = b.at("block").get<int>();
    if (static_cast<size_t>(idx) >= bk.size()) throw ConfigError("baseline has fewer blocks");
    m.K = bk[static_cast<size_t>(idx)];
    m.K_add = b.at("k_last_rank").get<int>() - m.K;
    m.n_rec = b.at("n_rec").get<int>();
    m.P = faulty.at("config").at("P").get<int>();
    return m;
  }
  throw ConfigError("the faulty run has no applied fault");
}

int do_overhead(const OverheadArgs& a) {
  CostModel m = a.m;
  if (!a.baseline.empty() || !a.faulty.empty()) {
    if (a.baseline.empty() || a.faulty.empty()) {
      throw ConfigError("--baseline and --run must be given together");
    }
    m = model_from_runs(a);
  }
  const auto e = efficiency_ratio(m);
  json out;
  out["model"] = {{"P", m.P},         {"K", m.K},         {"K_fault", m.K_fault},
                  {"K_add", m.K_add}, {"n_c", m.n_c},     {"n_f", m.n_f},
                  {"gamma_c", m.gamma_c}, {"gamma_f", m.gamma_f}, {"n_rec", m.n_rec},
                  {"gamma_rec", m.gamma_rec}};
  out["alpha"] = m.alpha();
  out["t_no_fault"] = t_no_fault(m);
  out["t_restart"] = t_restart(m);
  out["overhead_restart"] = overhead_restart(m);
  out["overhead_recovery"] = overhead_recovery(m);
  out["efficiency_ratio"] = e.infinite ? json("inf") : json(e.ratio);
  out["criteria"] = {{"k_add_le_k_fault", e.k_add_ok},
                     {"n_rec_le_n_c_P", e.n_rec_ok},
                     {"gamma_rec_small", e.gamma_rec_ok}};
  std::cout << out.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-tolerant PFASST on emulated time-parallel ranks"};
  app.require_subcommand(1);
  app.footer(ftpit::config_help() +
             "\nFTPIT_THREADS caps the number of concurrent simulations in sweeps.\n"
             "Exit codes: 0 success, 1 block failure, 2 usage error.");

  CommonArgs run_args, sweep_args, stress_args;
  auto* run = app.add_subcommand("run", "one simulation, residual records and summary");
  add_common(run, run_args, true);
  auto* sweep = app.add_subcommand("sweep-faults", "one fault per (step, iteration) cell");
  add_common(sweep, sweep_args, false);
  sweep->add_flag("--per-step", sweep_args.per_step,
                  "fault step s only in iterations it performs without faults");
  auto* stress = app.add_subcommand("stress", "random fault plan against several strategies");
  add_common(stress, stress_args, false);

  OverheadArgs ov;
  auto* overhead = app.add_subcommand("overhead", "analytic cost model of restart and recovery");
  overhead->add_option("--P", ov.m.P, "parallel steps")->capture_default_str();
  overhead->add_option("--K", ov.m.K, "no-fault iterations")->capture_default_str();
  overhead->add_option("--K-fault", ov.m.K_fault, "iteration of the fault")->capture_default_str();
  overhead->add_option("--K-add", ov.m.K_add, "additional iterations")->capture_default_str();
  overhead->add_option("--n-c", ov.m.n_c, "coarse sweeps per iteration")->capture_default_str();
  overhead->add_option("--n-f", ov.m.n_f, "fine sweeps per iteration")->capture_default_str();
  overhead->add_option("--gamma-c", ov.m.gamma_c, "cost of a coarse sweep")->capture_default_str();
  overhead->add_option("--gamma-f", ov.m.gamma_f, "cost of a fine sweep")->capture_default_str();
  overhead->add_option("--n-rec", ov.m.n_rec, "recovery sweeps")->capture_default_str();
  overhead->add_option("--gamma-rec", ov.m.gamma_rec, "reconstruction cost")->capture_default_str();
  overhead->add_option("--baseline", ov.baseline, "summary.json of the no-fault run");
  overhead->add_option("--run", ov.faulty, "summary.json of the faulty run (K, K_add, n_rec, P)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return do_run(run_args);
    if (*sweep) return do_sweep(sweep_args);
    if (*stress) return do_stress(stress_args);
    if (*overhead) return do_overhead(ov);
  } catch (const ftpit::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ftpit::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kBlockFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBlockFailure;
  }
  return kUsage;
}
