#include "ftpit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "ftpit/errors.hpp"

namespace ftpit {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Records make_records(const std::string& run_id, const SimulationResult& sim, int P) {
  Records rec;
  for (const auto& b : sim.blocks) {
    for (int p = 0; p < P; ++p) {
      const auto pu = static_cast<size_t>(p);
      for (size_t i = 0; i < b.residuals[pu].size(); ++i) {
        ResidualRecord r;
        r.run_id = run_id;
        r.block = b.block;
        r.step = b.first_step + p;
        r.rank = p;
        r.iteration = static_cast<int>(i) + 1;
        r.residual = b.residuals[pu][i];
        r.status = b.statuses[pu][i];
        r.fault = b.fault_flags[pu][i];
        rec.residuals.push_back(std::move(r));
      }
    }
    for (const auto& f : b.faults) {
      FaultRow row;
      row.run_id = run_id;
      row.block = b.block;
      row.step = f.step;
      row.rank = f.step - b.first_step;
      row.iteration = f.iteration;
      row.strategy = f.strategy;
      row.applied = f.applied;
      row.n_rec = f.n_rec;
      row.note = f.note;
      rec.faults.push_back(std::move(row));
    }
  }
  return rec;
}

namespace {

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::vector<std::string> split_csv(const std::string& line, size_t max_fields) {
  std::vector<std::string> out;
  size_t start = 0;
  while (out.size() + 1 < max_fields) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) break;
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  out.push_back(line.substr(start));
  return out;
}

int to_int(const std::string& s, const char* what) {
  try {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string("bad integer in ") + what + ": '" + s + "'");
}

double to_double(const std::string& s, const char* what) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  throw ConfigError(std::string("bad number in ") + what + ": '" + s + "'");
}

void expect_header(std::istream& in, const char* header) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ConfigError(std::string("expected CSV header '") + header + "'");
  }
}

}  // namespace

void write_residuals_csv(std::ostream& out, const std::vector<ResidualRecord>& rows) {
  out << kResidualHeader << "\n";
  for (const auto& r : rows) {
    out << csv_safe(r.run_id) << "," << r.block << "," << r.step << "," << r.rank << ","
        << r.iteration << "," << format_double(r.residual) << "," << to_string(r.status) << ","
        << (r.fault ? 1 : 0) << "\n";
  }
}

void write_faults_csv(std::ostream& out, const std::vector<FaultRow>& rows) {
  out << kFaultHeader << "\n";
  for (const auto& f : rows) {
    out << csv_safe(f.run_id) << "," << f.block << "," << f.step << "," << f.rank << ","
        << f.iteration << "," << f.strategy << "," << (f.applied ? 1 : 0) << "," << f.n_rec << ","
        << csv_safe(f.note) << "\n";
  }
}

std::vector<ResidualRecord> read_residuals_csv(std::istream& in) {
  expect_header(in, kResidualHeader);
  std::vector<ResidualRecord> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line, 8);
    if (f.size() != 8) throw ConfigError("residual record with wrong field count: " + line);
    ResidualRecord r;
    r.run_id = f[0];
    r.block = to_int(f[1], "block");
    r.step = to_int(f[2], "step");
    r.rank = to_int(f[3], "rank");
    r.iteration = to_int(f[4], "iteration");
    r.residual = to_double(f[5], "residual");
    r.status = parse_rank_status(f[6]);
    r.fault = to_int(f[7], "fault") != 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<FaultRow> read_faults_csv(std::istream& in) {
  expect_header(in, kFaultHeader);
  std::vector<FaultRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line, 9);
    if (f.size() != 9) throw ConfigError("fault record with wrong field count: " + line);
    FaultRow r;
    r.run_id = f[0];
    r.block = to_int(f[1], "block");
    r.step = to_int(f[2], "step");
    r.rank = to_int(f[3], "rank");
    r.iteration = to_int(f[4], "iteration");
    r.strategy = f[5];
    r.applied = to_int(f[6], "applied") != 0;
    r.n_rec = to_int(f[7], "n_rec");
    r.note = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

json summarize(const RunConfig& config, const Records& records,
               const std::optional<json>& baseline_summary) {
  struct RankTrace {
    std::vector<std::pair<int, RankStatus>> statuses;
    double last_residual = 0;
  };
  std::map<int, std::map<int, RankTrace>> blocks;
  for (const auto& r : records.residuals) {
    auto& t = blocks[r.block][r.rank];
    t.statuses.emplace_back(r.iteration, r.status);
    t.last_residual = r.residual;
  }
  std::vector<int> base_k;
  if (baseline_summary) base_k = summary_k_last(*baseline_summary);

  json out;
  out["run_id"] = config.run_id;
  out["config"] = config_to_json(config);
  json jb = json::array();
  bool failed = static_cast<int>(blocks.size()) < config.blocks();
  int total = 0;
  int applied_total = 0;
  for (auto& [b, ranks] : blocks) {
    json e;
    e["block"] = b;
    json ks = json::array();
    bool converged = true;
    int k_last = 0;
    double last_res = 0;
    for (int p = 0; p < config.P; ++p) {
      auto it = ranks.find(p);
      if (it == ranks.end()) throw ConfigError("records miss rank " + std::to_string(p));
      auto& st = it->second.statuses;
      std::sort(st.begin(), st.end(), [](const auto& a, const auto& c) { return a.first < c.first; });
      int k = st.empty() ? 0 : st.back().first;
      if (!st.empty() && st.back().second == RankStatus::Converged) {
        // the iteration in which the rank last switched to converged
        k = st.front().first;
        for (const auto& [i, s] : st) {
          if (s != RankStatus::Converged) k = i + 1;
        }
      } else {
        converged = false;
      }
      ks.push_back(k);
      k_last = k;
      last_res = it->second.last_residual;
    }
    int n_faults = 0, n_skipped = 0, n_rec = 0;
    for (const auto& f : records.faults) {
      if (f.block != b) continue;
      if (f.applied) {
        ++n_faults;
        n_rec += f.n_rec;
      } else {
        ++n_skipped;
      }
    }
    e["iterations"] = ks;
    e["k_last_rank"] = k_last;
    e["converged"] = converged;
    e["final_residual"] = last_res;
    e["n_faults"] = n_faults;
    e["n_faults_skipped"] = n_skipped;
    e["n_rec"] = n_rec;
    if (baseline_summary) {
      if (static_cast<size_t>(b) < base_k.size()) e["k_add"] = k_last - base_k[static_cast<size_t>(b)];
      else e["k_add"] = nullptr;
    }
    failed = failed || !converged;
    total += k_last;
    applied_total += n_faults;
    jb.push_back(e);
  }
  out["blocks"] = jb;
  out["failed"] = failed;
  out["total_iterations"] = total;
  out["faults_applied"] = applied_total;
  return out;
}

std::vector<int> summary_k_last(const json& summary) {
  std::vector<int> k;
  try {
    for (const auto& b : summary.at("blocks")) k.push_back(b.at("k_last_rank").get<int>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("baseline summary: ") + e.what());
  }
  return k;
}

std::vector<int> summary_step_counts(const json& summary, int P) {
  std::vector<int> k;
  try {
    for (const auto& b : summary.at("blocks")) {
      const auto its = b.at("iterations").get<std::vector<int>>();
      if (static_cast<int>(its.size()) != P) throw ConfigError("baseline summary has a different P");
      k.insert(k.end(), its.begin(), its.end());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("baseline summary: ") + e.what());
  }
  return k;
}

std::vector<int> step_iteration_counts(const SimulationResult& sim) {
  std::vector<int> k;
  for (const auto& b : sim.blocks) k.insert(k.end(), b.iterations.begin(), b.iterations.end());
  return k;
}

SimulationResult simulate(const Setup& setup, const FaultPlan* plan, RecoveryKind kind) {
  HookFactory hooks;
  if (plan && plan->size() > 0) {
    hooks = [plan, kind](int) { return std::make_unique<FaultInjector>(*plan, kind); };
  }
  return run_simulation(*setup.hierarchy, setup.options, setup.steps, setup.initial_value(), hooks);
}

std::optional<FaultPlan> plan_for(const RunConfig& config, const std::vector<int>* baseline) {
  if (config.fault_mode == "none") return std::nullopt;
  if (!config.fault_plan_file.empty()) return load_fault_plan(config.fault_plan_file);
  if (config.fault_mode == "explicit") return explicit_fault_plan(config.fault_events);
  if (!baseline) throw ConfigError("bernoulli fault plans need baseline iteration counts");
  return generate_fault_plan(FaultMode::Bernoulli, config.fault_p, config.seed, *baseline);
}

int default_thread_count() {
  if (const char* env = std::getenv("FTPIT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("FTPIT_THREADS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, int threads, const std::function<void(int)>& job) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

RunOutcome cmd_run(const RunConfig& config, const std::optional<json>& baseline_summary) {
  const Setup setup = build_setup(config);
  RunOutcome out;
  if (config.fault_mode == "bernoulli" && config.fault_plan_file.empty()) {
    std::vector<int> counts;
    if (baseline_summary) {
      counts = summary_step_counts(*baseline_summary, config.P);
    } else {
      counts = step_iteration_counts(simulate(setup, nullptr, config.strategy));
    }
    out.plan = plan_for(config, &counts);
  } else {
    out.plan = plan_for(config, nullptr);
  }
  out.sim = simulate(setup, out.plan ? &*out.plan : nullptr, config.strategy);
  out.records = make_records(config.run_id, out.sim, config.P);
  out.summary = summarize(config, out.records, baseline_summary);
  return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  return f;
}

}  // namespace

void write_run_outputs(const std::string& dir, const RunOutcome& outcome) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    auto f = open_out(fs::path(dir) / "residuals.csv");
    write_residuals_csv(f, outcome.records.residuals);
  }
  {
    auto f = open_out(fs::path(dir) / "faults.csv");
    write_faults_csv(f, outcome.records.faults);
  }
  {
    auto f = open_out(fs::path(dir) / "summary.json");
    f << outcome.summary.dump(2) << "\n";
  }
  if (outcome.plan) save_fault_plan((fs::path(dir) / "fault_plan.txt").string(), *outcome.plan);
  {
    auto f = open_out(fs::path(dir) / "final_state.csv");
    f << "index,value\n";
    const Vector& v = outcome.sim.final_value;
    for (Eigen::Index i = 0; i < v.size(); ++i) f << i << "," << format_double(v[i]) << "\n";
  }
}

SweepOutcome cmd_sweep_faults(const RunConfig& config, const std::vector<RecoveryKind>& strategies,
                              int threads, bool per_step) {
  if (config.blocks() != 1) throw ConfigError("sweep-faults needs a single-block configuration");
  const Setup setup = build_setup(config);
  SweepOutcome out;
  out.baseline = simulate(setup, nullptr, config.strategy);
  if (out.baseline.failed) throw NumericalError("no-fault baseline did not converge");
  const int K = out.baseline.blocks[0].k_last_rank();
  const auto counts = step_iteration_counts(out.baseline);
  const int P = config.P;
  for (const auto kind : strategies) {
    for (int s = 0; s < P; ++s) {
      const int last = per_step ? counts[static_cast<size_t>(s)] : K;
      for (int k = 1; k <= last; ++k) out.rows.push_back({kind, s, k, 0, 0, true});
    }
  }
  parallel_for(static_cast<int>(out.rows.size()), threads, [&](int i) {
    auto& row = out.rows[static_cast<size_t>(i)];
    const FaultPlan plan = explicit_fault_plan({{row.step, row.iteration}});
    const auto sim = simulate(setup, &plan, row.strategy);
    row.k_total = sim.blocks[0].k_last_rank();
    row.k_add = compute_k_add(sim.blocks[0], out.baseline.blocks[0]);
    row.converged = sim.blocks[0].converged;
  });
  return out;
}

void write_heatmap_csv(std::ostream& out, const std::vector<HeatmapRow>& rows) {
  out << kHeatmapHeader << "\n";
  for (const auto& r : rows) {
    out << to_string(r.strategy) << "," << r.step << "," << r.iteration << "," << r.k_total << ","
        << r.k_add << "\n";
  }
}

StressOutcome cmd_stress(const RunConfig& config, const std::vector<RecoveryKind>& strategies,
                         int threads) {
  const Setup setup = build_setup(config);
  StressOutcome out;
  out.baseline = simulate(setup, nullptr, config.strategy);
  if (out.baseline.failed) throw NumericalError("no-fault baseline did not converge");
  const auto counts = step_iteration_counts(out.baseline);
  if (!config.fault_plan_file.empty()) {
    out.plan = load_fault_plan(config.fault_plan_file);
  } else if (config.fault_mode == "explicit") {
    out.plan = explicit_fault_plan(config.fault_events);
  } else {
    out.plan = generate_fault_plan(FaultMode::Bernoulli, config.fault_p, config.seed, counts);
  }
  for (const auto kind : strategies) out.runs.push_back({kind, {}, 0.0});
  parallel_for(static_cast<int>(out.runs.size()), threads, [&](int i) {
    auto& run = out.runs[static_cast<size_t>(i)];
    run.sim = simulate(setup, &out.plan, run.strategy);
    if (run.sim.final_value.size() == out.baseline.final_value.size() && !run.sim.failed) {
      run.final_max_diff = (run.sim.final_value - out.baseline.final_value).lpNorm<Eigen::Infinity>();
    } else {
      run.final_max_diff = std::numeric_limits<double>::infinity();
    }
  });
  for (const auto& run : out.runs) {
    for (const auto& b : run.sim.blocks) {
      StressRow row;
      row.strategy = run.strategy;
      row.block = b.block;
      row.k_last_rank = b.k_last_rank();
      row.k_add = compute_k_add(b, out.baseline.blocks[static_cast<size_t>(b.block)]);
      row.n_faults = static_cast<int>(
          std::count_if(b.faults.begin(), b.faults.end(), [](const FaultRecord& f) { return f.applied; }));
      out.rows.push_back(row);
    }
  }
  return out;
}

void write_stress_csv(std::ostream& out, const std::vector<StressRow>& rows) {
  out << kStressHeader << "\n";
  for (const auto& r : rows) {
    out << to_string(r.strategy) << "," << r.block << "," << r.k_last_rank << "," << r.k_add << ","
        << r.n_faults << "\n";
  }
}

json stress_summary(const RunConfig& config, const StressOutcome& outcome) {
  json out;
  out["run_id"] = config.run_id;
  out["config"] = config_to_json(config);
  out["baseline_k_last_rank"] = [&] {
    json k = json::array();
    for (const auto& b : outcome.baseline.blocks) k.push_back(b.k_last_rank());
    return k;
  }();
  out["plan_events"] = outcome.plan.size();
  json runs = json::object();
  for (const auto& r : outcome.runs) {
    json e;
    e["failed"] = r.sim.failed;
    e["blocks_run"] = r.sim.blocks.size();
    e["final_max_diff"] = r.final_max_diff;
    int n_rec_max = 0;
    for (const auto& b : r.sim.blocks) {
      for (const auto& f : b.faults) n_rec_max = std::max(n_rec_max, f.n_rec);
    }
    e["n_rec_max"] = n_rec_max;
    runs[to_string(r.strategy)] = e;
  }
  out["strategies"] = runs;
  return out;
}

}  // namespace ftpit
