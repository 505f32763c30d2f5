#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ftpit/config.hpp"
#include "ftpit/faults.hpp"

namespace ftpit {

inline constexpr const char* kResidualHeader = "run_id,block,step,rank,iteration,residual,status,fault";
inline constexpr const char* kFaultHeader =
    "run_id,block,step,rank,iteration,strategy,applied,n_rec,note";
inline constexpr const char* kHeatmapHeader = "strategy,step,iteration,k_total,k_add";
inline constexpr const char* kStressHeader = "strategy,block,k_last_rank,k_add,n_faults";

struct ResidualRecord {
  std::string run_id;
  int block = 0;
  int step = 0;
  int rank = 0;
  int iteration = 0;
  double residual = 0;
  RankStatus status = RankStatus::Iterating;
  bool fault = false;
};

struct FaultRow {
  std::string run_id;
  int block = 0;
  int step = 0;
  int rank = 0;
  int iteration = 0;
  std::string strategy;
  bool applied = false;
  int n_rec = 0;
  std::string note;
};

struct Records {
  std::vector<ResidualRecord> residuals;
  std::vector<FaultRow> faults;
};

Records make_records(const std::string& run_id, const SimulationResult& sim, int P);

void write_residuals_csv(std::ostream& out, const std::vector<ResidualRecord>& rows);
void write_faults_csv(std::ostream& out, const std::vector<FaultRow>& rows);
std::vector<ResidualRecord> read_residuals_csv(std::istream& in);
std::vector<FaultRow> read_faults_csv(std::istream& in);

/// Per-block iteration counts, fault counts and optional K_add, computed from
/// records alone so that re-reading the CSVs reproduces it exactly.
nlohmann::json summarize(const RunConfig& config, const Records& records,
                         const std::optional<nlohmann::json>& baseline_summary);

/// Last-rank K per block of a summary.
std::vector<int> summary_k_last(const nlohmann::json& summary);
/// No-fault iteration count per global step of a summary.
std::vector<int> summary_step_counts(const nlohmann::json& summary, int P);

/// No-fault iteration count per global step.
std::vector<int> step_iteration_counts(const SimulationResult& sim);

SimulationResult simulate(const Setup& setup, const FaultPlan* plan, RecoveryKind kind);

/// The plan a configuration asks for; bernoulli mode needs per-step
/// baseline counts unless it loads a plan file.
std::optional<FaultPlan> plan_for(const RunConfig& config, const std::vector<int>* baseline);

/// Runs `n` independent jobs on up to `threads` threads.
void parallel_for(int n, int threads, const std::function<void(int)>& job);
/// FTPIT_THREADS if set, else the hardware concurrency.
int default_thread_count();

struct RunOutcome {
  SimulationResult sim;
  Records records;
  nlohmann::json summary;
  std::optional<FaultPlan> plan;
};

RunOutcome cmd_run(const RunConfig& config, const std::optional<nlohmann::json>& baseline_summary);
void write_run_outputs(const std::string& dir, const RunOutcome& outcome);

struct HeatmapRow {
  RecoveryKind strategy;
  int step = 0;
  int iteration = 0;
  int k_total = 0;
  int k_add = 0;
  bool converged = true;
};

struct SweepOutcome {
  SimulationResult baseline;
  std::vector<HeatmapRow> rows;  // strategy order as given, then step, iteration
};

/// Cells (s, k) for k = 1..K of the no-fault last rank on every step. With
/// `per_step`, step s only gets the iterations it performs without faults.
SweepOutcome cmd_sweep_faults(const RunConfig& config, const std::vector<RecoveryKind>& strategies,
                              int threads, bool per_step = false);
void write_heatmap_csv(std::ostream& out, const std::vector<HeatmapRow>& rows);

struct StressRow {
  RecoveryKind strategy;
  int block = 0;
  int k_last_rank = 0;
  int k_add = 0;
  int n_faults = 0;
};

struct StressStrategyResult {
  RecoveryKind strategy;
  SimulationResult sim;
  double final_max_diff = 0;  // against the no-fault run, infinity norm
};

struct StressOutcome {
  SimulationResult baseline;
  FaultPlan plan;
  std::vector<StressStrategyResult> runs;
  std::vector<StressRow> rows;
};

StressOutcome cmd_stress(const RunConfig& config, const std::vector<RecoveryKind>& strategies,
                         int threads);
void write_stress_csv(std::ostream& out, const std::vector<StressRow>& rows);
nlohmann::json stress_summary(const RunConfig& config, const StressOutcome& outcome);

/// Formats a double so that reading it back gives the same value.
std::string format_double(double v);

}  // namespace ftpit
