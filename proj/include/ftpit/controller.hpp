#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ftpit/sweeper.hpp"
#include "ftpit/transfer.hpp"

namespace ftpit {

/// Level specifications ordered finest (0) to coarsest plus the transfer
/// operators between neighbouring levels.
struct Hierarchy {
  std::vector<LevelSpecPtr> levels;
  std::vector<TransferPair> transfers;  // transfers[l] maps level l <-> l + 1

  Hierarchy(std::vector<LevelSpecPtr> levels, int prolong_order = 2, bool full_weighting = false);
  int coarsest() const { return static_cast<int>(levels.size()) - 1; }
};

struct ControllerOptions {
  int P = 1;
  double dt = 0.1;
  double tolerance = 1e-9;
  int k_max = 50;
};

enum class RankStatus { Iterating, Converged, Failed };

std::string to_string(RankStatus status);
RankStatus parse_rank_status(const std::string& name);

/// One emulated time-parallel process owning the level stack of one step.
struct ProcessState {
  int rank = 0;
  int step = 0;
  std::vector<LevelState> levels;
  RankStatus status = RankStatus::Iterating;
  int iterations_done = 0;
  int converged_at = 0;
  int predictor_sweeps = 0;
  std::vector<double> residual_history;
  /// Coarse values right after restriction, per level (index 0 unused).
  std::vector<NodeValues> restricted;
  std::vector<Vector> restricted_u0;
};

struct FaultRecord {
  int step = 0;
  int iteration = 0;
  bool applied = false;
  std::string strategy;
  int n_rec = 0;
  std::string note;
};

struct BlockResult {
  int block = 0;
  int first_step = 0;
  std::vector<int> iterations;                 // K_p
  std::vector<std::vector<double>> residuals;  // [rank][iteration - 1]
  std::vector<std::vector<RankStatus>> statuses;
  std::vector<std::vector<bool>> fault_flags;
  std::vector<FaultRecord> faults;
  bool converged = false;
  Vector end_value;

  int k_last_rank() const { return iterations.empty() ? 0 : iterations.back(); }
};

/// Everything a block of P concurrently iterated steps needs. Published
/// end values stand in for the messages sent between ranks.
struct BlockState {
  const Hierarchy* hierarchy = nullptr;
  ControllerOptions options;
  int block_index = 0;
  int first_step = 0;
  int iteration = 0;
  std::vector<Vector> u0_levels;  // block initial value on every level
  std::vector<ProcessState> ranks;
  std::vector<std::vector<Vector>> published;  // [rank][level]
  BlockResult result;

  BlockState(const Hierarchy& hierarchy, const ControllerOptions& options, int block_index,
             int first_step);

  int num_levels() const { return static_cast<int>(hierarchy->levels.size()); }
  double step_start(int rank) const { return (first_step + rank) * options.dt; }
};

/// Called between iterations; the fault module plugs in here.
class BlockHooks {
 public:
  virtual ~BlockHooks() = default;
  virtual void after_iteration(BlockState& block) = 0;
};

/// Initial value a rank receives on `level`: the block initial value for
/// rank 0, otherwise the predecessor's mailbox.
const Vector& incoming_initial_value(const BlockState& block, int rank, int level);

/// Restriction with tau from the finest level down to the coarsest. With
/// `sweep_intermediate`, levels strictly between fine and coarsest take the
/// predecessor's value and sweep before being restricted further.
void restrict_down(BlockState& block, ProcessState& rank, bool sweep_intermediate);

/// Spreads u0 on every rank, performs rank + 1 pipelined coarse sweeps on
/// rank `rank` and prolongs the result to the finer levels. Leaves iteration
/// counters untouched.
void predictor(BlockState& block, const Vector& u0);

/// One PFASST V-cycle on every non-converged rank, in ascending rank order.
void pfasst_iteration(BlockState& block);

/// Predictor followed by iterations until every rank has converged or
/// k_max is reached.
BlockResult run_block(BlockState& block, const Vector& u0, BlockHooks* hooks = nullptr);

struct SimulationResult {
  std::vector<BlockResult> blocks;
  bool failed = false;
  Vector final_value;
};

using HookFactory = std::function<std::unique_ptr<BlockHooks>(int block_index)>;

SimulationResult run_simulation(const Hierarchy& hierarchy, const ControllerOptions& options,
                                int total_steps, const Vector& u0,
                                const HookFactory& hooks = nullptr);

}  // namespace ftpit
