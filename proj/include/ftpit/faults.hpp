#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ftpit/controller.hpp"

namespace ftpit {

enum class FaultMode { ExplicitList, Bernoulli };

std::string to_string(FaultMode mode);
FaultMode parse_fault_mode(const std::string& name);

/// Where faults strike: (global step, iteration) pairs. A fault at
/// iteration k hits after iteration k and before the next fine sweep.
struct FaultPlan {
  FaultMode mode = FaultMode::ExplicitList;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::set<std::pair<int, int>> events;
  std::vector<int> baseline;  // no-fault iteration count per global step

  bool contains(int step, int iteration) const { return events.count({step, iteration}) > 0; }
  std::size_t size() const { return events.size(); }
};

/// One Bernoulli(p) draw per (step, iteration), iteration running from 1 to
/// the baseline count of that step.
FaultPlan generate_fault_plan(FaultMode mode, double p, std::uint64_t seed,
                              const std::vector<int>& baseline);

FaultPlan explicit_fault_plan(std::vector<std::pair<int, int>> events);

void write_fault_plan(std::ostream& out, const FaultPlan& plan);
FaultPlan read_fault_plan(std::istream& in);
void save_fault_plan(const std::string& path, const FaultPlan& plan);
FaultPlan load_fault_plan(const std::string& path);

enum class RecoveryKind { RestartBlock, OneSided, OneSidedCorr, TwoSided, TwoSidedCorr };

std::string to_string(RecoveryKind kind);
RecoveryKind parse_recovery_kind(const std::string& name);
bool uses_coarse_correction(RecoveryKind kind);
bool is_two_sided(RecoveryKind kind);

/// The four interpolation strategies followed by restart.
const std::vector<RecoveryKind>& all_recovery_kinds();

/// Invalidates every value of the rank and marks it failed.
void inject_fault(ProcessState& rank);

/// Spreads `left` to all fine nodes and restricts to the coarser levels.
void recover_one_sided(BlockState& block, ProcessState& rank, const Vector& left);

/// Linear interpolation between `left` at tau = 0 and `right` at tau = 1.
void recover_two_sided(BlockState& block, ProcessState& rank, const Vector& left,
                       const Vector& right);

/// Sweeps the restricted coarsest level until `max_sweeps` sweeps are done or
/// its residual falls below `reference_residual`, then interpolates the
/// change back. Returns the number of coarse sweeps.
int coarse_level_correction(BlockState& block, ProcessState& rank, const Vector& coarse_u0,
                            int max_sweeps, double reference_residual);

/// Wipes all ranks and reruns the predictor. Iteration counters stay.
void restart_block(BlockState& block);

/// Last-rank iteration difference of a faulty block against its baseline.
int compute_k_add(const BlockResult& faulty, const BlockResult& baseline);

/// Applies a fault plan to a block and performs the chosen recovery.
class FaultInjector : public BlockHooks {
 public:
  FaultInjector(const FaultPlan& plan, RecoveryKind kind) : plan_(&plan), kind_(kind) {}
  void after_iteration(BlockState& block) override;

 private:
  const FaultPlan* plan_;
  RecoveryKind kind_;
};

}  // namespace ftpit
