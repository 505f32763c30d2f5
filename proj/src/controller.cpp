#include "ftpit/controller.hpp"

#include <algorithm>
#include <string>

#include "ftpit/errors.hpp"

namespace ftpit {

Hierarchy::Hierarchy(std::vector<LevelSpecPtr> lv, int prolong_order, bool full_weighting)
    : levels(std::move(lv)) {
  if (levels.empty()) throw ConfigError("hierarchy needs at least one level");
  for (size_t l = 0; l + 1 < levels.size(); ++l) {
    transfers.emplace_back(*levels[l], *levels[l + 1], prolong_order);
    transfers.back().space.set_full_weighting(full_weighting);
  }
}

std::string to_string(RankStatus status) {
  switch (status) {
    case RankStatus::Iterating: return "iterating";
    case RankStatus::Converged: return "converged";
    case RankStatus::Failed: return "failed";
  }
  return "?";
}

RankStatus parse_rank_status(const std::string& name) {
  if (name == "iterating") return RankStatus::Iterating;
  if (name == "converged") return RankStatus::Converged;
  if (name == "failed") return RankStatus::Failed;
  throw ConfigError("unknown rank status '" + name + "'");
}

BlockState::BlockState(const Hierarchy& h, const ControllerOptions& opts, int block, int first)
    : hierarchy(&h), options(opts), block_index(block), first_step(first) {
  if (opts.P < 1) throw ConfigError("P must be at least 1");
  const auto P = static_cast<size_t>(opts.P);
  ranks.resize(P);
  published.assign(P, std::vector<Vector>(h.levels.size()));
  for (int p = 0; p < opts.P; ++p) {
    auto& r = ranks[static_cast<size_t>(p)];
    r.rank = p;
    r.step = first + p;
    for (const auto& spec : h.levels) r.levels.emplace_back(spec, opts.dt, step_start(p));
    r.restricted.resize(h.levels.size());
    r.restricted_u0.resize(h.levels.size());
  }
  result.block = block;
  result.first_step = first;
  result.iterations.assign(P, 0);
  result.residuals.assign(P, {});
  result.statuses.assign(P, {});
  result.fault_flags.assign(P, {});
}

namespace {

void sweep_n(LevelState& level, int n) {
  for (int i = 0; i < n; ++i) sweep(level);
}

}  // namespace

const Vector& incoming_initial_value(const BlockState& block, int rank, int level) {
  if (rank == 0) return block.u0_levels[static_cast<size_t>(level)];
  return block.published[static_cast<size_t>(rank - 1)][static_cast<size_t>(level)];
}

void restrict_down(BlockState& block, ProcessState& r, bool sweep_intermediate) {
  const Hierarchy& h = *block.hierarchy;
  const int L = h.coarsest();
  for (int l = 0; l < L; ++l) {
    const auto lu = static_cast<size_t>(l);
    auto& fine = r.levels[lu];
    auto& coarse = r.levels[lu + 1];
    if (sweep_intermediate && l > 0) {
      block.published[static_cast<size_t>(r.rank)][lu] = fine.end_value();
      fine.u0 = incoming_initial_value(block, r.rank, l);
      sweep_n(fine, fine.spec->sweeps);
    }
    restrict_level(fine, h.transfers[lu], coarse);
    compute_fas_tau(fine, coarse, h.transfers[lu]);
    r.restricted[lu + 1] = coarse.U;
    r.restricted_u0[lu + 1] = coarse.u0;
  }
}

void predictor(BlockState& block, const Vector& u0) {
  const Hierarchy& h = *block.hierarchy;
  const int L = h.coarsest();
  const int P = block.options.P;

  block.u0_levels.assign(h.levels.size(), Vector());
  block.u0_levels[0] = u0;
  for (int l = 0; l < L; ++l) {
    block.u0_levels[static_cast<size_t>(l + 1)] =
        h.transfers[static_cast<size_t>(l)].space.restrict(block.u0_levels[static_cast<size_t>(l)]);
  }

  for (auto& r : block.ranks) {
    for (int l = 0; l <= L; ++l) {
      auto& lev = r.levels[static_cast<size_t>(l)];
      lev = LevelState(h.levels[static_cast<size_t>(l)], block.options.dt, block.step_start(r.rank));
    }
    spread_initial_value(r.levels[0], u0);
    restrict_down(block, r, false);
    r.status = RankStatus::Iterating;
    r.predictor_sweeps = 0;
  }

  // Stage s: ranks s..P-1 sweep the coarsest level; rank p > 0 first takes
  // its predecessor's end value from stage s - 1. Descending order keeps
  // the predecessor's value from the previous stage.
  for (int s = 0; s < P; ++s) {
    for (int p = P - 1; p >= s; --p) {
      auto& coarse = block.ranks[static_cast<size_t>(p)].levels[static_cast<size_t>(L)];
      if (s > 0 && p > 0) {
        coarse.u0 = block.ranks[static_cast<size_t>(p - 1)].levels[static_cast<size_t>(L)].end_value();
      }
      sweep(coarse);
      ++block.ranks[static_cast<size_t>(p)].predictor_sweeps;
    }
  }

  // Prolong the coarse guess, initial values included, up to the finest level.
  for (auto& r : block.ranks) {
    for (int l = L - 1; l >= 0; --l) {
      const auto lu = static_cast<size_t>(l);
      correct_initial_value(r.levels[lu], r.levels[lu + 1].u0, r.restricted_u0[lu + 1], h.transfers[lu]);
      coarse_correction(r.levels[lu], r.levels[lu + 1].U, r.restricted[lu + 1], h.transfers[lu]);
    }
    for (int l = 0; l <= L; ++l) {
      block.published[static_cast<size_t>(r.rank)][static_cast<size_t>(l)] =
          r.levels[static_cast<size_t>(l)].end_value();
    }
  }
}

void pfasst_iteration(BlockState& block) {
  const Hierarchy& h = *block.hierarchy;
  const int L = h.coarsest();
  ++block.iteration;
  const int k = block.iteration;

  for (auto& r : block.ranks) {
    const int p = r.rank;
    const auto pu = static_cast<size_t>(p);
    if (r.status == RankStatus::Converged) continue;
    if (r.status == RankStatus::Failed) {
      throw NumericalError("rank " + std::to_string(p) + " entered iteration " +
                           std::to_string(k) + " without recovery");
    }
    try {
      // the predecessor's value from the previous iteration is already in
      // its mailbox, ours goes out before the sweep
      auto& fine = r.levels[0];
      block.published[pu][0] = fine.end_value();
      fine.u0 = incoming_initial_value(block, p, 0);
      sweep_n(fine, fine.spec->sweeps);

      if (L > 0) {
        restrict_down(block, r, true);

        auto& coarsest = r.levels[static_cast<size_t>(L)];
        coarsest.u0 = incoming_initial_value(block, p, L);
        sweep_n(coarsest, coarsest.spec->sweeps);
        block.published[pu][static_cast<size_t>(L)] = coarsest.end_value();

        for (int l = L - 1; l >= 0; --l) {
          const auto lu = static_cast<size_t>(l);
          auto& lev = r.levels[lu];
          correct_initial_value(lev, r.levels[lu + 1].u0, r.restricted_u0[lu + 1], h.transfers[lu]);
          coarse_correction(lev, r.levels[lu + 1].U, r.restricted[lu + 1], h.transfers[lu]);
          if (l > 0) sweep_n(lev, lev.spec->sweeps);
        }
      }
    } catch (const NumericalError& e) {
      throw SolverError(std::string(e.what()) + " (rank " + std::to_string(p) + ", iteration " +
                        std::to_string(k) + ")");
    }

    ++r.iterations_done;
    const double res = compute_residual(r.levels[0]);
    r.residual_history.push_back(res);
    const bool pred_ok = p == 0 || block.ranks[pu - 1].status == RankStatus::Converged;
    if (res < block.options.tolerance && pred_ok) {
      r.status = RankStatus::Converged;
      r.converged_at = k;
      // a frozen mailbox carries the restricted fine end value so the
      // successor's coarse fixed point matches its fine one
      for (int l = 0; l < L; ++l) {
        block.published[pu][static_cast<size_t>(l + 1)] =
            h.transfers[static_cast<size_t>(l)].space.restrict(block.published[pu][static_cast<size_t>(l)]);
      }
    }
  }
}

namespace {

void record_iteration(BlockState& block) {
  for (auto& r : block.ranks) {
    const auto p = static_cast<size_t>(r.rank);
    const double res = r.residual_history.empty() ? 0.0 : r.residual_history.back();
    block.result.residuals[p].push_back(res);
    block.result.statuses[p].push_back(r.status);
    block.result.fault_flags[p].push_back(false);
  }
}

bool all_converged(const BlockState& block) {
  return std::all_of(block.ranks.begin(), block.ranks.end(),
                     [](const ProcessState& r) { return r.status == RankStatus::Converged; });
}

}  // namespace

BlockResult run_block(BlockState& block, const Vector& u0, BlockHooks* hooks) {
  predictor(block, u0);
  while (block.iteration < block.options.k_max) {
    pfasst_iteration(block);
    record_iteration(block);
    if (hooks) hooks->after_iteration(block);
    if (all_converged(block)) break;
  }
  auto& res = block.result;
  res.converged = all_converged(block);
  for (const auto& r : block.ranks) {
    res.iterations[static_cast<size_t>(r.rank)] =
        r.status == RankStatus::Converged ? r.converged_at : block.iteration;
  }
  res.end_value = block.ranks.back().levels[0].end_value();
  return res;
}

SimulationResult run_simulation(const Hierarchy& hierarchy, const ControllerOptions& options,
                                int total_steps, const Vector& u0, const HookFactory& hooks) {
  if (options.P < 1 || total_steps % options.P != 0) {
    throw ConfigError("number of steps must be divisible by P");
  }
  SimulationResult sim;
  Vector current = u0;
  const int blocks = total_steps / options.P;
  for (int b = 0; b < blocks; ++b) {
    BlockState block(hierarchy, options, b, b * options.P);
    auto hook = hooks ? hooks(b) : nullptr;
    sim.blocks.push_back(run_block(block, current, hook.get()));
    current = sim.blocks.back().end_value;
    if (!sim.blocks.back().converged) {
      sim.failed = true;
      break;
    }
  }
  sim.final_value = current;
  return sim;
}

}  // namespace ftpit
