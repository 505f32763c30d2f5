#include "ftpit/faults.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "ftpit/errors.hpp"

namespace ftpit {

std::string to_string(FaultMode mode) {
  return mode == FaultMode::Bernoulli ? "bernoulli" : "explicit";
}

FaultMode parse_fault_mode(const std::string& name) {
  if (name == "bernoulli") return FaultMode::Bernoulli;
  if (name == "explicit" || name == "explicit-list") return FaultMode::ExplicitList;
  throw ConfigError("unknown fault mode '" + name + "'");
}

FaultPlan generate_fault_plan(FaultMode mode, double p, std::uint64_t seed,
                              const std::vector<int>& baseline) {
  if (mode != FaultMode::Bernoulli) {
    throw ConfigError("only bernoulli plans are generated; explicit plans list their events");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("fault probability must lie in [0, 1]");
  FaultPlan plan;
  plan.mode = mode;
  plan.p = p;
  plan.seed = seed;
  plan.baseline = baseline;
  std::mt19937_64 rng(seed);
  for (size_t step = 0; step < baseline.size(); ++step) {
    for (int k = 1; k <= baseline[step]; ++k) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u < p) plan.events.emplace(static_cast<int>(step), k);
    }
  }
  return plan;
}

FaultPlan explicit_fault_plan(std::vector<std::pair<int, int>> events) {
  FaultPlan plan;
  for (const auto& [step, it] : events) {
    if (step < 0 || it < 1) {
      throw ConfigError("fault event (" + std::to_string(step) + ", " + std::to_string(it) +
                        ") needs step >= 0 and iteration >= 1");
    }
    plan.events.emplace(step, it);
  }
  return plan;
}

void write_fault_plan(std::ostream& out, const FaultPlan& plan) {
  char p[64];
  const auto res = std::to_chars(p, p + sizeof p, plan.p);
  out << "# mode=" << to_string(plan.mode) << " p=" << std::string(p, res.ptr) << " seed=" << plan.seed << "\n";
  out << "step,iteration\n";
  for (const auto& [step, it] : plan.events) out << step << "," << it << "\n";
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& text, int line_no) {
  try {
    size_t used = 0;
    const int v = std::stoi(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("fault plan line " + std::to_string(line_no) + ": '" + text +
                    "' is not an integer");
}

}  // namespace

FaultPlan read_fault_plan(std::istream& in) {
  FaultPlan plan;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string kv;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        try {
          if (key == "mode") plan.mode = parse_fault_mode(value);
          else if (key == "p") plan.p = std::stod(value);
          else if (key == "seed") plan.seed = std::stoull(value);
        } catch (const std::logic_error&) {
          throw ConfigError("fault plan header: bad value for '" + key + "'");
        }
      }
      continue;
    }
    if (line == "step,iteration") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("fault plan line " + std::to_string(line_no) + ": expected step,iteration");
    }
    const int step = parse_int(line.substr(0, comma), line_no);
    const int it = parse_int(line.substr(comma + 1), line_no);
    if (step < 0 || it < 1) {
      throw ConfigError("fault plan line " + std::to_string(line_no) + ": out-of-range event");
    }
    plan.events.emplace(step, it);
  }
  return plan;
}

void save_fault_plan(const std::string& path, const FaultPlan& plan) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write fault plan '" + path + "'");
  write_fault_plan(out, plan);
}

FaultPlan load_fault_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read fault plan '" + path + "'");
  return read_fault_plan(in);
}

std::string to_string(RecoveryKind kind) {
  switch (kind) {
    case RecoveryKind::RestartBlock: return "restart-block";
    case RecoveryKind::OneSided: return "one-sided";
    case RecoveryKind::OneSidedCorr: return "one-sided-corr";
    case RecoveryKind::TwoSided: return "two-sided";
    case RecoveryKind::TwoSidedCorr: return "two-sided-corr";
  }
  return "?";
}

RecoveryKind parse_recovery_kind(const std::string& name) {
  if (name == "restart-block" || name == "restart") return RecoveryKind::RestartBlock;
  if (name == "one-sided") return RecoveryKind::OneSided;
  if (name == "one-sided-corr") return RecoveryKind::OneSidedCorr;
  if (name == "two-sided") return RecoveryKind::TwoSided;
  if (name == "two-sided-corr") return RecoveryKind::TwoSidedCorr;
  throw ConfigError("unknown recovery strategy '" + name + "'");
}

bool uses_coarse_correction(RecoveryKind kind) {
  return kind == RecoveryKind::OneSidedCorr || kind == RecoveryKind::TwoSidedCorr;
}

bool is_two_sided(RecoveryKind kind) {
  return kind == RecoveryKind::TwoSided || kind == RecoveryKind::TwoSidedCorr;
}

const std::vector<RecoveryKind>& all_recovery_kinds() {
  static const std::vector<RecoveryKind> kinds = {
      RecoveryKind::OneSided, RecoveryKind::OneSidedCorr, RecoveryKind::TwoSided,
      RecoveryKind::TwoSidedCorr, RecoveryKind::RestartBlock};
  return kinds;
}

void inject_fault(ProcessState& rank) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto wipe = [nan](NodeValues& values) {
    for (auto& v : values) v.setConstant(nan);
  };
  for (auto& lev : rank.levels) {
    lev.u0.setConstant(nan);
    wipe(lev.U);
    wipe(lev.F_impl);
    wipe(lev.F_expl);
    wipe(lev.tau);
  }
  rank.status = RankStatus::Failed;
}

namespace {

// Fresh level stack whose finest level holds `values` with initial value
// `left`; coarser levels come from restriction.
void repopulate(BlockState& block, ProcessState& rank, const Vector& left, NodeValues values) {
  const Hierarchy& h = *block.hierarchy;
  for (size_t l = 0; l < h.levels.size(); ++l) {
    rank.levels[l] = LevelState(h.levels[l], block.options.dt, block.step_start(rank.rank));
  }
  auto& fine = rank.levels[0];
  fine.u0 = left;
  fine.U = std::move(values);
  evaluate_rhs(fine);
  restrict_down(block, rank, false);
  rank.status = RankStatus::Iterating;
  rank.converged_at = 0;
}

}  // namespace

void recover_one_sided(BlockState& block, ProcessState& rank, const Vector& left) {
  const int M = block.hierarchy->levels[0]->table->M;
  repopulate(block, rank, left, NodeValues(static_cast<size_t>(M), left));
}

void recover_two_sided(BlockState& block, ProcessState& rank, const Vector& left,
                       const Vector& right) {
  const auto& nodes = block.hierarchy->levels[0]->table->nodes;
  NodeValues values;
  values.reserve(nodes.size());
  for (const double tau : nodes) values.push_back((1.0 - tau) * left + tau * right);
  repopulate(block, rank, left, std::move(values));
}

int coarse_level_correction(BlockState& block, ProcessState& rank, const Vector& coarse_u0,
                            int max_sweeps, double reference_residual) {
  const Hierarchy& h = *block.hierarchy;
  const int L = h.coarsest();
  if (L == 0 || max_sweeps <= 0) return 0;
  restrict_down(block, rank, false);
  auto& coarse = rank.levels[static_cast<size_t>(L)];
  coarse.u0 = coarse_u0;
  int n = 0;
  while (n < max_sweeps) {
    sweep(coarse);
    ++n;
    if (compute_residual(coarse) < reference_residual) break;
  }
  for (int l = L - 1; l >= 0; --l) {
    const auto lu = static_cast<size_t>(l);
    coarse_correction(rank.levels[lu], rank.levels[lu + 1].U, rank.restricted[lu + 1], h.transfers[lu]);
  }
  return n;
}

void restart_block(BlockState& block) {
  const Vector u0 = block.u0_levels.at(0);
  for (auto& r : block.ranks) r.converged_at = 0;
  predictor(block, u0);
}

int compute_k_add(const BlockResult& faulty, const BlockResult& baseline) {
  if (faulty.block != baseline.block || faulty.first_step != baseline.first_step ||
      faulty.iterations.size() != baseline.iterations.size()) {
    throw ConfigError("K_add needs results of the same block and configuration");
  }
  return faulty.k_last_rank() - baseline.k_last_rank();
}

void FaultInjector::after_iteration(BlockState& block) {
  const int k = block.iteration;
  const int P = block.options.P;
  const int L = block.hierarchy->coarsest();

  std::vector<int> hit;
  std::vector<size_t> record_of;
  for (const auto& r : block.ranks) {
    if (!plan_->contains(r.step, k)) continue;
    FaultRecord rec;
    rec.step = r.step;
    rec.iteration = k;
    rec.strategy = to_string(kind_);
    if (r.status == RankStatus::Converged && plan_->mode == FaultMode::Bernoulli) {
      rec.note = "skipped: rank already converged";
      block.result.faults.push_back(rec);
      continue;
    }
    rec.applied = true;
    block.result.faults.push_back(rec);
    hit.push_back(r.rank);
    record_of.push_back(block.result.faults.size() - 1);
    block.result.fault_flags[static_cast<size_t>(r.rank)].back() = true;
  }
  if (hit.empty()) return;

  if (kind_ == RecoveryKind::RestartBlock) {
    for (const size_t i : record_of) block.result.faults[i].note = "block restarted";
    restart_block(block);
    return;
  }

  std::vector<int> converged_at(static_cast<size_t>(P), 0);
  for (const auto& r : block.ranks) {
    if (r.status == RankStatus::Converged) converged_at[static_cast<size_t>(r.rank)] = r.converged_at;
  }
  for (const int p : hit) inject_fault(block.ranks[static_cast<size_t>(p)]);
  // a converged rank that lost its data drags its converged successors back
  for (int q = hit.front() + 1; q < P; ++q) {
    auto& r = block.ranks[static_cast<size_t>(q)];
    if (r.status == RankStatus::Converged) {
      r.status = RankStatus::Iterating;
      r.converged_at = 0;
    }
  }

  for (size_t i = 0; i < hit.size(); ++i) {
    const int p = hit[i];
    auto& rank = block.ranks[static_cast<size_t>(p)];
    auto& rec = block.result.faults[record_of[i]];
    const Vector left =
        p == 0 ? block.u0_levels[0] : block.ranks[static_cast<size_t>(p - 1)].levels[0].end_value();

    if (is_two_sided(kind_)) {
      const bool have_right =
          p + 1 < P && block.ranks[static_cast<size_t>(p + 1)].status != RankStatus::Failed;
      if (have_right) {
        const Vector right = block.ranks[static_cast<size_t>(p + 1)].levels[0].u0;
        recover_two_sided(block, rank, left, right);
      } else {
        recover_one_sided(block, rank, left);
        rec.note = p + 1 < P ? "successor failed: one-sided fallback"
                             : "last rank: one-sided fallback";
      }
    } else {
      recover_one_sided(block, rank, left);
    }

    if (uses_coarse_correction(kind_)) {
      const auto lu = static_cast<size_t>(L);
      const Vector coarse_u0 =
          p == 0 ? block.u0_levels[lu]
                 : block.ranks[static_cast<size_t>(p - 1)].levels[lu].end_value();
      const double reference =
          p == 0 ? 0.0 : compute_residual(block.ranks[static_cast<size_t>(p - 1)].levels[lu]);
      rec.n_rec = coarse_level_correction(block, rank, coarse_u0, std::min(k, P), reference);
    }
  }

  // Ranks that were converged keep that status if the recovered data still
  // passes the convergence test; only exact recoveries do.
  for (int q = hit.front(); q < P; ++q) {
    const auto qu = static_cast<size_t>(q);
    auto& r = block.ranks[qu];
    const bool pred_ok = q == 0 || block.ranks[qu - 1].status == RankStatus::Converged;
    if (converged_at[qu] == 0 || !pred_ok) break;
    if (!(compute_residual(r.levels[0]) < block.options.tolerance)) break;
    r.status = RankStatus::Converged;
    r.converged_at = converged_at[qu];
    if (std::find(hit.begin(), hit.end(), q) == hit.end()) continue;
    block.published[qu][0] = r.levels[0].end_value();
    for (int l = 0; l < L; ++l) {
      const auto lu = static_cast<size_t>(l);
      block.published[qu][lu + 1] = block.hierarchy->transfers[lu].space.restrict(block.published[qu][lu]);
    }
  }
}

}  // namespace ftpit
