#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "doctest.h"
#include "ftpit/config.hpp"
#include "ftpit/errors.hpp"
#include "ftpit/experiments.hpp"
#include "ftpit/faults.hpp"
#include "test_util.hpp"

using namespace ftpit;
using namespace ftpit::testing;

namespace {

int k_add(const char* problem, int step, int iteration, RecoveryKind kind) {
  const Setup s = build_setup(default_config(problem));
  const auto base = simulate(s, nullptr, kind);
  const FaultPlan plan = explicit_fault_plan({{step, iteration}});
  const auto sim = simulate(s, &plan, kind);
  REQUIRE(sim.blocks[0].converged);
  return compute_k_add(sim.blocks[0], base.blocks[0]);
}

struct Block {
  Setup setup;
  std::unique_ptr<BlockState> block;
  explicit Block(const char* problem, int iterations) : setup(build_setup(default_config(problem))) {
    block = std::make_unique<BlockState>(*setup.hierarchy, setup.options, 0, 0);
    predictor(*block, setup.initial_value());
    for (int k = 0; k < iterations; ++k) pfasst_iteration(*block);
  }
};

bool all_nan(const ProcessState& r) {
  for (const auto& lev : r.levels) {
    for (const auto& u : lev.U) if (!u.array().isNaN().all()) return false;
    if (!lev.u0.array().isNaN().all()) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("faults") {

TEST_CASE("injection wipes every level and is idempotent") {
  Block b("heat", 2);
  auto& r = b.block->ranks[3];
  inject_fault(r);
  CHECK(r.status == RankStatus::Failed);
  CHECK(all_nan(r));
  inject_fault(r);
  CHECK(r.status == RankStatus::Failed);
  CHECK(all_nan(r));
}

TEST_CASE("one-sided recovery spreads the received value") {
  Block b("heat", 3);
  auto& r = b.block->ranks[5];
  const Vector left = b.block->ranks[4].levels[0].end_value();
  inject_fault(r);
  recover_one_sided(*b.block, r, left);
  CHECK(r.status == RankStatus::Iterating);
  for (const auto& u : r.levels[0].U) CHECK((u.array() == left.array()).all());
  CHECK((r.levels[0].u0.array() == left.array()).all());
  for (const auto& lev : r.levels) {
    for (const auto& u : lev.U) CHECK(u.allFinite());
  }
}

TEST_CASE("two-sided recovery hits both end points") {
  Block b("heat", 3);
  auto& r = b.block->ranks[5];
  const Vector left = b.block->ranks[4].levels[0].end_value();
  const Vector right = b.block->ranks[6].levels[0].u0;
  inject_fault(r);
  recover_two_sided(*b.block, r, left, right);
  const auto& tab = r.levels[0].table();
  REQUIRE(tab.nodes(0) == 0.0);
  CHECK((r.levels[0].U.front().array() == left.array()).all());
  CHECK((r.levels[0].U.back().array() == right.array()).all());
  const double t = tab.nodes(2);
  CHECK(max_abs(r.levels[0].U[2] - ((1.0 - t) * left + t * right)) < 1e-15);
}

TEST_CASE("coarse correction stopping rules") {
  Block b("heat", 3);
  auto& r = b.block->ranks[5];
  const Vector left = b.block->ranks[4].levels[0].end_value();
  const Vector coarse_u0 = b.block->ranks[4].levels[1].end_value();
  inject_fault(r);
  recover_one_sided(*b.block, r, left);
  const NodeValues before = r.levels[0].U;
  CHECK(coarse_level_correction(*b.block, r, coarse_u0, 0, 0.0) == 0);
  CHECK(max_diff(r.levels[0].U, before) == 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(coarse_level_correction(*b.block, r, coarse_u0, 5, inf) == 1);
  CHECK(max_diff(r.levels[0].U, before) > 0.0);
  CHECK(coarse_level_correction(*b.block, r, coarse_u0, 3, 0.0) == 3);
}

TEST_CASE("heat fault at step 7 iteration 6") {
  const int plain = k_add("heat", 7, 6, RecoveryKind::OneSided);
  const int corr = k_add("heat", 7, 6, RecoveryKind::OneSidedCorr);
  CHECK(plain >= 4);
  CHECK(plain <= 5);
  CHECK(plain >= corr);
  CHECK(k_add("heat", 7, 6, RecoveryKind::TwoSidedCorr) <= 2);
  CHECK(k_add("heat", 7, 6, RecoveryKind::RestartBlock) == 6);
}

TEST_CASE("advection fault at step 7 iteration 6") {
  CHECK(k_add("advection", 7, 6, RecoveryKind::TwoSidedCorr) <= 3);
  CHECK(k_add("advection", 7, 6, RecoveryKind::RestartBlock) == 6);
}

TEST_CASE("recovery is exact for a zero right-hand side") {
  RunConfig c = default_config("dahlquist");
  c.lambda = 0.0;
  const Setup s = build_setup(c);
  const auto base = simulate(s, nullptr, RecoveryKind::OneSided);
  for (const auto kind : all_recovery_kinds()) {
    if (kind == RecoveryKind::RestartBlock) continue;
    const FaultPlan plan = explicit_fault_plan({{1, 1}});
    const auto sim = simulate(s, &plan, kind);
    CHECK(compute_k_add(sim.blocks[0], base.blocks[0]) == 0);
    CHECK(max_abs(sim.final_value - base.final_value) == 0.0);
  }
}

TEST_CASE("bernoulli faults on converged ranks are skipped and logged") {
  const Setup s = build_setup(default_config("heat"));
  const auto base = simulate(s, nullptr, RecoveryKind::OneSided);
  REQUIRE(base.blocks[0].iterations[0] < 8);
  FaultPlan plan;
  plan.mode = FaultMode::Bernoulli;
  plan.events = {{0, 8}};
  const auto sim = simulate(s, &plan, RecoveryKind::OneSided);
  REQUIRE(sim.blocks[0].faults.size() == 1);
  CHECK_FALSE(sim.blocks[0].faults[0].applied);
  CHECK(sim.blocks[0].faults[0].note.find("converged") != std::string::npos);
  CHECK(compute_k_add(sim.blocks[0], base.blocks[0]) == 0);

  plan.mode = FaultMode::ExplicitList;
  const auto hit = simulate(s, &plan, RecoveryKind::OneSided);
  CHECK(hit.blocks[0].faults[0].applied);
  CHECK(compute_k_add(hit.blocks[0], base.blocks[0]) > 0);
}

TEST_CASE("two-sided falls back on the last rank") {
  const Setup s = build_setup(default_config("heat"));
  const FaultPlan plan = explicit_fault_plan({{15, 3}});
  const auto sim = simulate(s, &plan, RecoveryKind::TwoSided);
  REQUIRE(sim.blocks[0].faults.size() == 1);
  CHECK(sim.blocks[0].faults[0].note == "last rank: one-sided fallback");
  CHECK(sim.blocks[0].converged);
}

TEST_CASE("compute_k_add") {
  const Setup s = build_setup(default_config("heat"));
  const auto base = simulate(s, nullptr, RecoveryKind::OneSided);
  CHECK(compute_k_add(base.blocks[0], base.blocks[0]) == 0);
}

TEST_CASE("fault plans") {
  const std::vector<int> baseline(640, 7);
  SUBCASE("p = 0 is empty") {
    CHECK(generate_fault_plan(FaultMode::Bernoulli, 0.0, 1, baseline).size() == 0);
  }
  SUBCASE("p = 1 hits every cell inside the baseline") {
    const std::vector<int> b{3, 5, 2};
    const auto plan = generate_fault_plan(FaultMode::Bernoulli, 1.0, 1, b);
    CHECK(plan.size() == 10);
    CHECK(plan.contains(1, 5));
    CHECK_FALSE(plan.contains(2, 3));
  }
  SUBCASE("count within three standard deviations") {
    const double n = 640.0 * 7.0, p = 0.03;
    const double sigma = std::sqrt(n * p * (1.0 - p));
    for (const std::uint64_t seed : {1ULL, 2017ULL, 99ULL}) {
      const auto plan = generate_fault_plan(FaultMode::Bernoulli, p, seed, baseline);
      CHECK(std::abs(static_cast<double>(plan.size()) - n * p) <= 3.0 * sigma);
    }
  }
  SUBCASE("seeded and reproducible") {
    const auto a = generate_fault_plan(FaultMode::Bernoulli, 0.03, 5, baseline);
    const auto b = generate_fault_plan(FaultMode::Bernoulli, 0.03, 5, baseline);
    const auto c = generate_fault_plan(FaultMode::Bernoulli, 0.03, 6, baseline);
    CHECK(a.events == b.events);
    CHECK(a.events != c.events);
  }
  SUBCASE("text round trip") {
    const auto a = generate_fault_plan(FaultMode::Bernoulli, 0.03, 2017, baseline);
    std::stringstream ss;
    write_fault_plan(ss, a);
    const auto b = read_fault_plan(ss);
    CHECK(b.events == a.events);
    CHECK(b.p == a.p);
    CHECK(b.seed == a.seed);
    CHECK(b.mode == FaultMode::Bernoulli);
  }
  SUBCASE("bad input") {
    CHECK_THROWS_AS(generate_fault_plan(FaultMode::ExplicitList, 0.1, 1, baseline), ConfigError);
    std::stringstream ss("# mode=bernoulli p=0.1 seed=1\nstep,iteration\n3;4\n");
    CHECK_THROWS_AS(read_fault_plan(ss), ConfigError);
    CHECK_THROWS_AS(load_fault_plan("/nonexistent/plan.txt"), ConfigError);
  }
}

TEST_CASE("coarse recovery sweeps stay within P in a stress run") {
  RunConfig c = load_config(FTPIT_SOURCE_DIR "/configs/grayscott_desk.json");
  c.fault_p = 0.1;
  const StressOutcome s = cmd_stress(c, {RecoveryKind::OneSidedCorr, RecoveryKind::TwoSidedCorr}, 1);
  int recovered = 0;
  for (const auto& r : s.runs) {
    CHECK_FALSE(r.sim.failed);
    for (const auto& b : r.sim.blocks) {
      for (const auto& f : b.faults) {
        if (!f.applied) continue;
        ++recovered;
        CHECK(f.n_rec <= c.P);
        CHECK(f.n_rec >= 1);
      }
    }
  }
  CHECK(recovered > 0);
  // every strategy saw the same plan
  for (const auto& r : s.runs) {
    std::vector<std::pair<int, int>> ev;
    for (const auto& b : r.sim.blocks)
      for (const auto& f : b.faults) ev.emplace_back(f.step, f.iteration);
    std::vector<std::pair<int, int>> ref;
    for (const auto& b : s.runs.front().sim.blocks)
      for (const auto& f : b.faults) ref.emplace_back(f.step, f.iteration);
    CHECK(ev == ref);
  }
}

TEST_CASE("strategy names") {
  for (const auto kind : all_recovery_kinds()) CHECK(parse_recovery_kind(to_string(kind)) == kind);
  CHECK(parse_recovery_kind("restart") == RecoveryKind::RestartBlock);
  CHECK(all_recovery_kinds().size() == 5);
  CHECK_THROWS_AS(parse_recovery_kind("three-sided"), ConfigError);
  CHECK(uses_coarse_correction(RecoveryKind::OneSidedCorr));
  CHECK_FALSE(uses_coarse_correction(RecoveryKind::TwoSided));
  CHECK(is_two_sided(RecoveryKind::TwoSidedCorr));
}

}  // TEST_SUITE
