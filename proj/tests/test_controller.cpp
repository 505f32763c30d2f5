#include <cmath>
#include <limits>
#include <memory>

#include "doctest.h"
#include "ftpit/config.hpp"
#include "ftpit/controller.hpp"
#include "ftpit/errors.hpp"
#include "ftpit/experiments.hpp"
#include "test_util.hpp"

using namespace ftpit;
using namespace ftpit::testing;

namespace {

struct Recorder : BlockHooks {
  std::vector<NodeValues> iterates;
  std::vector<NodeValues> taus;
  void after_iteration(BlockState& block) override {
    iterates.push_back(block.ranks[0].levels[0].U);
    taus.push_back(block.ranks[0].levels[1].tau);
  }
};

ControllerOptions opts(int P, double dt, double tol, int k_max = 50) {
  ControllerOptions o;
  o.P = P;
  o.dt = dt;
  o.tolerance = tol;
  o.k_max = k_max;
  return o;
}

}  // namespace

TEST_SUITE("controller") {

TEST_CASE("predictor sweep counts follow the rank") {
  auto spec = LevelSpec::make(std::make_shared<HeatProblem>(0.5, 15), NodeKind::GaussLobatto, 3,
                              PreconditionerKind::ImplicitEuler);
  auto coarse = LevelSpec::make(spec->problem->with_resolution(7), NodeKind::GaussLobatto, 3,
                                PreconditionerKind::ImplicitEuler);
  Hierarchy h({spec, coarse}, 6, true);
  for (const int P : {1, 4}) {
    BlockState block(h, opts(P, 0.5, 1e-9), 0, 0);
    predictor(block, spec->problem->initial_condition(0.0));
    for (int p = 0; p < P; ++p) CHECK(block.ranks[static_cast<size_t>(p)].predictor_sweeps == p + 1);
    CHECK(block.iteration == 0);
  }
}

TEST_CASE("predictor keeps constant data for a zero right-hand side") {
  auto spec = LevelSpec::make(std::make_shared<DahlquistProblem>(0.0), NodeKind::GaussRadauRight, 3,
                              PreconditionerKind::LU);
  Hierarchy h({spec, spec});
  BlockState block(h, opts(4, 0.1, 1e-12), 0, 0);
  Vector u0(1);
  u0 << 3.0;
  predictor(block, u0);
  for (const auto& r : block.ranks) {
    for (const auto& lev : r.levels) {
      for (const auto& u : lev.U) CHECK(u(0) == 3.0);
    }
  }
  const BlockResult res = run_block(block, u0);
  CHECK(res.converged);
  for (int k : res.iterations) CHECK(k == 1);
  for (const auto& r : res.residuals) CHECK(r.front() == 0.0);
}

TEST_CASE("one rank with identical levels is SDC with two sweeps per iteration") {
  for (const auto problem : {"dahlquist", "heat"}) {
    ProblemPtr prob;
    if (std::string(problem) == "dahlquist") prob = std::make_shared<DahlquistProblem>(-1.0);
    else prob = std::make_shared<HeatProblem>(0.5, 31);
    auto spec = LevelSpec::make(prob, NodeKind::GaussLobatto, 5, PreconditionerKind::ImplicitEuler);
    Hierarchy h({spec, spec}, 6, true);
    BlockState block(h, opts(1, 0.5, 0.0, 6), 0, 0);
    const Vector u0 = prob->initial_condition(0.0);
    Recorder rec;
    run_block(block, u0, &rec);
    REQUIRE(rec.iterates.size() == 6);

    LevelState sdc = spread_level(spec, 0.5, u0);
    sweep(sdc);
    for (size_t k = 0; k < rec.iterates.size(); ++k) {
      sweep(sdc);
      sweep(sdc);
      CHECK(max_diff(rec.iterates[k], sdc.U) <= 1e-13 * (1.0 + max_abs(u0)));
      for (const auto& t : rec.taus[k]) CHECK(max_abs(t) <= 1e-14);
    }
  }
}

TEST_CASE("infinite tolerance converges in the first iteration") {
  RunConfig c = default_config("heat");
  c.tolerance = std::numeric_limits<double>::infinity();
  const Setup s = build_setup(c);
  const auto sim = simulate(s, nullptr, c.strategy);
  for (int k : sim.blocks[0].iterations) CHECK(k == 1);
}

TEST_CASE("heat and advection prototypes") {
  const auto heat = simulate(build_setup(default_config("heat")), nullptr, RecoveryKind::OneSided);
  CHECK(heat.blocks.size() == 1);
  CHECK(heat.blocks[0].converged);
  CHECK(std::abs(heat.blocks[0].k_last_rank() - 9) <= 2);
  for (size_t p = 1; p < heat.blocks[0].iterations.size(); ++p) {
    CHECK(heat.blocks[0].iterations[p] >= heat.blocks[0].iterations[p - 1]);
  }
  const auto adv = simulate(build_setup(default_config("advection")), nullptr, RecoveryKind::OneSided);
  CHECK(adv.blocks[0].converged);
  CHECK(std::abs(adv.blocks[0].k_last_rank() - 11) <= 2);
  CHECK(heat.blocks[0].residuals.back().back() < 1e-9);
}

TEST_CASE("blocks") {
  RunConfig c = default_config("heat");
  c.steps = 32;
  const Setup s = build_setup(c);
  const auto sim = simulate(s, nullptr, c.strategy);
  CHECK(sim.blocks.size() == 2);
  CHECK(sim.blocks[1].first_step == 16);
  // the second block starts from the end of the first
  BlockState b0(*s.hierarchy, s.options, 0, 0);
  const auto r0 = run_block(b0, s.initial_value());
  CHECK(max_abs(r0.end_value - sim.blocks[0].end_value) == 0.0);
  CHECK(sim.blocks.back().end_value.size() == sim.final_value.size());

  ControllerOptions o = s.options;
  CHECK_THROWS_AS(run_simulation(*s.hierarchy, o, 17, s.initial_value()), ConfigError);
}

TEST_CASE("final state approximates the exact heat solution") {
  const Setup s = build_setup(default_config("heat"));
  const auto sim = simulate(s, nullptr, RecoveryKind::OneSided);
  const Vector exact = s.problem->exact_solution(8.0).value();
  CHECK(max_abs(sim.final_value - exact) < 1e-3);
}

TEST_CASE("rank status names") {
  for (const auto st : {RankStatus::Iterating, RankStatus::Converged, RankStatus::Failed}) {
    CHECK(parse_rank_status(to_string(st)) == st);
  }
}

}  // TEST_SUITE
