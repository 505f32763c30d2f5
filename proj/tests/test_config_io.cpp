#include <sstream>
#include <string>

#include "doctest.h"
#include "ftpit/config.hpp"
#include "ftpit/errors.hpp"
#include "ftpit/experiments.hpp"

using namespace ftpit;
using nlohmann::json;

namespace {

std::string residual_csv(const RunOutcome& r) {
  std::ostringstream out;
  write_residuals_csv(out, r.records.residuals);
  return out.str();
}

std::string fault_csv(const RunOutcome& r) {
  std::ostringstream out;
  write_faults_csv(out, r.records.faults);
  return out.str();
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults and overrides") {
  const RunConfig heat = config_from_json(json{{"problem", "heat"}});
  CHECK(heat.P == 16);
  CHECK(heat.dt == 0.5);
  CHECK(heat.blocks() == 1);
  CHECK(heat.levels.size() == 2);
  CHECK(heat.levels[0].N == 255);
  CHECK(heat.levels[1].N == 127);
  CHECK(heat.tolerance == 1e-9);

  const RunConfig c = config_from_json(json{{"problem", "heat"}, {"T", 8}, {"grid", {511, 255}},
                                             {"M", {5, 3}}, {"preconditioner", {"lu", "implicit-euler"}}});
  CHECK(c.steps == 16);
  CHECK(c.levels[0].N == 511);
  CHECK(c.levels[1].M == 3);
  CHECK(c.levels[0].preconditioner == PreconditionerKind::LU);
}

TEST_CASE("gray-scott full configuration has twenty blocks") {
  const RunConfig c = load_config(FTPIT_SOURCE_DIR "/configs/grayscott_full.json");
  CHECK(c.steps == 640);
  CHECK(c.P == 32);
  CHECK(c.blocks() == 20);
}

TEST_CASE("invalid configurations") {
  CHECK_THROWS_AS(config_from_json(json{{"problem", "heat"}, {"typo", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"problem", "wave"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"problem", "heat"}, {"steps", 17}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"problem", "heat"}, {"dt", -1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"problem", "heat"}, {"T", 8}, {"steps", 16}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"problem", "heat"}, {"fault_p", 2}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"problem", "heat"}, {"prolong_order", 5}}), ConfigError);
  // nesting is a property of the hierarchy, checked when it is built
  CHECK_THROWS_AS(build_setup(config_from_json(json{{"problem", "heat"}, {"grid", {255, 100}}})),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"problem", "heat"}, {"M", {5, 3, 2}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"problem", "heat"}, {"fault_events", {1, 2}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"problem", "heat"}, {"strategy", "none"}}), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
}

TEST_CASE("json round trip") {
  RunConfig c = config_from_json(json{{"problem", "advection"}, {"seed", 77}, {"strategy", "one-sided"},
                                       {"fault_mode", "explicit"}, {"fault_events", {{3, 2}}}});
  const RunConfig d = config_from_json(config_to_json(c));
  CHECK(config_to_json(d) == config_to_json(c));
  CHECK(d.seed == 77);
  CHECK(d.fault_events.size() == 1);
}

}  // TEST_SUITE

TEST_SUITE("records") {

TEST_CASE("run outputs are deterministic and round trip through CSV") {
  RunConfig c = default_config("heat");
  c.run_id = "rt";
  c.fault_mode = "explicit";
  c.fault_events = {{7, 6}};
  c.strategy = RecoveryKind::OneSidedCorr;
  const RunOutcome a = cmd_run(c, std::nullopt);
  const RunOutcome b = cmd_run(c, std::nullopt);
  CHECK(residual_csv(a) == residual_csv(b));
  CHECK(fault_csv(a) == fault_csv(b));
  CHECK(residual_csv(a).rfind(std::string(kResidualHeader) + "\n", 0) == 0);

  std::istringstream rin(residual_csv(a)), fin(fault_csv(a));
  Records back;
  back.residuals = read_residuals_csv(rin);
  back.faults = read_faults_csv(fin);
  CHECK(back.residuals.size() == a.records.residuals.size());
  CHECK(summarize(c, back, std::nullopt) == a.summary);
  std::ostringstream again;
  write_residuals_csv(again, back.residuals);
  CHECK(again.str() == residual_csv(a));

  REQUIRE(a.summary["blocks"].size() == 1);
  CHECK(a.summary["blocks"][0]["n_faults"] == 1);
}

TEST_CASE("summary against a baseline reports K_add") {
  RunConfig c = default_config("heat");
  const RunOutcome base = cmd_run(c, std::nullopt);
  CHECK(std::abs(base.summary["blocks"][0]["k_last_rank"].get<int>() - 9) <= 2);
  c.fault_mode = "explicit";
  c.fault_events = {{7, 6}};
  c.strategy = RecoveryKind::RestartBlock;
  const RunOutcome f = cmd_run(c, base.summary);
  CHECK(f.summary["blocks"][0]["k_add"] == 6);
  CHECK(summary_k_last(base.summary) == std::vector<int>{base.sim.blocks[0].k_last_rank()});
  CHECK(summary_step_counts(base.summary, c.P) == step_iteration_counts(base.sim));
}

TEST_CASE("bad CSV input") {
  std::istringstream wrong("run_id,block\n");
  CHECK_THROWS_AS(read_residuals_csv(wrong), ConfigError);
  std::istringstream bad(std::string(kResidualHeader) + "\nx,0,0,0,1,abc,iterating,0\n");
  CHECK_THROWS_AS(read_residuals_csv(bad), ConfigError);
}

TEST_CASE("format_double round trips") {
  for (const double v : {0.1, 1e-300, 5.491362919940457e-11, -3.0, 0.03}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](int i) { hits[static_cast<size_t>(i)] += 1; });
  for (int h : hits) CHECK(h == 1);
}

}  // TEST_SUITE
