#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "paclab/bench.hpp"

using namespace paclab;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.master_seed = 31337;
  cfg.m_grid = {64, 128};
  cfg.arms = {"bagging"};
  cfg.repetitions = 2;
  cfg.eval_samples = 2000;
  return cfg;
}

}  // namespace

TEST_CASE("config validation identifies fields") {
  json j = {{"m_grid", json::array({128, 64})}};
  try {
    ExperimentConfig::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("m_grid") != std::string::npos);
  }

  CHECK_THROWS_AS(ExperimentConfig::from_json({{"n_rule", 0.001}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"delta", 1.5}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"arms", json::array({"bogus"})}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"t_rule", "sometimes"}}), ConfigError);
  CHECK_NOTHROW(ExperimentConfig::from_json({{"t_rule", 17}}));
}

TEST_CASE("config round-trips through json") {
  ExperimentConfig cfg = small_config();
  ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(back.m_grid == cfg.m_grid);
  CHECK(back.arms == cfg.arms);
  CHECK(back.repetitions == cfg.repetitions);
}

TEST_CASE("sweep emits the stable csv schema") {
  SweepResult res = run_sweep(small_config());
  std::istringstream lines(res.csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "arm,m,n,t,mean_loss,ci_halfwidth,repetitions,eval_samples,seed");
  size_t rows = 0;
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 2);  // one arm, two m values
}

TEST_CASE("auto vote count lands in the t column") {
  ExperimentConfig cfg = small_config();
  cfg.m_grid = {100};
  cfg.delta = 0.1;
  SweepResult res = run_sweep(cfg);
  REQUIRE(res.cells.size() == 1);
  CHECK(res.cells[0].t == 137);
  CHECK(res.csv.find(",100,50,137,") != std::string::npos);
}

TEST_CASE("sweeps are byte-identical across runs and replays") {
  ExperimentConfig cfg = small_config();
  SweepResult a = run_sweep(cfg);
  SweepResult b = run_sweep(cfg);
  CHECK(a.csv == b.csv);

  // replaying the manifest reproduces the same csv
  ExperimentConfig replay = ExperimentConfig::from_json(a.manifest);
  SweepResult c = run_sweep(replay);
  CHECK(c.csv == a.csv);
}

TEST_CASE("thread cap does not change results") {
  ExperimentConfig cfg = small_config();
  SweepResult one = run_sweep(cfg, 1);
  SweepResult many = run_sweep(cfg, 4);
  CHECK(one.csv == many.csv);
}

TEST_CASE("paired arms share training and evaluation streams") {
  ExperimentConfig cfg = small_config();
  cfg.arms = {"erm", "bagging", "erm"};
  // duplicate arm must reproduce identical numbers: same streams at (m, rep)
  SweepResult res = run_sweep(cfg);
  REQUIRE(res.cells.size() == 6);
  for (size_t i = 0; i < 2; ++i)
    CHECK(res.cells[i].mean_loss == res.cells[4 + i].mean_loss);
}

TEST_CASE("bagging cells record the regime flag") {
  ExperimentConfig cfg = small_config();
  SweepResult res = run_sweep(cfg);
  for (const auto& cell : res.cells) CHECK(cell.guarantee_regime);
  const json& cells = res.manifest["arms"]["bagging"]["cells"];
  for (const auto& c : cells) CHECK(c["guarantee_regime"].get<bool>());
}

TEST_CASE("hanneke arm records rounded sizes in the manifest") {
  ExperimentConfig cfg = small_config();
  cfg.arms = {"hanneke"};
  cfg.m_grid = {100};  // rounds down to 64
  SweepResult res = run_sweep(cfg);
  REQUIRE(res.cells.size() == 1);
  CHECK(res.cells[0].m_requested == 100);
  CHECK(res.cells[0].m_used == 64);
  CHECK(res.cells[0].t == 27);
  CHECK(res.cells[0].n == 43);
  const json& cell = res.manifest["arms"]["hanneke"]["cells"][0];
  CHECK(cell["m"] == 100);
  CHECK(cell["m_used"] == 64);
}

TEST_CASE("exact report carries the contract fields") {
  ExperimentConfig cfg;
  cfg.master_seed = 5;
  cfg.exact.m = 3;
  cfg.exact.n = 2;
  cfg.exact.trials = 200;
  json rep = exact_report(cfg, EnumerationBudget{});
  CHECK(rep["enumerated_members"] == 9);
  CHECK(rep["gamma_values"].size() == 2);
  CHECK(rep["gamma_values"][0] == 0.0);
  CHECK(rep["gamma_values"][1] == Catch::Approx(1.0 / 3.0));
  CHECK(rep["margin_loss"].contains("0"));
  CHECK(rep["margin_loss"].contains("1/3"));
  CHECK(rep["pmf_crosscheck"]["exact_match"] == true);
  CHECK(rep["loss_relation"].contains("violation_rate"));
}

TEST_CASE("exact report surfaces the offending budget") {
  ExperimentConfig cfg;
  cfg.exact.m = 50;
  cfg.exact.n = 8;
  try {
    exact_report(cfg, EnumerationBudget{1000});
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(std::string(e.what()).find("m=50") != std::string::npos);
  }
}

TEST_CASE("buckets report verdicts") {
  ExperimentConfig cfg;
  cfg.buckets.p0_grid = {{100, 100}, {128, 64}};
  json rep = buckets_report(cfg, EnumerationBudget{});
  CHECK(rep["p0_all_le_one_sixth"] == true);
  for (const auto& u : rep["uniformity"]) CHECK(u["two_stage_uniform"] == true);
  for (const auto& t : rep["margin_transfer"]) {
    CHECK(t["precondition_ok"] == true);
    CHECK(t["violations"] == 0);
  }
  bool saw_361 = false;
  for (const auto& s : rep["structure"]) {
    CHECK(s["ok"] == true);
    if (s["levels"] == 2) saw_361 = (s["leaf_count"] == 361);
  }
  CHECK(saw_361);
}

TEST_CASE("verify runs the named suites") {
  VerifyOutcome outcome = run_verify(EnumerationBudget{});
  CHECK(outcome.ok);
  std::vector<std::string> names;
  for (const auto& [name, pass] : outcome.suites) {
    names.push_back(name);
    CHECK(pass);
  }
  CHECK(std::find(names.begin(), names.end(), "lossG") != names.end());
  CHECK(std::find(names.begin(), names.end(), "p0") != names.end());
  CHECK(std::find(names.begin(), names.end(), "uniformity") != names.end());
  CHECK(std::find(names.begin(), names.end(), "subsample-structure") != names.end());
}

TEST_CASE("verify failure injection is visible and named") {
  VerifyOutcome outcome = run_verify(EnumerationBudget{}, "p0");
  CHECK_FALSE(outcome.ok);
  for (const auto& [name, pass] : outcome.suites)
    CHECK(pass == (name != "p0"));
}

TEST_CASE("double formatting is shortest-round-trip stable") {
  CHECK(fmt_double(0.5) == "0.5");
  CHECK(fmt_double(1.0 / 3.0) == fmt_double(1.0 / 3.0));
  double v = 0.1 + 0.2;
  CHECK(std::stod(fmt_double(v)) == v);
}
