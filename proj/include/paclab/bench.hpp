#pragma once

// Config-driven experiment runner and verification driver. Emits CSV for
// sweeps, JSON for verification reports, and a run manifest that reproduces
// results bit-exactly when replayed.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "paclab/buckets.hpp"
#include "paclab/concept_class.hpp"
#include "paclab/core.hpp"
#include "paclab/datagen.hpp"
#include "paclab/errors.hpp"
#include "paclab/estimation.hpp"
#include "paclab/exact.hpp"
#include "paclab/learners.hpp"
#include "paclab/parallel.hpp"
#include "paclab/rng.hpp"

namespace paclab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCsvHeader =
    "arm,m,n,t,mean_loss,ci_halfwidth,repetitions,eval_samples,seed";

using json = nlohmann::json;

inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_rational(const BigRational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

struct ExperimentConfig {
  uint64_t master_seed = 1;
  std::vector<uint32_t> m_grid = {64, 128, 256};
  double n_rule = 0.5;  // bootstrap size as a fraction of m
  double delta = 0.05;
  int64_t t_fixed = -1;  // -1 = auto (ceil(18 ln(2m/delta)))
  std::vector<std::string> arms = {"erm", "bagging"};

  struct ClassSpec {
    std::string kind = "threshold";  // threshold | hard_instance
    std::string tie_policy = "midpoint";
    uint32_t light_atoms = 64;
    double decay = 0.9;
    double heavy_mass = 0.5;
  } cls;

  struct DistSpec {
    std::string kind = "uniform01";
    double target_threshold = 0.5;
  } dist;

  uint64_t eval_samples = 100000;
  uint32_t repetitions = 50;

  struct ExactSpec {
    uint32_t m = 5;
    uint32_t n = 3;
    double delta = 0.1;
    int64_t t_fixed = -1;  // -1 = auto (ceil(18 ln(m/delta)))
    uint32_t trials = 2000;
    uint32_t support_points = 8;
    double target_threshold = 0.5;
  } exact;

  struct BucketsSpec {
    std::vector<std::pair<uint32_t, uint32_t>> p0_grid;  // empty = default grid
  } buckets;

  static ExperimentConfig from_json(const json& root);
  json to_json() const;
};

namespace cfgdetail {

template <typename T>
T field_or(const json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + name + "': wrong type");
  }
}

}  // namespace cfgdetail

inline ExperimentConfig ExperimentConfig::from_json(const json& root) {
  const json& j = root.contains("config") ? root.at("config") : root;  // manifest replay
  ExperimentConfig cfg;
  cfg.master_seed = cfgdetail::field_or<uint64_t>(j, "master_seed", cfg.master_seed);
  cfg.m_grid = cfgdetail::field_or<std::vector<uint32_t>>(j, "m_grid", cfg.m_grid);
  if (cfg.m_grid.empty()) throw ConfigError("field 'm_grid': must be non-empty");
  for (size_t i = 0; i + 1 < cfg.m_grid.size(); ++i)
    if (cfg.m_grid[i] >= cfg.m_grid[i + 1])
      throw ConfigError("field 'm_grid': must be strictly ascending (entry " + std::to_string(i + 1) + ")");
  for (uint32_t m : cfg.m_grid)
    if (m < 1) throw ConfigError("field 'm_grid': entries must be >= 1");
  cfg.n_rule = cfgdetail::field_or<double>(j, "n_rule", cfg.n_rule);
  if (!(cfg.n_rule >= 0.02 && cfg.n_rule <= 1.0))
    throw ConfigError("field 'n_rule': must lie in [0.02, 1]");
  cfg.delta = cfgdetail::field_or<double>(j, "delta", cfg.delta);
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("field 'delta': must lie in (0, 1)");
  if (j.contains("t_rule")) {
    const json& t = j.at("t_rule");
    if (t.is_string() && t.get<std::string>() == "auto")
      cfg.t_fixed = -1;
    else if (t.is_number_unsigned() || t.is_number_integer()) {
      cfg.t_fixed = t.get<int64_t>();
      if (cfg.t_fixed < 1) throw ConfigError("field 't_rule': fixed t must be >= 1");
    } else
      throw ConfigError("field 't_rule': expected \"auto\" or a positive integer");
  }
  cfg.arms = cfgdetail::field_or<std::vector<std::string>>(j, "arms", cfg.arms);
  if (cfg.arms.empty()) throw ConfigError("field 'arms': must be non-empty");
  for (const auto& a : cfg.arms)
    if (a != "erm" && a != "bagging" && a != "hanneke")
      throw ConfigError("field 'arms': unknown arm '" + a + "'");
  if (j.contains("class")) {
    const json& c = j.at("class");
    cfg.cls.kind = cfgdetail::field_or<std::string>(c, "kind", cfg.cls.kind);
    if (cfg.cls.kind != "threshold" && cfg.cls.kind != "hard_instance")
      throw ConfigError("field 'class.kind': expected 'threshold' or 'hard_instance'");
    cfg.cls.tie_policy = cfgdetail::field_or<std::string>(c, "tie_policy", cfg.cls.tie_policy);
    if (cfg.cls.tie_policy != "midpoint" && cfg.cls.tie_policy != "first_consistent" &&
        cfg.cls.tie_policy != "adversarial")
      throw ConfigError("field 'class.tie_policy': unknown policy '" + cfg.cls.tie_policy + "'");
    cfg.cls.light_atoms = cfgdetail::field_or<uint32_t>(c, "light_atoms", cfg.cls.light_atoms);
    cfg.cls.decay = cfgdetail::field_or<double>(c, "decay", cfg.cls.decay);
    cfg.cls.heavy_mass = cfgdetail::field_or<double>(c, "heavy_mass", cfg.cls.heavy_mass);
  }
  if (j.contains("distribution")) {
    const json& d = j.at("distribution");
    cfg.dist.kind = cfgdetail::field_or<std::string>(d, "kind", cfg.dist.kind);
    if (cfg.dist.kind != "uniform01")
      throw ConfigError("field 'distribution.kind': expected 'uniform01'");
    cfg.dist.target_threshold =
        cfgdetail::field_or<double>(d, "target_threshold", cfg.dist.target_threshold);
  }
  cfg.eval_samples = cfgdetail::field_or<uint64_t>(j, "eval_samples", cfg.eval_samples);
  if (cfg.eval_samples < 1) throw ConfigError("field 'eval_samples': must be >= 1");
  cfg.repetitions = cfgdetail::field_or<uint32_t>(j, "repetitions", cfg.repetitions);
  if (cfg.repetitions < 1) throw ConfigError("field 'repetitions': must be >= 1");
  if (j.contains("exact")) {
    const json& e = j.at("exact");
    cfg.exact.m = cfgdetail::field_or<uint32_t>(e, "m", cfg.exact.m);
    cfg.exact.n = cfgdetail::field_or<uint32_t>(e, "n", cfg.exact.n);
    cfg.exact.delta = cfgdetail::field_or<double>(e, "delta", cfg.exact.delta);
    if (e.contains("t_rule")) {
      const json& t = e.at("t_rule");
      if (t.is_string() && t.get<std::string>() == "auto")
        cfg.exact.t_fixed = -1;
      else if (t.is_number_unsigned() || t.is_number_integer())
        cfg.exact.t_fixed = t.get<int64_t>();
      else
        throw ConfigError("field 'exact.t_rule': expected \"auto\" or a positive integer");
    }
    cfg.exact.trials = cfgdetail::field_or<uint32_t>(e, "trials", cfg.exact.trials);
    cfg.exact.support_points = cfgdetail::field_or<uint32_t>(e, "support_points", cfg.exact.support_points);
    cfg.exact.target_threshold =
        cfgdetail::field_or<double>(e, "target_threshold", cfg.exact.target_threshold);
    if (cfg.exact.support_points < 1) throw ConfigError("field 'exact.support_points': must be >= 1");
  }
  if (j.contains("buckets")) {
    const json& b = j.at("buckets");
    if (b.contains("p0_grid")) {
      for (const auto& cell : b.at("p0_grid")) {
        uint32_t m = cfgdetail::field_or<uint32_t>(cell, "m", 0);
        uint32_t n = cfgdetail::field_or<uint32_t>(cell, "n", 0);
        if (m < 1 || n < 1) throw ConfigError("field 'buckets.p0_grid': m and n must be >= 1");
        cfg.buckets.p0_grid.emplace_back(m, n);
      }
    }
  }
  return cfg;
}

inline json ExperimentConfig::to_json() const {
  json j;
  j["master_seed"] = master_seed;
  j["m_grid"] = m_grid;
  j["n_rule"] = n_rule;
  j["delta"] = delta;
  if (t_fixed < 0)
    j["t_rule"] = "auto";
  else
    j["t_rule"] = t_fixed;
  j["arms"] = arms;
  j["class"] = {{"kind", cls.kind},
                {"tie_policy", cls.tie_policy},
                {"light_atoms", cls.light_atoms},
                {"decay", cls.decay},
                {"heavy_mass", cls.heavy_mass}};
  j["distribution"] = {{"kind", dist.kind}, {"target_threshold", dist.target_threshold}};
  j["eval_samples"] = eval_samples;
  j["repetitions"] = repetitions;
  j["exact"] = {{"m", exact.m},
                {"n", exact.n},
                {"delta", exact.delta},
                {"t_rule", exact.t_fixed < 0 ? json("auto") : json(exact.t_fixed)},
                {"trials", exact.trials},
                {"support_points", exact.support_points},
                {"target_threshold", exact.target_threshold}};
  json grid = json::array();
  for (const auto& [m, n] : buckets.p0_grid) grid.push_back({{"m", m}, {"n", n}});
  j["buckets"] = {{"p0_grid", grid}};
  return j;
}

struct ProblemSetup {
  ConceptClass cls;
  SourceDistribution dist;
  Hypothesis target;
};

inline uint32_t bootstrap_size(double n_rule, uint32_t m) {
  int64_t n = std::llround(n_rule * static_cast<double>(m));
  if (n < 1) n = 1;
  if (n > m) n = m;
  return static_cast<uint32_t>(n);
}

inline ProblemSetup make_problem(const ExperimentConfig& cfg) {
  if (cfg.cls.kind == "hard_instance") {
    TiePolicyKind kind = TiePolicyKind::adversarial;
    if (cfg.cls.tie_policy == "first_consistent") kind = TiePolicyKind::first_consistent;
    if (cfg.cls.tie_policy == "midpoint") kind = TiePolicyKind::first_consistent;  // unordered class
    HardInstance hi =
        hard_instance({cfg.cls.light_atoms, cfg.cls.decay, cfg.cls.heavy_mass}, kind);
    return ProblemSetup{std::move(hi.concept_class), std::move(hi.distribution),
                        std::move(hi.target)};
  }
  TiePolicy policy = TiePolicy::midpoint();
  if (cfg.cls.tie_policy == "first_consistent") policy = TiePolicy::first_consistent();
  if (cfg.cls.tie_policy == "adversarial")
    throw ConfigError("field 'class.tie_policy': adversarial requires class.kind=hard_instance");
  return ProblemSetup{ConceptClass::threshold_ray(policy), SourceDistribution::uniform_unit(),
                      Hypothesis::threshold_at(cfg.dist.target_threshold)};
}

struct SweepCell {
  std::string arm;
  uint32_t m_requested = 0;
  uint32_t m_used = 0;
  uint32_t n = 0;
  uint32_t t = 0;
  double mean_loss = 0.0;
  double ci_halfwidth = 0.0;
  uint64_t seed = 0;
  bool guarantee_regime = false;
};

struct SweepResult {
  std::string csv;
  json manifest;
  std::vector<SweepCell> cells;
};

// Runs every (arm, m, repetition) cell; arms at a given (m, repetition)
// share the training set and the evaluation stream (paired design). Cells
// run concurrently; assembly order is fixed by (arm order, m ascending), so
// output is independent of scheduling.
inline SweepResult run_sweep(const ExperimentConfig& cfg, unsigned threads = 0) {
  auto t0 = std::chrono::steady_clock::now();
  ProblemSetup prob = make_problem(cfg);

  struct CellPlan {
    std::string arm;
    uint32_t m;
  };
  std::vector<CellPlan> cells;
  for (const auto& arm : cfg.arms)
    for (uint32_t m : cfg.m_grid) cells.push_back({arm, m});

  const uint32_t reps = cfg.repetitions;
  std::vector<std::vector<double>> losses(cells.size(), std::vector<double>(reps, 0.0));

  parallel_for(cells.size() * reps, [&](size_t job) {
    size_t cell_idx = job / reps;
    uint32_t rep = static_cast<uint32_t>(job % reps);
    const CellPlan& cell = cells[cell_idx];
    uint32_t m = cell.m;

    Rng train_rng(derive_seed(cfg.master_seed, "train", m, rep));
    TrainingSet s = draw_training_set(prob.dist, prob.target, m, train_rng);
    Rng eval_rng(derive_seed(cfg.master_seed, "eval", m, rep));

    uint64_t errors = 0;
    if (cell.arm == "erm") {
      Hypothesis h = erm(prob.cls, s);
      for (uint64_t i = 0; i < cfg.eval_samples; ++i) {
        Point x = prob.dist.sample(eval_rng);
        if (h.sign_at(x) != prob.target.sign_at(x)) ++errors;
      }
    } else if (cell.arm == "bagging") {
      uint32_t n = bootstrap_size(cfg.n_rule, m);
      uint32_t t = cfg.t_fixed < 0 ? default_vote_count(m, cfg.delta)
                                   : static_cast<uint32_t>(cfg.t_fixed);
      Rng plan_rng(derive_seed(cfg.master_seed, "plan", m, rep));
      BootstrapPlan plan = draw_bootstrap_plan(m, n, t, plan_rng);
      VotingClassifier f = bagging_train(s, plan, prob.cls);
      for (uint64_t i = 0; i < cfg.eval_samples; ++i) {
        Point x = prob.dist.sample(eval_rng);
        if (f.vote_sum(x) * prob.target.sign_at(x) <= 0) ++errors;
      }
    } else {  // hanneke
      uint32_t m_used = static_cast<uint32_t>(power_of_four_floor(m));
      TrainingSet trimmed;
      trimmed.examples.assign(s.examples.begin(), s.examples.begin() + m_used);
      VotingClassifier f = hanneke_train(trimmed, prob.cls);
      for (uint64_t i = 0; i < cfg.eval_samples; ++i) {
        Point x = prob.dist.sample(eval_rng);
        if (f.vote_sum(x) * prob.target.sign_at(x) <= 0) ++errors;
      }
    }
    losses[cell_idx][rep] = static_cast<double>(errors) / static_cast<double>(cfg.eval_samples);
  }, threads);

  SweepResult result;
  std::string csv = std::string(kCsvHeader) + "\n";
  json arms_json = json::object();
  size_t cell_idx = 0;
  for (const auto& arm : cfg.arms) {
    json cells_json = json::array();
    std::vector<std::pair<double, double>> fit_points;
    uint32_t dropped = 0;
    for (uint32_t m : cfg.m_grid) {
      const auto& ls = losses[cell_idx];
      double mean = 0.0;
      for (double v : ls) mean += v;
      mean /= reps;

      SweepCell out;
      out.arm = arm;
      out.m_requested = m;
      out.m_used = m;
      if (arm == "erm") {
        out.n = m;
        out.t = 1;
      } else if (arm == "bagging") {
        out.n = bootstrap_size(cfg.n_rule, m);
        out.t = cfg.t_fixed < 0 ? default_vote_count(m, cfg.delta)
                                : static_cast<uint32_t>(cfg.t_fixed);
        out.guarantee_regime = BaggingParams{out.n, out.t, cfg.delta}.in_guarantee_regime(m);
      } else {
        out.m_used = static_cast<uint32_t>(power_of_four_floor(m));
        auto subs = hanneke_subsample([&] {
          std::vector<uint32_t> u(out.m_used);
          for (uint32_t i = 0; i < out.m_used; ++i) u[i] = i + 1;
          return u;
        }(), {});
        out.t = static_cast<uint32_t>(subs.size());
        out.n = static_cast<uint32_t>(subs.front().size());
      }
      out.mean_loss = mean;
      out.ci_halfwidth = hoeffding_halfwidth(static_cast<uint64_t>(reps) * cfg.eval_samples, 0.95);
      out.seed = derive_seed(cfg.master_seed, "cell", hash_tag(arm), m);

      csv += arm;
      csv += ',';
      csv += std::to_string(m) + ',' + std::to_string(out.n) + ',' + std::to_string(out.t) + ',';
      csv += fmt_double(out.mean_loss) + ',' + fmt_double(out.ci_halfwidth) + ',';
      csv += std::to_string(reps) + ',' + std::to_string(cfg.eval_samples) + ',' +
             std::to_string(out.seed) + '\n';

      json jc = {{"m", m},           {"m_used", out.m_used},
                 {"n", out.n},       {"t", out.t},
                 {"mean_loss", out.mean_loss}, {"ci_halfwidth", out.ci_halfwidth},
                 {"seed", out.seed}};
      if (arm == "bagging") jc["guarantee_regime"] = out.guarantee_regime;
      cells_json.push_back(std::move(jc));

      if (out.mean_loss > 0.0)
        fit_points.emplace_back(static_cast<double>(m), out.mean_loss);
      else
        ++dropped;  // zero losses are reported as "< 1/eval_samples" and excluded from fits

      result.cells.push_back(out);
      ++cell_idx;
    }
    json arm_json = {{"cells", std::move(cells_json)}, {"dropped_zero_loss", dropped}};
    if (fit_points.size() >= 3) {
      SlopeFit fit = slope_fit(fit_points);
      arm_json["slope_fit"] = {{"slope", fit.slope},
                               {"intercept", fit.intercept},
                               {"r2", fit.r2},
                               {"points_used", fit_points.size()}};
    } else {
      arm_json["slope_fit"] = {{"note", "fewer than 3 nonzero-loss points"}};
    }
    arms_json[arm] = std::move(arm_json);
  }

  auto t1 = std::chrono::steady_clock::now();
  result.csv = std::move(csv);
  result.manifest = {
      {"config", cfg.to_json()},
      {"version", kVersion},
      {"wall_clock_seconds", std::chrono::duration<double>(t1 - t0).count()},
      {"seed_derivation",
       "stream(tag, m, rep) = splitmix(master ^ fnv1a(tag), m, rep); tags train/plan/eval shared "
       "across arms at fixed (m, rep)"},
      {"arms", std::move(arms_json)}};
  return result;
}

// Fixture used by the exact and loss-relation reports: evenly spaced scalar
// support with exactly representable uniform masses (last mass absorbs float
// dust), threshold target.
inline FiniteDistribution spread_support(uint32_t points) {
  std::vector<Point> support;
  std::vector<double> mass;
  support.reserve(points);
  mass.assign(points, 1.0 / points);
  for (uint32_t i = 0; i < points; ++i)
    support.push_back(Point::from_scalar((i + 0.5) / points));
  double total = 0.0;
  for (double w : mass) total += w;
  mass.back() += 1.0 - total;
  return FiniteDistribution(std::move(support), std::move(mass));
}

inline json exact_report(const ExperimentConfig& cfg, EnumerationBudget budget) {
  const auto& e = cfg.exact;
  FiniteDistribution dist = spread_support(e.support_points);
  ConceptClass cls = ConceptClass::threshold_ray(TiePolicy::midpoint());
  Hypothesis target = Hypothesis::threshold_at(e.target_threshold);

  Rng train_rng(derive_seed(cfg.master_seed, "exact-train"));
  TrainingSet s = draw_training_set(SourceDistribution::finite(dist), target, e.m, train_rng);

  VotingClassifier voter = all_bootstraps_voter(s, e.n, cls, budget);
  double l0 = margin_loss_exact(voter, dist, target, MarginThreshold(0.0));
  double l13 = margin_loss_exact(voter, dist, target, MarginThreshold(1.0 / 3.0));

  uint32_t t = e.t_fixed < 0
                   ? static_cast<uint32_t>(std::ceil(18.0 * std::log(static_cast<double>(e.m) / e.delta)))
                   : static_cast<uint32_t>(e.t_fixed);
  Rng plan_rng(derive_seed(cfg.master_seed, "exact-plans"));
  MarginToLossReport rel =
      verify_margin_to_loss(s, e.n, t, e.delta, e.trials, dist, target, cls, plan_rng, budget);

  bool pmf_match = true;
  json pmf_cells = json::array();
  for (auto [m, n] : {std::pair<uint32_t, uint32_t>{e.m, e.n}, {4, 3}, {2, 2}}) {
    bool eq = distinct_count_pmf(m, n) == distinct_count_pmf_bruteforce(m, n, budget);
    pmf_match = pmf_match && eq;
    pmf_cells.push_back({{"m", m}, {"n", n}, {"match", eq}});
  }

  return json{
      {"m", e.m},
      {"n", e.n},
      {"enumerated_members", voter.size()},
      {"gamma_values", json::array({0.0, 1.0 / 3.0})},
      {"margin_loss", {{"0", l0}, {"1/3", l13}}},
      {"loss_relation",
       {{"t", t},
        {"delta", e.delta},
        {"trials", rel.trials},
        {"margin_loss_one_third", rel.margin_loss_one_third},
        {"loss_threshold", rel.loss_threshold},
        {"violations", rel.violations},
        {"violation_rate", rel.violation_rate},
        {"slack", rel.slack},
        {"pass", rel.pass}}},
      {"pmf_crosscheck", {{"exact_match", pmf_match}, {"cells", pmf_cells}}}};
}

// Tiny bucket-family fixtures. Uniformity is checkable for any leftover
// mass; the margin-transfer step additionally needs leftover mass <= 1/6.
struct TinyFamilyFixture {
  const char* name;
  uint32_t m;
  uint32_t n;
  uint32_t branching;
  BigRational low_frac;
  BigRational high_frac;
  bool transfer_eligible;
};

inline std::vector<TinyFamilyFixture> tiny_family_fixtures() {
  return {
      {"m3n2C2", 3, 2, 2, BigRational(1, 3), BigRational(7, 10), true},
      {"m4n2C2", 4, 2, 2, BigRational(1, 4), BigRational(1, 2), true},
      {"m4n3C3", 4, 3, 3, BigRational(1, 4), BigRational(3, 4), true},
      {"m4n2C2l2", 4, 2, 2, BigRational(1, 2), BigRational(1, 2), false},
      {"m9n3C3l3", 9, 3, 3, BigRational(1, 3), BigRational(1, 3), false},
      {"m8n4C2l4", 8, 4, 2, BigRational(1, 2), BigRational(1, 2), false},
  };
}

inline BucketParams params_for(const TinyFamilyFixture& fx) {
  BucketParams p;
  p.branching = fx.branching;
  p.low_frac = fx.low_frac;
  p.high_frac = fx.high_frac;
  return p;
}

// Adversarial-ERM fixture over atoms {0..m-1}: all-negative target plus one
// singleton per atom, dyadic atom masses. Guarantees support points where
// the all-bootstraps voter has margin <= 1/3.
struct TransferFixture {
  ConceptClass cls;
  FiniteDistribution dist;
  Hypothesis target;
  TrainingSet sample;
};

inline TransferFixture make_transfer_fixture(uint32_t m) {
  std::vector<Point> support;
  std::vector<double> mass;
  double total = 0.0;
  for (uint32_t i = 0; i < m; ++i) {
    support.push_back(Point::from_atom(i));
    mass.push_back(std::pow(0.5, i + 1));
    total += mass.back();
  }
  mass.back() += 1.0 - total;
  FiniteDistribution dist(support, mass);

  std::vector<std::vector<int8_t>> tables;
  tables.emplace_back(m, int8_t{-1});
  for (uint32_t i = 0; i < m; ++i) {
    std::vector<int8_t> t(m, int8_t{-1});
    t[i] = 1;
    tables.push_back(std::move(t));
  }
  Hypothesis target = Hypothesis::finite_member(tables.front());
  ConceptClass cls = ConceptClass::finite_explicit(
      std::move(tables), 1, TiePolicy::adversarial(target, dist));

  TrainingSet s;
  for (uint32_t i = 0; i < m; ++i) s.examples.push_back({Point::from_atom(i), Label::negative});
  return TransferFixture{std::move(cls), std::move(dist), std::move(target), std::move(s)};
}

inline json buckets_report(const ExperimentConfig& cfg, EnumerationBudget budget) {
  json report;

  std::vector<std::pair<uint32_t, uint32_t>> grid = cfg.buckets.p0_grid;
  if (grid.empty()) {
    for (uint32_t m : {100u, 128u, 200u, 500u, 1000u}) {
      uint32_t n_small = static_cast<uint32_t>(ceil_of(BigRational(1, 50) * m));
      uint32_t n_half = static_cast<uint32_t>(ceil_of(BigRational(1, 2) * m));
      grid.emplace_back(m, n_small);
      grid.emplace_back(m, n_half);
      grid.emplace_back(m, m);
    }
  }
  BucketParams defaults;
  json p0_cells = json::array();
  bool p0_all = true;
  for (auto [m, n] : grid) {
    BigRational p0 = outlier_mass(m, n, defaults);
    bool ok = p0 <= BigRational(1, 6);
    p0_all = p0_all && ok;
    p0_cells.push_back({{"m", m},
                        {"n", n},
                        {"p0", fmt_rational(p0)},
                        {"p0_double", to_double(p0)},
                        {"le_one_sixth", ok}});
  }
  report["p0_grid"] = std::move(p0_cells);
  report["p0_all_le_one_sixth"] = p0_all;

  json uni = json::array();
  json transfer = json::array();
  for (const auto& fx : tiny_family_fixtures()) {
    BucketFamily fam = assemble_family(fx.m, fx.n, params_for(fx));
    UniformityResult u = check_two_stage_uniform(fam, budget);
    uni.push_back({{"fixture", fx.name},
                   {"m", fx.m},
                   {"n", fx.n},
                   {"branching", fx.branching},
                   {"list_len", fam.list_len},
                   {"two_stage_uniform", u.uniform}});
    if (fx.transfer_eligible) {
      TransferFixture tf = make_transfer_fixture(fx.m);
      MarginTransferReport mt =
          margin_transfer_check(tf.sample, fam, tf.dist, tf.target, tf.cls, budget);
      transfer.push_back({{"fixture", fx.name},
                          {"precondition_ok", mt.precondition_ok},
                          {"checked_points", mt.checked_points},
                          {"violations", mt.violations.size()}});
    }
  }
  report["uniformity"] = std::move(uni);
  report["margin_transfer"] = std::move(transfer);

  json structure = json::array();
  for (uint32_t levels : {1u, 2u}) {
    uint32_t len = 1;
    for (uint32_t i = 0; i < levels; ++i) len *= 20;
    std::vector<uint32_t> list(len);
    for (uint32_t i = 0; i < len; ++i) list[i] = i + 1;
    StructureReport sr = structural_checks(list, BucketParams{});
    structure.push_back({{"branching", 20},
                         {"levels", levels},
                         {"leaf_count", sr.leaf_count},
                         {"expected_leaf_count", sr.expected_leaf_count},
                         {"ok", sr.ok()}});
  }
  report["structure"] = std::move(structure);
  return report;
}

// Verifies the include/exclude structure at every node of the subsample
// recursion: call i's subsamples contain the two kept quarters entirely and
// none of the excluded quarter, with counts splitting evenly.
inline bool hanneke_structure_ok(uint32_t m) {
  std::vector<uint32_t> all(m);
  for (uint32_t i = 0; i < m; ++i) all[i] = i + 1;
  auto subsamples = hanneke_subsample(all, {});

  auto rec = [&](auto&& self, std::vector<uint32_t> u,
                 std::span<const std::vector<uint32_t>> subs) -> bool {
    if (u.size() < 4) return subs.size() == 1;
    if (subs.size() % 3 != 0) return false;
    size_t per_call = subs.size() / 3;
    size_t q = u.size() / 4;
    for (size_t i = 1; i <= 3; ++i) {
      auto chunk = subs.subspan((i - 1) * per_call, per_call);
      for (const auto& sample : chunk) {
        for (size_t j = 1; j <= 3; ++j) {
          bool should_contain = (j != i);
          for (size_t idx = 0; idx < q; ++idx) {
            uint32_t e = u[j * q + idx];
            bool has = std::binary_search(sample.begin(), sample.end(), e);
            if (has != should_contain) return false;
          }
        }
      }
      if (!self(self, std::vector<uint32_t>(u.begin(), u.begin() + q), chunk)) return false;
    }
    return true;
  };
  return rec(rec, all, std::span<const std::vector<uint32_t>>(subsamples));
}

struct VerifyOutcome {
  bool ok = true;
  std::vector<std::pair<std::string, bool>> suites;

  void add(const std::string& name, bool pass) {
    suites.emplace_back(name, pass);
    ok = ok && pass;
  }
};

// The full property suite behind `verify`: exit-code material.
inline VerifyOutcome run_verify(EnumerationBudget budget, const std::string& inject_failure = "") {
  VerifyOutcome out;

  // lossG: the plan voter's loss rarely exceeds the all-bootstraps voter's
  // 1/3-margin loss plus 1/m.
  {
    FiniteDistribution dist = spread_support(8);
    ConceptClass cls = ConceptClass::threshold_ray(TiePolicy::midpoint());
    Hypothesis target = Hypothesis::threshold_at(0.5);
    Rng rng(derive_seed(9001, "verify-lossG-train"));
    TrainingSet s = draw_training_set(SourceDistribution::finite(dist), target, 4, rng);
    uint32_t t = static_cast<uint32_t>(std::ceil(18.0 * std::log(4.0 / 0.2)));
    Rng plan_rng(derive_seed(9001, "verify-lossG-plans"));
    MarginToLossReport rel =
        verify_margin_to_loss(s, 2, t, 0.2, 400, dist, target, cls, plan_rng, budget);
    out.add("lossG", rel.pass && inject_failure != "lossG");
  }

  // p0: leftover mass at most 1/6 across the regime grid.
  {
    bool ok = true;
    BucketParams params;
    for (uint32_t m : {100u, 128u, 200u, 500u}) {
      for (uint32_t n : {static_cast<uint32_t>(ceil_of(BigRational(1, 50) * m)), m}) {
        ok = ok && outlier_mass(m, n, params) <= BigRational(1, 6);
      }
    }
    out.add("p0", ok && inject_failure != "p0");
  }

  // uniformity: exact two-stage uniformity on every tiny fixture.
  {
    bool ok = true;
    for (const auto& fx : tiny_family_fixtures()) {
      BucketFamily fam = assemble_family(fx.m, fx.n, params_for(fx));
      ok = ok && check_two_stage_uniform(fam, budget).uniform;
    }
    out.add("uniformity", ok && inject_failure != "uniformity");
  }

  // subsample-structure: node-level include/exclude checks.
  {
    bool ok = true;
    for (uint32_t m : {4u, 16u, 64u, 256u}) ok = ok && hanneke_structure_ok(m);
    out.add("subsample-structure", ok && inject_failure != "subsample-structure");
  }

  return out;
}

}  // namespace paclab
