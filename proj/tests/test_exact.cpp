#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>

#include "paclab/bench.hpp"
#include "paclab/datagen.hpp"
#include "paclab/exact.hpp"

using namespace paclab;

namespace {

// Independent oracle: count set partitions of n elements into exactly k
// non-empty blocks by enumerating restricted growth strings.
uint64_t partition_count(uint32_t n, uint32_t k) {
  uint64_t count = 0;
  std::vector<uint32_t> assign(n, 0);
  auto rec = [&](auto&& self, uint32_t i, uint32_t max_block) -> void {
    if (i == n) {
      if (max_block + 1 == k) ++count;
      return;
    }
    for (uint32_t b = 0; b <= std::min(max_block + 1, k - 1); ++b) {
      assign[i] = b;
      self(self, i + 1, std::max(max_block, b));
    }
  };
  if (n == 0) return k == 0 ? 1 : 0;
  rec(rec, 1, 0);  // element 0 is pinned to block 0
  return count;
}

TrainingSet scalar_set(std::initializer_list<std::pair<double, int>> data) {
  TrainingSet s;
  for (auto [x, y] : data)
    s.examples.push_back({Point::from_scalar(x), y > 0 ? Label::positive : Label::negative});
  return s;
}

}  // namespace

TEST_CASE("stirling numbers: fixed values and recurrence anchors") {
  for (uint32_t n = 1; n <= 8; ++n) CHECK(stirling2(n, 1) == 1);
  CHECK(stirling2(3, 2) == 3);
  CHECK(stirling2(4, 2) == 7);
  CHECK(stirling2(0, 0) == 1);
  CHECK(stirling2(5, 0) == 0);
}

TEST_CASE("stirling numbers match the partition-enumeration oracle") {
  for (uint32_t n = 1; n <= 8; ++n)
    for (uint32_t k = 1; k <= n; ++k)
      CHECK(stirling2(n, k) == BigInt(partition_count(n, k)));
}

TEST_CASE("distinct-count pmf fixed values") {
  auto p22 = distinct_count_pmf(2, 2);
  CHECK(p22.prob(1) == BigRational(1, 2));
  CHECK(p22.prob(2) == BigRational(1, 2));

  auto p33 = distinct_count_pmf(3, 3);
  CHECK(p33.prob(3) == BigRational(2, 9));  // 3! surjections over 27 vectors

  auto p1n = distinct_count_pmf(1, 5);
  CHECK(p1n.prob(1) == BigRational(1));
}

TEST_CASE("pmf equals brute-force enumeration on a small grid") {
  EnumerationBudget budget;
  for (uint32_t m = 1; m <= 5; ++m)
    for (uint32_t n = 1; n <= 5; ++n)
      CHECK(distinct_count_pmf(m, n) == distinct_count_pmf_bruteforce(m, n, budget));
  CHECK(distinct_count_pmf(4, 3) == distinct_count_pmf_bruteforce(4, 3, budget));
}

TEST_CASE("all-bootstraps voter member counts") {
  EnumerationBudget budget;
  auto cls = ConceptClass::threshold_ray(TiePolicy::midpoint());

  TrainingSet s1 = scalar_set({{0.5, +1}});
  CHECK(all_bootstraps_voter(s1, 3, cls, budget).size() == 1);

  TrainingSet s2 = scalar_set({{0.2, -1}, {0.8, +1}});
  VotingClassifier g = all_bootstraps_voter(s2, 1, cls, budget);
  REQUIRE(g.size() == 2);
  // lexicographic: member 0 from example 1 alone, member 1 from example 2 alone
  CHECK(g.members()[0](Point::from_scalar(0.9)) == Label::negative);
  CHECK(g.members()[1](Point::from_scalar(0.1)) == Label::positive);

  TrainingSet s3 = scalar_set({{0.1, -1}, {0.5, +1}, {0.9, +1}});
  CHECK(all_bootstraps_voter(s3, 2, cls, budget).size() == 9);
}

TEST_CASE("relabeling symmetry of the enumeration") {
  EnumerationBudget budget;
  auto cls = ConceptClass::threshold_ray(TiePolicy::midpoint());
  TrainingSet s = scalar_set({{0.1, -1}, {0.5, +1}, {0.9, +1}});
  // permute the sample; the member multiset must be unchanged
  TrainingSet permuted;
  permuted.examples = {s.examples[2], s.examples[0], s.examples[1]};
  auto thresholds = [](const VotingClassifier& v) {
    std::vector<double> out;
    for (const auto& h : v.members()) out.push_back(h.threshold());
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(thresholds(all_bootstraps_voter(s, 2, cls, budget)) ==
        thresholds(all_bootstraps_voter(permuted, 2, cls, budget)));
}

TEST_CASE("voter margin equals the mean of member margins") {
  EnumerationBudget budget;
  auto cls = ConceptClass::threshold_ray(TiePolicy::midpoint());
  TrainingSet s = scalar_set({{0.1, -1}, {0.5, +1}, {0.9, +1}});
  VotingClassifier g = all_bootstraps_voter(s, 2, cls, budget);
  for (double x : {0.05, 0.3, 0.6, 0.95}) {
    Point p = Point::from_scalar(x);
    double mean = 0.0;
    for (const auto& h : g.members()) mean += h.sign_at(p);
    mean /= static_cast<double>(g.size());
    CHECK(margin(g, p, Label::positive) == Catch::Approx(mean).margin(1e-15));
  }
}

TEST_CASE("budget is enforced") {
  auto cls = ConceptClass::threshold_ray(TiePolicy::midpoint());
  TrainingSet s = scalar_set({{0.1, -1}, {0.5, +1}, {0.9, +1}, {0.95, +1}, {0.2, -1}});
  CHECK_THROWS_AS(all_bootstraps_voter(s, 3, cls, EnumerationBudget{10}), BudgetExceeded);
  CHECK_THROWS_AS(distinct_count_pmf_bruteforce(10, 10, EnumerationBudget{1000}), BudgetExceeded);
}

TEST_CASE("plan vectors are uniform over the enumeration (chi-square)") {
  // m=3, n=2: each drawn vector should hit the 9 lexicographic cells
  // uniformly; chi-square GOF at significance 0.01, df=8.
  const uint32_t m = 3, n = 2;
  const uint64_t draws = 100000;
  Rng rng(4242);
  BootstrapPlan plan = draw_bootstrap_plan(m, n, static_cast<uint32_t>(draws), rng);
  std::vector<uint64_t> counts(9, 0);
  for (const auto& iv : plan.vectors) ++counts[lex_rank(iv)];
  double expected = static_cast<double>(draws) / 9.0;
  double chi2 = 0.0;
  for (uint64_t c : counts) {
    double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 <= 20.0902);  // upper 1% of chi-square with 8 degrees of freedom
}

TEST_CASE("margin-to-loss relation: unanimous support gives zero violations") {
  // Only positive examples: every bootstrap ERM is the all-positive ray, so
  // the all-bootstraps voter has margin 1 on positively labeled mass.
  TrainingSet s = scalar_set({{0.6, +1}, {0.7, +1}});
  auto cls = ConceptClass::threshold_ray(TiePolicy::midpoint());
  FiniteDistribution dist({Point::from_scalar(0.8)}, {1.0});
  Hypothesis target = Hypothesis::threshold_at(0.5);
  Rng rng(55);
  uint32_t t = static_cast<uint32_t>(std::ceil(18.0 * std::log(2.0 / 0.5)));
  auto report = verify_margin_to_loss(s, 2, t, 0.5, 200, dist, target, cls, rng, EnumerationBudget{});
  CHECK(report.violations == 0);
  CHECK(report.margin_loss_one_third == 0.0);
  CHECK(report.pass);
}

TEST_CASE("margin-to-loss relation: oversized vote count collapses the tail") {
  FiniteDistribution dist = spread_support(8);
  ConceptClass cls = ConceptClass::threshold_ray(TiePolicy::midpoint());
  Hypothesis target = Hypothesis::threshold_at(0.5);
  Rng train_rng(derive_seed(17, "train"));
  TrainingSet s = draw_training_set(SourceDistribution::finite(dist), target, 5, train_rng);
  uint32_t t_min = static_cast<uint32_t>(std::ceil(18.0 * std::log(5.0 / 0.1)));
  Rng rng(56);
  auto report =
      verify_margin_to_loss(s, 3, 10 * t_min, 0.1, 300, dist, target, cls, rng, EnumerationBudget{});
  CHECK(report.violation_rate == 0.0);
  // the report echoes the exact one-third margin loss it used
  VotingClassifier g = all_bootstraps_voter(s, 3, cls, EnumerationBudget{});
  CHECK(report.margin_loss_one_third ==
        Catch::Approx(margin_loss_exact(g, dist, target, MarginThreshold(1.0 / 3.0))));
}

TEST_CASE("margin-to-loss relation enforces its vote-count premise") {
  TrainingSet s = scalar_set({{0.6, +1}, {0.2, -1}});
  auto cls = ConceptClass::threshold_ray(TiePolicy::midpoint());
  FiniteDistribution dist({Point::from_scalar(0.8)}, {1.0});
  Rng rng(57);
  CHECK_THROWS_AS(verify_margin_to_loss(s, 2, 3, 0.5, 10, dist, Hypothesis::threshold_at(0.5), cls,
                                        rng, EnumerationBudget{}),
                  PreconditionViolated);
}
