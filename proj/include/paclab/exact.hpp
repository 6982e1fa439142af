#pragma once

// Desk-scale exact reconstruction of the proof objects: the voter averaging
// ERM over all m^n bootstrap index vectors, the exact distinct-count
// distribution of index vectors, and a statistical check of the
// margin-to-loss relation between a sampled plan's voter and that average.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "paclab/concept_class.hpp"
#include "paclab/core.hpp"
#include "paclab/errors.hpp"
#include "paclab/learners.hpp"
#include "paclab/rational.hpp"
#include "paclab/rng.hpp"

namespace paclab {

struct EnumerationBudget {
  uint64_t max_vectors = 1'000'000;
};

// m^n if it fits the budget, else throws.
inline uint64_t checked_vector_count(uint32_t m, uint32_t n, EnumerationBudget budget) {
  uint64_t count = 1;
  for (uint32_t i = 0; i < n; ++i) {
    if (count > budget.max_vectors / m)
      throw BudgetExceeded("enumeration: m^n exceeds the vector budget (m=" + std::to_string(m) +
                           ", n=" + std::to_string(n) + ")");
    count *= m;
  }
  if (count > budget.max_vectors)
    throw BudgetExceeded("enumeration: m^n exceeds the vector budget");
  return count;
}

// Visits every I in [m]^n in lexicographic order (leftmost entry most
// significant, entries 1-based).
template <typename F>
void for_each_index_vector(uint32_t m, uint32_t n, F&& visit) {
  std::vector<uint32_t> entries(n, 1);
  while (true) {
    visit(const_cast<const std::vector<uint32_t>&>(entries));
    uint32_t pos = n;
    while (pos > 0) {
      --pos;
      if (entries[pos] < m) {
        ++entries[pos];
        std::fill(entries.begin() + pos + 1, entries.end(), 1u);
        break;
      }
      if (pos == 0) return;
    }
  }
}

inline uint64_t lex_rank(const IndexVector& iv) {
  uint64_t r = 0;
  for (uint32_t e : iv.entries) r = r * iv.m + (e - 1);
  return r;
}

// The voter averaging ERM over all m^n bootstrap samples of S, members in
// lexicographic vector order, duplicates kept as distinct members.
inline VotingClassifier all_bootstraps_voter(const TrainingSet& s, uint32_t n,
                                             const ConceptClass& cls, EnumerationBudget budget) {
  uint32_t m = static_cast<uint32_t>(s.size());
  uint64_t count = checked_vector_count(m, n, budget);
  std::vector<Hypothesis> members;
  members.reserve(count);
  IndexVector iv;
  iv.m = m;
  for_each_index_vector(m, n, [&](const std::vector<uint32_t>& entries) {
    iv.entries = entries;
    members.push_back(erm(cls, select(s, iv)));
  });
  return VotingClassifier(std::move(members));
}

// Stirling numbers of the second kind, row n truncated at max_k, via the
// recurrence S2(n, k) = k S2(n-1, k) + S2(n-1, k-1).
inline std::vector<BigInt> stirling2_row(uint32_t n, uint32_t max_k) {
  std::vector<BigInt> row(static_cast<size_t>(max_k) + 1, BigInt(0));
  row[0] = 1;  // S2(0, 0)
  for (uint32_t i = 1; i <= n; ++i) {
    uint32_t hi = std::min(i, max_k);
    for (uint32_t k = hi; k >= 1; --k) row[k] = BigInt(k) * row[k] + row[k - 1];
    row[0] = 0;
  }
  return row;
}

inline BigInt stirling2(uint32_t n, uint32_t k) {
  if (k > n) throw std::invalid_argument("stirling2: k must lie in [0, n]");
  return stirling2_row(n, k)[k];
}

// Exact distribution of the number of distinct entries of a uniform
// I in [m]^n, stored as integer numerators over the common denominator m^n.
struct DistinctCountPmf {
  uint32_t m = 0;
  uint32_t n = 0;
  std::vector<BigInt> numerators;  // index k-1 holds Pr[|D(I)| = k] * m^n, k = 1..min(m,n)
  BigInt denominator;              // m^n

  uint32_t max_distinct() const { return static_cast<uint32_t>(numerators.size()); }

  BigRational prob(uint32_t k) const {
    if (k < 1 || k > numerators.size()) return BigRational(0);
    return BigRational(numerators[k - 1], denominator);
  }

  // Pr[|D(I)| < lo] + Pr[|D(I)| > hi].
  BigRational tail_mass(uint32_t lo, uint32_t hi) const {
    BigInt acc = 0;
    for (uint32_t k = 1; k <= max_distinct(); ++k)
      if (k < lo || k > hi) acc += numerators[k - 1];
    return BigRational(acc, denominator);
  }

  void validate_total() const {
    BigInt total = 0;
    for (const auto& v : numerators) total += v;
    if (total != denominator)
      throw std::logic_error("DistinctCountPmf: probabilities do not sum to 1");
  }

  friend bool operator==(const DistinctCountPmf& a, const DistinctCountPmf& b) {
    return a.m == b.m && a.n == b.n && a.denominator == b.denominator &&
           a.numerators == b.numerators;
  }
};

// Closed form: Pr[|D| = k] = C(m, k) S2(n, k) k! / m^n; the binomial times
// k! is the falling factorial m!/(m-k)!.
inline DistinctCountPmf distinct_count_pmf(uint32_t m, uint32_t n) {
  if (m < 1 || n < 1) throw std::invalid_argument("distinct_count_pmf: m, n must be >= 1");
  DistinctCountPmf pmf;
  pmf.m = m;
  pmf.n = n;
  uint32_t kmax = std::min(m, n);
  auto s2 = stirling2_row(n, kmax);
  pmf.numerators.reserve(kmax);
  for (uint32_t k = 1; k <= kmax; ++k) pmf.numerators.push_back(falling_factorial(m, k) * s2[k]);
  pmf.denominator = big_pow(m, n);
  pmf.validate_total();
  return pmf;
}

// Independent oracle: full enumeration of [m]^n.
inline DistinctCountPmf distinct_count_pmf_bruteforce(uint32_t m, uint32_t n,
                                                      EnumerationBudget budget) {
  if (m < 1 || n < 1) throw std::invalid_argument("distinct_count_pmf_bruteforce: m, n must be >= 1");
  checked_vector_count(m, n, budget);
  uint32_t kmax = std::min(m, n);
  std::vector<uint64_t> counts(kmax + 1, 0);
  std::vector<uint32_t> stamp(static_cast<size_t>(m) + 1, 0);
  uint32_t generation = 0;
  for_each_index_vector(m, n, [&](const std::vector<uint32_t>& entries) {
    ++generation;
    uint32_t distinct = 0;
    for (uint32_t e : entries) {
      if (stamp[e] != generation) {
        stamp[e] = generation;
        ++distinct;
      }
    }
    ++counts[distinct];
  });
  DistinctCountPmf pmf;
  pmf.m = m;
  pmf.n = n;
  pmf.numerators.reserve(kmax);
  for (uint32_t k = 1; k <= kmax; ++k) pmf.numerators.push_back(BigInt(counts[k]));
  pmf.denominator = big_pow(m, n);
  pmf.validate_total();
  return pmf;
}

struct MarginToLossReport {
  double margin_loss_one_third = 0.0;  // exact L^{1/3} of the all-bootstraps voter
  double loss_threshold = 0.0;         // margin_loss_one_third + 1/m
  uint32_t trials = 0;
  uint32_t violations = 0;
  double violation_rate = 0.0;
  double bound_delta = 0.0;
  double slack = 0.0;  // 2 sqrt(delta (1-delta) / trials)
  bool pass = false;
};

// Draws `trials` independent plans and measures how often the plan voter's
// loss exceeds the all-bootstraps voter's 1/3-margin loss plus 1/m. The
// claim being exercised is a high-probability bound, so the verdict carries
// an explicit statistical slack term: pass iff the violation rate is at most
// delta + 2 sqrt(delta (1-delta) / trials).
inline MarginToLossReport verify_margin_to_loss(const TrainingSet& s, uint32_t n, uint32_t t,
                                                double delta, uint32_t trials,
                                                const FiniteDistribution& dist,
                                                const Hypothesis& target, const ConceptClass& cls,
                                                Rng& rng, EnumerationBudget budget) {
  uint32_t m = static_cast<uint32_t>(s.size());
  if (trials < 1) throw std::invalid_argument("verify_margin_to_loss: trials must be >= 1");
  uint32_t t_min = static_cast<uint32_t>(std::ceil(18.0 * std::log(static_cast<double>(m) / delta)));
  if (t < t_min)
    throw PreconditionViolated("verify_margin_to_loss: t below ceil(18 ln(m/delta)) = " +
                               std::to_string(t_min));
  uint64_t count = checked_vector_count(m, n, budget);

  // Signed correctness of each enumerated member at each support point:
  // +1 when the member agrees with the concept, -1 otherwise.
  size_t support = dist.size();
  std::vector<int8_t> agree(count * support);
  std::vector<Hypothesis> members = all_bootstraps_voter(s, n, cls, budget).members();
  for (uint64_t r = 0; r < count; ++r)
    for (size_t j = 0; j < support; ++j) {
      const Point& x = dist.support()[j];
      agree[r * support + j] =
          static_cast<int8_t>(members[r].sign_at(x) * target.sign_at(x) > 0 ? 1 : -1);
    }

  double exact_l13 = 0.0;
  for (size_t j = 0; j < support; ++j) {
    int64_t sum = 0;
    for (uint64_t r = 0; r < count; ++r) sum += agree[r * support + j];
    if (3 * sum <= static_cast<int64_t>(count)) exact_l13 += dist.mass()[j];
  }

  MarginToLossReport report;
  report.margin_loss_one_third = exact_l13;
  report.loss_threshold = exact_l13 + 1.0 / static_cast<double>(m);
  report.trials = trials;
  report.bound_delta = delta;
  for (uint32_t trial = 0; trial < trials; ++trial) {
    BootstrapPlan plan = draw_bootstrap_plan(m, n, t, rng);
    double loss = 0.0;
    for (size_t j = 0; j < support; ++j) {
      int64_t sum = 0;
      for (const auto& iv : plan.vectors) sum += agree[lex_rank(iv) * support + j];
      if (sum <= 0) loss += dist.mass()[j];
    }
    if (loss > report.loss_threshold) ++report.violations;
  }
  report.violation_rate = static_cast<double>(report.violations) / trials;
  report.slack = 2.0 * std::sqrt(delta * (1.0 - delta) / trials);
  report.pass = report.violation_rate <= delta + report.slack;
  return report;
}

}  // namespace paclab
