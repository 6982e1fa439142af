#pragma once

// The three learners: plain ERM (via concept_class.hpp), bagging with the
// logarithmic vote count, and Hanneke's recursive sub-sample majority vote.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "paclab/concept_class.hpp"
#include "paclab/core.hpp"
#include "paclab/errors.hpp"
#include "paclab/rng.hpp"

namespace paclab {

// Bootstrap index vector I in [m]^n, entries 1-based; repeats allowed.
struct IndexVector {
  std::vector<uint32_t> entries;
  uint32_t m = 0;

  uint32_t n() const { return static_cast<uint32_t>(entries.size()); }
};

struct BootstrapPlan {
  std::vector<IndexVector> vectors;
  uint32_t m = 0;
  uint32_t n = 0;

  uint32_t t() const { return static_cast<uint32_t>(vectors.size()); }
};

// ceil(18 ln(2m/delta)): the vote count at which the majority-vote margin
// tail drops below delta/m.
inline uint32_t default_vote_count(uint32_t m, double delta) {
  if (m < 1) throw std::invalid_argument("default_vote_count: m must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("default_vote_count: delta must lie in (0, 1)");
  double t = 18.0 * std::log(2.0 * static_cast<double>(m) / delta);
  return static_cast<uint32_t>(std::ceil(t));
}

struct BaggingParams {
  uint32_t n = 0;      // bootstrap sample size
  uint32_t t = 0;      // vote count
  double delta = 0.05;

  // 0.02m <= n <= m and t >= ceil(18 ln(2m/delta)).
  bool in_guarantee_regime(uint32_t m) const {
    return n >= 0.02 * static_cast<double>(m) && n <= m && t >= default_vote_count(m, delta);
  }
};

// n*t i.i.d. uniform indices in [1, m].
inline BootstrapPlan draw_bootstrap_plan(uint32_t m, uint32_t n, uint32_t t, Rng& rng) {
  if (m < 1 || n < 1 || t < 1)
    throw std::invalid_argument("draw_bootstrap_plan: m, n, t must all be >= 1");
  BootstrapPlan plan;
  plan.m = m;
  plan.n = n;
  plan.vectors.resize(t);
  for (auto& iv : plan.vectors) {
    iv.m = m;
    iv.entries.resize(n);
    for (auto& e : iv.entries) e = rng.next_below(m) + 1;
  }
  return plan;
}

// S(I): the examples selected by I, duplicates passed through verbatim.
inline std::vector<LabeledExample> select(const TrainingSet& s, const IndexVector& iv) {
  std::vector<LabeledExample> out;
  out.reserve(iv.entries.size());
  for (uint32_t idx : iv.entries) {
    if (idx < 1 || idx > s.size())
      throw std::out_of_range("select: index outside [1, m]");
    out.push_back(s[idx - 1]);
  }
  return out;
}

// One ERM member per bootstrap vector, assembled in plan order.
inline VotingClassifier bagging_train(const TrainingSet& s, const BootstrapPlan& plan,
                                      const ConceptClass& cls) {
  if (plan.m != s.size())
    throw std::invalid_argument("bagging_train: plan.m must equal |S|");
  if (plan.n < 1 || plan.n > plan.m)
    throw std::invalid_argument("bagging_train: bootstrap size must lie in [1, m]");
  std::vector<Hypothesis> members;
  members.reserve(plan.vectors.size());
  for (const auto& iv : plan.vectors) members.push_back(erm(cls, select(s, iv)));
  return VotingClassifier(std::move(members));
}

inline bool is_power_of_four(uint64_t x) {
  if (x == 0 || (x & (x - 1)) != 0) return false;
  return (x & 0x5555555555555555ull) != 0;
}

inline uint64_t power_of_four_floor(uint64_t x) {
  uint64_t p = 1;
  while (p * 4 <= x) p *= 4;
  return p;
}

// Recursive quartering: if |U| < 4 return {U + V}; else split U (in sorted
// index order) into quarters U_0..U_3 and recurse three ways, call i keeping
// U_i out entirely and folding the other two quarters into V.
inline std::vector<std::vector<uint32_t>> hanneke_subsample(std::vector<uint32_t> u,
                                                            std::vector<uint32_t> v) {
  if (!is_power_of_four(u.size()))
    throw InvalidSize("hanneke_subsample: |U| must be a power of 4");
  std::sort(u.begin(), u.end());
  std::sort(v.begin(), v.end());
  for (uint32_t x : u)
    if (std::binary_search(v.begin(), v.end(), x))
      throw std::invalid_argument("hanneke_subsample: U and V must be disjoint");

  std::vector<std::vector<uint32_t>> out;
  auto recurse = [&](auto&& self, std::span<const uint32_t> cur,
                     std::vector<uint32_t> carried) -> void {
    if (cur.size() < 4) {
      std::vector<uint32_t> leaf(cur.begin(), cur.end());
      leaf.insert(leaf.end(), carried.begin(), carried.end());
      std::sort(leaf.begin(), leaf.end());
      out.push_back(std::move(leaf));
      return;
    }
    size_t q = cur.size() / 4;
    for (size_t i = 1; i <= 3; ++i) {
      std::vector<uint32_t> next_carried = carried;
      for (size_t j = 1; j <= 3; ++j) {
        if (j == i) continue;
        next_carried.insert(next_carried.end(), cur.begin() + j * q, cur.begin() + (j + 1) * q);
      }
      self(self, cur.first(q), std::move(next_carried));
    }
  };
  recurse(recurse, std::span<const uint32_t>(u), std::move(v));
  return out;
}

// One ERM member per subsample of the top-level recursion; uniform majority vote.
inline VotingClassifier hanneke_train(const TrainingSet& s, const ConceptClass& cls) {
  if (!is_power_of_four(s.size()))
    throw InvalidSize("hanneke_train: |S| must be a power of 4");
  std::vector<uint32_t> all(s.size());
  for (uint32_t i = 0; i < s.size(); ++i) all[i] = i + 1;
  auto subsamples = hanneke_subsample(std::move(all), {});
  std::vector<Hypothesis> members;
  members.reserve(subsamples.size());
  for (const auto& idx : subsamples) {
    std::vector<LabeledExample> data;
    data.reserve(idx.size());
    for (uint32_t i : idx) data.push_back(s[i - 1]);
    members.push_back(erm(cls, data));
  }
  return VotingClassifier(std::move(members));
}

}  // namespace paclab
