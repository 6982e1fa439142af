#pragma once

// The recursive bucket construction over bootstrap index vectors and the
// representative pair (family, probability). Verifies, exactly at tiny scale
// and by counting at full scale, the properties the analysis relies on:
// two-stage uniformity, the 1/6 bound on the leftover mass, bucket
// non-emptiness, and the pointwise 1/12 margin-transfer step.
//
// All masses are exact rationals end-to-end. Buckets are stored as
// predicates (distinct-count target plus required/forbidden index sets);
// vectors are only materialized under an explicit enumeration budget.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "paclab/concept_class.hpp"
#include "paclab/core.hpp"
#include "paclab/errors.hpp"
#include "paclab/exact.hpp"
#include "paclab/learners.hpp"
#include "paclab/rational.hpp"

namespace paclab {

// Fractions are exact rationals: the range boundaries ceil(low*m) and
// floor(high*m) must not inherit float dust.
struct BucketParams {
  uint32_t branching = 20;  // C
  BigRational low_frac = BigRational(1, 100);
  BigRational high_frac = BigRational(9, 10);
  BigRational n_low_frac = BigRational(1, 50);
};

inline int64_t ceil_of(const BigRational& q) {
  BigInt num = boost::multiprecision::numerator(q);
  BigInt den = boost::multiprecision::denominator(q);
  BigInt c = (num >= 0) ? BigInt((num + den - 1) / den) : BigInt(num / den);
  return static_cast<int64_t>(c);
}

inline int64_t floor_of(const BigRational& q) {
  BigInt num = boost::multiprecision::numerator(q);
  BigInt den = boost::multiprecision::denominator(q);
  BigInt f = (num >= 0) ? BigInt(num / den) : BigInt((num - den + 1) / den);
  return static_cast<int64_t>(f);
}

// [ceil(low_frac m), floor(high_frac m)]: the distinct-count range covered
// by regular buckets; everything outside lands in the leftover bucket.
inline std::pair<uint32_t, uint32_t> distinct_count_range(uint32_t m, const BucketParams& params) {
  int64_t lo = ceil_of(params.low_frac * m);
  int64_t hi = floor_of(params.high_frac * m);
  return {static_cast<uint32_t>(std::max<int64_t>(lo, 0)), static_cast<uint32_t>(std::max<int64_t>(hi, 0))};
}

// Largest power of the branching factor that is at most low_frac * m.
inline uint32_t list_length(uint32_t m, const BucketParams& params) {
  BigRational cap = params.low_frac * m;
  if (BigRational(1) > cap)
    throw std::invalid_argument("list_length: low_frac * m must be >= 1");
  uint64_t len = 1;
  while (BigRational(BigInt(len) * params.branching) <= cap) len *= params.branching;
  return static_cast<uint32_t>(len);
}

struct BucketLeaf {
  std::vector<uint32_t> required;   // sorted; includes the head index of the list
  std::vector<uint32_t> forbidden;  // sorted; disjoint from required
};

// A set of index vectors {I : |D(I)| = distinct_target and some leaf's
// required set is inside D(I) with its forbidden set disjoint}. Leaves are
// disjoint by construction. An explicit vector list form exists for
// degenerate and test uses.
struct Bucket {
  uint32_t m = 0;
  uint32_t n = 0;
  uint32_t distinct_target = 0;
  std::vector<BucketLeaf> leaves;
  std::optional<std::vector<IndexVector>> explicit_vectors;

  static Bucket from_vectors(uint32_t m, uint32_t n, std::vector<IndexVector> vectors) {
    Bucket b;
    b.m = m;
    b.n = n;
    b.explicit_vectors = std::move(vectors);
    return b;
  }

  bool contains(const IndexVector& iv) const {
    if (explicit_vectors) {
      for (const auto& v : *explicit_vectors)
        if (v.entries == iv.entries) return true;
      return false;
    }
    std::vector<uint32_t> d(iv.entries);
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    if (d.size() != distinct_target) return false;
    for (const auto& leaf : leaves) {
      if (!std::includes(d.begin(), d.end(), leaf.required.begin(), leaf.required.end())) continue;
      bool hit = false;
      for (uint32_t f : leaf.forbidden)
        if (std::binary_search(d.begin(), d.end(), f)) {
          hit = true;
          break;
        }
      if (!hit) return true;
    }
    return false;
  }
};

namespace detail {

inline bool sorted_disjoint(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (a[i] > b[j])
      ++j;
    else
      return false;
  }
  return true;
}

// The recursion: split the list into C consecutive groups, keep group 0 for
// the recursive call, and for each i >= 1 make one call that forbids group i
// and requires every other group. Leaves additionally require the head index.
inline void collect_leaves(std::span<const uint32_t> list, std::vector<uint32_t> required,
                           std::vector<uint32_t> forbidden, uint32_t branching,
                           std::vector<BucketLeaf>& out) {
  if (list.size() == 1) {
    required.push_back(list[0]);
    std::sort(required.begin(), required.end());
    std::sort(forbidden.begin(), forbidden.end());
    out.push_back(BucketLeaf{std::move(required), std::move(forbidden)});
    return;
  }
  size_t group = list.size() / branching;
  for (uint32_t i = 1; i < branching; ++i) {
    std::vector<uint32_t> req = required;
    std::vector<uint32_t> forb = forbidden;
    for (uint32_t j = 1; j < branching; ++j) {
      auto begin = list.begin() + j * group;
      auto end = begin + group;
      if (j == i)
        forb.insert(forb.end(), begin, end);
      else
        req.insert(req.end(), begin, end);
    }
    collect_leaves(list.first(group), std::move(req), std::move(forb), branching, out);
  }
}

}  // namespace detail

// One recursive bucket for a distinct-count target and a list of distinct
// indices, with required/forbidden sets accumulated from ancestors.
inline Bucket build_bucket(uint32_t distinct_target, const std::vector<uint32_t>& list,
                           const std::vector<uint32_t>& required,
                           const std::vector<uint32_t>& forbidden, const BucketParams& params,
                           uint32_t m, uint32_t n) {
  if (params.branching < 2) throw std::invalid_argument("build_bucket: branching must be >= 2");
  uint64_t len = list.size();
  if (len == 0) throw InvalidList("build_bucket: empty index list");
  uint64_t p = len;
  while (p > 1) {
    if (p % params.branching != 0)
      throw InvalidList("build_bucket: list length must be a power of the branching factor");
    p /= params.branching;
  }
  std::vector<uint32_t> sorted_list(list);
  std::sort(sorted_list.begin(), sorted_list.end());
  if (std::adjacent_find(sorted_list.begin(), sorted_list.end()) != sorted_list.end())
    throw InvalidList("build_bucket: list entries must be distinct");
  for (uint32_t e : sorted_list)
    if (e < 1 || e > m) throw InvalidList("build_bucket: list entries must lie in [1, m]");
  std::vector<uint32_t> req(required), forb(forbidden);
  std::sort(req.begin(), req.end());
  std::sort(forb.begin(), forb.end());
  if (!detail::sorted_disjoint(req, forb))
    throw std::invalid_argument("build_bucket: required and forbidden sets must be disjoint");

  Bucket b;
  b.m = m;
  b.n = n;
  b.distinct_target = distinct_target;
  detail::collect_leaves(std::span<const uint32_t>(list), required, forbidden, params.branching,
                         b.leaves);
  return b;
}

// A witness vector inside the bucket, when one exists: distinct_target many
// distinct values containing a leaf's required set and avoiding its
// forbidden set, padded cyclically to length n. Empty optional iff the
// bucket is empty.
inline std::optional<IndexVector> bucket_witness(const Bucket& b) {
  if (b.explicit_vectors)
    return b.explicit_vectors->empty() ? std::nullopt
                                       : std::optional<IndexVector>((*b.explicit_vectors)[0]);
  if (b.distinct_target > b.n) return std::nullopt;
  for (const auto& leaf : b.leaves) {
    if (leaf.required.size() > b.distinct_target) continue;
    std::vector<uint32_t> values = leaf.required;
    for (uint32_t e = 1; e <= b.m && values.size() < b.distinct_target; ++e) {
      if (std::binary_search(leaf.required.begin(), leaf.required.end(), e)) continue;
      if (std::binary_search(leaf.forbidden.begin(), leaf.forbidden.end(), e)) continue;
      values.push_back(e);
    }
    if (values.size() != b.distinct_target) continue;
    IndexVector iv;
    iv.m = b.m;
    iv.entries.resize(b.n);
    for (uint32_t i = 0; i < b.n; ++i) iv.entries[i] = values[i % values.size()];
    return iv;
  }
  return std::nullopt;
}

// The family: the leftover bucket (distinct count outside [lo, hi]) plus one
// bucket per (distinct-count target, ordered list of list_len distinct
// indices), with exact masses. Regular buckets are represented lazily; only
// counting data is stored.
struct BucketFamily {
  uint32_t m = 0;
  uint32_t n = 0;
  BucketParams params;
  uint32_t lo = 0;
  uint32_t hi = 0;
  uint32_t list_len = 1;
  DistinctCountPmf pmf;
  BigInt lists_per_target;                   // N_d = m!/(m - list_len)!
  BigRational outlier_mass = BigRational(0);      // leftover-bucket mass
  std::vector<BigRational> mass_per_bucket;  // index d - lo: Pr[|D| = d] / N_d

  BigRational bucket_mass(uint32_t d) const {
    if (d < lo || d > hi) return BigRational(0);
    return mass_per_bucket[d - lo];
  }

  BigRational total_mass() const {
    BigRational total = outlier_mass;
    for (const auto& q : mass_per_bucket) total += BigRational(lists_per_target) * q;
    return total;
  }
};

// Mass of the leftover bucket: Pr[|D(I)| < ceil(low m)] + Pr[|D(I)| > floor(high m)].
inline BigRational outlier_mass(uint32_t m, uint32_t n, const BucketParams& params) {
  auto [lo, hi] = distinct_count_range(m, params);
  return distinct_count_pmf(m, n).tail_mass(lo, hi);
}

inline BucketFamily assemble_family(uint32_t m, uint32_t n, const BucketParams& params) {
  if (m < 1 || n < 1) throw std::invalid_argument("assemble_family: m, n must be >= 1");
  BucketFamily fam;
  fam.m = m;
  fam.n = n;
  fam.params = params;
  auto [lo, hi] = distinct_count_range(m, params);
  fam.lo = lo;
  fam.hi = hi;
  fam.list_len = list_length(m, params);
  fam.pmf = distinct_count_pmf(m, n);
  fam.lists_per_target = falling_factorial(m, fam.list_len);
  fam.outlier_mass = fam.pmf.tail_mass(lo, hi);
  fam.mass_per_bucket.reserve(hi >= lo ? hi - lo + 1 : 0);
  for (uint32_t d = lo; d <= hi && hi >= lo; ++d)
    fam.mass_per_bucket.push_back(fam.pmf.prob(d) / BigRational(fam.lists_per_target));
  if (fam.total_mass() != BigRational(1))
    throw std::logic_error("assemble_family: masses do not sum to 1");
  return fam;
}

namespace detail {

struct TinyEnumeration {
  uint64_t count = 0;                              // m^n
  std::vector<uint64_t> masks;                     // bit e-1 set iff value e occurs in I
  std::vector<uint32_t> distinct;                  // |D(I)| per lex rank
  std::vector<std::vector<uint32_t>> by_distinct;  // lex ranks grouped by |D(I)|
};

inline TinyEnumeration enumerate_tiny(uint32_t m, uint32_t n, EnumerationBudget budget) {
  if (m > 64) throw BudgetExceeded("tiny enumeration requires m <= 64");
  TinyEnumeration e;
  e.count = checked_vector_count(m, n, budget);
  e.masks.reserve(e.count);
  e.distinct.reserve(e.count);
  e.by_distinct.assign(std::min(m, n) + 1, {});
  uint32_t rank = 0;
  for_each_index_vector(m, n, [&](const std::vector<uint32_t>& entries) {
    uint64_t mask = 0;
    for (uint32_t v : entries) mask |= uint64_t{1} << (v - 1);
    uint32_t pc = static_cast<uint32_t>(std::popcount(mask));
    e.masks.push_back(mask);
    e.distinct.push_back(pc);
    e.by_distinct[pc].push_back(rank);
    ++rank;
  });
  return e;
}

// All ordered lists of `len` distinct indices from [1, m], lexicographically.
template <typename F>
void for_each_ordered_list(uint32_t m, uint32_t len, F&& visit) {
  std::vector<uint32_t> list(len);
  uint64_t used = 0;
  auto rec = [&](auto&& self, uint32_t depth) -> void {
    if (depth == len) {
      visit(const_cast<const std::vector<uint32_t>&>(list));
      return;
    }
    for (uint32_t e = 1; e <= m; ++e) {
      uint64_t bit = uint64_t{1} << (e - 1);
      if (used & bit) continue;
      used |= bit;
      list[depth] = e;
      self(self, depth + 1);
      used &= ~bit;
    }
  };
  rec(rec, 0);
}

struct LeafMask {
  uint64_t required = 0;
  uint64_t forbidden = 0;
};

inline std::vector<LeafMask> leaf_masks(const std::vector<BucketLeaf>& leaves) {
  std::vector<LeafMask> out;
  out.reserve(leaves.size());
  for (const auto& leaf : leaves) {
    LeafMask lm;
    for (uint32_t r : leaf.required) lm.required |= uint64_t{1} << (r - 1);
    for (uint32_t f : leaf.forbidden) lm.forbidden |= uint64_t{1} << (f - 1);
    out.push_back(lm);
  }
  return out;
}

}  // namespace detail

struct UniformityResult {
  bool uniform = false;
  std::optional<IndexVector> counterexample;
  BigRational expected = BigRational(0);
  BigRational got = BigRational(0);
  std::string note;
};

// Exhaustively verifies that drawing a bucket by mass and then a uniform
// vector inside it reproduces the uniform distribution on [m]^n, as exact
// rational equality per vector. The leftover bucket is handled as one bucket.
inline UniformityResult check_two_stage_uniform(const BucketFamily& fam, EnumerationBudget budget) {
  auto tiny = detail::enumerate_tiny(fam.m, fam.n, budget);
  if (BigInt(fam.lists_per_target) > BigInt(budget.max_vectors))
    throw BudgetExceeded("check_two_stage_uniform: too many index lists");

  std::vector<BigRational> total(tiny.count, BigRational(0));
  UniformityResult res;

  auto vector_at = [&](uint64_t rank) {
    IndexVector iv;
    iv.m = fam.m;
    iv.entries.assign(fam.n, 1);
    uint64_t r = rank;
    for (uint32_t pos = fam.n; pos > 0; --pos) {
      iv.entries[pos - 1] = static_cast<uint32_t>(r % fam.m) + 1;
      r /= fam.m;
    }
    return iv;
  };

  // Leftover bucket.
  std::vector<uint64_t> outliers;
  for (uint64_t r = 0; r < tiny.count; ++r)
    if (tiny.distinct[r] < fam.lo || tiny.distinct[r] > fam.hi) outliers.push_back(r);
  if (outliers.empty()) {
    if (fam.outlier_mass != BigRational(0)) {
      res.note = "leftover bucket carries mass but is empty";
      return res;
    }
  } else {
    BigRational share = fam.outlier_mass / BigRational(BigInt(outliers.size()));
    for (uint64_t r : outliers) total[r] += share;
  }

  // Regular buckets: leaves depend only on the list, members on (list, d).
  bool dangling_mass = false;
  detail::for_each_ordered_list(fam.m, fam.list_len, [&](const std::vector<uint32_t>& list) {
    if (dangling_mass) return;
    Bucket proto = build_bucket(0, list, {}, {}, fam.params, fam.m, fam.n);
    auto masks = detail::leaf_masks(proto.leaves);
    for (uint32_t d = fam.lo; d <= fam.hi && fam.hi >= fam.lo; ++d) {
      BigRational mass = fam.bucket_mass(d);
      if (d >= tiny.by_distinct.size()) {
        if (mass != BigRational(0)) dangling_mass = true;  // mass beyond achievable |D|
        continue;
      }
      std::vector<uint64_t> members;
      for (uint32_t r : tiny.by_distinct[d]) {
        uint64_t dm = tiny.masks[r];
        for (const auto& lm : masks) {
          if ((dm & lm.required) == lm.required && (dm & lm.forbidden) == 0) {
            members.push_back(r);
            break;
          }
        }
      }
      if (members.empty()) {
        if (mass != BigRational(0)) dangling_mass = true;  // positive mass on an empty bucket
        continue;
      }
      BigRational share = mass / BigRational(BigInt(members.size()));
      for (uint64_t r : members) total[r] += share;
    }
  });
  if (dangling_mass) {
    res.note = "a bucket carries mass but has no vectors";
    return res;
  }

  BigRational expected = BigRational(1, BigInt(tiny.count));
  for (uint64_t r = 0; r < tiny.count; ++r) {
    if (total[r] != expected) {
      res.uniform = false;
      res.counterexample = vector_at(r);
      res.expected = expected;
      res.got = total[r];
      return res;
    }
  }
  res.uniform = true;
  res.expected = expected;
  return res;
}

// One ERM member per vector in the bucket, lexicographic order.
inline VotingClassifier bucket_voter(const TrainingSet& s, const Bucket& bucket,
                                     const ConceptClass& cls, EnumerationBudget budget) {
  std::vector<Hypothesis> members;
  if (bucket.explicit_vectors) {
    for (const auto& iv : *bucket.explicit_vectors) members.push_back(erm(cls, select(s, iv)));
  } else {
    checked_vector_count(bucket.m, bucket.n, budget);
    IndexVector iv;
    iv.m = bucket.m;
    for_each_index_vector(bucket.m, bucket.n, [&](const std::vector<uint32_t>& entries) {
      iv.entries = entries;
      if (bucket.contains(iv)) members.push_back(erm(cls, select(s, iv)));
    });
  }
  if (members.empty()) throw EmptyBucket("bucket_voter: bucket has no vectors");
  return VotingClassifier(std::move(members));
}

struct MarginTransferViolation {
  size_t support_index = 0;
  double voter_margin = 0.0;   // all-bootstraps margin at that point
  std::string transfer_mass;   // accumulated bucket mass, as an exact fraction
};

struct MarginTransferReport {
  bool precondition_ok = false;  // leftover mass <= 1/6
  size_t checked_points = 0;     // support points with all-bootstraps margin <= 1/3
  std::vector<MarginTransferViolation> violations;
};

// For every support point where the all-bootstraps voter has margin at most
// 1/3, verifies that buckets other than the leftover one whose voter has
// margin at most 5/6 there carry total mass at least 1/12. Exact throughout.
inline MarginTransferReport margin_transfer_check(const TrainingSet& s, const BucketFamily& fam,
                                                  const FiniteDistribution& dist,
                                                  const Hypothesis& target, const ConceptClass& cls,
                                                  EnumerationBudget budget) {
  MarginTransferReport report;
  if (fam.outlier_mass > BigRational(1, 6)) {
    report.precondition_ok = false;
    return report;
  }
  report.precondition_ok = true;

  auto tiny = detail::enumerate_tiny(fam.m, fam.n, budget);
  size_t support = dist.size();

  // Signed agreement of each vector's ERM hypothesis with the concept.
  std::vector<int8_t> agree(tiny.count * support);
  {
    IndexVector iv;
    iv.m = fam.m;
    uint64_t rank = 0;
    for_each_index_vector(fam.m, fam.n, [&](const std::vector<uint32_t>& entries) {
      iv.entries = entries;
      Hypothesis h = erm(cls, select(s, iv));
      for (size_t j = 0; j < support; ++j) {
        const Point& x = dist.support()[j];
        agree[rank * support + j] =
            static_cast<int8_t>(h.sign_at(x) * target.sign_at(x) > 0 ? 1 : -1);
      }
      ++rank;
    });
  }

  // Support points with all-bootstraps margin <= 1/3 (integer comparison).
  std::vector<size_t> checked;
  std::vector<double> checked_margin;
  for (size_t j = 0; j < support; ++j) {
    int64_t sum = 0;
    for (uint64_t r = 0; r < tiny.count; ++r) sum += agree[r * support + j];
    if (3 * sum <= static_cast<int64_t>(tiny.count)) {
      checked.push_back(j);
      checked_margin.push_back(static_cast<double>(sum) / static_cast<double>(tiny.count));
    }
  }
  report.checked_points = checked.size();
  if (checked.empty()) return report;

  std::vector<BigRational> transfer(checked.size(), BigRational(0));
  detail::for_each_ordered_list(fam.m, fam.list_len, [&](const std::vector<uint32_t>& list) {
    Bucket proto = build_bucket(0, list, {}, {}, fam.params, fam.m, fam.n);
    auto masks = detail::leaf_masks(proto.leaves);
    for (uint32_t d = fam.lo; d <= fam.hi && fam.hi >= fam.lo; ++d) {
      BigRational mass = fam.bucket_mass(d);
      if (mass == BigRational(0) || d >= tiny.by_distinct.size()) continue;
      std::vector<uint32_t> members;
      for (uint32_t r : tiny.by_distinct[d]) {
        uint64_t dm = tiny.masks[r];
        for (const auto& lm : masks) {
          if ((dm & lm.required) == lm.required && (dm & lm.forbidden) == 0) {
            members.push_back(r);
            break;
          }
        }
      }
      if (members.empty()) continue;
      int64_t size = static_cast<int64_t>(members.size());
      for (size_t c = 0; c < checked.size(); ++c) {
        int64_t sum = 0;
        for (uint32_t r : members) sum += agree[static_cast<uint64_t>(r) * support + checked[c]];
        if (6 * sum <= 5 * size) transfer[c] += mass;  // margin <= 5/6
      }
    }
  });

  BigRational threshold(1, 12);
  for (size_t c = 0; c < checked.size(); ++c) {
    if (transfer[c] < threshold) {
      std::ostringstream os;
      os << transfer[c];
      report.violations.push_back(
          MarginTransferViolation{checked[c], checked_margin[c], os.str()});
    }
  }
  return report;
}

struct StructureReport {
  uint64_t leaf_count = 0;
  uint64_t expected_leaf_count = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

// Walks the recursion tree for one index list and re-verifies the shape the
// analysis depends on: disjoint required/forbidden sets at every node, full
// coverage of the list at every leaf, (branching-1)^levels leaves, and each
// non-head group landing wholly on one side at every leaf.
inline StructureReport structural_checks(const std::vector<uint32_t>& list,
                                         const BucketParams& params) {
  StructureReport report;
  uint64_t len = list.size();
  uint32_t levels = 0;
  {
    uint64_t p = len;
    while (p > 1) {
      if (params.branching == 0 || p % params.branching != 0) {
        report.failures.push_back("list length is not a power of the branching factor");
        return report;
      }
      p /= params.branching;
      ++levels;
    }
  }
  report.expected_leaf_count = 1;
  for (uint32_t i = 0; i < levels; ++i) report.expected_leaf_count *= params.branching - 1;

  std::vector<uint32_t> root_sorted(list);
  std::sort(root_sorted.begin(), root_sorted.end());

  using Group = std::vector<uint32_t>;
  auto rec = [&](auto&& self, std::span<const uint32_t> cur, std::vector<uint32_t> required,
                 std::vector<uint32_t> forbidden, std::vector<Group> ancestor_groups) -> void {
    {
      std::vector<uint32_t> r(required), f(forbidden);
      std::sort(r.begin(), r.end());
      std::sort(f.begin(), f.end());
      if (!detail::sorted_disjoint(r, f))
        report.failures.push_back("required and forbidden sets overlap at a node");
    }
    if (cur.size() == 1) {
      required.push_back(cur[0]);
      ++report.leaf_count;
      std::vector<uint32_t> r(required), f(forbidden);
      std::sort(r.begin(), r.end());
      std::sort(f.begin(), f.end());
      if (!detail::sorted_disjoint(r, f))
        report.failures.push_back("required and forbidden sets overlap at a leaf");
      std::vector<uint32_t> both;
      std::merge(r.begin(), r.end(), f.begin(), f.end(), std::back_inserter(both));
      if (both != root_sorted)
        report.failures.push_back("leaf required+forbidden does not cover the list exactly");
      for (const auto& g : ancestor_groups) {
        bool all_req = true, all_forb = true;
        for (uint32_t e : g) {
          if (!std::binary_search(r.begin(), r.end(), e)) all_req = false;
          if (!std::binary_search(f.begin(), f.end(), e)) all_forb = false;
        }
        if (!all_req && !all_forb)
          report.failures.push_back("a group is split between required and forbidden at a leaf");
      }
      return;
    }
    size_t group = cur.size() / params.branching;
    std::vector<Group> groups;
    for (uint32_t j = 1; j < params.branching; ++j)
      groups.emplace_back(cur.begin() + j * group, cur.begin() + (j + 1) * group);
    for (uint32_t i = 1; i < params.branching; ++i) {
      std::vector<uint32_t> req = required;
      std::vector<uint32_t> forb = forbidden;
      for (uint32_t j = 1; j < params.branching; ++j) {
        if (j == i)
          forb.insert(forb.end(), groups[j - 1].begin(), groups[j - 1].end());
        else
          req.insert(req.end(), groups[j - 1].begin(), groups[j - 1].end());
      }
      std::vector<Group> next_groups = ancestor_groups;
      next_groups.insert(next_groups.end(), groups.begin(), groups.end());
      self(self, cur.first(group), std::move(req), std::move(forb), std::move(next_groups));
    }
  };
  rec(rec, std::span<const uint32_t>(list), {}, {}, {});

  if (report.leaf_count != report.expected_leaf_count)
    report.failures.push_back("leaf count mismatch");
  return report;
}

}  // namespace paclab
