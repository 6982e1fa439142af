#pragma once

// Concept classes with exactly-solvable ERM oracles and declared VC
// dimension. The ERM tie-breaking policy is pluggable so that "an arbitrary
// consistent hypothesis" becomes testable, including a worst-case
// (adversarial) choice used for diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "paclab/core.hpp"
#include "paclab/errors.hpp"

namespace paclab {

enum class TiePolicyKind : uint8_t { first_consistent, midpoint, adversarial };

// The adversarial policy still returns a consistent hypothesis; among the
// consistent candidates it maximizes true error under its hidden target and
// distribution. Diagnostic use only.
struct TiePolicy {
  TiePolicyKind kind = TiePolicyKind::first_consistent;
  std::shared_ptr<const Hypothesis> hidden;
  std::shared_ptr<const FiniteDistribution> hidden_dist;

  static TiePolicy first_consistent() { return TiePolicy{}; }

  static TiePolicy midpoint() {
    TiePolicy p;
    p.kind = TiePolicyKind::midpoint;
    return p;
  }

  static TiePolicy adversarial(Hypothesis hidden_target, FiniteDistribution dist) {
    TiePolicy p;
    p.kind = TiePolicyKind::adversarial;
    p.hidden = std::make_shared<const Hypothesis>(std::move(hidden_target));
    p.hidden_dist = std::make_shared<const FiniteDistribution>(std::move(dist));
    return p;
  }
};

class ConceptClass {
 public:
  enum class Kind : uint8_t { threshold_ray, interval_union, finite_explicit };

  // One-sided positive ray: h_theta(x) = +1 iff x >= theta.
  static ConceptClass threshold_ray(TiePolicy policy = TiePolicy::midpoint()) {
    ConceptClass c;
    c.kind_ = Kind::threshold_ray;
    c.vc_dim_ = 1;
    c.policy_ = std::move(policy);
    return c;
  }

  static ConceptClass interval_union(uint32_t k, TiePolicy policy = TiePolicy::first_consistent()) {
    if (k < 1) throw std::invalid_argument("interval_union: k must be >= 1");
    ConceptClass c;
    c.kind_ = Kind::interval_union;
    c.intervals_k_ = k;
    c.vc_dim_ = static_cast<int>(2 * k);
    c.policy_ = std::move(policy);
    return c;
  }

  // Explicit class over an atom domain; one label table per member, class
  // order significant. declared_vc_dim must be >= 1.
  static ConceptClass finite_explicit(std::vector<std::vector<int8_t>> tables, int declared_vc_dim,
                                      TiePolicy policy = TiePolicy::first_consistent()) {
    if (tables.empty()) throw std::invalid_argument("finite_explicit: empty class");
    if (declared_vc_dim < 1) throw std::invalid_argument("finite_explicit: vc_dim must be >= 1");
    size_t domain = tables.front().size();
    ConceptClass c;
    c.kind_ = Kind::finite_explicit;
    c.vc_dim_ = declared_vc_dim;
    c.policy_ = std::move(policy);
    c.members_.reserve(tables.size());
    for (auto& t : tables) {
      if (t.size() != domain) throw std::invalid_argument("finite_explicit: ragged label tables");
      for (int8_t v : t)
        if (v != -1 && v != 1) throw std::invalid_argument("finite_explicit: labels must be +-1");
      c.members_.push_back(Hypothesis::finite_member(std::move(t)));
    }
    c.domain_size_ = domain;
    return c;
  }

  Kind kind() const { return kind_; }
  int vc_dim() const { return vc_dim_; }
  uint32_t intervals_k() const { return intervals_k_; }
  const TiePolicy& tie_policy() const { return policy_; }
  const std::vector<Hypothesis>& members() const { return members_; }
  size_t domain_size() const { return domain_size_; }

 private:
  Kind kind_ = Kind::threshold_ray;
  int vc_dim_ = 1;
  uint32_t intervals_k_ = 1;
  TiePolicy policy_;
  std::vector<Hypothesis> members_;  // finite_explicit only
  size_t domain_size_ = 0;
};

namespace detail {

// Distinct (point, label) constraints; conflicting duplicates are not realizable.
inline std::vector<LabeledExample> dedup_constraints(std::span<const LabeledExample> data) {
  std::vector<LabeledExample> out;
  out.reserve(data.size());
  for (const auto& ex : data) {
    bool seen = false;
    for (const auto& have : out) {
      if (have.point == ex.point) {
        if (have.label != ex.label)
          throw NotRealizable("same point with conflicting labels");
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(ex);
  }
  return out;
}

inline bool consistent_with(const Hypothesis& h, std::span<const LabeledExample> constraints) {
  for (const auto& ex : constraints)
    if (h.sign_at(ex.point) != label_sign(ex.label)) return false;
  return true;
}

inline double true_error(const Hypothesis& h, const Hypothesis& target,
                         const FiniteDistribution& dist) {
  double e = 0.0;
  for (size_t i = 0; i < dist.size(); ++i)
    if (h.sign_at(dist.support()[i]) != target.sign_at(dist.support()[i])) e += dist.mass()[i];
  return e;
}

inline Hypothesis erm_threshold(const ConceptClass& cls, std::span<const LabeledExample> data) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double max_neg = -kInf;
  double min_pos = kInf;
  for (const auto& ex : data) {
    if (ex.point.kind != Point::Kind::scalar)
      throw std::invalid_argument("threshold_ray: scalar points required");
    if (ex.label == Label::positive)
      min_pos = std::min(min_pos, ex.point.scalar);
    else
      max_neg = std::max(max_neg, ex.point.scalar);
  }
  if (data.empty()) return Hypothesis::threshold_at(-kInf);  // declared degenerate rule
  if (!(max_neg < min_pos)) throw NotRealizable("threshold_ray: no consistent threshold");
  switch (cls.tie_policy().kind) {
    case TiePolicyKind::midpoint: {
      // IEEE sentinel arithmetic: one-sided data degrades to +-inf extremes.
      double theta = 0.5 * (max_neg + min_pos);
      if (std::isnan(theta)) theta = -kInf;
      return Hypothesis::threshold_at(theta);
    }
    case TiePolicyKind::first_consistent:
      // Tight choice: positive exactly on the region forced by the evidence.
      return Hypothesis::threshold_at(min_pos == kInf ? kInf : min_pos);
    case TiePolicyKind::adversarial:
      throw std::invalid_argument("adversarial tie policy requires a finite class");
  }
  return Hypothesis::threshold_at(-kInf);  // unreachable
}

inline Hypothesis erm_intervals(const ConceptClass& cls, std::span<const LabeledExample> data) {
  if (cls.tie_policy().kind == TiePolicyKind::adversarial)
    throw std::invalid_argument("adversarial tie policy requires a finite class");
  auto constraints = dedup_constraints(data);
  for (const auto& ex : constraints)
    if (ex.point.kind != Point::Kind::scalar)
      throw std::invalid_argument("interval_union: scalar points required");
  std::sort(constraints.begin(), constraints.end(),
            [](const LabeledExample& a, const LabeledExample& b) {
              return a.point.scalar < b.point.scalar;
            });
  // Tight intervals around maximal positive blocks in sorted order.
  std::vector<std::pair<double, double>> blocks;
  for (size_t i = 0; i < constraints.size();) {
    if (constraints[i].label != Label::positive) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < constraints.size() && constraints[j + 1].label == Label::positive) ++j;
    blocks.emplace_back(constraints[i].point.scalar, constraints[j].point.scalar);
    i = j + 1;
  }
  if (blocks.size() > cls.intervals_k())
    throw NotRealizable("interval_union: more positive blocks than intervals");
  return Hypothesis::interval_union(std::move(blocks));
}

inline Hypothesis erm_finite(const ConceptClass& cls, std::span<const LabeledExample> data) {
  auto constraints = dedup_constraints(data);
  const auto& policy = cls.tie_policy();
  if (policy.kind == TiePolicyKind::adversarial) {
    const Hypothesis* best = nullptr;
    double best_err = -1.0;
    for (const auto& h : cls.members()) {
      if (!consistent_with(h, constraints)) continue;
      double e = true_error(h, *policy.hidden, *policy.hidden_dist);
      if (e > best_err) {
        best_err = e;
        best = &h;
      }
    }
    if (!best) throw NotRealizable("finite_explicit: no consistent member");
    return *best;
  }
  // first_consistent; midpoint has no meaning on an unordered finite class
  // and falls back to the same rule.
  for (const auto& h : cls.members())
    if (consistent_with(h, constraints)) return h;
  throw NotRealizable("finite_explicit: no consistent member");
}

}  // namespace detail

// Any-consistent-hypothesis oracle. The returned hypothesis is a class member
// and agrees with every (x, y) in data, duplicates included.
inline Hypothesis erm(const ConceptClass& cls, std::span<const LabeledExample> data) {
  switch (cls.kind()) {
    case ConceptClass::Kind::threshold_ray:
      return detail::erm_threshold(cls, data);
    case ConceptClass::Kind::interval_union:
      return detail::erm_intervals(cls, data);
    case ConceptClass::Kind::finite_explicit:
      return detail::erm_finite(cls, data);
  }
  throw std::logic_error("erm: unknown class kind");
}

inline Hypothesis erm(const ConceptClass& cls, const TrainingSet& data) {
  return erm(cls, std::span<const LabeledExample>(data.examples));
}

// All and only the consistent members, in class order. Finite classes only.
inline std::vector<Hypothesis> consistent_set(const ConceptClass& cls,
                                              std::span<const LabeledExample> data) {
  if (cls.kind() != ConceptClass::Kind::finite_explicit)
    throw std::invalid_argument("consistent_set: finite class required");
  auto constraints = detail::dedup_constraints(data);
  std::vector<Hypothesis> out;
  for (const auto& h : cls.members())
    if (detail::consistent_with(h, constraints)) out.push_back(h);
  return out;
}

namespace detail {

// Exhaustive shattering check for size s over the atom domain [0, domain).
inline bool shatters_some_set(const ConceptClass& cls, size_t domain, size_t s) {
  std::vector<size_t> idx(s);
  for (size_t i = 0; i < s; ++i) idx[i] = i;
  const size_t want = size_t{1} << s;
  while (true) {
    std::set<uint64_t> patterns;
    for (const auto& h : cls.members()) {
      uint64_t pat = 0;
      for (size_t i = 0; i < s; ++i)
        if (h.sign_at(Point::from_atom(static_cast<uint32_t>(idx[i]))) > 0) pat |= uint64_t{1} << i;
      patterns.insert(pat);
      if (patterns.size() == want) return true;
    }
    // next combination
    size_t i = s;
    while (i > 0) {
      --i;
      if (idx[i] != i + domain - s) {
        ++idx[i];
        for (size_t j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return false;
    }
  }
}

}  // namespace detail

// Declared closed-form dimension for the parametric classes; exhaustive
// shattering search for finite classes on atom domains of size <= 20.
inline int vc_dim_of(const ConceptClass& cls) {
  constexpr size_t kDomainCap = 20;
  switch (cls.kind()) {
    case ConceptClass::Kind::threshold_ray:
      return 1;
    case ConceptClass::Kind::interval_union:
      return static_cast<int>(2 * cls.intervals_k());
    case ConceptClass::Kind::finite_explicit: {
      size_t domain = cls.domain_size();
      if (domain > kDomainCap)
        throw DomainTooLarge("vc_dim_of: exhaustive search capped at domain size 20");
      size_t upper = domain;
      while (upper > 0 && (size_t{1} << upper) > cls.members().size()) --upper;
      for (size_t s = upper; s >= 1; --s)
        if (detail::shatters_some_set(cls, domain, s)) return static_cast<int>(s);
      return 0;
    }
  }
  throw std::logic_error("vc_dim_of: unknown class kind");
}

}  // namespace paclab
