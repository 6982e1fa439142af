#pragma once

// Distribution samplers and realizable dataset generation, including the
// heavy-atom-plus-geometric-tail hard instance used to stress proper ERM.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "paclab/concept_class.hpp"
#include "paclab/core.hpp"
#include "paclab/rng.hpp"

namespace paclab {

class SourceDistribution {
 public:
  enum class Kind : uint8_t { finite, uniform_unit };

  static SourceDistribution finite(FiniteDistribution dist) {
    SourceDistribution d;
    d.kind_ = Kind::finite;
    d.finite_ = std::make_shared<const FiniteDistribution>(std::move(dist));
    return d;
  }

  static SourceDistribution uniform_unit() {
    SourceDistribution d;
    d.kind_ = Kind::uniform_unit;
    return d;
  }

  Kind kind() const { return kind_; }

  // Non-null only for finite distributions.
  const FiniteDistribution* finite_dist() const { return finite_.get(); }

  Point sample(Rng& rng) const {
    if (kind_ == Kind::finite) return finite_->sample(rng);
    return Point::from_scalar(rng.next_unit());
  }

 private:
  Kind kind_ = Kind::uniform_unit;
  std::shared_ptr<const FiniteDistribution> finite_;
};

// m i.i.d. points labeled by the concept. Deterministic given the rng state.
inline TrainingSet draw_training_set(const SourceDistribution& dist, const Hypothesis& target,
                                     size_t m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("draw_training_set: m must be >= 1");
  TrainingSet s;
  s.examples.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    Point x = dist.sample(rng);
    s.examples.push_back({x, target(x)});
  }
  return s;
}

struct HardInstanceSpec {
  uint32_t light_atoms = 64;   // k
  double decay = 0.9;          // geometric ratio in (0, 1)
  double heavy_mass = 0.5;     // mass of the anchor atom, in (0, 1)
};

struct HardInstance {
  ConceptClass concept_class;
  SourceDistribution distribution;
  Hypothesis target;  // all-negative
};

// Atom domain {0, ..., k}: atom 0 carries heavy_mass, atoms 1..k normalized
// geometric masses. Class = {all-negative} + {singleton_i : i in 1..k} where
// singleton_i is positive only on atom i; declared vc_dim = 1. The heavy
// anchor keeps the adversarial ERM choosing a consistent singleton on the
// heaviest unseen atom.
inline HardInstance hard_instance(const HardInstanceSpec& spec,
                                  TiePolicyKind policy = TiePolicyKind::adversarial) {
  if (spec.light_atoms < 1) throw std::invalid_argument("hard_instance: need at least one light atom");
  if (!(spec.decay > 0.0 && spec.decay < 1.0))
    throw std::invalid_argument("hard_instance: decay must lie in (0, 1)");
  if (!(spec.heavy_mass > 0.0 && spec.heavy_mass < 1.0))
    throw std::invalid_argument("hard_instance: heavy_mass must lie in (0, 1)");

  const uint32_t k = spec.light_atoms;
  std::vector<Point> support;
  std::vector<double> mass;
  support.reserve(k + 1);
  mass.reserve(k + 1);
  support.push_back(Point::from_atom(0));
  mass.push_back(spec.heavy_mass);
  double geo_total = 0.0;
  for (uint32_t i = 0; i < k; ++i) geo_total += std::pow(spec.decay, i);
  for (uint32_t i = 1; i <= k; ++i) {
    support.push_back(Point::from_atom(i));
    mass.push_back((1.0 - spec.heavy_mass) * std::pow(spec.decay, i - 1) / geo_total);
  }
  // Exact renormalization of float rounding in the last light atom.
  double total = 0.0;
  for (double w : mass) total += w;
  mass.back() += 1.0 - total;
  FiniteDistribution dist(support, mass);

  std::vector<std::vector<int8_t>> tables;
  tables.reserve(k + 1);
  tables.emplace_back(k + 1, int8_t{-1});  // all-negative, the target
  for (uint32_t i = 1; i <= k; ++i) {
    std::vector<int8_t> t(k + 1, int8_t{-1});
    t[i] = 1;
    tables.push_back(std::move(t));
  }
  Hypothesis target = Hypothesis::finite_member(tables.front());

  TiePolicy tie;
  switch (policy) {
    case TiePolicyKind::adversarial:
      tie = TiePolicy::adversarial(target, dist);
      break;
    case TiePolicyKind::midpoint:
      tie = TiePolicy::midpoint();
      break;
    case TiePolicyKind::first_consistent:
      tie = TiePolicy::first_consistent();
      break;
  }
  ConceptClass cls = ConceptClass::finite_explicit(std::move(tables), /*declared_vc_dim=*/1, tie);
  return HardInstance{std::move(cls), SourceDistribution::finite(std::move(dist)), std::move(target)};
}

}  // namespace paclab
