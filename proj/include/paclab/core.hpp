#pragma once

// Domain types for samples, hypotheses and voting classifiers, plus exact
// margin-loss evaluation over finite-support distributions. Everything here
// is an immutable value type; all operations are pure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "paclab/errors.hpp"
#include "paclab/rng.hpp"

namespace paclab {

enum class Label : int8_t { negative = -1, positive = +1 };

inline int label_sign(Label y) { return y == Label::positive ? +1 : -1; }
inline Label label_from_sign(int s) { return s > 0 ? Label::positive : Label::negative; }

// A point is either a real scalar or an index into a finite atom domain.
struct Point {
  enum class Kind : uint8_t { scalar, atom };

  Kind kind = Kind::scalar;
  double scalar = 0.0;
  uint32_t atom = 0;

  static Point from_scalar(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("Point: scalar must be finite");
    Point p;
    p.kind = Kind::scalar;
    p.scalar = x;
    return p;
  }

  static Point from_atom(uint32_t a) {
    Point p;
    p.kind = Kind::atom;
    p.atom = a;
    return p;
  }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.kind != b.kind) return false;
    return a.kind == Kind::scalar ? a.scalar == b.scalar : a.atom == b.atom;
  }
};

struct LabeledExample {
  Point point;
  Label label = Label::positive;
};

// Ordered sample; the order carries index semantics for bootstrap vectors.
// Duplicates are allowed.
struct TrainingSet {
  std::vector<LabeledExample> examples;

  size_t size() const { return examples.size(); }
  const LabeledExample& operator[](size_t i) const { return examples[i]; }
};

// A +-1 predictor. Tagged union so hypotheses stay small copyable values;
// finite-class members share their label table.
class Hypothesis {
 public:
  enum class Kind : uint8_t { threshold, interval_union, finite_member, constant };

  Hypothesis() : kind_(Kind::constant), constant_(+1) {}

  // +1 iff x >= theta. theta = -inf is the all-positive sentinel, +inf all-negative.
  static Hypothesis threshold_at(double theta) {
    Hypothesis h;
    h.kind_ = Kind::threshold;
    h.theta_ = theta;
    return h;
  }

  // +1 iff x lies in any closed interval [a, b].
  static Hypothesis interval_union(std::vector<std::pair<double, double>> intervals) {
    Hypothesis h;
    h.kind_ = Kind::interval_union;
    h.intervals_ = std::move(intervals);
    return h;
  }

  // Explicit label table over an atom domain, values in {-1, +1}.
  static Hypothesis finite_member(std::shared_ptr<const std::vector<int8_t>> table) {
    Hypothesis h;
    h.kind_ = Kind::finite_member;
    h.table_ = std::move(table);
    return h;
  }

  static Hypothesis finite_member(std::vector<int8_t> table) {
    return finite_member(std::make_shared<const std::vector<int8_t>>(std::move(table)));
  }

  static Hypothesis constant(Label y) {
    Hypothesis h;
    h.kind_ = Kind::constant;
    h.constant_ = static_cast<int8_t>(label_sign(y));
    return h;
  }

  Kind kind() const { return kind_; }
  double threshold() const { return theta_; }
  const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }
  const std::vector<int8_t>& table() const { return *table_; }
  const std::shared_ptr<const std::vector<int8_t>>& table_ptr() const { return table_; }

  int sign_at(const Point& x) const {
    switch (kind_) {
      case Kind::threshold:
        require_scalar(x);
        return x.scalar >= theta_ ? +1 : -1;
      case Kind::interval_union: {
        require_scalar(x);
        for (const auto& [a, b] : intervals_)
          if (x.scalar >= a && x.scalar <= b) return +1;
        return -1;
      }
      case Kind::finite_member:
        if (x.kind != Point::Kind::atom) throw std::invalid_argument("Hypothesis: atom point required");
        if (x.atom >= table_->size()) throw std::invalid_argument("Hypothesis: atom outside domain");
        return (*table_)[x.atom];
      case Kind::constant:
        return constant_;
    }
    return -1;  // unreachable
  }

  Label operator()(const Point& x) const { return label_from_sign(sign_at(x)); }

 private:
  static void require_scalar(const Point& x) {
    if (x.kind != Point::Kind::scalar) throw std::invalid_argument("Hypothesis: scalar point required");
  }

  Kind kind_;
  double theta_ = 0.0;
  std::vector<std::pair<double, double>> intervals_;
  std::shared_ptr<const std::vector<int8_t>> table_;
  int8_t constant_ = +1;
};

// Uniform-weight voter over +-1 hypotheses. The margin lattice is exact:
// vote sums are kept as integers, evaluation is vote_sum / t.
//
// Two aggregate fast paths are built at construction (they change nothing
// observable): a sorted threshold list when every member is a plain
// threshold, and a per-atom summed vote table when every member acts on the
// same atom domain.
class VotingClassifier {
 public:
  explicit VotingClassifier(std::vector<Hypothesis> members) : members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("VotingClassifier: needs at least one member");
    build_fast_paths();
  }

  size_t size() const { return members_.size(); }
  const std::vector<Hypothesis>& members() const { return members_; }

  // Sum of the +-1 votes at x; value in [-t, t] with t - |sum| even.
  int64_t vote_sum(const Point& x) const {
    if (!sorted_thresholds_.empty() && x.kind == Point::Kind::scalar) {
      // +1 iff theta <= x, so positives = upper_bound(x).
      auto it = std::upper_bound(sorted_thresholds_.begin(), sorted_thresholds_.end(), x.scalar);
      int64_t pos = it - sorted_thresholds_.begin();
      return 2 * pos - static_cast<int64_t>(members_.size());
    }
    if (!atom_vote_table_.empty() && x.kind == Point::Kind::atom && x.atom < atom_vote_table_.size())
      return atom_vote_table_[x.atom];
    int64_t s = 0;
    for (const auto& h : members_) s += h.sign_at(x);
    return s;
  }

  double evaluate(const Point& x) const {
    return static_cast<double>(vote_sum(x)) / static_cast<double>(members_.size());
  }

 private:
  void build_fast_paths() {
    bool all_threshold = true;
    for (const auto& h : members_)
      if (h.kind() != Hypothesis::Kind::threshold) {
        all_threshold = false;
        break;
      }
    if (all_threshold) {
      sorted_thresholds_.reserve(members_.size());
      for (const auto& h : members_) sorted_thresholds_.push_back(h.threshold());
      std::sort(sorted_thresholds_.begin(), sorted_thresholds_.end());
      return;
    }
    size_t domain = 0;
    for (const auto& h : members_) {
      if (h.kind() == Hypothesis::Kind::finite_member) {
        if (domain == 0) domain = h.table().size();
        if (h.table().size() != domain) return;
      } else if (h.kind() != Hypothesis::Kind::constant) {
        return;
      }
    }
    if (domain == 0) return;
    atom_vote_table_.assign(domain, 0);
    for (const auto& h : members_) {
      if (h.kind() == Hypothesis::Kind::constant) {
        int s = h.sign_at(Point::from_atom(0));
        for (auto& v : atom_vote_table_) v += s;
      } else {
        const auto& t = h.table();
        for (size_t a = 0; a < domain; ++a) atom_vote_table_[a] += t[a];
      }
    }
  }

  std::vector<Hypothesis> members_;
  std::vector<double> sorted_thresholds_;
  std::vector<int64_t> atom_vote_table_;
};

// f(x) * y, in [-1, 1]. Values land on the lattice {(2k - t)/t : k = 0..t}.
inline double margin(const VotingClassifier& f, const Point& x, Label y) {
  return static_cast<double>(f.vote_sum(x) * label_sign(y)) / static_cast<double>(f.size());
}

// Majority vote; an exact tie returns negative. Callers computing loss use
// the margin <= 0 convention, so the tie label never affects reported losses.
inline Label predict(const VotingClassifier& f, const Point& x) {
  return f.vote_sum(x) > 0 ? Label::positive : Label::negative;
}

// Finite-support distribution with exact-summation helpers.
class FiniteDistribution {
 public:
  FiniteDistribution(std::vector<Point> support, std::vector<double> mass)
      : support_(std::move(support)), mass_(std::move(mass)) {
    if (support_.empty() || support_.size() != mass_.size())
      throw std::invalid_argument("FiniteDistribution: support/mass size mismatch");
    double total = 0.0;
    for (double w : mass_) {
      if (!(w >= 0.0)) throw std::invalid_argument("FiniteDistribution: negative mass");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("FiniteDistribution: masses must sum to 1 within 1e-12");
    for (size_t i = 0; i < support_.size(); ++i)
      for (size_t j = i + 1; j < support_.size(); ++j)
        if (support_[i] == support_[j])
          throw std::invalid_argument("FiniteDistribution: support entries must be distinct");
    cumulative_.resize(mass_.size());
    double run = 0.0;
    for (size_t i = 0; i < mass_.size(); ++i) {
      run += mass_[i];
      cumulative_[i] = run;
    }
    cumulative_.back() = 1.0;
  }

  const std::vector<Point>& support() const { return support_; }
  const std::vector<double>& mass() const { return mass_; }
  size_t size() const { return support_.size(); }

  Point sample(Rng& rng) const {
    double u = rng.next_unit();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    size_t i = std::min<size_t>(it - cumulative_.begin(), support_.size() - 1);
    return support_[i];
  }

 private:
  std::vector<Point> support_;
  std::vector<double> mass_;
  std::vector<double> cumulative_;
};

struct MarginThreshold {
  double value = 0.0;

  explicit MarginThreshold(double gamma) : value(gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw std::invalid_argument("MarginThreshold: gamma must lie in [0, 1]");
  }
};

// Probability mass where f has margin at most gamma, summed exactly over the
// support. gamma = 0 gives the ordinary loss (ties count as errors).
inline double margin_loss_exact(const VotingClassifier& f, const FiniteDistribution& dist,
                                const Hypothesis& target, MarginThreshold gamma) {
  double loss = 0.0;
  for (size_t i = 0; i < dist.size(); ++i) {
    const Point& x = dist.support()[i];
    if (margin(f, x, target(x)) <= gamma.value) loss += dist.mass()[i];
  }
  return loss;
}

}  // namespace paclab
