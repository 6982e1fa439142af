#pragma once

// Monte Carlo loss estimation with Hoeffding confidence intervals, margin
// histograms, log-log slope fitting, and the classic realizable
// generalization bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "paclab/core.hpp"
#include "paclab/datagen.hpp"
#include "paclab/errors.hpp"
#include "paclab/rng.hpp"

namespace paclab {

struct LossEstimate {
  double point_estimate = 0.0;
  double ci_halfwidth = 0.0;
  uint64_t n_samples = 0;
  double confidence = 0.95;
};

inline double hoeffding_halfwidth(uint64_t n_samples, double confidence) {
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n_samples)));
}

// Empirical error under the margin <= 0 convention (ties count as errors).
inline LossEstimate mc_loss(const VotingClassifier& f, const SourceDistribution& dist,
                            const Hypothesis& target, uint64_t n_samples, double confidence,
                            Rng& rng) {
  if (n_samples < 1) throw std::invalid_argument("mc_loss: n_samples must be >= 1");
  uint64_t errors = 0;
  for (uint64_t i = 0; i < n_samples; ++i) {
    Point x = dist.sample(rng);
    if (f.vote_sum(x) * target.sign_at(x) <= 0) ++errors;
  }
  LossEstimate est;
  est.point_estimate = static_cast<double>(errors) / static_cast<double>(n_samples);
  est.ci_halfwidth = hoeffding_halfwidth(n_samples, confidence);
  est.n_samples = n_samples;
  est.confidence = confidence;
  return est;
}

inline LossEstimate mc_loss(const Hypothesis& h, const SourceDistribution& dist,
                            const Hypothesis& target, uint64_t n_samples, double confidence,
                            Rng& rng) {
  if (n_samples < 1) throw std::invalid_argument("mc_loss: n_samples must be >= 1");
  uint64_t errors = 0;
  for (uint64_t i = 0; i < n_samples; ++i) {
    Point x = dist.sample(rng);
    if (h.sign_at(x) != target.sign_at(x)) ++errors;
  }
  LossEstimate est;
  est.point_estimate = static_cast<double>(errors) / static_cast<double>(n_samples);
  est.ci_halfwidth = hoeffding_halfwidth(n_samples, confidence);
  est.n_samples = n_samples;
  est.confidence = confidence;
  return est;
}

struct MarginHistogram {
  std::vector<double> edges;     // bins + 1 edges over [-1, 1]
  std::vector<uint64_t> counts;  // per bin
  std::vector<double> samples;   // sampled margins, sorted ascending
  uint64_t n_samples = 0;

  // Empirical fraction of sampled margins <= gamma.
  double cumulative_at(double gamma) const {
    auto it = std::upper_bound(samples.begin(), samples.end(), gamma);
    return static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
  }
};

inline MarginHistogram margin_histogram(const VotingClassifier& f, const SourceDistribution& dist,
                                        const Hypothesis& target, uint64_t n_samples,
                                        uint32_t bins, Rng& rng) {
  if (bins < 1) throw std::invalid_argument("margin_histogram: bins must be >= 1");
  if (n_samples < 1) throw std::invalid_argument("margin_histogram: n_samples must be >= 1");
  MarginHistogram h;
  h.n_samples = n_samples;
  h.edges.resize(bins + 1);
  for (uint32_t i = 0; i <= bins; ++i) h.edges[i] = -1.0 + 2.0 * i / bins;
  h.counts.assign(bins, 0);
  h.samples.reserve(n_samples);
  for (uint64_t i = 0; i < n_samples; ++i) {
    Point x = dist.sample(rng);
    double v = margin(f, x, target(x));
    h.samples.push_back(v);
    auto bin = static_cast<size_t>(std::min<double>(bins - 1, std::max(0.0, (v + 1.0) / 2.0 * bins)));
    ++h.counts[bin];
  }
  std::sort(h.samples.begin(), h.samples.end());
  return h;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least squares of log(loss) against log(m). Callers must drop or
// lower-bound zero losses first.
inline SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DegenerateInput("slope_fit: need at least 3 points");
  for (const auto& [m, loss] : points)
    if (!(loss > 0.0) || !(m > 0.0)) throw DegenerateInput("slope_fit: losses and m must be > 0");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& [m, loss] : points) {
    double x = std::log(m), y = std::log(loss);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DegenerateInput("slope_fit: degenerate m values");
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (const auto& [m, loss] : points) {
    double e = std::log(loss) - (fit.intercept + fit.slope * std::log(m));
    ss_res += e * e;
  }
  fit.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

// (2/m)(d lg2(2em/d) + lg2(2/delta)): the realizable bound for any
// consistent hypothesis.
inline double blumer_bound(double m, uint32_t vc_dim, double delta) {
  if (!(m >= 1.0)) throw std::invalid_argument("blumer_bound: m must be >= 1");
  if (vc_dim < 1) throw std::invalid_argument("blumer_bound: vc_dim must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("blumer_bound: delta in (0, 1)");
  const double d = static_cast<double>(vc_dim);
  return (2.0 / m) * (d * std::log2(2.0 * std::exp(1.0) * m / d) + std::log2(2.0 / delta));
}

}  // namespace paclab
