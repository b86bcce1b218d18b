#pragma once

// Decreasing rearrangements and Lorentz L^{p,nu} quasi-norms over weighted
// discrete measures.
//
// With f* the right-continuous decreasing rearrangement,
//
//   ||f||_{p,nu}  = ( int_0^inf (t^{1/p} f*(t))^nu dt/t )^{1/nu},   nu < inf
//   ||f||_{p,inf} = sup_t t^{1/p} f*(t).
//
// No Gamma-factor normalization is applied. For p = nu this is the weighted
// L^p norm.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "conemult/errors.hpp"

namespace conemult {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

struct LorentzParams {
  double p = 2.0;
  double nu = 2.0;

  static LorentzParams strong(double p) { return {p, p}; }
  static LorentzParams weak(double p) { return {p, infinity}; }

  [[nodiscard]] bool weak_type() const { return std::isinf(nu); }

  void validate() const {
    detail::require(std::isfinite(p) && p > 0.0, "Lorentz exponent p must be finite and > 0");
    detail::require(nu >= p, "Lorentz exponent nu must satisfy nu >= p");
  }
};

/// Magnitudes |f| at sample cells together with the measure of each cell.
class WeightedSampleSet {
 public:
  WeightedSampleSet() = default;

  WeightedSampleSet(std::span<const double> values, std::span<const double> weights) {
    detail::require(values.size() == weights.size(),
                    "WeightedSampleSet: values and weights differ in length");
    values_.reserve(values.size());
    weights_.reserve(weights.size());
    for (std::size_t i = 0; i < values.size(); ++i) push_back(values[i], weights[i]);
  }

  WeightedSampleSet(const std::vector<double>& values, const std::vector<double>& weights)
      : WeightedSampleSet(std::span<const double>(values), std::span<const double>(weights)) {}

  void reserve(std::size_t n) {
    values_.reserve(n);
    weights_.reserve(n);
  }

  void push_back(double value, double weight) {
    detail::require(std::isfinite(value), "WeightedSampleSet: non-finite sample value");
    detail::require(std::isfinite(weight) && weight > 0.0,
                    "WeightedSampleSet: weights must be finite and positive");
    values_.push_back(std::abs(value));
    weights_.push_back(weight);
  }

  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }

  [[nodiscard]] double total_measure() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
  }

  /// Weighted measure of {|f| > level}, computed directly from the samples.
  [[nodiscard]] double distribution(double level) const {
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i] > level) m += weights_[i];
    return m;
  }

 private:
  std::vector<double> values_;
  std::vector<double> weights_;
};

/// Decreasing step function: levels[i] on [breakpoints[i], breakpoints[i+1]).
struct RearrangedFunction {
  std::vector<double> breakpoints;  // 0 = t_0 < t_1 < ... < t_n
  std::vector<double> levels;       // strictly decreasing after merging
  std::vector<double> piece_measures;  // t_{i+1} - t_i, kept exactly as summed weights

  [[nodiscard]] double total_measure() const { return breakpoints.empty() ? 0.0 : breakpoints.back(); }

  [[nodiscard]] double operator()(double t) const {
    if (t < 0.0 || levels.empty()) return 0.0;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const auto i = static_cast<std::size_t>(it - breakpoints.begin());
    return i == 0 || i > levels.size() ? 0.0 : levels[i - 1];
  }

  /// Measure of {f* > level}.
  [[nodiscard]] double distribution(double level) const {
    std::size_t k = 0;
    while (k < levels.size() && levels[k] > level) ++k;
    return breakpoints[k];
  }
};

inline RearrangedFunction decreasing_rearrangement(const WeightedSampleSet& samples) {
  detail::require(!samples.empty(), "decreasing_rearrangement: empty sample set");
  const auto values = samples.values();
  const auto weights = samples.weights();
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  RearrangedFunction out;
  out.breakpoints.push_back(0.0);
  double t = 0.0;
  for (std::size_t idx : order) {
    const double v = values[idx];
    const double w = weights[idx];
    t += w;
    if (!out.levels.empty() && out.levels.back() == v) {
      out.piece_measures.back() += w;
      out.breakpoints.back() = t;
    } else {
      out.levels.push_back(v);
      out.piece_measures.push_back(w);
      out.breakpoints.push_back(t);
    }
  }
  return out;
}

inline double lorentz_quasinorm(const RearrangedFunction& f, LorentzParams params) {
  params.validate();
  if (f.levels.empty() || f.levels.front() == 0.0) return 0.0;
  const double p = params.p;

  if (params.weak_type()) {
    // sup over each constant piece is attained at its right endpoint.
    double best = 0.0;
    for (std::size_t i = 0; i < f.levels.size(); ++i)
      best = std::max(best, std::pow(f.breakpoints[i + 1], 1.0 / p) * f.levels[i]);
    return best;
  }

  // sum_i level_i^nu (p/nu) (t_{i+1}^{q} - t_i^{q}),  q = nu/p, evaluated with
  // levels scaled by the maximum and times scaled by the total measure.
  const double nu = params.nu;
  const double q = nu / p;
  const double top = f.levels.front();
  const double total = f.total_measure();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.levels.size(); ++i) {
    const double level = f.levels[i] / top;
    if (level == 0.0) break;
    const double lo = f.breakpoints[i] / total;
    const double w = f.piece_measures[i] / total;
    double increment;
    if (q == 1.0) {
      increment = w;
    } else if (lo == 0.0) {
      increment = std::pow(w, q);
    } else {
      increment = std::pow(lo, q) * std::expm1(q * std::log1p(w / lo));
    }
    sum += std::pow(level, nu) * increment;
  }
  return top * std::pow(total, 1.0 / p) * std::pow(sum / q, 1.0 / nu);
}

inline double lorentz_quasinorm(const WeightedSampleSet& samples, LorentzParams params) {
  return lorentz_quasinorm(decreasing_rearrangement(samples), params);
}

/// (sum_i w_i |v_i|^p)^{1/p}, computed directly without rearrangement.
inline double weighted_lp_norm(const WeightedSampleSet& samples, double p) {
  detail::require(p > 0.0, "weighted_lp_norm: p must be > 0");
  const auto v = samples.values();
  const auto w = samples.weights();
  double top = 0.0;
  for (double x : v) top = std::max(top, x);
  if (top == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += w[i] * std::pow(v[i] / top, p);
  return top * std::pow(sum, 1.0 / p);
}

/// Midpoint samples of |f| on the symmetric grid of [-R, R] with N cells,
/// weighted by cell_width * (1 + |s|)^weight_exponent.
template <class F>
WeightedSampleSet weighted_line_samples(F&& f, double weight_exponent, double R, std::size_t N) {
  detail::require(R > 0.0, "weighted_line_samples: truncation R must be > 0");
  detail::require(N >= 2, "weighted_line_samples: resolution N must be >= 2");
  const double h = 2.0 * R / static_cast<double>(N);
  WeightedSampleSet out;
  out.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double s = -R + (static_cast<double>(i) + 0.5) * h;
    const double value = std::abs(f(s));
    if (!std::isfinite(value))
      detail::fail("weighted_line_samples: non-finite value at s = " + std::to_string(s));
    out.push_back(value, h * std::pow(1.0 + std::abs(s), weight_exponent));
  }
  return out;
}

/// Samples given on the uniform grid s_m = (m - center) * spacing, each
/// treated as the midpoint of a cell of width `spacing`; only cells with
/// |s_m| <= R are kept. Weights are spacing * (1 + |s_m|)^weight_exponent.
template <class Abs>
WeightedSampleSet weighted_grid_samples(std::size_t count, Abs&& abs_value, double spacing,
                                        double center, double weight_exponent, double R) {
  detail::require(spacing > 0.0, "weighted_grid_samples: spacing must be > 0");
  WeightedSampleSet out;
  for (std::size_t m = 0; m < count; ++m) {
    const double s = (static_cast<double>(m) - center) * spacing;
    if (std::abs(s) > R) continue;
    const double value = abs_value(m);
    if (!std::isfinite(value))
      detail::fail("weighted_grid_samples: non-finite value at s = " + std::to_string(s));
    out.push_back(value, spacing * std::pow(1.0 + std::abs(s), weight_exponent));
  }
  return out;
}

}  // namespace conemult
