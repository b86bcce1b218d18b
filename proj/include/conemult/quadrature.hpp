#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "conemult/errors.hpp"

namespace conemult {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(std::size_t n) : nodes(n), weights(n) {
    detail::require(n >= 1, "GaussLegendre: need at least one node");
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = pk;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      weights[i] = w;
      weights[n - 1 - i] = w;
    }
  }

  /// Shared immutable rule of the given order.
  static const GaussLegendre& of_order(std::size_t n) {
    static std::mutex m;
    static std::map<std::size_t, GaussLegendre> cache;
    std::lock_guard lock(m);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
    return it->second;
  }
};

/// Sum of Gauss-Legendre rules over equal panels of [a, b] no longer than
/// max_panel. f may return double or std::complex<double>.
template <class F>
auto integrate_panels(F&& f, double a, double b, double max_panel, std::size_t order = 16) {
  using R = decltype(f(a));
  R total{};
  if (!(b > a)) return total;
  const auto& gl = GaussLegendre::of_order(order);
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / max_panel)));
  const double len = (b - a) / static_cast<double>(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = a + len * static_cast<double>(k);
    const double mid = lo + 0.5 * len;
    R part{};
    for (std::size_t i = 0; i < order; ++i) part += gl.weights[i] * f(mid + 0.5 * len * gl.nodes[i]);
    total += 0.5 * len * part;
  }
  return total;
}

/// Composite Gauss-Legendre nodes/weights on [a, b], for callers that reuse
/// the same points across many integrands.
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static PanelRule build(double a, double b, double max_panel, std::size_t order = 16) {
    PanelRule out;
    if (!(b > a)) return out;
    const auto& gl = GaussLegendre::of_order(order);
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / max_panel)));
    const double len = (b - a) / static_cast<double>(panels);
    out.nodes.reserve(panels * order);
    out.weights.reserve(panels * order);
    for (std::size_t k = 0; k < panels; ++k) {
      const double mid = a + len * (static_cast<double>(k) + 0.5);
      for (std::size_t i = 0; i < order; ++i) {
        out.nodes.push_back(mid + 0.5 * len * gl.nodes[i]);
        out.weights.push_back(0.5 * len * gl.weights[i]);
      }
    }
    return out;
  }

  void append(const PanelRule& other) {
    nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  }

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "fit_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  detail::require(den != 0.0, "fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

}  // namespace conemult
