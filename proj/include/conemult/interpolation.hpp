#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "conemult/errors.hpp"

namespace conemult {

/// Piecewise cubic Hermite interpolant with finite-difference slopes
/// (Catmull-Rom on nonuniform nodes). Outside [front, back] it returns
/// `outside` (zero by default).
template <class T>
class CubicInterpolant {
 public:
  CubicInterpolant() = default;

  CubicInterpolant(std::vector<double> nodes, std::vector<T> values, T outside = T{})
      : nodes_(std::move(nodes)), values_(std::move(values)), outside_(outside) {
    detail::require(nodes_.size() == values_.size() && nodes_.size() >= 2,
                    "CubicInterpolant: need at least two nodes with matching values");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
      detail::require(nodes_[i] > nodes_[i - 1], "CubicInterpolant: nodes must be strictly increasing");
    const std::size_t n = nodes_.size();
    slopes_.resize(n);
    slopes_[0] = (values_[1] - values_[0]) / (nodes_[1] - nodes_[0]);
    slopes_[n - 1] = (values_[n - 1] - values_[n - 2]) / (nodes_[n - 1] - nodes_[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i)
      slopes_[i] = (values_[i + 1] - values_[i - 1]) / (nodes_[i + 1] - nodes_[i - 1]);
  }

  [[nodiscard]] T operator()(double x) const {
    if (nodes_.empty() || x < nodes_.front() || x > nodes_.back()) return outside_;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    i = std::clamp<std::size_t>(i, 1, nodes_.size() - 1) - 1;
    const double h = nodes_[i + 1] - nodes_[i];
    const double t = (x - nodes_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] + h11 * h * slopes_[i + 1];
  }

  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<T>& values() const { return values_; }

 private:
  std::vector<double> nodes_;
  std::vector<T> values_;
  std::vector<T> slopes_;
  T outside_{};
};

/// Cubic Hermite interpolation on the uniform grid x_j = j * step with
/// exact slopes supplied by the caller; `outside` beyond the last node.
template <class T>
class HermiteTable {
 public:
  HermiteTable() = default;

  HermiteTable(double step, std::vector<T> values, std::vector<T> slopes, T outside = T{})
      : step_(step), values_(std::move(values)), slopes_(std::move(slopes)), outside_(outside) {
    detail::require(step_ > 0.0, "HermiteTable: step must be > 0");
    detail::require(values_.size() == slopes_.size() && values_.size() >= 2,
                    "HermiteTable: need at least two nodes with matching slopes");
  }

  [[nodiscard]] T operator()(double x) const {
    if (values_.empty() || x < 0.0) return outside_;
    const double u = x / step_;
    if (u > static_cast<double>(values_.size() - 1)) return outside_;
    const std::size_t i = std::min(static_cast<std::size_t>(u), values_.size() - 2);
    const double t = u - static_cast<double>(i);
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * values_[i] + h10 * step_ * slopes_[i] + h01 * values_[i + 1] + h11 * step_ * slopes_[i + 1];
  }

  [[nodiscard]] double step() const { return step_; }
  [[nodiscard]] double last_node() const { return step_ * static_cast<double>(values_.size() - 1); }
  [[nodiscard]] const std::vector<T>& values() const { return values_; }
  [[nodiscard]] const std::vector<T>& slopes() const { return slopes_; }

 private:
  double step_ = 1.0;
  std::vector<T> values_;
  std::vector<T> slopes_;
  T outside_{};
};

}  // namespace conemult
