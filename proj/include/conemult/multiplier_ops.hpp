#pragma once

// Cone multipliers on R^d x R and the associated convolution operators on
// periodic grids. Cone fields put tau on the last axis of the grid.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "conemult/cutoffs.hpp"
#include "conemult/errors.hpp"
#include "conemult/grid_field.hpp"
#include "conemult/interpolation.hpp"
#include "conemult/parallel.hpp"

namespace conemult {

/// k with t in [2^k, 2^{k+1}), t > 0.
inline int dyadic_slab(double t) {
  int e = 0;
  std::frexp(t, &e);  // t = m 2^e, m in [1/2, 1)
  return e - 1;
}

/// A real profile on R, either in closed form or sampled. Sampled profiles
/// are cubic-interpolated and clamped to zero outside [-support, support].
class GammaProfile {
 public:
  GammaProfile() = default;

  static GammaProfile closed_form(std::function<double(double)> f, double support_radius, std::string name) {
    GammaProfile g;
    g.fn_ = std::move(f);
    g.support_ = support_radius;
    g.name_ = std::move(name);
    g.check_support();
    return g;
  }

  static GammaProfile sampled(std::vector<double> nodes, std::vector<double> values, double support_radius,
                              std::string name = "sampled") {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (std::abs(nodes[i]) >= support_radius && values[i] != 0.0)
        detail::fail("GammaProfile: sample at u = " + std::to_string(nodes[i]) +
                     " is nonzero outside the support radius " + std::to_string(support_radius));
    auto interp = std::make_shared<CubicInterpolant<double>>(std::move(nodes), std::move(values));
    GammaProfile g;
    g.support_ = support_radius;
    g.name_ = std::move(name);
    g.fn_ = [interp, r = support_radius](double u) { return std::abs(u) >= r ? 0.0 : (*interp)(u); };
    return g;
  }

  static GammaProfile zero(double support_radius = 0.25) {
    return closed_form([](double) { return 0.0; }, support_radius, "zero");
  }

  /// Tent max(0, 1 - |u|/w), supported in (-w, w).
  static GammaProfile tent(double half_width) {
    return closed_form([half_width](double u) { return std::max(0.0, 1.0 - std::abs(u) / half_width); },
                       half_width, "tent");
  }

  [[nodiscard]] double operator()(double u) const { return fn_ ? fn_(u) : 0.0; }
  [[nodiscard]] double support_radius() const { return support_; }
  [[nodiscard]] const std::string& name() const { return name_; }

  /// Probes 4096 points on each side of [-r, r] out to 4r and fails on any
  /// nonzero value there.
  void check_support(double radius) const {
    detail::require(radius > 0.0, "GammaProfile: support radius must be > 0");
    constexpr int probes = 4096;
    for (int side : {-1, 1}) {
      for (int i = 0; i <= probes; ++i) {
        const double u = side * radius * (1.0 + 3.0 * i / probes);
        if ((*this)(u) != 0.0)
          detail::fail("GammaProfile '" + name_ + "': nonzero value at u = " + std::to_string(u) +
                       ", outside (-" + std::to_string(radius) + ", " + std::to_string(radius) + ")");
      }
    }
  }
  void check_support() const { check_support(support_); }

 private:
  std::function<double(double)> fn_;
  double support_ = 0.25;
  std::string name_ = "zero";
};

/// gamma_k for k in [k_min, k_max]; each vanishes outside (-support, support).
struct GammaFamily {
  int k_min = 0;
  int k_max = 0;
  double support_radius = 0.25;
  std::map<int, GammaProfile> profiles;

  static GammaFamily uniform(int k_min, int k_max, const GammaProfile& g, double support_radius = 0.25) {
    GammaFamily f;
    f.k_min = k_min;
    f.k_max = k_max;
    f.support_radius = support_radius;
    for (int k = k_min; k <= k_max; ++k) f.profiles[k] = g;
    f.validate();
    return f;
  }

  void validate() const {
    detail::require(k_min <= k_max, "GammaFamily: empty k range");
    detail::require(support_radius > 0.0, "GammaFamily: support radius must be > 0");
    for (int k = k_min; k <= k_max; ++k) {
      auto it = profiles.find(k);
      detail::require(it != profiles.end(), "GammaFamily: missing profile for k = " + std::to_string(k));
      it->second.check_support(support_radius);
    }
  }

  [[nodiscard]] bool contains(int k) const { return k >= k_min && k <= k_max; }
  [[nodiscard]] const GammaProfile& at(int k) const { return profiles.at(k); }
};

/// Gamma_k and slopes b_k for k in [k_min, k_max], |b_k| <= 2.
struct ModulatedFamily {
  int k_min = 0;
  int k_max = 0;
  std::map<int, GammaProfile> profiles;
  std::map<int, double> slopes;

  void validate() const {
    detail::require(k_min <= k_max, "ModulatedFamily: empty k range");
    for (int k = k_min; k <= k_max; ++k) {
      detail::require(profiles.count(k) == 1 && slopes.count(k) == 1,
                      "ModulatedFamily: missing entry for k = " + std::to_string(k));
      const double b = slopes.at(k);
      if (!(std::abs(b) <= 2.0))
        detail::fail("ModulatedFamily: |b_k| must be <= 2, got b_" + std::to_string(k) + " = " + std::to_string(b));
    }
  }
};

/// A multiplier sampled on the frequency points of a (d+1)-axis grid.
struct ConeMultiplierField {
  GridField field;
  nlohmann::json provenance;

  [[nodiscard]] const GridSpec& spec() const { return field.spec; }
};

namespace detail {

inline void require_cone_grid(const GridSpec& spec) {
  spec.validate();
  require(spec.rank() >= 2, "cone multiplier grids need at least two axes (xi and tau)");
}

inline double xi_norm(const std::array<double, max_axes>& w, std::size_t d) {
  double s = 0.0;
  for (std::size_t a = 0; a < d; ++a) s += w[a] * w[a];
  return std::sqrt(s);
}

template <class F>
GridField build_frequency_field(const GridSpec& spec, F&& value) {
  GridField out(spec, Representation::frequency);
  parallel_for(out.size(), [&](std::size_t i) { out.values[i] = value(spec.frequencies(i)); });
  return out;
}

}  // namespace detail

/// Dyadic slabs k whose [2^k, 2^{k+1}) meets the positive tau range of the grid.
inline std::pair<int, int> slabs_in_box(const GridSpec& spec) {
  const Axis& tau = spec.axes.back();
  const double step = tau.frequency_spacing();
  const double top = tau.frequency(tau.n - 1);
  detail::require(top > 0.0, "slabs_in_box: no positive tau on the grid");
  return {dyadic_slab(step), dyadic_slab(top)};
}

/// m(xi, tau) = sum_k gamma_k((|xi| - tau)/2^k) 1_{[2^k, 2^{k+1})}(tau).
/// Slabs outside the family's k range contribute zero.
inline ConeMultiplierField build_mgamma(const GammaFamily& family, const GridSpec& spec) {
  detail::require_cone_grid(spec);
  family.validate();
  const std::size_t d = spec.rank() - 1;
  ConeMultiplierField m;
  m.field = detail::build_frequency_field(spec, [&](const std::array<double, max_axes>& w) -> complex {
    const double tau = w[d];
    if (tau <= 0.0) return 0.0;
    const int k = dyadic_slab(tau);
    if (!family.contains(k)) return 0.0;
    return family.at(k)((detail::xi_norm(w, d) - tau) / std::ldexp(1.0, k));
  });
  const auto [lo, hi] = slabs_in_box(spec);
  m.provenance = {{"builder", "mgamma"},
                  {"k_min", family.k_min},
                  {"k_max", family.k_max},
                  {"support_radius", family.support_radius},
                  {"box_slabs", {lo, hi}}};
  for (int k = family.k_min; k <= family.k_max; ++k) m.provenance["profiles"].push_back(family.at(k).name());
  return m;
}

/// m(xi, tau) = sum_k chi_1(2^{-k}|xi|) chi(2^{-k} tau) Gamma_k((|xi| - b_k tau)/2^k).
inline ConeMultiplierField build_modulated(const ModulatedFamily& family, const GridSpec& spec) {
  detail::require_cone_grid(spec);
  family.validate();
  const std::size_t d = spec.rank() - 1;
  ConeMultiplierField m;
  m.field = detail::build_frequency_field(spec, [&](const std::array<double, max_axes>& w) -> complex {
    const double xi = detail::xi_norm(w, d);
    const double tau = w[d];
    double sum = 0.0;
    for (int k = family.k_min; k <= family.k_max; ++k) {
      const double scale = std::ldexp(1.0, -k);
      const double c1 = cutoff::chi1(scale * xi);
      if (c1 == 0.0) continue;
      const double c = cutoff::chi(scale * tau);
      if (c == 0.0) continue;
      sum += c1 * c * family.profiles.at(k)((xi - family.slopes.at(k) * tau) * scale);
    }
    return sum;
  });
  m.provenance = {{"builder", "modulated"}, {"k_min", family.k_min}, {"k_max", family.k_max}};
  for (int k = family.k_min; k <= family.k_max; ++k) {
    m.provenance["slopes"].push_back(family.slopes.at(k));
    m.provenance["profiles"].push_back(family.profiles.at(k).name());
  }
  return m;
}

/// rho_lambda(xi, tau) = (1 - |xi|^2/tau^2)_+^lambda for tau > 0, else 0.
inline double br_cone_value(double lambda, double xi, double tau) {
  if (tau <= 0.0) return 0.0;
  const double q = 1.0 - (xi * xi) / (tau * tau);
  return q > 0.0 ? std::pow(q, lambda) : 0.0;
}

inline ConeMultiplierField build_br_cone(double lambda, const GridSpec& spec) {
  detail::require(lambda > 0.0, "build_br_cone: lambda must be > 0");
  detail::require_cone_grid(spec);
  const std::size_t d = spec.rank() - 1;
  ConeMultiplierField m;
  m.field = detail::build_frequency_field(spec, [&](const std::array<double, max_axes>& w) -> complex {
    return br_cone_value(lambda, detail::xi_norm(w, d), w[d]);
  });
  m.provenance = {{"builder", "br_cone"}, {"lambda", lambda}};
  return m;
}

// ---------------------------------------------------------------------------
// Operators

/// Inverse DFT of (m x forward DFT of f); circular convolution on the grid.
inline GridField apply_multiplier(const GridField& f, const GridField& m) {
  detail::require(f.representation == Representation::space, "apply_multiplier: input must be a space field");
  detail::require(m.representation == Representation::frequency,
                  "apply_multiplier: multiplier must be a frequency field");
  if (!(f.spec == m.spec)) detail::fail("apply_multiplier: grid mismatch between input and multiplier");
  GridField F = forward_dft(f);
  for (std::size_t i = 0; i < F.size(); ++i) F.values[i] *= m.values[i];
  return inverse_dft(F);
}

inline GridField apply_multiplier(const GridField& f, const ConeMultiplierField& m) {
  return apply_multiplier(f, m.field);
}

/// Samples a symbol m(xi) on the frequency points of spec.
template <class M>
GridField sample_symbol(const GridSpec& spec, M&& symbol) {
  return detail::build_frequency_field(spec, [&](const std::array<double, max_axes>& w) -> complex {
    return complex(symbol(std::span<const double>(w.data(), spec.rank())));
  });
}

/// Radial multiplier m0(|xi|) over all axes of f's grid.
template <class M>
GridField apply_radial_multiplier(const GridField& f, M&& m0) {
  const std::size_t d = f.spec.rank();
  auto m = detail::build_frequency_field(f.spec, [&](const std::array<double, max_axes>& w) -> complex {
    return complex(m0(detail::xi_norm(w, d)));
  });
  return apply_multiplier(f, m);
}

namespace detail {
inline int checked_slab(const GammaFamily& family, double tau) {
  require(tau > 0.0 && std::isfinite(tau), "T^tau: tau must be positive, got " + std::to_string(tau));
  const int k = dyadic_slab(tau);
  if (!family.contains(k))
    fail("T^tau: tau = " + std::to_string(tau) + " lies in slab k = " + std::to_string(k) +
         ", outside the family range [" + std::to_string(family.k_min) + ", " + std::to_string(family.k_max) + "]");
  return k;
}
}  // namespace detail

/// T^tau f with multiplier gamma_k((|xi| - tau)/2^k), tau in [2^k, 2^{k+1}).
inline GridField apply_Ttau(const GridField& f, double tau, const GammaFamily& family) {
  const int k = detail::checked_slab(family, tau);
  const GammaProfile& g = family.at(k);
  const double scale = std::ldexp(1.0, -k);
  return apply_radial_multiplier(f, [&](double xi) { return g((xi - tau) * scale); });
}

struct SlabTerm {
  int k = 0;
  double tau = 1.0;
  complex alpha = 1.0;
};

/// sum_k alpha_k T^{tau_k} f, as one combined multiplier.
inline GridField apply_modulated_sum(const GridField& f, std::span<const SlabTerm> terms,
                                     const GammaFamily& family) {
  for (const auto& t : terms) {
    const int k = detail::checked_slab(family, t.tau);
    if (k != t.k)
      detail::fail("apply_modulated_sum: tau = " + std::to_string(t.tau) + " is not in slab [2^" +
                   std::to_string(t.k) + ", 2^" + std::to_string(t.k + 1) + ")");
  }
  const std::size_t d = f.spec.rank();
  auto m = detail::build_frequency_field(f.spec, [&](const std::array<double, max_axes>& w) -> complex {
    const double xi = detail::xi_norm(w, d);
    complex s = 0.0;
    for (const auto& t : terms) {
      if (t.alpha == complex(0.0)) continue;
      s += t.alpha * family.at(t.k)((xi - t.tau) * std::ldexp(1.0, -t.k));
    }
    return s;
  });
  return apply_multiplier(f, m);
}

}  // namespace conemult
