#pragma once

// Characterization functionals for radial and cone multipliers.
//
//   (iv)  || gamma^ / (1+|.|)^{(d-1)/2} ||_{L^{p,nu}(R, (1+|r|)^{d-1} dr)}
//   (v)   || F_d^{-1}[gamma(|.| - c)] ||_{L^{p,nu}(R^d)}
//   m0    sup_t || kappa_t / (1+|.|)^{(d-1)/2} ||_{L^{p,nu}(R, (1+|r|)^{d-1} dr)},
//         kappa_t = Fourier transform of phi * m0(t .)
//
// Every quantity is evaluated at a ladder of nested truncations R/2^j so
// that growth with the truncation (a divergent trend) is visible.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "conemult/cutoffs.hpp"
#include "conemult/errors.hpp"
#include "conemult/lorentz.hpp"
#include "conemult/multiplier_ops.hpp"
#include "conemult/parallel.hpp"
#include "conemult/radial_fourier.hpp"

namespace conemult {

/// True when each step of `values` (ordered by doubling truncation) grows by
/// at least the factor 1 + growth. Needs at least two values; a ladder that
/// stays at zero is not divergent.
inline bool divergent_trend(std::span<const double> values, double growth = 0.10) {
  detail::require(values.size() >= 2, "divergent_trend: need at least two truncations");
  for (std::size_t j = 1; j < values.size(); ++j)
    if (!(values[j] > 0.0 && values[j] >= (1.0 + growth) * values[j - 1])) return false;
  return true;
}

/// Values of a functional at truncations R/2^J, ..., R/2, R (ascending).
struct TruncationLadder {
  std::vector<double> truncations;
  std::vector<double> values;
  bool divergent = false;

  [[nodiscard]] double value() const { return values.back(); }
  [[nodiscard]] double value_half() const { return values.size() >= 2 ? values[values.size() - 2] : values.back(); }
};

inline void to_json(nlohmann::json& j, const TruncationLadder& t) {
  j = {{"truncations", t.truncations}, {"values", t.values}, {"divergent_trend", t.divergent}};
}

inline std::vector<double> truncation_ladder(double R, int doublings) {
  detail::require(R > 0.0 && doublings >= 1, "truncation ladder: need R > 0 and at least one doubling");
  std::vector<double> out;
  for (int j = doublings; j >= 0; --j) out.push_back(std::ldexp(R, -j));
  return out;
}

// ---------------------------------------------------------------------------
// Condition (iv)

struct ConditionIvOptions {
  double R = 2000.0;            // truncation of the s-line
  std::size_t N = 1u << 16;     // samples of gamma
  double L = 0.0;               // sampling window [-L, L); 0 picks L = N pi / (16 R), Nyquist 8R
  int doublings = 3;            // ladder R/2^doublings, ..., R
  double growth = 0.10;         // divergent-trend threshold per doubling

  [[nodiscard]] double window() const { return L > 0.0 ? L : static_cast<double>(N) * std::numbers::pi / (16.0 * R); }
};

/// (iv) functional on a precomputed spectrum, at every rung of the ladder.
inline TruncationLadder condition_iv_from_spectrum(const LineSpectrum& spectrum, int d, LorentzParams params,
                                                  double R, int doublings, double growth = 0.10) {
  params.validate();
  detail::require(d >= 1, "condition (iv): dimension must be >= 1");
  if (spectrum.nyquist() < R)
    detail::fail("condition (iv): resolution reaches |s| <= " + std::to_string(spectrum.nyquist()) +
                 ", below the truncation R = " + std::to_string(R));
  TruncationLadder out;
  out.truncations = truncation_ladder(R, doublings);
  const double half = 0.5 * (d - 1);
  for (double Rj : out.truncations) {
    auto samples = weighted_grid_samples(
        spectrum.size(),
        [&](std::size_t m) {
          return std::abs(spectrum.values[m]) / std::pow(1.0 + std::abs(spectrum.frequency(m)), half);
        },
        spectrum.spacing, spectrum.center(), d - 1.0, Rj);
    out.values.push_back(samples.empty() ? 0.0 : lorentz_quasinorm(samples, params));
  }
  out.divergent = divergent_trend(out.values, growth);
  return out;
}

struct ConditionIvResult {
  TruncationLadder ladder;
  double window = 0.0;
  double nyquist = 0.0;

  [[nodiscard]] double value() const { return ladder.value(); }
  [[nodiscard]] double value_half() const { return ladder.value_half(); }
};

inline void to_json(nlohmann::json& j, const ConditionIvResult& r) {
  j = {{"value", r.value()}, {"value_half_truncation", r.value_half()}, {"ladder", r.ladder},
       {"window", r.window}, {"nyquist", r.nyquist}};
}

/// Condition (iv) for a profile gamma vanishing outside (-support, support).
template <class G>
ConditionIvResult condition_iv_quantity(G&& gamma, double support, int d, LorentzParams params,
                                        const ConditionIvOptions& o = {}) {
  const double L = o.window();
  if (!(L > support))
    detail::fail("condition (iv): sampling window L = " + std::to_string(L) +
                 " does not contain the support radius " + std::to_string(support) + "; increase N");
  auto spectrum = fourier_1d([&](double s) { return complex(gamma(s)); }, L, o.N);
  ConditionIvResult r;
  r.window = L;
  r.nyquist = spectrum.nyquist();
  r.ladder = condition_iv_from_spectrum(spectrum, d, params, o.R, o.doublings, o.growth);
  return r;
}

// ---------------------------------------------------------------------------
// Condition (v)

struct ConditionVOptions {
  /// Radial shift c: the kernel is F_d^{-1}[gamma(|.| - c)]. c = 0 is the
  /// literal functional; c = 1 is the kernel of T^tau at tau / 2^k = 1.
  double shift = 0.0;
  double x_max = 64.0;          // truncation in |x|
  std::size_t cells = 8192;     // midpoint cells on [0, x_max]
  int doublings = 3;
  double growth = 0.10;
  std::vector<double> breakpoints;  // nonsmooth points of gamma (in u)
  std::size_t order = 16;
};

struct ConditionVResult {
  TruncationLadder ladder;
  bool all_reliable = true;

  [[nodiscard]] double value() const { return ladder.value(); }
  [[nodiscard]] double value_half() const { return ladder.value_half(); }
};

inline void to_json(nlohmann::json& j, const ConditionVResult& r) {
  j = {{"value", r.value()}, {"value_half_truncation", r.value_half()}, {"ladder", r.ladder},
       {"all_reliable", r.all_reliable}};
}

template <class G>
ConditionVResult condition_v_quantity(G&& gamma, double support, int d, LorentzParams params,
                                      const ConditionVOptions& o = {}) {
  params.validate();
  detail::require(d >= 2, "condition (v): dimension must be >= 2");
  detail::require(o.x_max > 0.0 && o.cells >= 2, "condition (v): need x_max > 0 and at least two cells");
  const double c = o.shift;
  RadialTransformOptions t;
  t.direction = TransformDirection::inverse;
  t.r_min = std::max(0.0, c - support);
  t.r_max = c + support;
  detail::require(t.r_max > t.r_min, "condition (v): profile support misses the half-line r >= 0");
  for (double u : o.breakpoints) t.breakpoints.push_back(c + u);
  t.order = o.order;

  const double dx = o.x_max / static_cast<double>(o.cells);
  std::vector<double> xs(o.cells);
  for (std::size_t i = 0; i < o.cells; ++i) xs[i] = (static_cast<double>(i) + 0.5) * dx;
  auto kernel = radial_transform([&](double r) { return complex(gamma(r - c)); }, d, xs, t);

  ConditionVResult out;
  out.all_reliable = kernel.all_reliable();
  out.ladder.truncations = truncation_ladder(o.x_max, o.doublings);
  const double area = unit_sphere_area(d);
  for (double X : out.ladder.truncations) {
    WeightedSampleSet s;
    for (std::size_t i = 0; i < o.cells && xs[i] <= X; ++i) {
      const double v = std::abs(kernel.profile.values[i]);
      if (!std::isfinite(v)) continue;  // unreliable points are excluded and flagged
      s.push_back(v, area * std::pow(xs[i], d - 1) * dx);
    }
    out.ladder.values.push_back(s.empty() ? 0.0 : lorentz_quasinorm(s, params));
  }
  out.ladder.divergent = divergent_trend(out.ladder.values, o.growth);
  return out;
}

// ---------------------------------------------------------------------------
// Families: sup over k

struct FamilyEntry {
  int k = 0;
  TruncationLadder ladder;
};

struct FamilyQuantity {
  std::vector<FamilyEntry> entries;
  double sup = 0.0;
  int argsup = 0;
  bool divergent = false;  // some member shows a divergent trend
};

inline void to_json(nlohmann::json& j, const FamilyQuantity& q) {
  j = {{"sup", q.sup}, {"argsup_k", q.argsup}, {"divergent_trend", q.divergent}, {"per_k", nlohmann::json::array()}};
  for (const auto& e : q.entries) j["per_k"].push_back({{"k", e.k}, {"value", e.ladder.value()}, {"ladder", e.ladder}});
}

namespace detail {
inline void finish_family(FamilyQuantity& q) {
  q.sup = -1.0;
  for (const auto& e : q.entries) {
    if (e.ladder.value() > q.sup) {
      q.sup = e.ladder.value();
      q.argsup = e.k;
    }
    q.divergent = q.divergent || e.ladder.divergent;
  }
}
}  // namespace detail

/// C_{p,nu} = sup_k (iv)(gamma_k).
inline FamilyQuantity condition_iv_family(const GammaFamily& family, int d, LorentzParams params,
                                          const ConditionIvOptions& o = {}) {
  family.validate();
  FamilyQuantity q;
  for (int k = family.k_min; k <= family.k_max; ++k) {
    const auto& g = family.at(k);
    q.entries.push_back({k, condition_iv_quantity(g, family.support_radius, d, params, o).ladder});
  }
  detail::finish_family(q);
  return q;
}

inline FamilyQuantity condition_v_family(const GammaFamily& family, int d, LorentzParams params,
                                         const ConditionVOptions& o = {}) {
  family.validate();
  FamilyQuantity q;
  for (int k = family.k_min; k <= family.k_max; ++k) {
    const auto& g = family.at(k);
    q.entries.push_back({k, condition_v_quantity(g, family.support_radius, d, params, o).ladder});
  }
  detail::finish_family(q);
  return q;
}

// ---------------------------------------------------------------------------
// Global radial functional

struct M0Options {
  double R = 2000.0;
  std::size_t N = 1u << 14;
  double L = 4.0;  // window for phi * m0(t .); phi lives in (1/2, 2)
  int doublings = 3;
  double growth = 0.10;
};

/// Geometric grid 2^{j / per_octave}, j = lo * per_octave, ..., hi * per_octave.
inline std::vector<double> default_t_grid(int per_octave = 64, int lo = -6, int hi = 6) {
  detail::require(per_octave >= 1 && lo < hi, "default_t_grid: need per_octave >= 1 and lo < hi");
  std::vector<double> t;
  for (int j = lo * per_octave; j <= hi * per_octave; ++j)
    t.push_back(std::exp2(static_cast<double>(j) / per_octave));
  return t;
}

struct M0Entry {
  double t = 1.0;
  TruncationLadder ladder;
};

struct M0Report {
  std::vector<M0Entry> entries;
  double sup = 0.0;
  double argsup = 0.0;
  TruncationLadder sup_ladder;  // sup over t at each truncation

  [[nodiscard]] bool divergent() const { return sup_ladder.divergent; }
};

inline void to_json(nlohmann::json& j, const M0Report& r) {
  j = {{"sup", r.sup}, {"argsup_t", r.argsup}, {"sup_ladder", r.sup_ladder}, {"grid_size", r.entries.size()},
       {"note", "sup over a finite t grid: a lower bound for the sup over all t > 0"}};
}

template <class M, std::invocable<double> Phi>
M0Report m0_characterization(M&& m0, int d, LorentzParams params, std::span<const double> t_grid, Phi&& phi,
                             const M0Options& o = {}) {
  params.validate();
  detail::require(!t_grid.empty(), "m0_characterization: empty t grid");
  for (double t : t_grid) detail::require(t > 0.0, "m0_characterization: t grid must lie in (0, inf)");
  M0Report rep;
  rep.entries.resize(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t i) {
    const double t = t_grid[i];
    auto spectrum = fourier_1d([&](double r) { return r <= 0.0 ? complex(0.0) : phi(r) * complex(m0(t * r)); },
                               o.L, o.N);
    rep.entries[i] = {t, condition_iv_from_spectrum(spectrum, d, params, o.R, o.doublings, o.growth)};
  });
  rep.sup = -1.0;
  rep.sup_ladder.truncations = truncation_ladder(o.R, o.doublings);
  rep.sup_ladder.values.assign(rep.sup_ladder.truncations.size(), 0.0);
  for (const auto& e : rep.entries) {
    if (e.ladder.value() > rep.sup) {
      rep.sup = e.ladder.value();
      rep.argsup = e.t;
    }
    for (std::size_t j = 0; j < e.ladder.values.size(); ++j)
      rep.sup_ladder.values[j] = std::max(rep.sup_ladder.values[j], e.ladder.values[j]);
  }
  rep.sup_ladder.divergent = divergent_trend(rep.sup_ladder.values, o.growth);
  return rep;
}

template <class M>
M0Report m0_characterization(M&& m0, int d, LorentzParams params, std::span<const double> t_grid,
                             const M0Options& o = {}) {
  return m0_characterization(std::forward<M>(m0), d, params, t_grid, cutoff::phi, o);
}

struct DilationCheck {
  double ratio = 1.0;
  M0Report base;
  M0Report dilated;
};

/// Ratio of the m0 functional for m0 and for m0(t0 .) on a common t grid.
template <class M>
DilationCheck dilation_invariance_check(M&& m0, int d, LorentzParams params, double t0,
                                        std::span<const double> t_grid, const M0Options& o = {}) {
  detail::require(t0 > 0.0, "dilation_invariance_check: t0 must be > 0");
  DilationCheck c;
  c.base = m0_characterization(m0, d, params, t_grid, o);
  c.dilated = m0_characterization([&](double r) { return m0(t0 * r); }, d, params, t_grid, o);
  c.ratio = c.base.sup / c.dilated.sup;
  return c;
}

// ---------------------------------------------------------------------------
// Comparability of (iv) and (v)

/// Ten fixed profiles supported in (-1/4, 1/4): smooth bumps, tents, one-sided
/// powers (-u)^lambda b(u) and a modulated bump.
inline std::vector<GammaProfile> comparison_family() {
  std::vector<GammaProfile> out;
  auto bump = [](double c, double w) {
    return [c, w](double u) { return cutoff::mollifier((u - c) / w); };
  };
  out.push_back(GammaProfile::closed_form(bump(0.0, 0.2), 0.25, "bump(0,0.2)"));
  out.push_back(GammaProfile::closed_form(bump(0.0, 0.1), 0.25, "bump(0,0.1)"));
  out.push_back(GammaProfile::closed_form(bump(0.1, 0.1), 0.25, "bump(0.1,0.1)"));
  out.push_back(GammaProfile::closed_form(bump(-0.12, 0.08), 0.25, "bump(-0.12,0.08)"));
  out.push_back(GammaProfile::closed_form([](double u) { return std::max(0.0, 1.0 - std::abs(u) / 0.2); }, 0.25,
                                          "tent(0.2)"));
  out.push_back(GammaProfile::closed_form([](double u) { return std::max(0.0, 1.0 - std::abs(u - 0.05) / 0.1); },
                                          0.25, "tent(0.05,0.1)"));
  for (double lambda : {0.5, 1.0, 2.0})
    out.push_back(GammaProfile::closed_form(
        [lambda](double u) { return u < 0.0 ? std::pow(-u, lambda) * cutoff::br_b(u) : 0.0; }, 0.25,
        "power(" + std::to_string(lambda).substr(0, 3) + ")"));
  out.push_back(GammaProfile::closed_form([](double u) { return cutoff::mollifier(u / 0.2) * std::cos(60.0 * u); },
                                          0.25, "modulated_bump(60)"));
  return out;
}

struct ComparisonEntry {
  std::string name;
  double iv = 0.0;
  double v = 0.0;
  double ratio = 0.0;  // iv / v
  bool iv_divergent = false;
  bool v_divergent = false;
};

struct ComparisonBand {
  int d = 2;
  LorentzParams params;
  double shift = 1.0;
  double truncation = 64.0;
  std::vector<ComparisonEntry> entries;
  double lo = 0.0;
  double hi = 0.0;
  double c = 0.0;  // smallest c with every ratio in [1/c, c]

  [[nodiscard]] bool within(double limit) const { return std::isfinite(c) && c <= limit; }
};

inline void to_json(nlohmann::json& j, const ComparisonBand& b) {
  j = {{"d", b.d},
       {"p", b.params.p},
       {"nu", std::isinf(b.params.nu) ? nlohmann::json("inf") : nlohmann::json(b.params.nu)},
       {"shift", b.shift},
       {"truncation", b.truncation},
       {"ratio_min", b.lo},
       {"ratio_max", b.hi},
       {"band_c", b.c},
       {"per_profile", nlohmann::json::array()}};
  for (const auto& e : b.entries)
    j["per_profile"].push_back({{"profile", e.name},
                                {"iv", e.iv},
                                {"v", e.v},
                                {"ratio", e.ratio},
                                {"iv_divergent_trend", e.iv_divergent},
                                {"v_divergent_trend", e.v_divergent}});
}

/// (iv) / (v) for each profile, both truncated at the same radius: |s| <= R in
/// (iv) and |x| <= R in (v), with the (v) kernel taken at shift c.
inline ComparisonBand compare_iv_v(std::span<const GammaProfile> profiles, int d, LorentzParams params,
                                   double shift = 1.0, double truncation = 64.0) {
  detail::require(!profiles.empty(), "compare_iv_v: empty profile list");
  ConditionIvOptions iv;
  iv.R = truncation;
  ConditionVOptions v;
  v.shift = shift;
  v.x_max = truncation;
  v.cells = static_cast<std::size_t>(std::ceil(truncation * 128.0));
  ComparisonBand band;
  band.d = d;
  band.params = params;
  band.shift = shift;
  band.truncation = truncation;
  band.entries.resize(profiles.size());
  parallel_for(profiles.size(), [&](std::size_t i) {
    const auto& g = profiles[i];
    auto a = condition_iv_quantity(g, g.support_radius(), d, params, iv);
    auto b = condition_v_quantity(g, g.support_radius(), d, params, v);
    band.entries[i] = {g.name(), a.value(), b.value(), a.value() / b.value(), a.ladder.divergent, b.ladder.divergent};
  });
  band.lo = std::numeric_limits<double>::infinity();
  band.hi = 0.0;
  for (const auto& e : band.entries) {
    band.lo = std::min(band.lo, e.ratio);
    band.hi = std::max(band.hi, e.ratio);
  }
  band.c = std::max(band.hi, 1.0 / band.lo);
  return band;
}

}  // namespace conemult
