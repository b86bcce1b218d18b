#pragma once

// Lower bounds for L^p -> L^{p,nu} operator quasi-norms of grid operators.
//
// Every estimate is the largest ratio ||T f||_{p,nu} / ||f||_p seen over an
// explicit list of witnesses, so it is a lower bound by construction. The
// search is deterministic: the sequence of evaluated witnesses depends only on
// the seed and options, never on the budget, so a larger budget evaluates a
// superset and the bound can only grow.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "conemult/errors.hpp"
#include "conemult/grid_field.hpp"
#include "conemult/lorentz.hpp"
#include "conemult/multiplier_ops.hpp"

namespace conemult {

enum class WitnessFamily { dilated_bump, random_superposition, radial_focus, annulus_knapp };

inline const char* family_name(WitnessFamily f) {
  switch (f) {
    case WitnessFamily::dilated_bump: return "dilated_bump";
    case WitnessFamily::random_superposition: return "random_superposition";
    case WitnessFamily::radial_focus: return "radial_focus";
    case WitnessFamily::annulus_knapp: return "annulus_knapp";
  }
  return "?";
}

inline WitnessFamily parse_family(const std::string& s) {
  for (auto f : {WitnessFamily::dilated_bump, WitnessFamily::random_superposition, WitnessFamily::radial_focus,
                 WitnessFamily::annulus_knapp})
    if (s == family_name(f)) return f;
  detail::fail("unknown witness family '" + s + "'");
}

inline std::vector<WitnessFamily> all_families() {
  return {WitnessFamily::dilated_bump, WitnessFamily::random_superposition, WitnessFamily::radial_focus,
          WitnessFamily::annulus_knapp};
}

using RadialBump = std::function<double(double)>;

/// eta(x) = exp(-|x|^2 / 2).
inline double gaussian_bump(double r) { return std::exp(-0.5 * r * r); }

/// One input function, fully described by its parameters.
///   dilated_bump          eta(t (x - c)) e^{i <a, x>}
///   random_superposition  sum_j z_j eta(t_j (x - c - c_j)) e^{i <a, x>}, (z_j, t_j, c_j) drawn from `seed`
///   radial_focus          eta(t (x - c)) e^{-i shape t |x - c|} e^{i <a, x>}
///   annulus_knapp         eta on the ellipsoid t (shape (x_0 - c_0), x' - c') times e^{i <a, x>}
struct Witness {
  WitnessFamily family = WitnessFamily::dilated_bump;
  double t = 1.0;
  std::array<double, max_axes> center{};
  std::array<double, max_axes> modulation{};
  double shape = 1.0;
  std::uint64_t seed = 0;
  int terms = 4;
};

inline void to_json(nlohmann::json& j, const Witness& w) {
  j = {{"family", family_name(w.family)}, {"t", w.t}, {"center", w.center}, {"modulation", w.modulation}};
  if (w.family == WitnessFamily::radial_focus || w.family == WitnessFamily::annulus_knapp) j["shape"] = w.shape;
  if (w.family == WitnessFamily::random_superposition) {
    j["seed"] = w.seed;
    j["terms"] = w.terms;
  }
}

inline GridField make_witness(const GridSpec& spec, const Witness& w, const RadialBump& eta = gaussian_bump) {
  const std::size_t d = spec.rank();
  struct Term {
    std::complex<double> z;
    double t;
    std::array<double, max_axes> c;
  };
  std::vector<Term> terms;
  if (w.family == WitnessFamily::random_superposition) {
    std::mt19937_64 rng(w.seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int j = 0; j < w.terms; ++j) {
      Term term{{gauss(rng), gauss(rng)}, w.t * std::exp2(unit(rng)), {}};
      for (std::size_t a = 0; a < d; ++a) term.c[a] = unit(rng) * 2.0 / w.t;
      terms.push_back(term);
    }
  }
  return GridField::sample(spec, Representation::space, [&](std::span<const double> x) -> std::complex<double> {
    double phase = 0.0, r2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      phase += w.modulation[a] * x[a];
      const double y = x[a] - w.center[a];
      r2 += y * y;
    }
    const std::complex<double> carrier = std::polar(1.0, phase);
    switch (w.family) {
      case WitnessFamily::dilated_bump:
        return carrier * eta(w.t * std::sqrt(r2));
      case WitnessFamily::radial_focus: {
        const double r = std::sqrt(r2);
        return carrier * eta(w.t * r) * std::polar(1.0, -w.shape * w.t * r);
      }
      case WitnessFamily::annulus_knapp: {
        const double y0 = w.shape * (x[0] - w.center[0]);
        const double rest = r2 - (x[0] - w.center[0]) * (x[0] - w.center[0]);
        return carrier * eta(w.t * std::sqrt(y0 * y0 + rest));
      }
      case WitnessFamily::random_superposition: {
        std::complex<double> acc = 0.0;
        for (const auto& term : terms) {
          double s2 = 0.0;
          for (std::size_t a = 0; a < d; ++a) {
            const double y = x[a] - w.center[a] - term.c[a];
            s2 += y * y;
          }
          acc += term.z * eta(term.t * std::sqrt(s2));
        }
        return carrier * acc;
      }
    }
    return 0.0;
  });
}

/// Cell-weighted samples |f(x_j)| with weight equal to the cell volume.
inline WeightedSampleSet grid_samples(const GridField& f) {
  WeightedSampleSet s;
  s.reserve(f.size());
  const double cell = f.spec.cell_volume();
  for (const auto& v : f.values) s.push_back(std::abs(v), cell);
  return s;
}

inline double grid_lorentz_norm(const GridField& f, LorentzParams params) {
  return lorentz_quasinorm(grid_samples(f), params);
}

using GridOperator = std::function<GridField(const GridField&)>;

struct OpNormEstimate {
  double lower_bound = 0.0;
  Witness witness;
  std::string witness_description;
  LorentzParams params;
  std::size_t budget = 0;       // operator applications used
  std::size_t skipped = 0;      // witnesses with zero or non-finite norm
  std::uint64_t seed = 0;
};

inline std::string describe(const Witness& w) {
  nlohmann::json j = w;
  return j.dump();
}

inline void to_json(nlohmann::json& j, const OpNormEstimate& e) {
  j = {{"lower_bound", e.lower_bound},
       {"witness", e.witness},
       {"p", e.params.p},
       {"nu", std::isinf(e.params.nu) ? nlohmann::json("inf") : nlohmann::json(e.params.nu)},
       {"budget_used", e.budget},
       {"skipped", e.skipped},
       {"seed", e.seed}};
}

/// ||T f||_{p,nu} / ||f||_p, or NaN when ||f||_p is zero or not finite.
inline double witness_ratio(const GridOperator& op, const GridField& f, LorentzParams params) {
  const double den = weighted_lp_norm(grid_samples(f), params.p);
  if (!(den > 0.0) || !std::isfinite(den)) return std::numeric_limits<double>::quiet_NaN();
  return grid_lorentz_norm(op(f), params) / den;
}

inline double evaluate_witness(const GridOperator& op, const GridSpec& spec, const Witness& w, LorentzParams params,
                               const RadialBump& eta = gaussian_bump) {
  return witness_ratio(op, make_witness(spec, w, eta), params);
}

struct EstimateOptions {
  std::vector<WitnessFamily> families = all_families();
  std::size_t budget = 64;
  std::uint64_t seed = 1;
  /// Dilations tried for dilated_bump (centered, unmodulated) before the search.
  std::vector<double> t_grid = {0.25, 0.35355339059327373, 0.5, 0.7071067811865476, 1.0, 1.4142135623730951, 2.0};
  int random_starts = 6;  // per family other than dilated_bump
  RadialBump eta = gaussian_bump;
};

namespace detail {

inline std::vector<Witness> initial_witnesses(const GridSpec& spec, const EstimateOptions& o) {
  std::vector<Witness> out;
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::size_t d = spec.rank();
  for (auto fam : o.families) {
    if (fam == WitnessFamily::dilated_bump) {
      for (double t : o.t_grid) {
        Witness w;
        w.t = t;
        out.push_back(w);
      }
      continue;
    }
    for (int i = 0; i < o.random_starts; ++i) {
      Witness w;
      w.family = fam;
      w.t = std::exp2(unit(rng) * 1.5);
      for (std::size_t a = 0; a < d; ++a) {
        w.center[a] = 0.25 * spec.axes[a].extent * unit(rng);
        w.modulation[a] = 0.25 * spec.axes[a].frequency(spec.axes[a].n - 1) * unit(rng);
      }
      w.shape = fam == WitnessFamily::annulus_knapp ? std::exp2(1.0 + 2.0 * (unit(rng) + 1.0)) : 4.0 * (unit(rng) + 1.5);
      w.seed = rng();
      out.push_back(w);
    }
  }
  return out;
}

}  // namespace detail

/// Best ratio over the initial witnesses, then a coordinate search in
/// (log t, center, modulation, shape) around the best one until the budget
/// of operator applications is used up or the steps become negligible.
inline OpNormEstimate estimate_lower(const GridOperator& op, const GridSpec& spec, LorentzParams params,
                                     const EstimateOptions& o = {}) {
  params.validate();
  detail::require(o.budget >= 1, "estimate_lower: budget must be >= 1");
  detail::require(!o.families.empty(), "estimate_lower: no witness families");
  OpNormEstimate est;
  est.params = params;
  est.seed = o.seed;
  est.lower_bound = -1.0;

  auto try_witness = [&](const Witness& w) -> double {
    if (est.budget >= o.budget) return std::numeric_limits<double>::quiet_NaN();
    const double r = evaluate_witness(op, spec, w, params, o.eta);
    if (std::isnan(r)) {
      ++est.skipped;
      return r;
    }
    ++est.budget;
    if (r > est.lower_bound) {
      est.lower_bound = r;
      est.witness = w;
    }
    return r;
  };

  for (const auto& w : detail::initial_witnesses(spec, o)) {
    if (est.budget >= o.budget) break;
    try_witness(w);
  }

  const std::size_t d = spec.rank();
  double step_log_t = 0.5, step_shape = 0.5;
  std::array<double, max_axes> step_c{}, step_a{};
  for (std::size_t a = 0; a < d; ++a) {
    step_c[a] = spec.axes[a].extent / 8.0;
    step_a[a] = spec.axes[a].frequency(spec.axes[a].n - 1) / 8.0;
  }
  for (int sweep = 0; sweep < 40 && est.budget < o.budget && est.lower_bound >= 0.0; ++sweep) {
    bool improved = false;
    auto probe = [&](Witness w) {
      const double before = est.lower_bound;
      try_witness(w);
      improved = improved || est.lower_bound > before;
    };
    for (int sign : {1, -1}) {
      Witness w = est.witness;
      w.t *= std::exp(sign * step_log_t);
      probe(w);
    }
    for (std::size_t a = 0; a < d; ++a)
      for (int sign : {1, -1}) {
        Witness w = est.witness;
        w.center[a] += sign * step_c[a];
        probe(w);
        w = est.witness;
        w.modulation[a] += sign * step_a[a];
        probe(w);
      }
    if (est.witness.family != WitnessFamily::dilated_bump && est.witness.family != WitnessFamily::random_superposition)
      for (int sign : {1, -1}) {
        Witness w = est.witness;
        w.shape *= std::exp(sign * step_shape);
        probe(w);
      }
    if (!improved) {
      step_log_t /= 2;
      step_shape /= 2;
      for (std::size_t a = 0; a < d; ++a) {
        step_c[a] /= 2;
        step_a[a] /= 2;
      }
    }
  }
  if (est.lower_bound < 0.0) est.lower_bound = 0.0;
  est.witness_description = describe(est.witness);
  return est;
}

// ---------------------------------------------------------------------------
// Dilation equivalence for radial multipliers

struct EquivlorEntry {
  double t = 1.0;
  bool resolved = true;
  double norm_input = 0.0;       // ||eta(t .)||_p on the grid
  double norm_output = 0.0;      // ||T eta(t .)||_{p,nu}
  double scaled = 0.0;           // t^{d/p} ||T eta(t .)||_{p,nu}
  double ratio = 0.0;            // ||T eta(t .)||_{p,nu} / ||eta(t .)||_p
};

struct EquivlorReport {
  std::vector<EquivlorEntry> entries;
  double rhs = 0.0;              // sup_t t^{d/p} ||T eta(t .)||_{p,nu}
  double rhs_normalized = 0.0;   // sup_t ||T eta(t .)|| / ||eta(t .)||_p (a sub-family of the witnesses)
  double eta_norm = 0.0;         // ||eta||_p on the grid
  OpNormEstimate lhs;
  double ratio = 0.0;            // lhs / rhs_normalized
  bool containment = false;      // rhs_normalized <= lhs, exact
};

inline void to_json(nlohmann::json& j, const EquivlorReport& r) {
  j = {{"rhs", r.rhs},
       {"rhs_normalized", r.rhs_normalized},
       {"eta_norm", r.eta_norm},
       {"lhs", r.lhs},
       {"lhs_over_rhs", r.ratio},
       {"containment", r.containment},
       {"per_t", nlohmann::json::array()}};
  for (const auto& e : r.entries)
    j["per_t"].push_back({{"t", e.t},
                          {"resolved", e.resolved},
                          {"input_norm", e.norm_input},
                          {"output_norm", e.norm_output},
                          {"scaled", e.scaled},
                          {"ratio", e.ratio}});
}

/// eta(t .) is resolved when its width 1/t spans at least two cells and it
/// does not reach the periodic boundary.
inline bool dilation_resolved(const GridField& f, double t) {
  double h = 0.0;
  for (const auto& a : f.spec.axes) h = std::max(h, a.spacing());
  return t * h <= 0.5 && boundary_mass_fraction(f) < default_wrap_threshold;
}

template <class M>
EquivlorReport equivlor_experiment(M&& m0, const GridSpec& spec, LorentzParams params, std::vector<double> t_grid,
                                   EstimateOptions o = {}) {
  params.validate();
  detail::require(!t_grid.empty(), "equivlor_experiment: empty t grid");
  const int d = static_cast<int>(spec.rank());
  GridOperator op = [&](const GridField& f) { return apply_radial_multiplier(f, m0); };
  EquivlorReport rep;
  rep.eta_norm = weighted_lp_norm(grid_samples(make_witness(spec, Witness{}, o.eta)), params.p);
  std::vector<double> usable;
  for (double t : t_grid) {
    detail::require(t > 0.0, "equivlor_experiment: t grid must lie in (0, inf)");
    EquivlorEntry e;
    e.t = t;
    Witness w;
    w.t = t;
    auto f = make_witness(spec, w, o.eta);
    e.resolved = dilation_resolved(f, t);
    if (e.resolved) {
      e.norm_input = weighted_lp_norm(grid_samples(f), params.p);
      e.norm_output = grid_lorentz_norm(op(f), params);
      e.scaled = std::pow(t, d / params.p) * e.norm_output;
      e.ratio = e.norm_output / e.norm_input;
      rep.rhs = std::max(rep.rhs, e.scaled);
      rep.rhs_normalized = std::max(rep.rhs_normalized, e.ratio);
      usable.push_back(t);
    }
    rep.entries.push_back(e);
  }
  detail::require(!usable.empty(), "equivlor_experiment: no t in the grid is resolved on this grid");
  // the dilated bumps go first so that every usable t is evaluated
  std::erase(o.families, WitnessFamily::dilated_bump);
  o.families.insert(o.families.begin(), WitnessFamily::dilated_bump);
  o.t_grid = usable;
  o.budget = std::max(o.budget, usable.size() + 1);
  rep.lhs = estimate_lower(op, spec, params, o);
  rep.containment = rep.rhs_normalized <= rep.lhs.lower_bound;
  rep.ratio = rep.rhs_normalized > 0.0 ? rep.lhs.lower_bound / rep.rhs_normalized
                                       : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace conemult
