#pragma once

// Bochner-Riesz means for the cone, rho_lambda(xi, tau) = (1 - |xi|^2/tau^2)_+^lambda.
//
// For tau > 0 and u = (|xi| - tau)/2^k on the slab tau in [2^k, 2^{k+1}),
//
//   rho_lambda = a_lambda * gamma(u) + a~_lambda,   gamma(u) = (-u)^lambda b(u) (u < 0), 0 (u >= 0),
//   a_lambda   = (2^k (tau + |xi|) / tau^2)^lambda  b(u/2),
//   a~_lambda  = rho_lambda (1 - b(u)).
//
// The cutoff in a_lambda is b(u/2), which equals 1 on [-1/4, 4], a superset
// of supp b; with b(u) itself the two pieces would sum to rho (b^2 + 1 - b).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "conemult/characterization.hpp"
#include "conemult/cutoffs.hpp"
#include "conemult/errors.hpp"
#include "conemult/multiplier_ops.hpp"
#include "conemult/radial_fourier.hpp"

namespace conemult {

using Cutoff = std::function<double(double)>;

/// gamma(u) = (-u)^lambda b(u) for u < 0 and 0 otherwise.
struct BRProfile {
  double lambda = 1.0;
  Cutoff b = cutoff::br_b;

  [[nodiscard]] double operator()(double u) const {
    if (!(u < 0.0)) return 0.0;
    const double bu = b(u);
    return bu == 0.0 ? 0.0 : std::pow(-u, lambda) * bu;
  }
};

inline BRProfile br_gamma(double lambda, Cutoff b = cutoff::br_b) {
  if (!(lambda > 0.0)) detail::fail("br_gamma: lambda must be > 0, got " + std::to_string(lambda));
  return {lambda, std::move(b)};
}

/// The profile as a GammaProfile supported in (-1/4, 1/4).
inline GammaProfile br_gamma_profile(const BRProfile& g) {
  return GammaProfile::closed_form(g, 0.25, "br(lambda=" + std::to_string(g.lambda) + ")");
}

inline double br_a_lambda(double lambda, double xi, double tau, const Cutoff& b = cutoff::br_b) {
  if (tau <= 0.0) return 0.0;
  const int k = dyadic_slab(tau);
  const double scale = std::ldexp(1.0, k);
  const double u = (xi - tau) / scale;
  return std::pow(scale * (tau + xi) / (tau * tau), lambda) * b(0.5 * u);
}

inline double br_a_tilde(double lambda, double xi, double tau, const Cutoff& b = cutoff::br_b) {
  if (tau <= 0.0) return 0.0;
  const double u = (xi - tau) / std::ldexp(1.0, dyadic_slab(tau));
  return br_cone_value(lambda, xi, tau) * (1.0 - b(u));
}

/// sum_k 1_{[2^k, 2^{k+1})}(tau) gamma((|xi| - tau)/2^k).
inline double br_main_term(const BRProfile& g, double xi, double tau) {
  if (tau <= 0.0) return 0.0;
  return g((xi - tau) / std::ldexp(1.0, dyadic_slab(tau)));
}

inline double critical_exponent_prediction(int d, double p) { return d / p - (d + 1) / 2.0; }
inline double critical_exponent_alternate(int d, double p) { return d * (1.0 / p - 0.5) - 0.5; }

// ---------------------------------------------------------------------------
// Decay of gamma^

struct DecayFitOptions {
  double s_lo = 10.0;
  double s_hi = 1.0e4;
  double L = 1.0;        // sampling window [-L, L)
  std::size_t N = 0;     // 0 picks the smallest power of two with Nyquist >= 16 s_hi
};

struct DecayFit {
  enum class Status { ok, zero_input };
  Status status = Status::ok;
  double exponent = std::numeric_limits<double>::quiet_NaN();
  EnvelopeFit envelope;
  std::size_t N = 0;

  [[nodiscard]] bool passes(double lambda, double slack = 0.1) const {
    return status == Status::ok && exponent >= lambda + 1.0 - slack;
  }
};

inline void to_json(nlohmann::json& j, const DecayFit& f) {
  j = {{"status", f.status == DecayFit::Status::ok ? "ok" : "zero input"},
       {"exponent", f.status == DecayFit::Status::ok ? nlohmann::json(f.exponent) : nlohmann::json(nullptr)},
       {"block_location", f.envelope.block_location},
       {"block_max", f.envelope.block_max},
       {"fft_size", f.N}};
}

inline DecayFit gamma_hat_decay_fit(double lambda, Cutoff b, const DecayFitOptions& o = {}) {
  auto g = br_gamma(lambda, std::move(b));
  detail::require(o.s_lo >= 10.0 && o.s_hi <= 1.0e4 && o.s_hi >= 2.0 * o.s_lo,
                  "gamma_hat_decay_fit: s range must satisfy 10 <= s_lo, 2 s_lo <= s_hi <= 1e4");
  detail::require(o.L > 0.25, "gamma_hat_decay_fit: window must contain the support (-1/4, 0]");
  std::size_t N = o.N;
  if (N == 0) {
    N = 2;
    while (static_cast<double>(N) * std::numbers::pi / (2.0 * o.L) < 16.0 * o.s_hi) N *= 2;
  }
  const double nyquist = static_cast<double>(N) * std::numbers::pi / (2.0 * o.L);
  if (nyquist < o.s_hi)
    detail::fail("gamma_hat_decay_fit: resolution N = " + std::to_string(N) + " reaches |s| <= " +
                 std::to_string(nyquist) + ", short of s_hi = " + std::to_string(o.s_hi));
  auto spectrum = fourier_1d([&](double u) { return complex(g(u)); }, o.L, N);
  DecayFit fit;
  fit.N = N;
  std::vector<double> s, mag;
  double peak = 0.0;
  for (std::size_t m = 0; m < spectrum.size(); ++m) {
    const double sg = spectrum.frequency(m);
    peak = std::max(peak, std::abs(spectrum.values[m]));
    if (sg >= o.s_lo && sg <= o.s_hi) {
      s.push_back(sg);
      mag.push_back(std::abs(spectrum.values[m]));
    }
  }
  if (peak == 0.0) {
    fit.status = DecayFit::Status::zero_input;
    return fit;
  }
  // both half-lines: |gamma^(-s)| enters through the same blocks
  for (std::size_t m = 0; m < spectrum.size(); ++m) {
    const double sg = -spectrum.frequency(m);
    if (sg >= o.s_lo && sg <= o.s_hi) {
      s.push_back(sg);
      mag.push_back(std::abs(spectrum.values[m]));
    }
  }
  fit.envelope = fit_dyadic_envelope(s, mag, o.s_lo, o.s_hi);
  fit.exponent = fit.envelope.exponent;
  return fit;
}

// ---------------------------------------------------------------------------
// Critical exponent scan

struct CriticalScanOptions {
  double R0 = 1.25e5;           // smallest truncation; the ladder is R0, 2R0, ..., 2^doublings R0
  int doublings = 3;
  std::size_t N = 1u << 22;     // samples of gamma; window L = N pi / (16 R_max)
  double growth = 0.10;
  bool stop_when_found = true;  // skip remaining lambdas once every p has its estimate
};

struct ScanPoint {
  double p = 0.0;
  double lambda = 0.0;
  TruncationLadder ladder;
};

struct CriticalEstimate {
  double p = 0.0;
  double prediction = 0.0;            // d/p - (d+1)/2
  double prediction_alternate = 0.0;  // d(1/p - 1/2) - 1/2
  double lambda_crit = std::numeric_limits<double>::quiet_NaN();
  bool found = false;
};

struct CriticalScanResult {
  int d = 0;
  std::vector<CriticalEstimate> estimates;
  std::vector<ScanPoint> points;
  double window = 0.0;
  double nyquist = 0.0;
  bool identity_holds = true;  // the two endpoint formulas agree at every (d, p)
};

inline void to_json(nlohmann::json& j, const CriticalScanResult& r) {
  j = {{"d", r.d}, {"window", r.window}, {"nyquist", r.nyquist}, {"formula_identity_holds", r.identity_holds},
       {"estimates", nlohmann::json::array()}};
  for (const auto& e : r.estimates)
    j["estimates"].push_back({{"p", e.p},
                              {"prediction", e.prediction},
                              {"prediction_alternate", e.prediction_alternate},
                              {"lambda_crit", e.found ? nlohmann::json(e.lambda_crit) : nlohmann::json(nullptr)},
                              {"found", e.found}});
}

/// For each p, the smallest lambda in the grid whose weak-type (iv) quantity
/// shows no divergent trend over the truncation ladder.
inline CriticalScanResult critical_scan(int d, std::span<const double> p_list, std::span<const double> lambda_grid,
                                        const CriticalScanOptions& o = {}, Cutoff b = cutoff::br_b) {
  detail::require(d >= 2, "critical_scan: dimension must be >= 2");
  detail::require(!p_list.empty() && !lambda_grid.empty(), "critical_scan: empty p list or lambda grid");
  std::vector<double> lambdas(lambda_grid.begin(), lambda_grid.end());
  std::sort(lambdas.begin(), lambdas.end());
  CriticalScanResult res;
  res.d = d;
  for (double p : p_list) {
    detail::require(p > 1.0, "critical_scan: p must be > 1");
    CriticalEstimate e;
    e.p = p;
    e.prediction = critical_exponent_prediction(d, p);
    e.prediction_alternate = critical_exponent_alternate(d, p);
    res.identity_holds = res.identity_holds && std::abs(e.prediction - e.prediction_alternate) <= 1e-12;
    if (e.prediction < lambdas.front() || e.prediction > lambdas.back())
      detail::fail("critical_scan: lambda grid [" + std::to_string(lambdas.front()) + ", " +
                   std::to_string(lambdas.back()) + "] does not bracket the prediction " +
                   std::to_string(e.prediction) + " for p = " + std::to_string(p));
    res.estimates.push_back(e);
  }
  const double R_max = std::ldexp(o.R0, o.doublings);
  const double L = static_cast<double>(o.N) * std::numbers::pi / (16.0 * R_max);
  detail::require(L > 0.25, "critical_scan: resolution too low for the truncation; increase N");
  res.window = L;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) detail::fail("critical_scan: lambda grid must be positive");
    auto g = br_gamma(lambda, b);
    auto spectrum = fourier_1d([&](double u) { return complex(g(u)); }, L, o.N);
    res.nyquist = spectrum.nyquist();
    bool pending = false;
    for (auto& e : res.estimates) {
      if (e.found && o.stop_when_found) continue;
      ScanPoint pt{e.p, lambda, condition_iv_from_spectrum(spectrum, d, LorentzParams::weak(e.p), R_max, o.doublings,
                                                          o.growth)};
      if (!pt.ladder.divergent && !e.found) {
        e.found = true;
        e.lambda_crit = lambda;
      }
      res.points.push_back(std::move(pt));
      pending = pending || !e.found;
    }
    if (o.stop_when_found && !pending) break;
  }
  return res;
}

}  // namespace conemult
