#pragma once

// Fourier analysis of radial functions with the convention
//
//   F_d f(xi) = int f(y) e^{-i<y,xi>} dy,   F_d^{-1} g(x) = (2 pi)^{-d} int g(xi) e^{i<x,xi>} dxi.
//
// For radial f = m0(|.|),
//
//   F_d f(xi) = (2 pi)^{d/2} int_0^inf m0(r) K_d(r|xi|) r^{d-1} dr,
//   K_d(z)    = z^{1-d/2} J_{d/2-1}(z),
//
// and the inverse carries the extra factor (2 pi)^{-d}.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <type_traits>
#include <vector>

#include "conemult/bessel.hpp"
#include "conemult/errors.hpp"
#include "conemult/fft.hpp"
#include "conemult/interpolation.hpp"
#include "conemult/parallel.hpp"
#include "conemult/quadrature.hpp"

namespace conemult {

using complex = std::complex<double>;

/// Samples of a radial function of one variable in ambient dimension dim.
struct RadialProfile {
  std::vector<double> radii;
  std::vector<complex> values;
  int dim = 2;

  void validate() const {
    detail::require(dim >= 2, "RadialProfile: dimension must be >= 2");
    detail::require(radii.size() == values.size(), "RadialProfile: radii/values length mismatch");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      detail::require(radii[i] >= 0.0, "RadialProfile: radii must be nonnegative");
      if (i > 0) detail::require(radii[i] > radii[i - 1], "RadialProfile: radii must be strictly increasing");
    }
  }

  [[nodiscard]] std::size_t size() const { return radii.size(); }
};

inline std::vector<double> linear_grid(double a, double b, std::size_t n) {
  detail::require(n >= 2 && b > a, "linear_grid: need n >= 2 and b > a");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

inline std::vector<double> geometric_grid(double a, double b, std::size_t n) {
  detail::require(n >= 2 && a > 0.0 && b > a, "geometric_grid: need n >= 2 and 0 < a < b");
  std::vector<double> g(n);
  const double ratio = std::log(b / a);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = a * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
  g.back() = b;
  return g;
}

// ---------------------------------------------------------------------------
// One-dimensional transform

/// Samples of a line Fourier transform on sigma_m = (m - N/2) * spacing.
struct LineSpectrum {
  double spacing = 1.0;
  std::vector<complex> values;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] double center() const { return static_cast<double>(values.size() / 2); }
  [[nodiscard]] double frequency(std::size_t m) const { return (static_cast<double>(m) - center()) * spacing; }
  /// Largest represented |sigma| (the Nyquist frequency).
  [[nodiscard]] double nyquist() const { return center() * spacing; }
};

/// Discrete approximation of int f(s) e^{-i s sigma} ds from samples
/// f(s_j), s_j = -R + j h, h = 2R/N, j = 0..N-1: the periodic trapezoid rule,
/// which includes the left endpoint -R and excludes +R. The output lives on
/// sigma_m = (m - N/2) pi/R. N must be a power of two.
inline LineSpectrum fourier_1d(std::span<const complex> samples, double R) {
  const std::size_t n = samples.size();
  if (!detail::is_power_of_two(n) || n < 2)
    detail::fail("fourier_1d: resolution must be a power of two >= 2, got " + std::to_string(n));
  detail::require(R > 0.0, "fourier_1d: truncation R must be > 0");
  const double h = 2.0 * R / static_cast<double>(n);
  LineSpectrum out;
  out.spacing = std::numbers::pi / R;
  out.values.assign(samples.begin(), samples.end());
  const std::size_t dims[1] = {n};
  centered_fft_inplace(out.values, dims, FftDirection::forward);
  for (auto& v : out.values) v *= h;
  return out;
}

template <class F>
  requires std::is_invocable_v<F, double>
LineSpectrum fourier_1d(F&& f, double R, std::size_t n) {
  if (!detail::is_power_of_two(n) || n < 2)
    detail::fail("fourier_1d: resolution must be a power of two >= 2, got " + std::to_string(n));
  detail::require(R > 0.0, "fourier_1d: truncation R must be > 0");
  const double h = 2.0 * R / static_cast<double>(n);
  std::vector<complex> samples(n);
  for (std::size_t j = 0; j < n; ++j) samples[j] = complex(f(-R + h * static_cast<double>(j)));
  return fourier_1d(samples, R);
}

// ---------------------------------------------------------------------------
// Radial (Hankel-type) transform

enum class TransformDirection { forward, inverse };

struct RadialTransformOptions {
  TransformDirection direction = TransformDirection::inverse;
  double r_min = 0.0;
  double r_max = 1.0;
  /// Points inside (r_min, r_max) where m0 is not smooth; panels never straddle them.
  std::vector<double> breakpoints;
  /// Panel length cap, independent of oscillation.
  double max_panel = 0.25;
  std::size_t order = 16;
  /// Minimum Gauss-Legendre nodes per oscillation period 2 pi/(|x| + phase_frequency).
  double nodes_per_period = 8.0;
  /// Frequency of an oscillating factor e^{i c r} carried by m0 itself.
  double phase_frequency = 0.0;
  /// Output points needing more nodes than this are flagged unreliable.
  std::size_t max_nodes = 4'000'000;
};

struct RadialTransformResult {
  RadialProfile profile;
  std::vector<bool> reliable;

  [[nodiscard]] bool all_reliable() const {
    for (bool b : reliable)
      if (!b) return false;
    return true;
  }
};

namespace detail {

inline std::vector<double> segment_edges(const RadialTransformOptions& o) {
  require(o.r_max > o.r_min && o.r_min >= 0.0, "radial_transform: need 0 <= r_min < r_max");
  std::vector<double> edges{o.r_min};
  std::vector<double> bp = o.breakpoints;
  std::sort(bp.begin(), bp.end());
  for (double b : bp)
    if (b > edges.back() && b < o.r_max) edges.push_back(b);
  edges.push_back(o.r_max);
  return edges;
}

inline double transform_prefactor(int dim, TransformDirection dir) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double fwd = std::pow(two_pi, 0.5 * dim);
  return dir == TransformDirection::forward ? fwd : fwd / std::pow(two_pi, dim);
}

}  // namespace detail

/// F_d[m0(|.|)] (forward) or F_d^{-1}[m0(|.|)] (inverse) at the requested
/// radii, by Gauss-Legendre panels sized to the Bessel oscillation length.
template <class F>
  requires std::is_invocable_v<F, double>
RadialTransformResult radial_transform(F&& m0, int dim, std::span<const double> radii,
                                       const RadialTransformOptions& options) {
  detail::require(dim >= 1, "radial_transform: dimension must be >= 1");
  const auto edges = detail::segment_edges(options);
  const double prefactor = detail::transform_prefactor(dim, options.direction);

  RadialTransformResult out;
  out.profile.dim = dim;
  out.profile.radii.assign(radii.begin(), radii.end());
  out.profile.values.assign(radii.size(), complex(0.0));
  out.reliable.assign(radii.size(), true);
  out.profile.validate();

  std::vector<char> ok(radii.size(), 1);
  parallel_for(radii.size(), [&](std::size_t i) {
    const double x = radii[i];
    double panel = options.max_panel;
    if (x + options.phase_frequency > 0.0) {
      const double period = 2.0 * std::numbers::pi / (x + options.phase_frequency);
      panel = std::min(panel, period * static_cast<double>(options.order) / options.nodes_per_period);
    }
    double nodes = 0.0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e)
      nodes += std::ceil((edges[e + 1] - edges[e]) / panel) * static_cast<double>(options.order);
    if (nodes > static_cast<double>(options.max_nodes)) {
      ok[i] = 0;
      out.profile.values[i] = complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
      return;
    }
    complex sum(0.0);
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      sum += integrate_panels(
          [&](double r) {
            return complex(m0(r)) * (radial_kernel(dim, r * x) * std::pow(r, dim - 1));
          },
          edges[e], edges[e + 1], panel, options.order);
    }
    out.profile.values[i] = prefactor * sum;
  });
  for (std::size_t i = 0; i < ok.size(); ++i) out.reliable[i] = ok[i] != 0;
  return out;
}

/// Transform of a sampled profile, cubic-interpolated and taken as zero
/// beyond its last radius.
inline RadialTransformResult radial_transform(const RadialProfile& profile, std::span<const double> radii,
                                              RadialTransformOptions options) {
  profile.validate();
  detail::require(profile.size() >= 2, "radial_transform: profile needs at least two samples");
  CubicInterpolant<complex> interp(profile.radii, profile.values);
  options.r_min = profile.radii.front();
  options.r_max = profile.radii.back();
  return radial_transform([&](double r) { return interp(r); }, profile.dim, radii, options);
}

// ---------------------------------------------------------------------------
// Surface measure on spheres

/// F_d[sigma_r](xi) = (2 pi)^{d/2} r^{d-1} K_d(r|xi|), with
/// <sigma_r, f> = r^{d-1} int_{S^{d-1}} f(r y') dsigma_1(y').
inline double sphere_measure_hat(double r, int dim, double xi) {
  detail::require(r > 0.0, "sphere_measure_transform: radius must be > 0");
  detail::require(dim >= 2, "sphere_measure_transform: dimension must be >= 2");
  return std::pow(2.0 * std::numbers::pi, 0.5 * dim) * std::pow(r, dim - 1) * radial_kernel(dim, r * std::abs(xi));
}

inline RadialProfile sphere_measure_transform(double r, int dim, std::span<const double> radii) {
  detail::require(r > 0.0, "sphere_measure_transform: radius must be > 0");
  RadialProfile out;
  out.dim = dim;
  out.radii.assign(radii.begin(), radii.end());
  out.values.reserve(radii.size());
  for (double xi : radii) out.values.emplace_back(sphere_measure_hat(r, dim, xi));
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Envelope fits

struct EnvelopeFit {
  double exponent = 0.0;  // fitted decay exponent a in |f| ~ s^{-a}
  std::vector<double> block_location;
  std::vector<double> block_max;
};

/// Fits log(max |f|) per dyadic block [s_lo 2^j, s_lo 2^{j+1}) against the
/// log of the block's argmax location, over blocks inside [s_lo, s_hi].
inline EnvelopeFit fit_dyadic_envelope(std::span<const double> s, std::span<const double> magnitude,
                                       double s_lo, double s_hi) {
  detail::require(s.size() == magnitude.size(), "fit_dyadic_envelope: size mismatch");
  detail::require(s_lo > 0.0 && s_hi >= 2.0 * s_lo, "fit_dyadic_envelope: need 0 < s_lo and s_hi >= 2 s_lo");
  EnvelopeFit fit;
  for (double lo = s_lo; lo * 2.0 <= s_hi * (1.0 + 1e-12); lo *= 2.0) {
    const double hi = 2.0 * lo;
    double best = -1.0, where = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double a = std::abs(s[i]);
      if (a >= lo && a < hi && magnitude[i] > best) {
        best = magnitude[i];
        where = a;
      }
    }
    if (best > 0.0) {
      fit.block_location.push_back(where);
      fit.block_max.push_back(best);
    }
  }
  detail::require(fit.block_max.size() >= 2, "fit_dyadic_envelope: fewer than two nonzero blocks");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < fit.block_max.size(); ++i) {
    lx.push_back(std::log(fit.block_location[i]));
    ly.push_back(std::log(fit.block_max[i]));
  }
  fit.exponent = -fit_slope(lx, ly);
  return fit;
}

}  // namespace conemult
