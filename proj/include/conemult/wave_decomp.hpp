#pragma once

// Wave kernels as superpositions of spherical measures, and convolution with
// smoothed spherical shells psi * sigma_r.
//
//   K_n = F_d^{-1}[e^{+-i|.|} theta(2^{-n}|.|)] = 2^{n(d-1)/2} int_{1/2}^2 omega_n(rho) sigma_rho drho + E_n
//
// A superposition int omega(rho) sigma_rho drho has radial density omega(|x|),
// so omega_n is K_n on the annulus 1/2 < |x| < 2 rescaled by 2^{-n(d-1)/2},
// and E_n is K_n off the annulus.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "conemult/bessel.hpp"
#include "conemult/cutoffs.hpp"
#include "conemult/errors.hpp"
#include "conemult/grid_field.hpp"
#include "conemult/interpolation.hpp"
#include "conemult/lorentz.hpp"
#include "conemult/multiplier_ops.hpp"
#include "conemult/opnorm.hpp"
#include "conemult/parallel.hpp"
#include "conemult/quadrature.hpp"
#include "conemult/radial_fourier.hpp"

namespace conemult {

// ---------------------------------------------------------------------------
// Smoothing kernel

struct SmoothingKernelOptions {
  int moments = 2;        // F[psi_o] vanishes to order 2 * moments at 0
  double radius = 2.0;    // supp psi_o in |x| <= radius
  double kappa = 16.0;    // bump exp(kappa - kappa / (1 - |x/radius|^2))
  double min_margin = 1e-6;
  double tail = 1e-10;    // F[psi] below this beyond resolving_frequency()
};

namespace detail {

/// Value and slope tables of a radial transform on the uniform grid j * step,
/// j = 0..count-1. The slope uses d/dz K_d(z) = -z K_{d+2}(z).
template <class F>
HermiteTable<double> radial_transform_table(F&& m0, int dim, TransformDirection dir, double r_min, double r_max,
                                            double step, std::size_t count, double phase_frequency = 0.0) {
  std::vector<double> nodes(count);
  for (std::size_t j = 0; j < count; ++j) nodes[j] = step * static_cast<double>(j);
  RadialTransformOptions o;
  o.direction = dir;
  o.r_min = r_min;
  o.r_max = r_max;
  o.max_panel = std::min(0.25, (r_max - r_min) / 8.0);
  o.nodes_per_period = 16.0;
  o.phase_frequency = phase_frequency;
  o.max_nodes = std::numeric_limits<std::size_t>::max();
  auto value = radial_transform(m0, dim, nodes, o);
  auto lifted = radial_transform(m0, dim + 2, nodes, o);
  // forward: d/dx F_d = -x F_{d+2} / (2 pi); inverse: d/dx F_d^{-1} = -2 pi x F_{d+2}^{-1}
  const double c = dir == TransformDirection::forward ? 1.0 / (2.0 * std::numbers::pi) : 2.0 * std::numbers::pi;
  std::vector<double> v(count), s(count);
  for (std::size_t j = 0; j < count; ++j) {
    v[j] = value.profile.values[j].real();
    s[j] = -c * nodes[j] * lifted.profile.values[j].real();
  }
  return HermiteTable<double>(step, std::move(v), std::move(s));
}

}  // namespace detail

/// psi_o = Delta^M of a scaled mollifier bump, normalized so max |F[psi_o]| = 1,
/// and psi = psi_o * psi_o. Both are radial; transforms are tabulated with exact
/// slopes and interpolated.
class SmoothingKernel {
 public:
  explicit SmoothingKernel(int dim, SmoothingKernelOptions o = {}) : dim_(dim), opts_(o) {
    detail::require(dim >= 2 && dim <= 4, "SmoothingKernel: dimension must be 2, 3 or 4");
    detail::require(o.moments >= 1, "SmoothingKernel: moment order must be >= 1");
    detail::require(o.radius > 0.0 && o.kappa > 0.0, "SmoothingKernel: radius and kappa must be > 0");
    const double R = o.radius;
    const double xi_step = 1.0 / (128.0 * R);
    const auto xi_count = static_cast<std::size_t>(160.0 / R / xi_step) + 1;
    auto beta = [&](double s) { return cutoff::mollifier(s / R, o.kappa); };
    auto bhat = detail::radial_transform_table(beta, dim, TransformDirection::forward, 0.0, R, xi_step, xi_count);

    // F[psi_o](xi) = (-xi^2)^M bhat(xi), normalized
    const int M = o.moments;
    const double sgn = M % 2 ? -1.0 : 1.0;
    // exact slopes: d/dxi [xi^{2M} b] = 2M xi^{2M-1} b + xi^{2M} b'
    std::vector<double> v(xi_count), s(xi_count);
    double peak = 0.0;
    for (std::size_t j = 0; j < xi_count; ++j) {
      const double xi = xi_step * static_cast<double>(j);
      const double b = bhat.values()[j];
      v[j] = sgn * std::pow(xi, 2 * M) * b;
      s[j] = sgn * (2.0 * M * std::pow(xi, 2 * M - 1) * b + std::pow(xi, 2 * M) * bhat.slopes()[j]);
      peak = std::max(peak, std::abs(v[j]));
    }
    for (std::size_t j = 0; j < xi_count; ++j) {
      v[j] /= peak;
      s[j] /= peak;
    }
    std::size_t last = xi_count - 1;
    while (last > 1 && std::abs(v[last]) < 1e-10) --last;
    if (last + 1 >= xi_count) detail::fail("SmoothingKernel: F[psi_o] has not decayed by |xi| = 160 / radius");
    std::size_t resolve = last;
    while (resolve > 1 && v[resolve] * v[resolve] < o.tail) --resolve;
    xi_resolve_ = xi_step * static_cast<double>(resolve + 1);
    xi_cut_ = xi_step * static_cast<double>(std::min(last + 1, xi_count - 1));
    v.resize(std::min(last + 2, xi_count));
    s.resize(v.size());
    hat_ = HermiteTable<double>(xi_step, std::move(v), std::move(s));

    // real valued, so nonvanishing on [1/8, 8] means one sign throughout
    margin_ = std::numeric_limits<double>::infinity();
    const double sign0 = psi_circ_hat(0.125) < 0.0 ? -1.0 : 1.0;
    for (double xi = 0.125; xi <= 8.0; xi += 1.0 / 1024.0) margin_ = std::min(margin_, sign0 * psi_circ_hat(xi));
    margin_ = std::max(margin_, 0.0);
    if (!(margin_ >= o.min_margin))
      detail::fail("SmoothingKernel: |F[psi_o]| drops to " + std::to_string(margin_) +
                   " on 1/8 <= |xi| <= 8, below the margin " + std::to_string(o.min_margin));

    const double x_step = R / 128.0;
    auto hat = [this](double xi) { return psi_circ_hat(xi); };
    auto hat2 = [this](double xi) { return psi_hat(xi); };
    space_circ_ = detail::radial_transform_table(hat, dim, TransformDirection::inverse, 0.0, xi_cut_, x_step,
                                                 static_cast<std::size_t>(1.5 * R / x_step) + 1);
    space_ = detail::radial_transform_table(hat2, dim, TransformDirection::inverse, 0.0, xi_cut_, x_step,
                                            static_cast<std::size_t>(2.5 * R / x_step) + 1);
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const SmoothingKernelOptions& options() const { return opts_; }
  [[nodiscard]] double radius() const { return opts_.radius; }
  [[nodiscard]] int moments() const { return opts_.moments; }
  /// Beyond this |xi| F[psi_o] is below 1e-10 (near the roundoff floor) and is taken as 0.
  [[nodiscard]] double frequency_cutoff() const { return xi_cut_; }
  /// Beyond this |xi| F[psi] stays below options().tail; grids need Nyquist >= this.
  [[nodiscard]] double resolving_frequency() const { return xi_resolve_; }
  /// min |F[psi_o]| on 1/8 <= |xi| <= 8 (max |F[psi_o]| = 1).
  [[nodiscard]] double nonvanishing_margin() const { return margin_; }

  [[nodiscard]] double psi_circ_hat(double xi) const { return hat_(std::abs(xi)); }
  [[nodiscard]] double psi_hat(double xi) const {
    const double v = psi_circ_hat(xi);
    return v * v;
  }
  /// Spatial profiles; zero beyond 1.5 radius (psi_o) and 2.5 radius (psi).
  [[nodiscard]] double psi_circ(double x) const { return space_circ_(std::abs(x)); }
  [[nodiscard]] double psi(double x) const { return space_(std::abs(x)); }

  /// max |psi_o(x)| over radius < |x| <= 1.5 radius relative to max |psi_o|.
  [[nodiscard]] double support_leak() const {
    double in = 0.0, out = 0.0;
    const auto& v = space_circ_.values();
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double x = space_circ_.step() * static_cast<double>(j);
      double& slot = x <= opts_.radius ? in : out;
      slot = std::max(slot, std::abs(v[j]));
    }
    return out / in;
  }

 private:
  int dim_;
  SmoothingKernelOptions opts_;
  HermiteTable<double> hat_, space_circ_, space_;
  double xi_cut_ = 0.0;
  double xi_resolve_ = 0.0;
  double margin_ = 0.0;
};

// ---------------------------------------------------------------------------
// Wave kernel and its splitting

inline constexpr int max_wave_n = 12;
inline constexpr double wave_reliable_radius = 16.0;

using WaveCutoff = std::function<double(double)>;

struct WaveKernelOptions {
  /// Breakpoints of theta (in s = 2^{-n}|xi|), where panels must not straddle.
  std::vector<double> theta_breakpoints = {0.2, 5.0};
  double theta_lo = 0.125;
  double theta_hi = 8.0;
};

/// K_n(x) = F_d^{-1}[e^{sign i|.|} theta(2^{-n}|.|)](x) at the given radii (all <= 16).
inline RadialTransformResult wave_kernel(int n, int d, std::span<const double> radii,
                                         const WaveCutoff& theta = cutoff::wave_theta, int sign = +1,
                                         const WaveKernelOptions& wo = {}) {
  detail::require(n >= 1, "wave_kernel: n must be >= 1");
  if (n > max_wave_n)
    throw budget_error("wave_kernel: n = " + std::to_string(n) + " exceeds the quadrature budget n <= " +
                       std::to_string(max_wave_n));
  detail::require(d >= 2, "wave_kernel: dimension must be >= 2");
  detail::require(sign == 1 || sign == -1, "wave_kernel: sign must be +1 or -1");
  for (double x : radii)
    detail::require(x >= 0.0 && x <= wave_reliable_radius, "wave_kernel: radii must lie in [0, 16]");
  const double scale = std::ldexp(1.0, n);
  RadialTransformOptions o;
  o.direction = TransformDirection::inverse;
  o.r_min = wo.theta_lo * scale;
  o.r_max = wo.theta_hi * scale;
  for (double b : wo.theta_breakpoints) o.breakpoints.push_back(b * scale);
  o.phase_frequency = 1.0;
  o.nodes_per_period = 16.0;
  o.max_panel = std::numbers::pi;
  o.max_nodes = 8'000'000;
  const double sg = sign;
  return radial_transform([&](double r) { return std::polar(theta(r / scale), sg * r); }, d, radii, o);
}

struct WaveDecompositionOptions {
  double points_per_wavelength = 8.0;  // relative to the top frequency 8 * 2^n
  double outer_radius = wave_reliable_radius;
  int n_test = 2;                      // weight (1 + |x|)^N in the error sup
  int sign = +1;
};

struct WaveDecomposition {
  int n = 1;
  int d = 3;
  int sign = 1;
  RadialProfile omega;           // omega_n(rho), 1/2 < rho < 2
  RadialProfile error;           // E_n(x) for |x| <= 1/2 and 2 <= |x| <= outer radius
  double omega_l1 = 0.0;         // int |omega_n|
  double error_sup = 0.0;        // sup over |x| <= 1/4 or |x| >= 4 of |E_n| (1+|x|)^N
  double error_sup_location = 0.0;
  double spatial_exponent = std::numeric_limits<double>::quiet_NaN();  // decay of |E_n| in |x| on [4, outer]
  bool reliable = true;
};

inline void to_json(nlohmann::json& j, const WaveDecomposition& w) {
  j = {{"n", w.n},
       {"d", w.d},
       {"sign", w.sign},
       {"omega_l1", w.omega_l1},
       {"error_sup", w.error_sup},
       {"error_sup_location", w.error_sup_location},
       {"spatial_exponent", std::isfinite(w.spatial_exponent) ? nlohmann::json(w.spatial_exponent) : nlohmann::json(nullptr)},
       {"reliable", w.reliable}};
}

inline WaveDecomposition decompose(int n, int d, const WaveCutoff& theta = cutoff::wave_theta,
                                   const WaveDecompositionOptions& o = {}, const WaveKernelOptions& wo = {}) {
  detail::require(o.outer_radius > 4.0 && o.outer_radius <= wave_reliable_radius,
                  "decompose: outer radius must lie in (4, 16]");
  const double top = wo.theta_hi * std::ldexp(1.0, n);
  const double h = 2.0 * std::numbers::pi / top / o.points_per_wavelength;
  std::vector<double> radii;
  for (double x = 0.0; x <= o.outer_radius + 1e-12; x += h) radii.push_back(x);
  auto K = wave_kernel(n, d, radii, theta, o.sign, wo);

  WaveDecomposition w;
  w.n = n;
  w.d = d;
  w.sign = o.sign;
  w.reliable = K.all_reliable();
  w.omega.dim = w.error.dim = d;
  const double norm = std::pow(2.0, -0.5 * n * (d - 1));
  std::vector<double> block_x, block_v;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double x = radii[i];
    const complex v = K.profile.values[i];
    if (x > 0.5 && x < 2.0) {
      w.omega.radii.push_back(x);
      w.omega.values.push_back(norm * v);
      continue;
    }
    w.error.radii.push_back(x);
    w.error.values.push_back(v);
    if (x <= 0.25 || x >= 4.0) {
      const double weighted = std::abs(v) * std::pow(1.0 + x, o.n_test);
      if (weighted > w.error_sup) {
        w.error_sup = weighted;
        w.error_sup_location = x;
      }
    }
    if (x >= 4.0) {
      block_x.push_back(x);
      block_v.push_back(std::abs(v));
    }
  }
  for (std::size_t i = 1; i < w.omega.size(); ++i)
    w.omega_l1 += 0.5 * (std::abs(w.omega.values[i]) + std::abs(w.omega.values[i - 1])) *
                  (w.omega.radii[i] - w.omega.radii[i - 1]);
  if (!block_x.empty() && o.outer_radius >= 8.0) {
    auto fit = fit_dyadic_envelope(block_x, block_v, 4.0, o.outer_radius);
    w.spatial_exponent = fit.exponent;
  }
  return w;
}

/// Slope of -log2(error_sup) against n: dyadic orders of decay per unit n.
inline double error_decay_rate(std::span<const WaveDecomposition> ws) {
  detail::require(ws.size() >= 2, "error_decay_rate: need at least two decompositions");
  std::vector<double> n, y;
  for (const auto& w : ws) {
    n.push_back(w.n);
    y.push_back(std::log2(w.error_sup));
  }
  return -fit_slope(n, y);
}

inline double omega_l1_spread(std::span<const WaveDecomposition> ws) {
  detail::require(!ws.empty(), "omega_l1_spread: empty list");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& w : ws) {
    lo = std::min(lo, w.omega_l1);
    hi = std::max(hi, w.omega_l1);
  }
  return hi / lo;
}

/// <int omega(rho) sigma_rho drho, g> = int omega(rho) rho^{d-1} |S^{d-1}| g(rho) drho for radial g,
/// with omega given on (a, b) and integrated by Gauss-Legendre panels.
template <class W, class G>
double superposition_pairing(W&& omega, G&& g, int d, double a = 0.5, double b = 2.0) {
  const double area = unit_sphere_area(d);
  return integrate_panels([&](double rho) { return omega(rho) * std::pow(rho, d - 1) * area * g(rho); }, a, b,
                          (b - a) / 64.0, 16);
}

// ---------------------------------------------------------------------------
// Shell convolutions

namespace detail {
inline void require_resolves(const GridSpec& spec, const SmoothingKernel& k) {
  require(static_cast<int>(spec.rank()) == k.dim(), "shell_convolve: grid rank differs from the kernel dimension");
  for (const auto& a : spec.axes) {
    if (a.spacing() > k.radius() / 4.0 + 1e-15)
      fail("shell_convolve: cell size " + std::to_string(a.spacing()) + " does not resolve psi (need <= radius/4 = " +
           std::to_string(k.radius() / 4.0) + ")");
    if (std::numbers::pi / a.spacing() < k.resolving_frequency())
      fail("shell_convolve: Nyquist frequency " + std::to_string(std::numbers::pi / a.spacing()) +
           " truncates F[psi] (need >= " + std::to_string(k.resolving_frequency()) + ")");
  }
}
}  // namespace detail

/// |h^d sum out| / (h^d sum |g| * r^{d-1} |S^{d-1}| max|F[psi]|): the output
/// integral equals g^(0) F[psi](0) sigma_r^(0) = 0.
inline double shell_mass_residual(const GridField& g, const GridField& out, double r, int d) {
  complex total = 0.0;
  double mass = 0.0;
  for (const auto& v : out.values) total += v;
  for (const auto& v : g.values) mass += std::abs(v);
  if (mass == 0.0) return 0.0;
  return std::abs(total) / (mass * std::pow(r, d - 1) * unit_sphere_area(d));
}

/// g * psi * sigma_r by multiplying g^ with F[psi] F[sigma_r].
inline GridField shell_convolve(const GridField& g, double r, const SmoothingKernel& k) {
  detail::require(g.representation == Representation::space, "shell_convolve: input must be in space representation");
  detail::require(r > 0.0, "shell_convolve: radius must be > 0");
  detail::require_resolves(g.spec, k);
  const int d = k.dim();
  auto out = apply_radial_multiplier(g, [&](double xi) { return k.psi_hat(xi) * sphere_measure_hat(r, d, xi); });
  const double residual = shell_mass_residual(g, out, r, d);
  if (residual > 1e-6) detail::fail("shell_convolve: output integral " + std::to_string(residual) + " relative, expected 0");
  return out;
}

/// The same convolution at selected grid points by direct quadrature:
/// h^d sum_y g(y) r^{d-1} int_{S^{d-1}} psi(x - y - r w) dw, d = 2 or 3.
inline std::vector<complex> shell_convolve_direct(const GridField& g, double r, const SmoothingKernel& k,
                                                  std::span<const std::size_t> points, std::size_t angles = 256) {
  const int d = k.dim();
  detail::require(d == 2 || d == 3, "shell_convolve_direct: only d = 2 or 3");
  detail::require(static_cast<int>(g.spec.rank()) == d, "shell_convolve_direct: grid rank differs from d");
  // sphere nodes and weights (total weight |S^{d-1}|)
  std::vector<std::array<double, 3>> dirs;
  std::vector<double> wts;
  if (d == 2) {
    for (std::size_t a = 0; a < angles; ++a) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(angles);
      dirs.push_back({std::cos(th), std::sin(th), 0.0});
      wts.push_back(2.0 * std::numbers::pi / static_cast<double>(angles));
    }
  } else {
    const std::size_t nz = std::max<std::size_t>(angles / 2, 8);
    const auto& gl = GaussLegendre::of_order(nz);
    for (std::size_t i = 0; i < nz; ++i) {
      const double z = gl.nodes[i], s = std::sqrt(1.0 - z * z);
      for (std::size_t a = 0; a < angles; ++a) {
        const double ph = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(angles);
        dirs.push_back({s * std::cos(ph), s * std::sin(ph), z});
        wts.push_back(gl.weights[i] * 2.0 * std::numbers::pi / static_cast<double>(angles));
      }
    }
  }
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (g.values[j] != complex(0.0)) support.push_back(j);
  const double reach = 2.5 * k.radius();
  const double cell = g.spec.cell_volume();
  const double rd = std::pow(r, d - 1);
  std::vector<complex> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const auto x = g.spec.coordinates(points[i]);
    complex acc = 0.0;
    for (std::size_t j : support) {
      const auto y = g.spec.coordinates(j);
      std::array<double, 3> z{};
      double zn2 = 0.0;
      for (int a = 0; a < d; ++a) {
        z[a] = x[a] - y[a];
        zn2 += z[a] * z[a];
      }
      const double zn = std::sqrt(zn2);
      if (zn > r + reach || zn < r - reach) continue;
      double shell = 0.0;
      for (std::size_t q = 0; q < dirs.size(); ++q) {
        double s2 = 0.0;
        for (int a = 0; a < d; ++a) {
          const double u = z[a] - r * dirs[q][a];
          s2 += u * u;
        }
        shell += wts[q] * k.psi(std::sqrt(s2));
      }
      acc += g.values[j] * shell;
    }
    out[i] = cell * rd * acc;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Lower bounds for the superposition operator
//   h |-> int int h(y, r) sigma_r * psi(. - y) dr dy,  L^p(dy r^{d-1} dr) -> L^p(R^d)
// over witnesses centered at y = 0, whose outputs are radial.

struct SphProbeOptions {
  double y_cell = 0.25;          // side of the y-cell carrying an atom
  double x_max = 0.0;            // 0 picks max r + 2 radius + 6 max bump scale
  std::size_t x_cells = 1024;
  std::size_t budget = 256;      // witness evaluations
  std::uint64_t seed = 1;
  std::vector<double> bump_scales = {0.5, 1.0, 2.0};
  std::vector<double> weight_exponents = {0.0, 0.5, 1.0};  // w(r) = r^{-a (d-1)}
};

namespace detail {

/// Trapezoid cell widths of a sorted grid; a single point gets width 1.
inline std::vector<double> cell_widths(std::span<const double> r) {
  std::vector<double> w(r.size(), 1.0);
  if (r.size() < 2) return w;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double lo = i == 0 ? r[0] : 0.5 * (r[i - 1] + r[i]);
    const double hi = i + 1 == r.size() ? r[i] : 0.5 * (r[i] + r[i + 1]);
    w[i] = hi - lo;
  }
  return w;
}

/// Inverse radial transforms of many multipliers at the same points, on one
/// Gauss-Legendre rule over [0, xi_max] fine enough for frequency x_max + shift.
class RadialBatch {
 public:
  RadialBatch(int dim, double xi_max, std::span<const double> xs, double shift) : dim_(dim), xs_(xs.begin(), xs.end()) {
    const double top = (xs_.empty() ? 0.0 : xs_.back()) + shift;
    const std::size_t order = 16;
    const double panel = std::min(0.25, 2.0 * std::numbers::pi / std::max(top, 1.0));
    const auto panels = static_cast<std::size_t>(std::ceil(xi_max / panel));
    const double hpanel = xi_max / static_cast<double>(panels);
    const auto& gl = GaussLegendre::of_order(order);
    const double pre = transform_prefactor(dim, TransformDirection::inverse);
    for (std::size_t k = 0; k < panels; ++k)
      for (std::size_t q = 0; q < order; ++q) {
        const double xi = hpanel * (static_cast<double>(k) + 0.5 * (gl.nodes[q] + 1.0));
        nodes_.push_back(xi);
        weights_.push_back(pre * 0.5 * hpanel * gl.weights[q] * std::pow(xi, dim - 1));
      }
  }

  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }

  /// outputs[j][i] = F_d^{-1}[m_j](xs[i]) for multipliers sampled at nodes().
  [[nodiscard]] std::vector<std::vector<double>> apply(const std::vector<std::vector<double>>& m) const {
    std::vector<std::vector<double>> out(m.size(), std::vector<double>(xs_.size()));
    std::vector<std::vector<double>> wm(m.size(), std::vector<double>(nodes_.size()));
    for (std::size_t j = 0; j < m.size(); ++j)
      for (std::size_t q = 0; q < nodes_.size(); ++q) wm[j][q] = weights_[q] * m[j][q];
    parallel_for(xs_.size(), [&](std::size_t i) {
      std::vector<double> row(nodes_.size());
      for (std::size_t q = 0; q < nodes_.size(); ++q) row[q] = radial_kernel(dim_, nodes_[q] * xs_[i]);
      for (std::size_t j = 0; j < m.size(); ++j) {
        double acc = 0.0;
        for (std::size_t q = 0; q < nodes_.size(); ++q) acc += row[q] * wm[j][q];
        out[j][i] = acc;
      }
    });
    return out;
  }

 private:
  int dim_;
  std::vector<double> xs_, nodes_, weights_;
};

}  // namespace detail

/// Lower bound for the superposition operator norm over atoms at single radii,
/// coherent and random-sign spreads across radii, and Gaussian radial bumps.
/// Every witness is centered at y = 0, so outputs are radial and their L^p
/// norms are 1-d quadratures on a midpoint grid in |x|.
inline OpNormEstimate sph_opnorm_lower(int d, double p, const SmoothingKernel& k, std::vector<double> r_grid,
                                       const SphProbeOptions& o = {}) {
  detail::require(d >= 2 && d <= 4, "sph_opnorm_lower: d must be 2, 3 or 4");
  detail::require(k.dim() == d, "sph_opnorm_lower: kernel dimension differs from d");
  detail::require(p >= 1.0, "sph_opnorm_lower: p must be >= 1");
  detail::require(!r_grid.empty() && r_grid.size() <= 64, "sph_opnorm_lower: r grid must have 1 to 64 shells");
  detail::require(o.y_cell > 0.0 && o.x_cells >= 16, "sph_opnorm_lower: need y_cell > 0 and x_cells >= 16");
  std::sort(r_grid.begin(), r_grid.end());
  for (double r : r_grid) detail::require(r >= 1.0, "sph_opnorm_lower: radii must be >= 1");
  const auto dr = detail::cell_widths(r_grid);
  const std::size_t nr = r_grid.size();
  double max_scale = 0.0;
  for (double s : o.bump_scales) max_scale = std::max(max_scale, s);
  const double x_max = o.x_max > 0.0 ? o.x_max : r_grid.back() + 2.0 * k.radius() + 6.0 * max_scale;
  const double dx = x_max / static_cast<double>(o.x_cells);
  std::vector<double> xs(o.x_cells), xw(o.x_cells);
  const double area = unit_sphere_area(d);
  for (std::size_t i = 0; i < o.x_cells; ++i) {
    xs[i] = (static_cast<double>(i) + 0.5) * dx;
    xw[i] = area * std::pow(xs[i], d - 1) * dx;
  }
  const double xi_max = std::min(k.frequency_cutoff(), 1.25 * k.resolving_frequency());
  detail::RadialBatch batch(d, xi_max, xs, r_grid.back());
  const auto& xi = batch.nodes();

  // F[psi] F[sigma_r] at the shared nodes, one row per shell
  std::vector<std::vector<double>> shell_hat(nr, std::vector<double>(xi.size()));
  parallel_for(nr, [&](std::size_t i) {
    for (std::size_t q = 0; q < xi.size(); ++q) shell_hat[i][q] = k.psi_hat(xi[q]) * sphere_measure_hat(r_grid[i], d, xi[q]);
  });
  const auto shells = batch.apply(shell_hat);

  auto lp = [&](const std::vector<double>& v) {
    WeightedSampleSet s;
    s.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s.push_back(v[i], xw[i]);
    return weighted_lp_norm(s, p);
  };
  auto weights = [&](double a) {
    std::vector<double> c(nr);
    for (std::size_t i = 0; i < nr; ++i) c[i] = std::pow(r_grid[i], -a * (d - 1));
    return c;
  };
  // sum_i r_i^{d-1} dr_i |c_i|^p
  auto radial_mass = [&](const std::vector<double>& c) {
    double hp = 0.0;
    for (std::size_t i = 0; i < nr; ++i) hp += std::pow(std::abs(c[i]), p) * std::pow(r_grid[i], d - 1) * dr[i];
    return hp;
  };

  OpNormEstimate est;
  est.params = LorentzParams::strong(p);
  est.seed = o.seed;
  nlohmann::json best;
  auto record = [&](double ratio, nlohmann::json desc) {
    ++est.budget;
    if (ratio > est.lower_bound) {
      est.lower_bound = ratio;
      best = std::move(desc);
    }
  };
  auto room = [&] { return est.budget < o.budget; };

  // h = c_i on the y-cell around 0 times the r-cell of r_i; output ycell sum_i c_i dr_i P_{r_i}
  const double ycell = std::pow(o.y_cell, d);
  auto spread_ratio = [&](const std::vector<double>& c) {
    std::vector<double> out(o.x_cells, 0.0);
    for (std::size_t i = 0; i < nr; ++i)
      if (c[i] != 0.0)
        for (std::size_t q = 0; q < o.x_cells; ++q) out[q] += ycell * dr[i] * c[i] * shells[i][q];
    return lp(out) / std::pow(ycell * radial_mass(c), 1.0 / p);
  };

  for (std::size_t i = 0; i < nr && room(); ++i) {
    const double cell = ycell * dr[i];
    record(std::pow(cell, 1.0 - 1.0 / p) * lp(shells[i]) / std::pow(r_grid[i], (d - 1) / p),
           {{"family", "atom"}, {"r", r_grid[i]}, {"y_cell", o.y_cell}});
  }
  if (nr > 1)
    for (double a : o.weight_exponents) {
      if (!room()) break;
      record(spread_ratio(weights(a)), {{"family", "coherent"}, {"weight_exponent", a}});
    }

  // h(y, r) = exp(-|y|^2 / (2 s^2)) w(r), with F[exp(-|.|^2/(2 s^2))] = (2 pi)^{d/2} s^d exp(-s^2 xi^2 / 2)
  std::vector<std::vector<double>> bump_hat;
  std::vector<nlohmann::json> bump_desc;
  std::vector<double> bump_norm;
  for (double s : o.bump_scales)
    for (double a : o.weight_exponents) {
      if (est.budget + bump_hat.size() >= o.budget) break;
      const auto c = weights(a);
      std::vector<double> m(xi.size(), 0.0);
      for (std::size_t q = 0; q < xi.size(); ++q) {
        double sum = 0.0;
        for (std::size_t i = 0; i < nr; ++i) sum += c[i] * dr[i] * shell_hat[i][q];
        m[q] = std::pow(2.0 * std::numbers::pi, 0.5 * d) * std::pow(s, d) * std::exp(-0.5 * s * s * xi[q] * xi[q]) * sum;
      }
      bump_hat.push_back(std::move(m));
      bump_desc.push_back({{"family", "radial_bump"}, {"scale", s}, {"weight_exponent", a}});
      bump_norm.push_back(std::pow(std::pow(2.0 * std::numbers::pi * s * s / p, 0.5 * d) * radial_mass(c), 1.0 / p));
    }
  const auto bumps = batch.apply(bump_hat);
  for (std::size_t j = 0; j < bumps.size(); ++j) record(lp(bumps[j]) / bump_norm[j], bump_desc[j]);

  if (nr > 1) {
    std::mt19937_64 rng(o.seed);
    std::bernoulli_distribution coin;
    for (int trial = 0; room(); ++trial) {
      std::vector<double> c(nr);
      for (auto& v : c) v = coin(rng) ? 1.0 : -1.0;
      record(spread_ratio(c), {{"family", "random_signs"}, {"trial", trial}});
    }
  }
  est.witness_description = best.dump();
  return est;
}

}  // namespace conemult
