#pragma once

// Bessel functions of the first kind J_nu(x) for nu in {0, 1/2, 1, 3/2, ...}
// and x >= 0.
//
//  * half-integer orders: spherical Bessel closed forms (upward recurrence
//    from sin/cos for x > l, Miller backward recurrence below);
//  * integer orders: power series for x < 1, Miller backward recurrence with
//    the Neumann normalization J_0 + 2 sum J_2k = 1 for x < 20, Hankel
//    asymptotic expansion from x = 20 when the order is small compared to x.

#include <cmath>
#include <numbers>
#include <string>

#include "conemult/errors.hpp"

namespace conemult {

namespace detail {

inline int twice_order(double order) {
  const double two = 2.0 * order;
  const double r = std::round(two);
  if (!(order >= 0.0) || std::abs(two - r) > 1e-12 || r > 2.0e4)
    fail("bessel_j: unsupported order " + std::to_string(order) +
         " (need a nonnegative integer or half-integer)");
  return static_cast<int>(r);
}

// j_l(x) = x^l / (2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1)).
inline double spherical_bessel_series(int l, double x) {
  double lead = 1.0;
  for (int k = 0; k <= l; ++k) lead *= (k == 0 ? 1.0 : x) / (2.0 * k + 1.0);
  const double y = -0.5 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 100; ++k) {
    term *= y / (k * (2.0 * l + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return lead * sum;
}

// Spherical Bessel j_l(x), x > 0.
inline double spherical_bessel_j(int l, double x) {
  if (x < 1.0) return spherical_bessel_series(l, x);
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double j0 = s / x;
  if (l == 0) return j0;
  const double j1 = s / (x * x) - c / x;
  if (l == 1) return j1;
  if (x > static_cast<double>(l)) {
    double jm = j0, jc = j1;
    for (int n = 1; n < l; ++n) {
      const double jn = (2.0 * n + 1.0) / x * jc - jm;
      jm = jc;
      jc = jn;
    }
    return jc;
  }
  // Miller: backward recurrence from well above max(l, x), normalized by
  // whichever of j0, j1 is better conditioned.
  const int start = l + 20 + static_cast<int>(std::sqrt(40.0 * (l + 1)));
  double jp = 0.0, jc = 1e-300, target = 0.0, f0 = 0.0, f1 = 0.0;
  for (int n = start; n >= 1; --n) {
    const double jm = (2.0 * n + 1.0) / x * jc - jp;
    jp = jc;
    jc = jm;
    if (std::abs(jc) > 1e250) {
      jc *= 1e-250;
      jp *= 1e-250;
      target *= 1e-250;
    }
    if (n - 1 == l) target = jc;
    if (n == 1) {
      f0 = jc;
      f1 = jp;
    }
  }
  if (l == 0) target = f0;
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / f0 : j1 / f1;
  return target * scale;
}

inline double bessel_series(int n, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half / k;
  double sum = term;
  const double q = -half * half;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

inline double bessel_miller(int n, double x) {
  const int start =
      2 * ((std::max(n, static_cast<int>(x)) + 20 + static_cast<int>(std::sqrt(60.0 * (x + n + 1)))) / 2);
  double jp = 0.0, jc = 1e-300, result = 0.0, norm = 0.0;
  for (int k = start; k >= 1; --k) {
    const double jm = 2.0 * k / x * jc - jp;
    jp = jc;
    jc = jm;  // J_{k-1}
    if (std::abs(jc) > 1e250) {
      jc *= 1e-250;
      jp *= 1e-250;
      result *= 1e-250;
      norm *= 1e-250;
    }
    if (k - 1 == n) result = jc;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * jc;
  }
  norm += jc;
  return result / norm;
}

inline bool hankel_asymptotic(double nu, double x, double& out) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0, term = 1.0, last = 1e300;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(term) > last) return false;
    last = std::abs(term);
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      p += ((k / 2) % 2 == 1 ? -1.0 : 1.0) * term;
    }
    if (last < 1e-17) break;
  }
  if (last > 1e-15) return false;
  const double phase = (0.5 * nu + 0.25) * std::numbers::pi;
  // cos(x - phase), sin(x - phase) with x reduced by the library
  const double cx = std::cos(x), sx = std::sin(x);
  const double cp = std::cos(phase), sp = std::sin(phase);
  const double cosw = cx * cp + sx * sp;
  const double sinw = sx * cp - cx * sp;
  out = std::sqrt(2.0 / (std::numbers::pi * x)) * (p * cosw - q * sinw);
  return true;
}

}  // namespace detail

/// J_order(x) for nonnegative integer or half-integer order and x >= 0.
inline double bessel_j(double order, double x) {
  const int two_nu = detail::twice_order(order);
  detail::require(x >= 0.0 && std::isfinite(x), "bessel_j: argument must be finite and >= 0");
  if (x == 0.0) return two_nu == 0 ? 1.0 : 0.0;

  if (two_nu % 2 == 1) {
    const int l = (two_nu - 1) / 2;
    return std::sqrt(2.0 * x / std::numbers::pi) * detail::spherical_bessel_j(l, x);
  }

  const int n = two_nu / 2;
  if (x < 1.0) return detail::bessel_series(n, x);
  if (x >= 20.0 && static_cast<double>(n) * n < 0.5 * x) {
    double v;
    if (detail::hankel_asymptotic(static_cast<double>(n), x, v)) return v;
  }
  return detail::bessel_miller(n, x);
}

/// The radial Fourier kernel z^{1-d/2} J_{d/2-1}(z), continuous at z = 0
/// with value 2^{1-d/2} / Gamma(d/2). For d = 1 this is sqrt(2/pi) cos z.
inline double radial_kernel(int dim, double z) {
  detail::require(dim >= 1, "radial_kernel: dimension must be >= 1");
  z = std::abs(z);
  switch (dim) {
    case 1:
      return std::sqrt(2.0 / std::numbers::pi) * std::cos(z);
    case 2:
      return bessel_j(0.0, z);
    case 3:
      // z^{-1/2} J_{1/2}(z) = sqrt(2/pi) sin z / z
      if (z < 1e-4) return std::sqrt(2.0 / std::numbers::pi) * (1.0 - z * z / 6.0);
      return std::sqrt(2.0 / std::numbers::pi) * std::sin(z) / z;
    default: {
      const double nu = 0.5 * dim - 1.0;
      if (z < 1e-6) {
        return std::pow(2.0, -nu) / std::tgamma(nu + 1.0) * (1.0 - z * z / (4.0 * (nu + 1.0)));
      }
      return std::pow(z, -nu) * bessel_j(nu, z);
    }
  }
}

/// Surface area |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2).
inline double unit_sphere_area(int dim) {
  detail::require(dim >= 1, "unit_sphere_area: dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

}  // namespace conemult
