#pragma once

// Smooth compactly supported cutoffs. All are built from the C^inf step
//
//   S(x) = e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)}),  0 < x < 1,
//
// with S = 0 for x <= 0 and S = 1 for x >= 1. The constants below are frozen:
// results that depend on the particular cutoff (omega_n values, condition
// functionals) are only reproducible with these exact choices.

#include <cmath>

namespace conemult {

inline double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

/// 0 outside (a, d), 1 on [b, c], smooth steps on [a, b] and [c, d].
inline double smooth_plateau(double x, double a, double b, double c, double d) {
  if (x <= a || x >= d) return 0.0;
  if (x < b) return smooth_step((x - a) / (b - a));
  if (x > c) return smooth_step((d - x) / (d - c));
  return 1.0;
}

namespace cutoff {

/// phi(r) = exp(-1/((r - 1/2)(2 - r))) on (1/2, 2), scaled to peak value 1
/// (attained at r = 5/4).
inline double phi(double r) {
  if (r <= 0.5 || r >= 2.0) return 0.0;
  constexpr double peak_exponent = 1.0 / (0.75 * 0.75);
  return std::exp(peak_exponent - 1.0 / ((r - 0.5) * (2.0 - r)));
}

/// b: supported in (-1/4, 4), equal to 1 on [-1/8, 2].
inline double br_b(double s) { return smooth_plateau(s, -0.25, -0.125, 2.0, 4.0); }

/// theta: supported in (1/8, 8), equal to 1 on [1/5, 5].
inline double wave_theta(double s) { return smooth_plateau(s, 0.125, 0.2, 5.0, 8.0); }

/// chi_1: supported in (5/8, 17/8), equal to 1 on [3/4, 2].
inline double chi1(double r) { return smooth_plateau(r, 0.625, 0.75, 2.0, 2.125); }

/// chi: supported in (-4, 4), equal to 1 on [-3, 3].
inline double chi(double t) { return smooth_plateau(t, -4.0, -3.0, 3.0, 4.0); }

/// Mollifier bump exp(kappa - kappa / (1 - x^2)) on |x| < 1, peak 1 at x = 0.
inline double mollifier(double x, double kappa = 1.0) {
  const double q = 1.0 - x * x;
  if (q <= 0.0) return 0.0;
  return std::exp(kappa - kappa / q);
}

}  // namespace cutoff
}  // namespace conemult
