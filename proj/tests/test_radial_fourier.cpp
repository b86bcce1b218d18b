#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "conemult/cutoffs.hpp"
#include "conemult/radial_fourier.hpp"

using namespace conemult;
using std::numbers::pi;

TEST(Fourier1d, TentClosedForm) {
  auto tent = [](double s) { return std::max(0.0, 1.0 - std::abs(s)); };
  auto spec = fourier_1d(tent, 8.0, 1u << 14);
  double worst = 0.0;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const double sg = spec.frequency(m);
    const double ref = sg == 0.0 ? 1.0 : std::pow(std::sin(sg / 2) / (sg / 2), 2);
    worst = std::max(worst, std::abs(spec.values[m] - ref));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Fourier1d, GaussianSelfTransform) {
  auto spec = fourier_1d([](double s) { return std::exp(-s * s / 2); }, 20.0, 1024);
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const double sg = spec.frequency(m);
    EXPECT_NEAR(std::abs(spec.values[m] - std::sqrt(2 * pi) * std::exp(-sg * sg / 2)), 0.0, 1e-8);
  }
}

TEST(Fourier1d, ZeroInputAndResolutionCheck) {
  auto spec = fourier_1d([](double) { return 0.0; }, 3.0, 64);
  for (auto v : spec.values) EXPECT_EQ(v, std::complex<double>(0.0));
  EXPECT_THROW(fourier_1d([](double) { return 1.0; }, 1.0, 100), conemult::domain_error);
}

TEST(Fourier1d, MatchesDirectSum) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const std::size_t n = 128;
  const double R = 5.0, h = 2 * R / n;
  std::vector<complex> samples(n);
  for (auto& v : samples) v = {g(rng), g(rng)};
  auto spec = fourier_1d(samples, R);
  for (std::size_t m = 0; m < n; ++m) {
    const double sg = (static_cast<double>(m) - n / 2.0) * pi / R;
    complex ref = 0.0;
    for (std::size_t j = 0; j < n; ++j) ref += samples[j] * std::polar(1.0, -(-R + h * j) * sg);
    EXPECT_NEAR(std::abs(spec.values[m] - h * ref), 0.0, 1e-11);
  }
}

TEST(Fourier1d, RealEvenInputGivesRealOutput) {
  auto spec = fourier_1d([](double s) { return cutoff::mollifier(s / 3.0) * std::cos(4 * s); }, 8.0, 4096);
  double peak = 0.0, imag = 0.0;
  for (auto v : spec.values) {
    peak = std::max(peak, std::abs(v));
    imag = std::max(imag, std::abs(v.imag()));
  }
  EXPECT_LE(imag, 1e-10 * peak);
}

TEST(RadialTransform, GaussianTotalIntegralD2) {
  RadialTransformOptions o;
  o.direction = TransformDirection::forward;
  o.r_max = 14.0;
  const double zero = 0.0;
  auto res = radial_transform([](double r) { return std::exp(-r * r / 2); }, 2, std::span(&zero, 1), o);
  EXPECT_NEAR(res.profile.values[0].real(), 2 * pi, 1e-10);
}

TEST(RadialTransform, GaussianSelfTransform) {
  const auto xs = linear_grid(0.0, 10.0, 401);
  for (int d : {2, 3, 4}) {
    RadialTransformOptions o;
    o.direction = TransformDirection::forward;
    o.r_max = 14.0;
    auto res = radial_transform([](double r) { return std::exp(-r * r / 2); }, d, xs, o);
    ASSERT_TRUE(res.all_reliable());
    const double scale = std::pow(2 * pi, 0.5 * d);
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      worst = std::max(worst, std::abs(res.profile.values[i] - scale * std::exp(-xs[i] * xs[i] / 2)));
    EXPECT_LE(worst / scale, 1e-6) << "d=" << d;
  }
}

TEST(RadialTransform, InverseIsScaledForward) {
  const auto xs = linear_grid(0.0, 6.0, 31);
  RadialTransformOptions o;
  o.r_max = 14.0;
  auto inv = radial_transform([](double r) { return std::exp(-r * r / 2); }, 3, xs, o);
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_NEAR(inv.profile.values[i].real(), std::pow(2 * pi, -1.5) * std::exp(-xs[i] * xs[i] / 2), 1e-12);
}

TEST(RadialTransform, DilationCovariance) {
  const auto xs = linear_grid(0.0, 8.0, 41);
  RadialTransformOptions o;
  o.r_max = 30.0;
  for (int d : {2, 3, 4}) {
    auto base = [](double r) { return std::exp(-r * r / 2) * (1.0 + r * r); };
    auto m0 = radial_transform(base, d, xs, o);
    for (double t : {0.5, 2.0}) {
      auto dil = radial_transform([&](double r) { return base(t * r); }, d, xs, o);
      std::vector<double> scaled_x;
      for (double x : xs) scaled_x.push_back(x / t);
      auto ref = radial_transform(base, d, scaled_x, o);
      for (std::size_t i = 0; i < xs.size(); ++i)
        EXPECT_NEAR(std::abs(dil.profile.values[i] - std::pow(t, -d) * ref.profile.values[i]), 0.0, 1e-6);
    }
  }
}

// ||F^{-1} m||_2^2 = (2 pi)^{-d} ||m||_2^2, both sides in polar coordinates.
TEST(RadialTransform, PlancherelSmoothIndicator) {
  auto m0 = [](double r) { return smooth_plateau(r, -1.0, -0.5, 0.8, 1.2); };
  for (int d : {2, 3, 4}) {
    const double lhs_m = integrate_panels([&](double r) { return m0(r) * m0(r) * std::pow(r, d - 1); }, 0.0, 1.2,
                                          0.05) *
                         unit_sphere_area(d);
    RadialTransformOptions o;
    o.r_max = 1.2;
    o.breakpoints = {0.8};
    const auto rule = PanelRule::build(0.0, 400.0, 0.25, 16);
    auto k = radial_transform(m0, d, rule.nodes, o);
    ASSERT_TRUE(k.all_reliable());
    double rhs = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
      rhs += rule.weights[i] * std::norm(k.profile.values[i]) * std::pow(rule.nodes[i], d - 1);
    rhs *= unit_sphere_area(d);
    EXPECT_NEAR(rhs, std::pow(2 * pi, -d) * lhs_m, 1e-4 * std::pow(2 * pi, -d) * lhs_m) << "d=" << d;
  }
}

TEST(RadialTransform, SampledProfileMatchesCallable) {
  auto m0 = [](double r) { return std::exp(-r * r); };
  RadialProfile prof;
  prof.dim = 3;
  prof.radii = linear_grid(0.0, 8.0, 4001);
  for (double r : prof.radii) prof.values.emplace_back(m0(r));
  const auto xs = linear_grid(0.0, 5.0, 21);
  RadialTransformOptions o;
  o.r_max = 8.0;
  auto a = radial_transform(m0, 3, xs, o);
  auto b = radial_transform(prof, xs, o);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(std::abs(a.profile.values[i] - b.profile.values[i]), 0.0, 1e-7);
}

TEST(RadialTransform, UnreliablePointsAreFlagged) {
  RadialTransformOptions o;
  o.r_max = 100.0;
  o.max_nodes = 20000;
  const std::vector<double> xs = {0.1, 1000.0};
  auto res = radial_transform([](double) { return 1.0; }, 2, xs, o);
  EXPECT_TRUE(res.reliable[0]);
  EXPECT_FALSE(res.reliable[1]);
  EXPECT_TRUE(std::isnan(res.profile.values[1].real()));
  EXPECT_FALSE(res.all_reliable());
}

TEST(RadialProfile, Validation) {
  RadialProfile p{{0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 3};
  EXPECT_THROW(p.validate(), conemult::domain_error);
  RadialProfile q{{0.0, 1.0}, {1.0, 1.0}, 1};
  EXPECT_THROW(q.validate(), conemult::domain_error);
}

TEST(SphereMeasure, TotalMassAndClosedFormD3) {
  const double zero = 0.0;
  EXPECT_NEAR(sphere_measure_transform(1.0, 3, std::span(&zero, 1)).values[0].real(), 4 * pi, 1e-12);
  const auto xs = linear_grid(0.0, 200.0, 20001);
  auto prof = sphere_measure_transform(1.0, 3, xs);
  for (std::size_t i = 1; i < xs.size(); ++i)
    EXPECT_NEAR(prof.values[i].real(), 4 * pi * std::sin(xs[i]) / xs[i], 1e-9);
  for (int d : {2, 3, 4})
    EXPECT_NEAR(sphere_measure_hat(2.0, d, 0.0), std::pow(2.0, d - 1) * unit_sphere_area(d), 1e-11);
}

TEST(SphereMeasure, NonPositiveRadiusIsDomainError) {
  const double x = 1.0;
  EXPECT_THROW(sphere_measure_transform(0.0, 3, std::span(&x, 1)), conemult::domain_error);
  EXPECT_THROW(sphere_measure_transform(-1.0, 3, std::span(&x, 1)), conemult::domain_error);
}

TEST(SphereMeasure, DecayEnvelopeExponent) {
  const auto xs = linear_grid(10.0, 1000.0, 200001);
  for (int d : {2, 3, 4}) {
    auto prof = sphere_measure_transform(1.0, d, xs);
    std::vector<double> mag;
    for (auto v : prof.values) mag.push_back(std::abs(v));
    auto fit = fit_dyadic_envelope(xs, mag, 10.0, 1000.0);
    EXPECT_NEAR(fit.exponent, 0.5 * (d - 1), 0.05) << "d=" << d;
  }
}

TEST(Grids, GeometricAndLinear) {
  auto g = geometric_grid(1.0, 8.0, 4);
  EXPECT_NEAR(g[1], 2.0, 1e-14);
  EXPECT_EQ(g.back(), 8.0);
  auto l = linear_grid(-1.0, 1.0, 5);
  EXPECT_NEAR(l[2], 0.0, 1e-15);
  EXPECT_THROW(geometric_grid(0.0, 1.0, 3), conemult::domain_error);
}
