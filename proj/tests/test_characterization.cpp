#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "conemult/characterization.hpp"

using namespace conemult;

namespace {

constexpr double pi = std::numbers::pi;

double gaussian(double u, double sigma) { return std::exp(-u * u / (2 * sigma * sigma)); }

// smooth bump on (c - w, c + w), value 1 at c
double bump(double u, double c, double w) {
  const double t = (u - c) / w;
  return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
}

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

}  // namespace

TEST(DivergentTrend, NeedsGrowthAtEveryStep) {
  std::vector<double> grow{1.0, 1.2, 1.45, 1.8};
  std::vector<double> stall{1.0, 1.2, 1.25, 1.8};
  EXPECT_TRUE(divergent_trend(grow));
  EXPECT_FALSE(divergent_trend(stall));
  EXPECT_THROW(divergent_trend(std::vector<double>{1.0}), conemult::domain_error);
}

TEST(ConditionIv, ZeroProfileGivesZero) {
  auto r = condition_iv_quantity([](double) { return 0.0; }, 0.25, 3, LorentzParams::weak(1.5));
  for (double v : r.ladder.values) EXPECT_EQ(v, 0.0);
  EXPECT_FALSE(r.ladder.divergent);
}

TEST(ConditionIv, PlancherelAtPEqualsTwo) {
  // p = nu = 2: the two weights cancel and (iv) = ||gamma^||_2 = sqrt(2 pi) ||gamma||_2
  const double sigma = 0.05;
  auto r = condition_iv_quantity([&](double u) { return gaussian(u, sigma); }, 0.5, 4, LorentzParams::strong(2.0));
  const double expected = std::sqrt(2 * pi * sigma * std::sqrt(pi));
  EXPECT_NEAR(r.value(), expected, 1e-8 * expected);
}

TEST(ConditionIv, MatchesQuadratureForGaussian) {
  const double sigma = 0.05, p = 1.5;
  const int d = 3;
  ConditionIvOptions o;
  o.R = 400.0;
  auto r = condition_iv_quantity([&](double u) { return gaussian(u, sigma); }, 0.5, d, LorentzParams::strong(p), o);
  // |gamma^(s)| = sigma sqrt(2 pi) exp(-sigma^2 s^2 / 2), integrated against (1+|s|)^{d-1}
  auto integrand = [&](double s) {
    const double g = sigma * std::sqrt(2 * pi) * std::exp(-sigma * sigma * s * s / 2) /
                     std::pow(1.0 + s, 0.5 * (d - 1));
    return std::pow(g, p) * std::pow(1.0 + s, d - 1);
  };
  const double expected = std::pow(2.0 * simpson(integrand, 0.0, o.R, 200000), 1.0 / p);
  EXPECT_NEAR(r.value(), expected, 1e-4 * expected);
}

TEST(ConditionIv, SmoothProfileStableUnderDoubling) {
  auto g = [](double u) { return gaussian(u, 0.04); };
  // same frequency spacing at both truncations
  ConditionIvOptions a, b;
  a.L = b.L = 2.0;
  b.R = 2 * a.R;
  b.N = 2 * a.N;
  const auto p = LorentzParams::weak(8.0 / 7.0);
  const double va = condition_iv_quantity(g, 0.5, 4, p, a).value();
  const double vb = condition_iv_quantity(g, 0.5, 4, p, b).value();
  EXPECT_NEAR(vb / va, 1.0, 0.01);
}

TEST(ConditionIv, TranslationInvariant) {
  auto g0 = [](double u) { return gaussian(u, 0.04); };
  auto g1 = [](double u) { return gaussian(u - 0.1137, 0.04); };
  const auto p = LorentzParams{1.3, 2.0};
  const double v0 = condition_iv_quantity(g0, 0.5, 3, p).value();
  const double v1 = condition_iv_quantity(g1, 0.6, 3, p).value();
  EXPECT_NEAR(v1, v0, 1e-9 * v0);
}

TEST(ConditionIv, MonotoneInTruncationForStrongType) {
  auto g = [](double u) { return u < 0.0 ? std::pow(-u, 0.4) * cutoff::br_b(u) : 0.0; };
  auto r = condition_iv_quantity(g, 0.25, 2, LorentzParams::strong(1.6));
  for (std::size_t j = 1; j < r.ladder.values.size(); ++j) EXPECT_GE(r.ladder.values[j], r.ladder.values[j - 1]);
}

TEST(ConditionIv, RejectsUnderresolvedTruncation) {
  ConditionIvOptions o;
  o.L = 4.0;
  o.N = 1024;  // Nyquist 128 pi / 4 ~ 402 < R
  EXPECT_THROW(condition_iv_quantity([](double u) { return gaussian(u, 0.1); }, 0.5, 3, LorentzParams::weak(1.5), o),
               conemult::domain_error);
  o.L = 0.1;
  EXPECT_THROW(condition_iv_quantity([](double u) { return gaussian(u, 0.1); }, 0.5, 3, LorentzParams::weak(1.5), o),
               conemult::domain_error);
}

namespace {
double br(double u, double lambda) { return u < 0.0 ? std::pow(-u, lambda) * cutoff::br_b(u) : 0.0; }
}  // namespace

TEST(ConditionIv, BochnerRieszProfileAboveAndBelowEndpoint) {
  // d = 4: lambda_c(p) = 4/p - 5/2, so lambda_c(8/7) = 1 and lambda_c(5/4) = 0.7
  const int d = 4;
  auto at_endpoint = condition_iv_quantity([](double u) { return br(u, 1.0); }, 0.25, d, LorentzParams::weak(8.0 / 7.0));
  EXPECT_FALSE(at_endpoint.ladder.divergent);
  EXPECT_TRUE(std::isfinite(at_endpoint.value()));
  auto above = condition_iv_quantity([](double u) { return br(u, 1.0); }, 0.25, d, LorentzParams::weak(1.25));
  EXPECT_FALSE(above.ladder.divergent);
  auto below = condition_iv_quantity([](double u) { return br(u, 0.3); }, 0.25, d, LorentzParams::weak(1.25));
  EXPECT_TRUE(below.ladder.divergent) << below.ladder.values[0] << " " << below.ladder.values.back();
}

TEST(ConditionV, ZeroProfileGivesZero) {
  auto r = condition_v_quantity([](double) { return 0.0; }, 0.5, 3, LorentzParams::weak(1.5));
  EXPECT_EQ(r.value(), 0.0);
}

TEST(ConditionV, PlancherelAtPEqualsTwo) {
  // ||F^{-1}[gamma(|.|)]||_2 = (2 pi)^{-d/2} (|S^{d-1}| int gamma(r)^2 r^{d-1} dr)^{1/2}
  for (int d : {2, 3, 4}) {
    auto g = [](double u) { return bump(u, 0.5, 0.25); };
    ConditionVOptions o;
    auto r = condition_v_quantity(g, 0.75, d, LorentzParams::strong(2.0), o);
    EXPECT_TRUE(r.all_reliable);
    const double area = 2 * std::pow(pi, d / 2.0) / std::tgamma(d / 2.0);
    const double mass = simpson([&](double t) { return g(t) * g(t) * std::pow(t, d - 1); }, 0.25, 0.75, 4000);
    const double expected = std::pow(2 * pi, -d / 2.0) * std::sqrt(area * mass);
    EXPECT_NEAR(r.value(), expected, 1e-4 * expected) << "d = " << d;
  }
}

TEST(ConditionV, ShiftedKernelMatchesPlancherel) {
  const int d = 3;
  auto g = [](double u) { return bump(u, 0.0, 0.25); };
  ConditionVOptions o;
  o.shift = 1.0;
  auto r = condition_v_quantity(g, 0.25, d, LorentzParams::strong(2.0), o);
  const double mass = simpson([&](double t) { return g(t - 1.0) * g(t - 1.0) * t * t; }, 0.75, 1.25, 4000);
  const double expected = std::pow(2 * pi, -1.5) * std::sqrt(4 * pi * mass);
  EXPECT_NEAR(r.value(), expected, 1e-4 * expected);
}

TEST(Families, SupIsTakenOverK) {
  GammaFamily fam;
  fam.k_min = 0;
  fam.k_max = 2;
  fam.support_radius = 0.5;
  for (int k = 0; k <= 2; ++k) {
    const double amp = k == 1 ? 2.0 : 1.0;
    fam.profiles.emplace(k, GammaProfile::closed_form([=](double u) { return amp * bump(u, 0.0, 0.3); }, 0.5, "g"));
  }
  auto q = condition_iv_family(fam, 3, LorentzParams::weak(1.5));
  ASSERT_EQ(q.entries.size(), 3u);
  EXPECT_EQ(q.argsup, 1);
  EXPECT_NEAR(q.sup, 2.0 * q.entries[0].ladder.value(), 1e-12 * q.sup);
}

TEST(M0, ConstantMultiplierIsTIndependent) {
  std::vector<double> t{0.3, 1.0, 7.0};
  auto rep = m0_characterization([](double) { return 1.0; }, 3, LorentzParams::weak(1.5), t);
  for (const auto& e : rep.entries) EXPECT_DOUBLE_EQ(e.ladder.value(), rep.entries[0].ladder.value());
  EXPECT_FALSE(rep.divergent());
}

TEST(M0, CompactlySupportedMultiplierVanishesForLargeT) {
  // m0(t r) = 0 on supp phi = (1/2, 2) once t >= 2
  auto m0 = [](double r) { return r < 1.0 ? 1.0 - r * r : 0.0; };
  std::vector<double> t{2.0, 3.0, 0.9};
  auto rep = m0_characterization(m0, 3, LorentzParams::weak(1.5), t);
  EXPECT_EQ(rep.entries[0].ladder.value(), 0.0);
  EXPECT_EQ(rep.entries[1].ladder.value(), 0.0);
  EXPECT_GT(rep.entries[2].ladder.value(), 0.0);
  EXPECT_EQ(rep.argsup, 0.9);
}

TEST(M0, AgreesWithConditionIvOfWindowedProfile) {
  auto m0 = [](double r) { return r < 1.0 ? std::sqrt(1.0 - r * r) : 0.0; };
  const auto p = LorentzParams{1.4, 3.0};
  M0Options o;
  std::vector<double> t{1.0};
  auto rep = m0_characterization(m0, 3, p, t, o);
  ConditionIvOptions io;
  io.R = o.R;
  io.N = o.N;
  io.L = o.L;
  auto direct = condition_iv_quantity([&](double r) { return r > 0.0 ? cutoff::phi(r) * m0(r) : 0.0; }, 2.0, 3, p, io);
  EXPECT_NEAR(rep.sup, direct.value(), 1e-12 * direct.value());
}

TEST(M0, IndicatorDivergesBelowCriticalP) {
  // jump at r = 1: |kappa(s)| ~ 1/s, finite iff p > 2d/(d+1) = 3/2 for d = 3
  auto m0 = [](double r) { return r < 1.0 ? 1.0 : 0.0; };
  std::vector<double> t{1.0};
  EXPECT_TRUE(m0_characterization(m0, 3, LorentzParams::strong(1.2), t).divergent());
  EXPECT_FALSE(m0_characterization(m0, 3, LorentzParams::strong(1.8), t).divergent());
}

TEST(M0, DilationInvariance) {
  // a bump at r = 1 keeps the sup over t away from the ends of the grid
  auto m0 = [](double r) { return bump(r, 1.0, 0.3); };
  const auto p = LorentzParams::weak(1.5);
  auto coarse = default_t_grid(8, -4, 4);
  EXPECT_EQ(dilation_invariance_check(m0, 3, p, 1.0, coarse).ratio, 1.0);
  EXPECT_NEAR(dilation_invariance_check(m0, 3, p, 2.0, coarse).ratio, 1.0, 1e-9);
  auto dense = default_t_grid(64, -3, 3);
  EXPECT_NEAR(dilation_invariance_check(m0, 3, p, 3.0, dense).ratio, 1.0, 0.02);
}

TEST(M0, RejectsBadGrid) {
  std::vector<double> bad{1.0, -0.5};
  EXPECT_THROW(m0_characterization([](double) { return 1.0; }, 3, LorentzParams::weak(1.5), bad),
               conemult::domain_error);
}

// p = nu = 2: the (iv) weight cancels, so (iv)^2 = int_{|s|<=R} |gamma^|^2 ds, and
// (v)^2 = (2 pi)^{-d} |S^{d-1}| int gamma(r - c)^2 r^{d-1} dr up to the |x| > R tail.
TEST(CompareIvV, TentAgainstPlancherelClosedForm) {
  const double w = 0.2, R = 64.0;
  auto tent = GammaProfile::tent(w);
  std::vector<GammaProfile> one{tent};
  auto simpson = [](auto&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
  };
  auto hat2 = [w](double s) {
    const double z = 0.5 * w * s;
    const double sinc = z == 0.0 ? 1.0 : std::sin(z) / z;
    return std::pow(w * sinc * sinc, 2);
  };
  const double iv = std::sqrt(2.0 * simpson(hat2, 0.0, R, 200000));
  for (int d : {2, 3, 4}) {
    const double radial = simpson([&](double u) { return std::pow(tent(u), 2) * std::pow(1.0 + u, d - 1); }, -w, 0.0,
                                  20000) +
                          simpson([&](double u) { return std::pow(tent(u), 2) * std::pow(1.0 + u, d - 1); }, 0.0, w,
                                  20000);
    const double v = std::sqrt(std::pow(2 * pi, -d) * unit_sphere_area(d) * radial);
    auto band = compare_iv_v(one, d, LorentzParams::strong(2.0));
    ASSERT_EQ(band.entries.size(), 1u);
    EXPECT_NEAR(band.entries[0].iv, iv, 1e-3 * iv) << "d=" << d;
    EXPECT_NEAR(band.entries[0].v, v, 1e-3 * v) << "d=" << d;
    EXPECT_NEAR(band.c, std::max(iv / v, v / iv), 2e-3 * band.c);
  }
}

TEST(CompareIvV, FamilyShapeAndBand) {
  const auto fam = comparison_family();
  ASSERT_EQ(fam.size(), 10u);
  for (const auto& g : fam) EXPECT_NO_THROW(g.check_support(0.25)) << g.name();
  auto band = compare_iv_v(fam, 2, LorentzParams::strong(1.5));
  ASSERT_EQ(band.entries.size(), 10u);
  for (const auto& e : band.entries) {
    EXPECT_GT(e.iv, 0.0) << e.name;
    EXPECT_GT(e.v, 0.0) << e.name;
    EXPECT_GE(e.ratio, band.lo);
    EXPECT_LE(e.ratio, band.hi);
  }
  EXPECT_DOUBLE_EQ(band.c, std::max(band.hi, 1.0 / band.lo));
  const auto j = nlohmann::json(band);
  EXPECT_EQ(j["per_profile"].size(), 10u);
  std::vector<GammaProfile> none;
  EXPECT_THROW(compare_iv_v(none, 2, LorentzParams::strong(1.5)), conemult::domain_error);
}
