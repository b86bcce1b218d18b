#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "conemult/grid_field.hpp"
#include "direct_dft.hpp"

using namespace conemult;

TEST(GridSpec, RejectsBadResolution) {
  EXPECT_THROW(GridSpec({Axis{1.0, 12}}), conemult::domain_error);
  EXPECT_THROW(GridSpec({Axis{-1.0, 16}}), conemult::domain_error);
  EXPECT_THROW(GridSpec(std::vector<Axis>(5, Axis{1.0, 2})), conemult::domain_error);
}

TEST(GridSpec, CenteredCoordinates) {
  Axis a{4.0, 8};
  EXPECT_EQ(a.coordinate(4), 0.0);
  EXPECT_EQ(a.frequency(4), 0.0);
  EXPECT_DOUBLE_EQ(a.coordinate(0), -4.0);
  EXPECT_DOUBLE_EQ(a.frequency(5), std::numbers::pi / 4.0);
}

TEST(Dft, MatchesDirectSumsOnSmallGrid) {
  GridSpec spec({Axis{3.0, 8}, Axis{2.0, 4}, Axis{1.5, 8}});
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  GridField f(spec, Representation::space);
  for (auto& v : f.values) v = {g(rng), g(rng)};
  auto F = forward_dft(f);
  EXPECT_LE(oracle::max_abs_diff(F.values, oracle::forward(spec, f.values)), 1e-12);
  auto back = inverse_dft(F);
  EXPECT_LE(oracle::max_abs_diff(back.values, f.values), 1e-12);
  EXPECT_LE(oracle::max_abs_diff(oracle::inverse(spec, F.values), f.values), 1e-12);
}

TEST(Dft, GaussianTransform2d) {
  auto spec = GridSpec::cube(2, 12.0, 128);
  auto f = GridField::sample(spec, Representation::space, [](std::span<const double> x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2);
  });
  auto F = forward_dft(f);
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto w = spec.frequencies(i);
    EXPECT_NEAR(std::abs(F.values[i] - 2 * std::numbers::pi * std::exp(-(w[0] * w[0] + w[1] * w[1]) / 2)), 0.0,
                1e-12);
  }
}

TEST(Dft, ParsevalOnGrid) {
  auto spec = GridSpec::cube(2, 5.0, 32);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  GridField f(spec, Representation::space);
  for (auto& v : f.values) v = {g(rng), g(rng)};
  EXPECT_NEAR(l2_norm(forward_dft(f)), l2_norm(f), 1e-12 * l2_norm(f));
}

TEST(FieldIo, BinaryRoundTrip) {
  GridSpec spec({Axis{2.0, 4}, Axis{1.0, 8}});
  GridField f(spec, Representation::frequency);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = {0.25 * i, -0.5 * i};
  std::stringstream ss;
  write_field(ss, f);
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.substr(0, 4), "CMGF");
  EXPECT_EQ(bytes.size(), 4u + 4 + 4 + 1 + 2 * 16 + f.size() * 8);
  auto g = read_field(ss);
  EXPECT_EQ(g.spec, f.spec);
  EXPECT_EQ(g.representation, Representation::frequency);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(g.values[i], f.values[i]);  // exactly representable
}

TEST(FieldIo, LittleEndianHeader) {
  GridField f(GridSpec({Axis{1.0, 2}}), Representation::space);
  std::stringstream ss;
  write_field(ss, f);
  const std::string b = ss.str();
  EXPECT_EQ(static_cast<unsigned char>(b[4]), 1u);  // version, low byte first
  EXPECT_EQ(static_cast<unsigned char>(b[8]), 1u);  // one axis
  EXPECT_EQ(static_cast<unsigned char>(b[12]), 0u);  // space tag
}

TEST(FieldIo, RejectsGarbage) {
  std::stringstream bad("XXXXsomething");
  EXPECT_THROW(read_field(bad), conemult::domain_error);
  GridField f(GridSpec({Axis{1.0, 4}}), Representation::space);
  std::stringstream ss;
  write_field(ss, f);
  std::string cut = ss.str().substr(0, ss.str().size() - 3);
  std::stringstream truncated(cut);
  EXPECT_THROW(read_field(truncated), conemult::domain_error);
}

TEST(FieldIo, CsvExport) {
  GridField f(GridSpec({Axis{1.0, 2}, Axis{1.0, 2}}), Representation::space);
  f.values[3] = {1.5, -2.0};
  std::stringstream ss;
  write_field_csv(ss, f);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "x0,x1,re,im");
  std::string line;
  for (int i = 0; i < 4; ++i) std::getline(ss, line);
  EXPECT_EQ(line, "0,0,1.5,-2");
}

TEST(BoundaryMass, DetectsWrapRisk) {
  auto spec = GridSpec::cube(2, 8.0, 64);
  auto tight = GridField::sample(spec, Representation::space,
                                 [](std::span<const double> x) { return std::exp(-2 * (x[0] * x[0] + x[1] * x[1])); });
  EXPECT_LT(boundary_mass_fraction(tight), default_wrap_threshold);
  auto wide = GridField::sample(spec, Representation::space,
                                [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) / 20); });
  EXPECT_GT(boundary_mass_fraction(wide), default_wrap_threshold);
}
