#pragma once

// Complex fields on uniform periodic box grids of 1 to 4 axes.
//
// An axis with half-extent L and n points carries the space samples
// x_j = -L + j h, h = 2L/n, and the dual frequencies xi_m = (m - n/2) pi/L.
// Both index sets are centered, so the origin sits at index n/2.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "conemult/errors.hpp"
#include "conemult/fft.hpp"

namespace conemult {

using complex = std::complex<double>;

struct Axis {
  double extent = 1.0;  // half-length L of the periodic box [-L, L)
  std::size_t n = 2;

  [[nodiscard]] double spacing() const { return 2.0 * extent / static_cast<double>(n); }
  [[nodiscard]] double frequency_spacing() const { return std::numbers::pi / extent; }
  [[nodiscard]] double coordinate(std::size_t j) const { return -extent + spacing() * static_cast<double>(j); }
  [[nodiscard]] double frequency(std::size_t m) const {
    return (static_cast<double>(m) - static_cast<double>(n / 2)) * frequency_spacing();
  }
  bool operator==(const Axis&) const = default;
};

inline constexpr std::size_t max_axes = 4;

struct GridSpec {
  std::vector<Axis> axes;

  GridSpec() = default;
  explicit GridSpec(std::vector<Axis> a) : axes(std::move(a)) { validate(); }

  /// Cube grid with the same axis repeated `rank` times.
  static GridSpec cube(std::size_t rank, double extent, std::size_t n) {
    return GridSpec(std::vector<Axis>(rank, Axis{extent, n}));
  }

  void validate() const {
    detail::require(!axes.empty() && axes.size() <= max_axes, "GridSpec: need 1 to 4 axes");
    for (const auto& a : axes) {
      detail::require(a.extent > 0.0 && std::isfinite(a.extent), "GridSpec: extents must be positive");
      detail::require(a.n >= 2 && detail::is_power_of_two(a.n),
                      "GridSpec: per-axis resolution must be a power of two >= 2, got " + std::to_string(a.n));
    }
  }

  [[nodiscard]] std::size_t rank() const { return axes.size(); }
  [[nodiscard]] std::size_t size() const {
    std::size_t s = 1;
    for (const auto& a : axes) s *= a.n;
    return s;
  }
  [[nodiscard]] std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d;
    for (const auto& a : axes) d.push_back(a.n);
    return d;
  }
  [[nodiscard]] double cell_volume() const {
    double v = 1.0;
    for (const auto& a : axes) v *= a.spacing();
    return v;
  }
  [[nodiscard]] double frequency_cell_volume() const {
    double v = 1.0;
    for (const auto& a : axes) v *= a.frequency_spacing();
    return v;
  }

  /// Row-major multi-index of a flat index.
  [[nodiscard]] std::array<std::size_t, max_axes> unflatten(std::size_t flat) const {
    std::array<std::size_t, max_axes> idx{};
    for (std::size_t a = rank(); a-- > 0;) {
      idx[a] = flat % axes[a].n;
      flat /= axes[a].n;
    }
    return idx;
  }

  [[nodiscard]] std::array<double, max_axes> coordinates(std::size_t flat) const {
    auto idx = unflatten(flat);
    std::array<double, max_axes> x{};
    for (std::size_t a = 0; a < rank(); ++a) x[a] = axes[a].coordinate(idx[a]);
    return x;
  }

  [[nodiscard]] std::array<double, max_axes> frequencies(std::size_t flat) const {
    auto idx = unflatten(flat);
    std::array<double, max_axes> x{};
    for (std::size_t a = 0; a < rank(); ++a) x[a] = axes[a].frequency(idx[a]);
    return x;
  }

  bool operator==(const GridSpec&) const = default;
};

enum class Representation : std::uint8_t { space = 0, frequency = 1 };

struct GridField {
  GridSpec spec;
  Representation representation = Representation::space;
  std::vector<std::complex<double>> values;

  GridField() = default;
  GridField(GridSpec s, Representation r) : spec(std::move(s)), representation(r), values(spec.size()) {
    spec.validate();
  }

  /// Samples f at the space (or frequency) points of the grid.
  template <class F>
  static GridField sample(const GridSpec& spec, Representation r, F&& f) {
    GridField out(spec, r);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      const auto x = r == Representation::space ? spec.coordinates(i) : spec.frequencies(i);
      out.values[i] = std::complex<double>(f(std::span<const double>(x.data(), spec.rank())));
    }
    return out;
  }

  void validate() const {
    spec.validate();
    detail::require(values.size() == spec.size(), "GridField: value count does not match the grid");
  }

  [[nodiscard]] std::size_t size() const { return values.size(); }
};

/// Riemann-sum Fourier transform: F(xi) ~ h^d sum_x f(x) e^{-i<x,xi>}.
inline GridField forward_dft(const GridField& f) {
  f.validate();
  detail::require(f.representation == Representation::space, "forward_dft: input must be in space representation");
  GridField out = f;
  out.representation = Representation::frequency;
  const auto dims = f.spec.dims();
  centered_fft_inplace(out.values, dims, FftDirection::forward);
  const double scale = f.spec.cell_volume();
  for (auto& v : out.values) v *= scale;
  return out;
}

/// Inverse of forward_dft: f(x) ~ (2 pi)^{-d} dxi^d sum_xi F(xi) e^{i<x,xi>}.
inline GridField inverse_dft(const GridField& F) {
  F.validate();
  detail::require(F.representation == Representation::frequency,
                  "inverse_dft: input must be in frequency representation");
  GridField out = F;
  out.representation = Representation::space;
  const auto dims = F.spec.dims();
  centered_fft_inplace(out.values, dims, FftDirection::backward);
  const double scale = F.spec.frequency_cell_volume() / std::pow(2.0 * std::numbers::pi, F.spec.rank());
  for (auto& v : out.values) v *= scale;
  return out;
}

inline double l2_norm(const GridField& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += std::norm(v);
  const double vol = f.representation == Representation::space
                         ? f.spec.cell_volume()
                         : f.spec.frequency_cell_volume() / std::pow(2.0 * std::numbers::pi, f.spec.rank());
  return std::sqrt(s * vol);
}

/// Share of the L^1 mass on cells with some |x_a| >= L_a/2. Used to warn
/// about periodic wrap-around.
inline double boundary_mass_fraction(const GridField& f) {
  detail::require(f.representation == Representation::space, "boundary_mass_fraction: need space representation");
  double total = 0.0, outer = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double m = std::abs(f.values[i]);
    total += m;
    const auto x = f.spec.coordinates(i);
    for (std::size_t a = 0; a < f.spec.rank(); ++a)
      if (std::abs(x[a]) >= 0.5 * f.spec.axes[a].extent) {
        outer += m;
        break;
      }
  }
  return total > 0.0 ? outer / total : 0.0;
}

inline constexpr double default_wrap_threshold = 1e-6;

// ---------------------------------------------------------------------------
// Serialization
//
// Binary layout (little-endian):
//   char[4] "CMGF" | u32 version (1) | u32 naxes | u8 representation
//   naxes x { f64 extent | u64 n }
//   n_total x { f32 re | f32 im }

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  char buf[sizeof(T)];
  is.read(buf, sizeof(T));
  require(static_cast<bool>(is), "read_field: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace detail

inline constexpr std::uint32_t field_format_version = 1;

inline void write_field(std::ostream& os, const GridField& f) {
  f.validate();
  os.write("CMGF", 4);
  detail::put_le<std::uint32_t>(os, field_format_version);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.spec.rank()));
  detail::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(f.representation));
  for (const auto& a : f.spec.axes) {
    detail::put_le<double>(os, a.extent);
    detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(a.n));
  }
  for (const auto& v : f.values) {
    detail::put_le<float>(os, static_cast<float>(v.real()));
    detail::put_le<float>(os, static_cast<float>(v.imag()));
  }
}

inline GridField read_field(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  detail::require(static_cast<bool>(is) && std::memcmp(magic, "CMGF", 4) == 0, "read_field: bad magic");
  const auto version = detail::get_le<std::uint32_t>(is);
  detail::require(version == field_format_version, "read_field: unsupported version " + std::to_string(version));
  const auto rank = detail::get_le<std::uint32_t>(is);
  detail::require(rank >= 1 && rank <= max_axes, "read_field: bad axis count");
  const auto rep = detail::get_le<std::uint8_t>(is);
  detail::require(rep <= 1, "read_field: bad representation tag");
  std::vector<Axis> axes(rank);
  for (auto& a : axes) {
    a.extent = detail::get_le<double>(is);
    a.n = static_cast<std::size_t>(detail::get_le<std::uint64_t>(is));
  }
  GridField f(GridSpec(std::move(axes)), static_cast<Representation>(rep));
  for (auto& v : f.values) {
    const float re = detail::get_le<float>(is);
    const float im = detail::get_le<float>(is);
    v = {re, im};
  }
  return f;
}

inline void write_field_csv(std::ostream& os, const GridField& f) {
  f.validate();
  const bool space = f.representation == Representation::space;
  for (std::size_t a = 0; a < f.spec.rank(); ++a) os << (space ? "x" : "xi") << a << ',';
  os << "re,im\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = space ? f.spec.coordinates(i) : f.spec.frequencies(i);
    for (std::size_t a = 0; a < f.spec.rank(); ++a) os << x[a] << ',';
    os << f.values[i].real() << ',' << f.values[i].imag() << '\n';
  }
}

}  // namespace conemult
