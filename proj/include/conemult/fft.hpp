#pragma once

// Thin FFTW wrapper. Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED so
// the chosen codelets, and therefore the rounding, do not depend on buffer
// alignment: identical inputs give bit-identical outputs across runs.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "conemult/errors.hpp"

namespace conemult {

enum class FftDirection : int { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }
}  // namespace detail

/// Unnormalized in-place DFT over a row-major array with the given extents:
/// X_k = sum_j x_j exp(-+2 pi i <j,k>/N) (sign per direction).
inline void fft_inplace(std::span<std::complex<double>> data, std::span<const std::size_t> dims,
                        FftDirection direction) {
  std::size_t total = 1;
  std::vector<int> n(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    detail::require(dims[i] >= 1, "fft_inplace: empty axis");
    n[i] = static_cast<int>(dims[i]);
    total *= dims[i];
  }
  detail::require(total == data.size(), "fft_inplace: data size does not match dimensions");
  if (total <= 1) return;
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(n.size()), n.data(), ptr, ptr, static_cast<int>(direction),
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  detail::require(plan != nullptr, "fft_inplace: FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard lock(detail::fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

/// Centered DFT: index j <-> (j - N/2) on every axis, both in the input and
/// the output. Implemented as sign flips around a standard FFT; N must be even
/// on every axis.
inline void centered_fft_inplace(std::span<std::complex<double>> data,
                                 std::span<const std::size_t> dims, FftDirection direction) {
  const std::size_t rank = dims.size();
  std::vector<std::size_t> strides(rank, 1);
  for (std::size_t a = rank; a-- > 1;) strides[a - 1] = strides[a] * dims[a];
  double global = 1.0;
  for (std::size_t a = 0; a < rank; ++a) {
    detail::require(dims[a] % 2 == 0 || dims[a] == 1, "centered_fft_inplace: axis length must be even");
    // exp(-+ i pi N/2) = (-1)^{N/2}
    if (dims[a] > 1 && (dims[a] / 2) % 2 == 1) global = -global;
  }
  auto flip = [&] {
    for (std::size_t idx = 0; idx < data.size(); ++idx) {
      std::size_t parity = 0;
      for (std::size_t a = 0; a < rank; ++a) parity += (idx / strides[a]) % dims[a];
      if (parity % 2 == 1) data[idx] = -data[idx];
    }
  };
  flip();
  fft_inplace(data, dims, direction);
  flip();
  if (global < 0.0)
    for (auto& v : data) v = -v;
}

}  // namespace conemult
