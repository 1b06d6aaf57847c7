#pragma once

#include <cstddef>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "hfsc/errors.hpp"
#include "hfsc/model.hpp"

namespace hfsc {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

/// Twiddle factors e^{-2 pi i j / n}, j < n/2, computed directly per index
/// (repeated multiplication drifts enough to show up in long mass-
/// conservation runs).  Cached per length and per thread.
inline const std::vector<Complex>& twiddle_table(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<Complex>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Complex> tw(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double ang =
        -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    tw[j] = Complex(std::cos(ang), std::sin(ang));
  }
  return cache.emplace(n, std::move(tw)).first->second;
}

}  // namespace detail

/// In-place iterative radix-2 transform.  Forward is unscaled; inverse
/// divides by n.
inline void fft_pow2(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n)) {
    throw Error(Errc::invalid_parameter, "FFT length must be a power of two");
  }
  if (n == 1) return;
  const std::vector<Complex>& tw = detail::twiddle_table(n);

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Complex w = inverse ? std::conj(tw[j * stride]) : tw[j * stride];
        const Complex even = a[i + j];
        const Complex odd = a[i + j + len / 2] * w;
        a[i + j] = even + odd;
        a[i + j + len / 2] = even - odd;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (Complex& v : a) v *= inv;
  }
}

/// Symmetric integer mode index of slot m in an n-point transform:
/// 0, 1, ..., n/2-1, -n/2, ..., -1.
inline double fft_mode_index(std::size_t m, std::size_t n) {
  return (m < n / 2) ? static_cast<double>(m)
                     : static_cast<double>(m) - static_cast<double>(n);
}

}  // namespace hfsc
