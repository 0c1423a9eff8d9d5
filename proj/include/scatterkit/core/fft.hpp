#pragma once
#include <vector>

#include "errors.hpp"
#include "util.hpp"

namespace sk {

inline bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place radix-2 Cooley-Tukey. forward: X_k = sum_j x_j e^{-2pi i jk/n};
// inverse applies e^{+...} and divides by n.
inline void fft_inplace(std::vector<complexd>& a, bool inverse) {
  const size_t n = a.size();
  if (!is_pow2(n)) throw invalid_argument_error("fft: length must be a power of two");
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * pi / static_cast<double>(len);
    const complexd wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      complexd w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const complexd u = a[i + k];
        const complexd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& z : a) z /= static_cast<double>(n);
}

inline std::vector<complexd> fft(std::vector<complexd> a) {
  fft_inplace(a, false);
  return a;
}

inline std::vector<complexd> ifft(std::vector<complexd> a) {
  fft_inplace(a, true);
  return a;
}

}  // namespace sk
