#pragma once
#include <algorithm>
#include <cmath>
#include <vector>

#include "../core/errors.hpp"
#include "../core/fft.hpp"
#include "../core/util.hpp"

namespace sk {

struct Box1D {
  double xmin = 0, xmax = 0;
  double length() const { return xmax - xmin; }
  double half_width() const { return 0.5 * (xmax - xmin); }
};

// Complex samples on a uniform periodic grid; the box must stay large enough
// that no reported state carries boundary mass beyond the leak tolerance.
struct Wavepacket {
  std::vector<complexd> samples;
  double dx = 0;
  Box1D box;
  double norm = 0;

  size_t size() const { return samples.size(); }
  double x(size_t i) const { return box.xmin + static_cast<double>(i) * dx; }

  void recompute_norm() {
    double s = 0;
    for (const complexd& v : samples) s += std::norm(v);
    norm = std::sqrt(s * dx);
  }
};

inline double l2_distance(const Wavepacket& a, const Wavepacket& b) {
  if (a.size() != b.size() || a.dx != b.dx)
    throw invalid_argument_error("l2_distance: mismatched grids");
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += std::norm(a.samples[i] - b.samples[i]);
  return std::sqrt(s * a.dx);
}

// Mass fraction in the outer 5% of the box on each side.
inline double boundary_mass_fraction(const Wavepacket& f) {
  const size_t n = f.size(), edge = std::max<size_t>(1, n / 20);
  double outer = 0, total = 0;
  for (size_t i = 0; i < n; ++i) {
    const double m = std::norm(f.samples[i]);
    total += m;
    if (i < edge || i >= n - edge) outer += m;
  }
  return total > 0 ? outer / total : 0.0;
}

inline double mass_fraction_within(const Wavepacket& f, double x_lo, double x_hi) {
  double inner = 0, total = 0;
  for (size_t i = 0; i < f.size(); ++i) {
    const double m = std::norm(f.samples[i]);
    total += m;
    const double x = f.x(i);
    if (x >= x_lo && x <= x_hi) inner += m;
  }
  return total > 0 ? inner / total : 0.0;
}

// Frequency of sample j for an n-point grid with spacing dx, wrapped to the
// symmetric band.
inline double fourier_xi(size_t j, size_t n, double dx) {
  const auto jj = static_cast<long long>(j);
  const auto nn = static_cast<long long>(n);
  const long long k = jj < (nn + 1) / 2 ? jj : jj - nn;
  return 2.0 * pi * static_cast<double>(k) / (static_cast<double>(n) * dx);
}

// Continuum-normalized transform samples: fhat(xi_j) with
// fhat(xi) = (2 pi)^{-1/2} int e^{-i xi x} f(x) dx.
inline std::vector<complexd> fourier_samples(const Wavepacket& f) {
  std::vector<complexd> fh = fft(f.samples);
  const double c = f.dx / std::sqrt(2.0 * pi);
  for (size_t j = 0; j < fh.size(); ++j) {
    const double xi = fourier_xi(j, fh.size(), f.dx);
    fh[j] *= c * std::exp(complexd(0, -xi * f.box.xmin));
  }
  return fh;
}

// Smallest a with at least the requested |fhat|^2 mass fraction in |xi| <= a.
inline double xi_quantile(const Wavepacket& f, double fraction) {
  if (!(fraction > 0) || !(fraction < 1))
    throw invalid_argument_error("xi_quantile: fraction in (0,1) required");
  const auto fh = fft(f.samples);
  const size_t n = fh.size();
  std::vector<std::pair<double, double>> m(n);
  double total = 0;
  for (size_t j = 0; j < n; ++j) {
    m[j] = {std::abs(fourier_xi(j, n, f.dx)), std::norm(fh[j])};
    total += m[j].second;
  }
  std::sort(m.begin(), m.end());
  double acc = 0;
  for (const auto& [xi, w] : m) {
    acc += w;
    if (acc >= fraction * total) return xi;
  }
  return m.back().first;
}

inline double xi_mass_below(const Wavepacket& f, double a) {
  const auto fh = fft(f.samples);
  double inner = 0, total = 0;
  for (size_t j = 0; j < fh.size(); ++j) {
    const double w = std::norm(fh[j]);
    total += w;
    if (std::abs(fourier_xi(j, fh.size(), f.dx)) < a) inner += w;
  }
  return total > 0 ? inner / total : 0.0;
}

inline Wavepacket make_gaussian_packet(size_t n, Box1D box, double x0, double xi0,
                                       double width) {
  if (!(width > 0)) throw invalid_argument_error("make_gaussian_packet: width > 0");
  if (!(box.xmax > box.xmin))
    throw invalid_argument_error("make_gaussian_packet: empty box");
  Wavepacket f;
  f.box = box;
  f.dx = box.length() / static_cast<double>(n);
  f.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double d = f.x(i) - x0;
    f.samples[i] = std::exp(complexd(-d * d / (4.0 * width * width), xi0 * d));
  }
  f.recompute_norm();
  for (complexd& v : f.samples) v /= f.norm;
  f.norm = 1.0;
  return f;
}

// C^3 high-pass in Fourier space: removes |xi| < a exactly, transitions over
// [a, a + ramp], then renormalizes.
inline Wavepacket bandlimit_below(const Wavepacket& f, double a, double ramp) {
  if (!(a > 0) || !(ramp > 0))
    throw invalid_argument_error("bandlimit_below: positive band required");
  auto fh = fft(f.samples);
  for (size_t j = 0; j < fh.size(); ++j) {
    const double xi = std::abs(fourier_xi(j, fh.size(), f.dx));
    if (xi <= a) {
      fh[j] = 0;
    } else if (xi < a + ramp) {
      const double s = (xi - a) / ramp, s2 = s * s;
      fh[j] *= s2 * s2 * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)));
    }
  }
  Wavepacket out = f;
  out.samples = ifft(fh);
  out.recompute_norm();
  if (out.norm == 0) throw invalid_argument_error("bandlimit_below: nothing left");
  for (complexd& v : out.samples) v /= out.norm;
  out.norm = 1.0;
  return out;
}

}  // namespace sk
