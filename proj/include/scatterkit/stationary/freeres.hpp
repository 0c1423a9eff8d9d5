#pragma once
#include <cmath>
#include <complex>
#include <vector>

#include "../core/errors.hpp"
#include "../core/grid.hpp"
#include "../core/util.hpp"

namespace sk {

// Which boundary value of the resolvent to take at a real energy.
enum class BoundarySide { above, below, off_axis };

// sqrt branch with Im > 0 off the positive real axis.
inline complexd sqrt_upper(complexd z) { return complexd(0, 1) * std::sqrt(-z); }

inline complexd nu_d(int d, double lambda) {
  if (d < 2) throw invalid_argument_error("nu_d: d >= 2 required");
  if (!(lambda > 0)) throw domain_error("nu_d: lambda > 0 required");
  const complexd phase = std::exp(complexd(0, pi * (d - 3) / 4.0));
  return -phase * 0.5 * std::pow(2.0 * pi, -(d - 1) / 2.0) *
         std::pow(lambda, (d - 3) / 4.0);
}

// e^{i sqrt(z) d}/(4 pi d) at distance d = |x - x'|, d = 3. For boundary
// values at z = lambda +- i0 the root is +-sqrt(lambda).
inline complexd free_resolvent_kernel(double dist, complexd z,
                                      BoundarySide side = BoundarySide::off_axis) {
  if (!(dist > 0))
    throw invalid_argument_error("free_resolvent_kernel: coincident points");
  complexd root;
  switch (side) {
    case BoundarySide::above:
    case BoundarySide::below: {
      if (z.imag() != 0 || z.real() <= 0)
        throw invalid_argument_error("free_resolvent_kernel: boundary side needs real lambda > 0");
      const double k = std::sqrt(z.real());
      root = side == BoundarySide::above ? complexd(k, 0) : complexd(-k, 0);
      break;
    }
    case BoundarySide::off_axis:
      root = sqrt_upper(z);
      break;
  }
  return std::exp(complexd(0, 1) * root * dist) / (4.0 * pi * dist);
}

// Trace operator at energy lambda in the s-wave reduction: picks out the
// generalized Fourier coefficient at k = sqrt(lambda), normalized so that
// |gamma0(f)|^2 equals the density d<E(lambda)f, f>/d lambda.
inline double gamma0_trace(const detail::Grid1D& g, const std::vector<double>& f,
                           double lambda) {
  if (!(lambda > 0)) throw domain_error("gamma0_trace: lambda > 0 required");
  if (f.size() != g.size())
    throw invalid_argument_error("gamma0_trace: sample count mismatch");
  const double k = std::sqrt(lambda);
  double s = 0;
  for (size_t i = 0; i < g.size(); ++i)
    s += g.weights[i] * std::sin(k * g.nodes[i]) * f[i];
  return std::sqrt(2.0 / pi) * s / std::sqrt(2.0 * k);
}

}  // namespace sk
