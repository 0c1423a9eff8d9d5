#pragma once
#include <algorithm>
#include <cmath>
#include <vector>

#include "../core/errors.hpp"
#include "../core/potential.hpp"
#include "../core/util.hpp"
#include "../stationary/partialwave.hpp"
#include "separable.hpp"

namespace sk {

struct CouplingScanOptions {
  double r_max_factor = 8.0;  // integration range over the potential support
  int n_points = 40000;
  int l_max = 60;
};

struct CouplingScanReport {
  std::vector<double> kappa;
  std::vector<int> count;   // negative eigenvalues of H(kappa)
  double kappa0 = 0.0;      // infimum coupling with count >= 1, 0 if not bracketed
  bool resonance = false;   // zero-energy resonance located at kappa0
};

namespace detail {

// Negative-eigenvalue count of -(2m)^-1 Lap + kappa V in d=3 by oscillation
// counting: nodes of the regular zero-energy solution per partial wave,
// degeneracy 2l+1. The tail contributes one extra node when the growing
// r^{l+1} coefficient and the boundary value have opposite signs.
inline int radial_node_count(const Potential& V, double m, double kappa, int l,
                             double r_max, int n) {
  const double h = r_max / n;
  const double h12 = h * h / 12.0;
  std::vector<double> f(n), u;
  int i0 = -1;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 1) * h;
    const double cent = static_cast<double>(l) * (l + 1) / (r * r);
    f[i] = 2.0 * m * kappa * V(r) + cent;
    if (i0 < 0 && h12 * std::abs(f[i]) < 0.05 && h12 * cent < 0.05) i0 = i;
  }
  if (i0 < 0 || n - i0 < 16)
    throw step_size_error("coupling_scan: Numerov step too large; increase n_points");
  for (int i = 0; i < i0; ++i)
    if (f[i] < 0)
      throw step_size_error("coupling_scan: Numerov step too large; increase n_points");
  // Integration starts past the centrifugal wall where the step is stable;
  // the skipped inner region is classically forbidden and node free.
  f.erase(f.begin(), f.begin() + i0);
  const double r0 = (i0 + 1) * h, r1 = (i0 + 2) * h;
  int nodes = numerov(f, h, 1.0, std::pow(r1 / r0, l + 1.0), u);
  const std::size_t e = u.size() - 1;
  const double du = (u[e] - u[e - 1]) / h;
  const double a = n * h * du + l * u[e];
  if (a * u[e] < 0) ++nodes;
  return nodes;
}

inline int bound_count(const Potential& V, double m, double kappa,
                       const CouplingScanOptions& opt, double r_max) {
  if (kappa == 0) return 0;
  int total = 0, empty_streak = 0;
  for (int l = 0; l <= opt.l_max; ++l) {
    const int nl = radial_node_count(V, m, kappa, l, r_max, opt.n_points);
    total += (2 * l + 1) * nl;
    empty_streak = nl == 0 ? empty_streak + 1 : 0;
    if (empty_streak >= 2) break;
  }
  return total;
}

}  // namespace detail

// Counts the negative spectrum of H(kappa) = -(2m)^-1 Lap + kappa V over the
// scan nodes, then brackets the infimum coupling kappa0 with count >= 1.
inline CouplingScanReport coupling_scan(const Potential& V, double m,
                                        const std::vector<double>& kappa_range,
                                        const CouplingScanOptions& opt = {}) {
  if (kappa_range.empty())
    throw invalid_argument_error("coupling_scan: empty kappa range");
  for (std::size_t i = 0; i < kappa_range.size(); ++i)
    if (kappa_range[i] < 0 || (i > 0 && kappa_range[i] <= kappa_range[i - 1]))
      throw invalid_argument_error("coupling_scan: kappa range must be nonnegative increasing");
  const double r_support = V.radius_where_below(1e-12);
  const double r_max = opt.r_max_factor * std::max(r_support, 1.0);
  CouplingScanReport rep;
  rep.kappa = kappa_range;
  rep.count.resize(kappa_range.size());
  parallel_for(kappa_range.size(), [&](std::size_t i) {
    rep.count[i] = detail::bound_count(V, m, kappa_range[i], opt, r_max);
  });
  for (std::size_t i = 1; i < rep.count.size(); ++i)
    if (rep.count[i] < rep.count[i - 1])
      throw grid_too_small_error("coupling_scan: count decreased along the scan; refine the grid");
  auto it = std::find_if(rep.count.begin(), rep.count.end(), [](int c) { return c >= 1; });
  if (it == rep.count.end() || it == rep.count.begin()) return rep;
  double lo = rep.kappa[it - rep.count.begin() - 1];
  double hi = rep.kappa[it - rep.count.begin()];
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (detail::bound_count(V, m, mid, opt, r_max) >= 1 ? hi : lo) = mid;
  }
  rep.kappa0 = 0.5 * (lo + hi);
  rep.resonance = true;
  return rep;
}

// Rank-one variant: H(kappa) has a negative eigenvalue iff 1 + kappa s J(0) < 0,
// so the count is a single step located by the same bisection.
inline CouplingScanReport coupling_scan(const SeparablePotential& V, double m,
                                        const std::vector<double>& kappa_range) {
  if (kappa_range.empty())
    throw invalid_argument_error("coupling_scan: empty kappa range");
  for (std::size_t i = 0; i < kappa_range.size(); ++i)
    if (kappa_range[i] < 0 || (i > 0 && kappa_range[i] <= kappa_range[i - 1]))
      throw invalid_argument_error("coupling_scan: kappa range must be nonnegative increasing");
  if (V.strength >= 0)
    throw invalid_argument_error("coupling_scan: separable scan needs attractive strength");
  const double J0 = V.transform(0.0, m);
  auto count_at = [&](double kappa) {
    return 1.0 + kappa * V.strength * J0 < 0 ? 1 : 0;
  };
  CouplingScanReport rep;
  rep.kappa = kappa_range;
  rep.count.resize(kappa_range.size());
  for (std::size_t i = 0; i < kappa_range.size(); ++i) rep.count[i] = count_at(kappa_range[i]);
  auto it = std::find_if(rep.count.begin(), rep.count.end(), [](int c) { return c >= 1; });
  if (it == rep.count.end() || it == rep.count.begin()) return rep;
  double lo = rep.kappa[it - rep.count.begin() - 1];
  double hi = rep.kappa[it - rep.count.begin()];
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (count_at(mid) >= 1 ? hi : lo) = mid;
  }
  rep.kappa0 = 0.5 * (lo + hi);
  rep.resonance = true;
  return rep;
}

}  // namespace sk
