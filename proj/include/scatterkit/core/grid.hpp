#pragma once
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "util.hpp"

namespace sk {

enum class GridScheme { gauss, gauss_log, uniform_midpoint };

inline const char* to_string(GridScheme s) {
  switch (s) {
    case GridScheme::gauss: return "gauss";
    case GridScheme::gauss_log: return "gauss-log";
    case GridScheme::uniform_midpoint: return "uniform-midpoint";
  }
  return "?";
}

inline GridScheme grid_scheme_from(const std::string& s) {
  if (s == "gauss") return GridScheme::gauss;
  if (s == "gauss-log") return GridScheme::gauss_log;
  if (s == "uniform-midpoint") return GridScheme::uniform_midpoint;
  throw invalid_argument_error("unknown grid scheme: " + s);
}

// Gauss-Legendre rule on [-1,1]; Newton on P_n from Chebyshev initial guesses.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw invalid_argument_error("gauss_legendre: n >= 1 required");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

namespace detail {

struct Grid1D {
  std::vector<double> nodes;    // strictly increasing, inside (0, extent]
  std::vector<double> weights;  // positive quadrature weights
  double extent = 0;
  double inner = 0;  // lower edge of the covered interval (gauss-log only)
  GridScheme scheme = GridScheme::gauss;

  size_t size() const { return nodes.size(); }

  template <typename F>
  double integrate(F&& f) const {
    double s = 0;
    for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }

  template <typename F>
  complexd integrate_c(F&& f) const {
    complexd s = 0;
    for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }

  double weight_sum() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }

  uint64_t hash() const {
    uint64_t h = hash_doubles(nodes);
    return hash_doubles(weights, h);
  }
};

inline Grid1D build_grid1d(int n, double extent, GridScheme scheme, double inner) {
  if (n < 1) throw invalid_argument_error("build_grid: n >= 1 required");
  if (!(extent > 0)) throw invalid_argument_error("build_grid: extent must be positive");
  Grid1D g;
  g.extent = extent;
  g.scheme = scheme;
  switch (scheme) {
    case GridScheme::gauss: {
      std::vector<double> x, w;
      gauss_legendre(n, x, w);
      g.nodes.resize(n);
      g.weights.resize(n);
      for (int i = 0; i < n; ++i) {
        g.nodes[i] = 0.5 * extent * (x[i] + 1.0);
        g.weights[i] = 0.5 * extent * w[i];
      }
      break;
    }
    case GridScheme::gauss_log: {
      // Gauss in log r over [inner, extent]; weights carry the r jacobian so
      // plain weighted sums integrate dr over the covered interval.
      if (!(inner > 0 && inner < extent))
        throw invalid_argument_error("build_grid: gauss-log needs 0 < inner < extent");
      g.inner = inner;
      std::vector<double> x, w;
      gauss_legendre(n, x, w);
      const double la = std::log(inner), lb = std::log(extent);
      g.nodes.resize(n);
      g.weights.resize(n);
      for (int i = 0; i < n; ++i) {
        const double lr = 0.5 * (la + lb) + 0.5 * (lb - la) * x[i];
        const double r = std::exp(lr);
        g.nodes[i] = r;
        g.weights[i] = 0.5 * (lb - la) * w[i] * r;
      }
      break;
    }
    case GridScheme::uniform_midpoint: {
      const double h = extent / n;
      g.nodes.resize(n);
      g.weights.assign(n, h);
      for (int i = 0; i < n; ++i) g.nodes[i] = (i + 0.5) * h;
      break;
    }
  }
  return g;
}

}  // namespace detail

struct RadialGrid : detail::Grid1D {
  double r_max() const { return extent; }
};

struct MomentumGrid : detail::Grid1D {
  // p_max is a physical ultraviolet cutoff, not only a discretization knob.
  double p_max() const { return extent; }
};

inline RadialGrid build_radial_grid(int n, double r_max,
                                    GridScheme scheme = GridScheme::gauss,
                                    double inner = 0) {
  if (scheme == GridScheme::gauss_log && inner <= 0) inner = 1e-6 * r_max;
  RadialGrid g;
  static_cast<detail::Grid1D&>(g) = detail::build_grid1d(n, r_max, scheme, inner);
  return g;
}

inline MomentumGrid build_momentum_grid(int n, double p_max,
                                        GridScheme scheme = GridScheme::gauss,
                                        double inner = 0) {
  if (scheme == GridScheme::gauss_log && inner <= 0) inner = 1e-6 * p_max;
  MomentumGrid g;
  static_cast<detail::Grid1D&>(g) = detail::build_grid1d(n, p_max, scheme, inner);
  return g;
}

// Composite Gauss rule on [a,b] split at interior breakpoints (for integrands
// with kinks, e.g. compactly supported wells).
inline void composite_gauss(double a, double b, const std::vector<double>& breaks,
                            int n_per_panel, std::vector<double>& x,
                            std::vector<double>& w) {
  std::vector<double> edges{a};
  for (double c : breaks)
    if (c > a && c < b) edges.push_back(c);
  edges.push_back(b);
  std::vector<double> gx, gw;
  gauss_legendre(n_per_panel, gx, gw);
  x.clear();
  w.clear();
  for (size_t k = 0; k + 1 < edges.size(); ++k) {
    const double lo = edges[k], hi = edges[k + 1];
    for (int i = 0; i < n_per_panel; ++i) {
      x.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[i]);
      w.push_back(0.5 * (hi - lo) * gw[i]);
    }
  }
}

}  // namespace sk
