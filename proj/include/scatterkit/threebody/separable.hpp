#pragma once
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "../core/errors.hpp"
#include "../core/grid.hpp"
#include "jacobi.hpp"

namespace sk {

// Rank-one pair interaction V = s |g><g| acting in the s-wave pair channel,
// with <p|g> = g(|p|) sampled on a radial momentum grid. All radial integrals
// carry the angular factor 4 pi.
struct SeparablePotential {
  Pair pair = Pair::p12;
  double strength = 0.0;
  MomentumGrid grid;
  std::vector<double> g;
  std::function<double(double)> form;
  double yamaguchi_beta = 0.0;  // > 0 when form(p) = 1/(p^2 + beta^2)

  double norm2() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      acc += grid.weights[i] * grid.nodes[i] * grid.nodes[i] * g[i] * g[i];
    return 4.0 * std::numbers::pi * acc;
  }

  // J(zeta) = 4 pi int p^2 g(p)^2 / (p^2/(2m) - zeta) dp, zeta <= 0
  double transform(double zeta, double m) const {
    if (zeta > 0)
      throw excluded_energy_error("separable transform needs zeta <= 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double p = grid.nodes[i];
      acc += grid.weights[i] * p * p * g[i] * g[i] / (p * p / (2.0 * m) - zeta);
    }
    return 4.0 * std::numbers::pi * acc;
  }
};

inline SeparablePotential make_separable(Pair pair, double strength,
                                         std::function<double(double)> form,
                                         MomentumGrid grid) {
  SeparablePotential V;
  V.pair = pair;
  V.strength = strength;
  V.grid = std::move(grid);
  V.form = std::move(form);
  V.g.resize(V.grid.size());
  for (std::size_t i = 0; i < V.grid.size(); ++i) V.g[i] = V.form(V.grid.nodes[i]);
  return V;
}

inline SeparablePotential make_yamaguchi(Pair pair, double strength, double beta,
                                         MomentumGrid grid) {
  if (!(beta > 0)) throw invalid_argument_error("make_yamaguchi: beta must be positive");
  auto V = make_separable(
      pair, strength, [beta](double p) { return 1.0 / (p * p + beta * beta); },
      std::move(grid));
  V.yamaguchi_beta = beta;
  return V;
}

// closed forms for g(p) = 1/(p^2 + beta^2):
//   ||g||^2 = pi^2 / beta
//   J(zeta) = 2 pi^2 m / (beta (beta + kappa)^2), kappa = sqrt(-2 m zeta)
inline double yamaguchi_transform_closed(double beta, double m, double zeta) {
  if (zeta > 0) throw excluded_energy_error("yamaguchi transform needs zeta <= 0");
  const double kappa = std::sqrt(-2.0 * m * zeta);
  const double bk = beta + kappa;
  return 2.0 * std::numbers::pi * std::numbers::pi * m / (beta * bk * bk);
}

// strength below which (more negative than which) the pair binds
inline double yamaguchi_critical_strength(double beta, double m) {
  return -beta * beta * beta / (2.0 * std::numbers::pi * std::numbers::pi * m);
}

// strength whose single bound state sits at energy lambda < 0
inline double yamaguchi_strength_for_energy(double beta, double m, double lambda) {
  if (!(lambda < 0))
    throw invalid_argument_error("yamaguchi_strength_for_energy: lambda must be negative");
  const double kappa = std::sqrt(-2.0 * m * lambda);
  const double bk = beta + kappa;
  return -beta * bk * bk / (2.0 * std::numbers::pi * std::numbers::pi * m);
}

// strength that puts the zero-energy resonance exactly on this grid's quadrature
inline double critical_strength_on_grid(const SeparablePotential& V, double m) {
  return -1.0 / V.transform(0.0, m);
}

// strength whose bound state sits at lambda exactly on this grid's quadrature
inline double strength_for_energy_on_grid(const SeparablePotential& V, double m,
                                          double lambda) {
  if (!(lambda < 0))
    throw invalid_argument_error("strength_for_energy_on_grid: lambda must be negative");
  return -1.0 / V.transform(lambda, m);
}

struct PairSpectrum {
  std::vector<double> energies;  // at most one entry for a rank-one potential
  std::vector<std::vector<double>> eigenfunctions;  // radial samples on V.grid
  double hvz_candidate = 0.0;    // lowest pair energy, 0 when no pair binds
};

// Bound states of h = p^2/(2m) + s |g><g| from the secular equation
// 1 + s J(lambda) = 0. Attractive s with 1 + s J(0) < 0 certifies a root;
// the root must then be resolvable by the grid on both ends.
inline PairSpectrum pair_spectrum(const SeparablePotential& V, double m) {
  PairSpectrum out;
  if (V.strength >= 0) return out;
  const double D0 = 1.0 + V.strength * V.transform(0.0, m);
  if (D0 >= 0) return out;
  const double p_min = V.grid.nodes.front();
  const double p_max = V.grid.nodes.back();
  double lo = -10.0 * p_max * p_max / (2.0 * m);
  double hi = 0.0;
  if (1.0 + V.strength * V.transform(lo, m) < 0)
    throw grid_too_small_error("pair_spectrum: binding deeper than the grid cutoff; refine the grid");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 + V.strength * V.transform(mid, m) < 0)
      hi = mid;
    else
      lo = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  const double kappa = std::sqrt(-2.0 * m * lambda);
  if (kappa < 8.0 * p_min || kappa > 0.25 * p_max)
    throw grid_too_small_error("pair_spectrum: binding scale outside the resolved momentum range; refine the grid");
  out.energies.push_back(lambda);
  out.hvz_candidate = lambda;
  // rank-one eigenfunction psi(p) = N g(p) / (p^2/(2m) - lambda)
  std::vector<double> psi(V.grid.size());
  double nrm = 0.0;
  for (std::size_t i = 0; i < V.grid.size(); ++i) {
    const double p = V.grid.nodes[i];
    psi[i] = V.g[i] / (p * p / (2.0 * m) - lambda);
    nrm += V.grid.weights[i] * p * p * psi[i] * psi[i];
  }
  nrm = std::sqrt(4.0 * std::numbers::pi * nrm);
  for (double& v : psi) v /= nrm;
  out.eigenfunctions.push_back(std::move(psi));
  return out;
}

}  // namespace sk
