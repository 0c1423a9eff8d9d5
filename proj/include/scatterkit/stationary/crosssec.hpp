#pragma once
#include <cmath>
#include <vector>

#include "amplitude.hpp"
#include "freeres.hpp"
#include "partialwave.hpp"

namespace sk {

struct CrossSections {
  double sigma_total = 0;        // sphere quadrature of |a|^2
  double sigma_partial_sum = 0;  // (4 pi / k^2) sum (2l+1) sin^2 delta_l
  double optical_residual = 0;   // relative defect of the optical theorem
  std::vector<double> cos_grid;
  std::vector<double> dsigma;    // |a|^2 samples on cos_grid
};

// n_angles = 0 sizes the angular rule from lmax so that products of the
// retained Legendre polynomials are integrated exactly.
inline CrossSections cross_sections(const PhaseShifts& ps, int n_angles = 0) {
  CrossSections cs;
  if (n_angles <= 0) n_angles = std::max(96, ps.lmax() + 16);
  std::vector<double> x, w;
  gauss_legendre(n_angles, x, w);
  cs.cos_grid = x;
  cs.dsigma.resize(n_angles);
  double sig = 0;
  for (int i = 0; i < n_angles; ++i) {
    cs.dsigma[i] = std::norm(amplitude(ps, x[i]));
    sig += w[i] * cs.dsigma[i];
  }
  cs.sigma_total = 2.0 * pi * sig;
  const double k = ps.k;
  for (int l = 0; l <= ps.lmax(); ++l) {
    const double sd = std::sin(ps.waves[l].delta);
    cs.sigma_partial_sum += 4.0 * pi / (k * k) * (2.0 * l + 1.0) * sd * sd;
  }
  const double lambda = k * k;
  const complexd forward = amplitude(ps, 1.0);
  const double sigma_opt =
      -std::imag(forward / nu_d(3, lambda)) / std::sqrt(lambda);
  cs.optical_residual = std::abs(cs.sigma_total - sigma_opt) /
                        std::max(cs.sigma_total, 1e-300);
  return cs;
}

}  // namespace sk
