#pragma once
#include <cmath>
#include <vector>

#include "../core/special.hpp"
#include "freeres.hpp"
#include "partialwave.hpp"

namespace sk {

// Partial-wave synthesis of the amplitude; radial V makes it a function of
// cos of the angle between incoming and outgoing directions alone.
inline complexd amplitude(const PhaseShifts& ps, double cos_angle) {
  if (!ps.tail_converged)
    throw numerical_error("amplitude: partial-wave tail not converged; raise lmax_cap");
  const auto P = legendre_array(ps.lmax(), cos_angle);
  complexd a = 0;
  for (int l = 0; l <= ps.lmax(); ++l) {
    const double d = ps.waves[l].delta;
    a += (2.0 * l + 1.0) * std::exp(complexd(0, d)) * std::sin(d) * P[l];
  }
  return a / ps.k;
}

// Direct quadrature of the defining integral over the radial solutions:
// a = nu_3 * sum_l 4 pi (2l+1) P_l e^{i delta_l} (1/k) int j_l(kr) V u_l r dr.
// Independent extraction path; needs stored wavefunctions.
inline complexd amplitude_by_quadrature(const PhaseShifts& ps, const Potential& V,
                                        double cos_angle, double tail_eps = 1e-12,
                                        double r_cap = 60.0) {
  if (!ps.tail_converged)
    throw numerical_error("amplitude: partial-wave tail not converged; raise lmax_cap");
  const double k = ps.k;
  const auto cut = stationary_cutoff(V, tail_eps, r_cap);
  const auto P = legendre_array(ps.lmax(), cos_angle);
  complexd a = 0;
  for (int l = 0; l <= ps.lmax(); ++l) {
    const auto& pw = ps.waves[l];
    if (pw.u.empty())
      throw invalid_argument_error("amplitude_by_quadrature: wavefunctions not stored");
    double I = 0;
    for (size_t i = 0; i < pw.grid.size(); ++i) {
      const double r = pw.grid.nodes[i];
      if (r >= cut.r_cut) break;
      I += pw.grid.weights[i] * sph_bessel_j_scalar(l, k * r) * V(r) * cut.window(r) *
           pw.u[i] * r;
    }
    a += 4.0 * pi * (2.0 * l + 1.0) * P[l] * std::exp(complexd(0, pw.delta)) * I / k;
  }
  return nu_d(3, k * k) * a;
}

}  // namespace sk
