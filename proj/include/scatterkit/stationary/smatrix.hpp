#pragma once
#include <cmath>
#include <vector>

#include "amplitude.hpp"
#include "freeres.hpp"
#include "partialwave.hpp"

namespace sk {

inline std::vector<complexd> s_matrix(const PhaseShifts& ps) {
  std::vector<complexd> s(ps.waves.size());
  for (size_t l = 0; l < ps.waves.size(); ++l) s[l] = ps.waves[l].s();
  return s;
}

inline double unitarity_defect(const std::vector<complexd>& s) {
  double d = 0;
  for (const complexd& v : s) d = std::max(d, std::abs(std::abs(v) - 1.0));
  return d;
}

// Partial-wave eigenvalue of the scattering operator rebuilt from the
// amplitude kernel: S_l = 1 - 2 i sqrt(lambda) conj(nu_3) lam_l with
// lam_l = 2 pi int a(t) P_l(t) dt. Independent of the direct e^{2 i delta}.
inline complexd s_from_amplitude(const PhaseShifts& ps, int l, int n_quad = 128) {
  if (l < 0 || l > ps.lmax())
    throw invalid_argument_error("s_from_amplitude: l out of range");
  std::vector<double> x, w;
  gauss_legendre(n_quad, x, w);
  complexd lam = 0;
  for (int i = 0; i < n_quad; ++i)
    lam += w[i] * amplitude(ps, x[i]) * legendre_p(l, x[i]);
  lam *= 2.0 * pi;
  const double lambda = ps.k * ps.k;
  return 1.0 - 2.0 * complexd(0, 1) * std::sqrt(lambda) * std::conj(nu_d(3, lambda)) * lam;
}

}  // namespace sk
