#pragma once
#include <cmath>
#include <limits>
#include <vector>

#include "../core/errors.hpp"
#include "../core/potential.hpp"
#include "../core/util.hpp"
#include "propagate.hpp"
#include "wavepacket.hpp"

namespace sk {

struct CookOptions {
  double t0 = 1.0;                // shortest sampled time
  int points_per_octave = 6;      // dyadic alignment keeps doubling increments exact
  double xi_min = 0.5;            // required spectral gap a
  double support_mass_tol = 1e-8;
  double fit_decades = 1.0;
  double leak_tolerance = 1e-6;
};

struct CookResult {
  std::vector<double> times;
  std::vector<double> integrand;  // ||V exp(-i H0 t) f||
  std::vector<double> partials;   // trapezoid integral from times.front() to t
  double fit_exponent = 0;        // integrand ~ t^{-fit_exponent} over the fit window
  double last_doubling_increment = 0;
  double prev_doubling_increment = 0;
  bool cauchy = false;
};

// Samples t -> ||V exp(-i H0 t) f|| on a geometric grid ending exactly at T.
// Precondition: |fhat|^2 mass below xi_min stays under support_mass_tol.
inline CookResult cook_integral(const Potential& V, const Wavepacket& f, double T,
                                CookOptions opt = {}) {
  if (!(T > opt.t0) || !(opt.t0 > 0))
    throw invalid_argument_error("cook_integral: need 0 < t0 < T");
  if (opt.points_per_octave < 2)
    throw invalid_argument_error("cook_integral: points_per_octave >= 2");
  if (xi_mass_below(f, opt.xi_min) > opt.support_mass_tol)
    throw domain_error("cook_integral: spectral mass below xi_min exceeds tolerance");

  const int n = static_cast<int>(
      std::ceil(opt.points_per_octave * std::log2(T / opt.t0)));
  CookResult res;
  res.times.resize(n + 1);
  res.integrand.resize(n + 1);
  res.partials.resize(n + 1);
  for (int j = 0; j <= n; ++j)
    res.times[j] = T * std::pow(2.0, -static_cast<double>(n - j) / opt.points_per_octave);

  for (int j = 0; j <= n; ++j) {
    const Wavepacket u = propagate_free(f, res.times[j], opt.leak_tolerance);
    double s = 0;
    for (size_t i = 0; i < u.size(); ++i) {
      const double v = V(std::abs(u.x(i)));
      s += v * v * std::norm(u.samples[i]);
    }
    res.integrand[j] = std::sqrt(s * u.dx);
    res.partials[j] = j == 0 ? 0.0
                             : res.partials[j - 1] + 0.5 *
                                   (res.integrand[j] + res.integrand[j - 1]) *
                                   (res.times[j] - res.times[j - 1]);
  }

  bool positive = true;
  for (double g : res.integrand) positive = positive && g > 0;
  res.fit_exponent = positive
                         ? -fit_power_law(res.times, res.integrand, opt.fit_decades)
                         : std::numeric_limits<double>::infinity();

  const int ppo = opt.points_per_octave;
  if (n >= 2 * ppo) {
    res.last_doubling_increment = res.partials[n] - res.partials[n - ppo];
    res.prev_doubling_increment = res.partials[n - ppo] - res.partials[n - 2 * ppo];
    res.cauchy = res.last_doubling_increment < 0.85 * res.prev_doubling_increment;
  }
  return res;
}

}  // namespace sk
