#pragma once
#include <cmath>
#include <vector>

#include "../core/errors.hpp"
#include "../core/potential.hpp"
#include "propagate.hpp"
#include "wavepacket.hpp"

namespace sk {

struct SmoothnessOptions {
  double r = 1.0;                  // weight exponent in <x>^{-r}
  std::vector<double> horizons;    // increasing; the last two must be a doubling
  EvolutionConfig cfg;
  double saturation_tol = 0.01;
};

struct SmoothnessResult {
  std::vector<double> horizons;
  std::vector<double> partials;    // int_{-T}^{T} ||<x>^{-r} u(t)||^2 dt
  bool saturated = false;
  bool inconclusive = false;       // leak or weight too shallow to decide
  double last_growth = 0;          // (I(T_last) - I(T_prev)) / I(T_last)
};

// Accumulates the weighted transfer integral by stepping the split propagator
// in both time directions. The input must already have bound-state components
// projected out; an unprojected component shows up as linear growth.
inline SmoothnessResult smoothness_integral(const Potential& V, const Wavepacket& f,
                                            const SmoothnessOptions& opt) {
  if (!(opt.r > 0)) throw invalid_argument_error("smoothness_integral: r must be positive");
  if (opt.horizons.size() < 2)
    throw invalid_argument_error("smoothness_integral: need at least two horizons");
  for (size_t k = 0; k < opt.horizons.size(); ++k) {
    if (!(opt.horizons[k] > 0) || (k > 0 && !(opt.horizons[k] > opt.horizons[k - 1])))
      throw invalid_argument_error("smoothness_integral: horizons must increase");
    detail::step_count(opt.horizons[k], opt.cfg.dt);
  }
  const size_t nh = opt.horizons.size();
  if (std::abs(opt.horizons[nh - 1] - 2.0 * opt.horizons[nh - 2]) >
      1e-9 * opt.horizons[nh - 1])
    throw invalid_argument_error("smoothness_integral: last two horizons must double");

  const auto vr = sample_potential(V, f);
  std::vector<double> w2(f.size());
  for (size_t i = 0; i < f.size(); ++i) {
    const double x = f.x(i);
    w2[i] = std::pow(1.0 + x * x, -opt.r);
  }
  const auto weighted = [&](const std::vector<complexd>& u) {
    double s = 0;
    for (size_t i = 0; i < u.size(); ++i) s += w2[i] * std::norm(u[i]);
    return s * f.dx;
  };

  SmoothnessResult res;
  const long long total_steps = detail::step_count(opt.horizons.back(), opt.cfg.dt);
  std::vector<std::vector<double>> pass(2);
  for (int dir = 0; dir < 2; ++dir) {
    const double sign = dir == 0 ? 1.0 : -1.0;
    const detail::StrangStepper stepper(vr, f.size(), f.dx, sign * opt.cfg.dt);
    Wavepacket u = f;
    double integral = 0, prev_h = weighted(u.samples);
    size_t next = 0;
    for (long long s = 1; s <= total_steps && next < nh; ++s) {
      stepper.step(u.samples);
      const double h = weighted(u.samples);
      integral += 0.5 * (h + prev_h) * opt.cfg.dt;
      prev_h = h;
      if (boundary_mass_fraction(u) > opt.cfg.leak_tolerance) break;
      const double t = static_cast<double>(s) * opt.cfg.dt;
      while (next < nh && t >= opt.horizons[next] - 0.5 * opt.cfg.dt) {
        pass[dir].push_back(integral);
        ++next;
      }
    }
  }

  const size_t done = std::min(pass[0].size(), pass[1].size());
  res.horizons.assign(opt.horizons.begin(), opt.horizons.begin() + done);
  res.partials.resize(done);
  for (size_t k = 0; k < done; ++k) res.partials[k] = pass[0][k] + pass[1][k];
  if (done == nh) {
    res.last_growth =
        (res.partials[nh - 1] - res.partials[nh - 2]) / res.partials[nh - 1];
    res.saturated = res.last_growth < opt.saturation_tol;
    if (!res.saturated && opt.r <= 0.5) res.inconclusive = true;
  } else {
    res.inconclusive = true;
  }
  return res;
}

}  // namespace sk
