#pragma once
#include <cmath>
#include <vector>

#include "../core/errors.hpp"
#include "../core/fft.hpp"
#include "../core/potential.hpp"
#include "wavepacket.hpp"

namespace sk {

enum class EvolutionScheme { exact_free_multiplier, strang_split };

struct EvolutionConfig {
  double dt = 2e-3;
  double T = 10.0;
  EvolutionScheme scheme = EvolutionScheme::strang_split;
  double leak_tolerance = 1e-6;
  double norm_drift_tol = 1e-10;   // per unit time
  double energy_drift_tol = 1e-8;  // per unit time, relative to max(1, |<H>|)
};

// <f, (-d^2/dx^2 + V) f> with V sampled on the grid of f.
inline double energy_expectation(const Wavepacket& f, const std::vector<double>& vr) {
  if (vr.size() != f.size())
    throw invalid_argument_error("energy_expectation: sample count mismatch");
  const auto fh = fft(f.samples);
  const size_t n = f.size();
  double kin = 0, pot = 0;
  for (size_t j = 0; j < n; ++j) {
    const double xi = fourier_xi(j, n, f.dx);
    kin += xi * xi * std::norm(fh[j]);
    pot += vr[j] * std::norm(f.samples[j]);
  }
  return kin * f.dx / static_cast<double>(n) + pot * f.dx;
}

inline std::vector<double> sample_potential(const Potential& V, const Wavepacket& f) {
  std::vector<double> vr(f.size());
  for (size_t i = 0; i < f.size(); ++i) {
    vr[i] = V(std::abs(f.x(i)));
    if (!std::isfinite(vr[i]))
      throw invalid_argument_error("sample_potential: potential unbounded on the grid");
  }
  return vr;
}

inline double energy_expectation(const Wavepacket& f, const Potential& V) {
  return energy_expectation(f, sample_potential(V, f));
}

namespace detail {

inline void require_horizon(const Wavepacket& f, double t, double extra_speed_sq) {
  const double xi_q = xi_quantile(f, 0.999);
  const double v_max = std::sqrt(xi_q * xi_q + extra_speed_sq);
  if (f.box.half_width() < 2.0 * v_max * std::abs(t))
    throw box_too_small_error("propagate: box half-width under 2 v_max T");
}

// One Strang step exp(-i V dt/2) exp(-i xi^2 dt) exp(-i V dt/2) on raw samples.
struct StrangStepper {
  std::vector<complexd> half_v, free_mult;
  double dt = 0;

  StrangStepper(const std::vector<double>& vr, size_t n, double dx, double dt_) : dt(dt_) {
    half_v.resize(n);
    free_mult.resize(n);
    for (size_t j = 0; j < n; ++j) {
      half_v[j] = std::exp(complexd(0, -0.5 * vr[j] * dt));
      const double xi = fourier_xi(j, n, dx);
      free_mult[j] = std::exp(complexd(0, -xi * xi * dt));
    }
  }

  void step(std::vector<complexd>& u) const {
    for (size_t j = 0; j < u.size(); ++j) u[j] *= half_v[j];
    fft_inplace(u, false);
    for (size_t j = 0; j < u.size(); ++j) u[j] *= free_mult[j];
    fft_inplace(u, true);
    for (size_t j = 0; j < u.size(); ++j) u[j] *= half_v[j];
  }
};

inline long long step_count(double t, double dt) {
  const long long n = std::llround(std::abs(t) / dt);
  if (std::abs(static_cast<double>(n) * dt - std::abs(t)) > 1e-9 * std::max(1.0, std::abs(t)))
    throw invalid_argument_error("propagate: dt must divide the target time");
  return n;
}

}  // namespace detail

// exp(-i H0 t) as an exact Fourier multiplier.
inline Wavepacket propagate_free(const Wavepacket& f, double t,
                                 double leak_tolerance = 1e-6) {
  if (t != 0) detail::require_horizon(f, t, 0.0);
  auto fh = fft(f.samples);
  for (size_t j = 0; j < fh.size(); ++j) {
    const double xi = fourier_xi(j, fh.size(), f.dx);
    fh[j] *= std::exp(complexd(0, -xi * xi * t));
  }
  Wavepacket out = f;
  out.samples = ifft(fh);
  out.recompute_norm();
  if (std::abs(out.norm - f.norm) > 1e-12 * std::max(1.0, f.norm))
    throw numerical_error("propagate_free: norm not preserved");
  if (boundary_mass_fraction(out) > leak_tolerance)
    throw box_too_small_error("propagate_free: boundary mass above leak tolerance");
  return out;
}

// exp(-i H t) by Strang splitting; t < 0 runs the reversed flow.
inline Wavepacket propagate_full(const Wavepacket& f, const Potential& V,
                                 const EvolutionConfig& cfg, double t) {
  if (!(cfg.dt > 0)) throw invalid_argument_error("propagate_full: dt must be positive");
  if (t == 0) return f;
  const auto vr = sample_potential(V, f);
  if (cfg.scheme == EvolutionScheme::exact_free_multiplier) {
    for (double v : vr)
      if (v != 0)
        throw invalid_argument_error(
            "propagate_full: exact-free-multiplier scheme requires a zero potential");
    return propagate_free(f, t, cfg.leak_tolerance);
  }
  double v_min = 0;
  for (double v : vr) v_min = std::min(v_min, v);
  detail::require_horizon(f, t, -v_min);

  const long long n_steps = detail::step_count(t, cfg.dt);
  const double dt_eff = t < 0 ? -cfg.dt : cfg.dt;
  const double e0 = energy_expectation(f, vr);
  const detail::StrangStepper stepper(vr, f.size(), f.dx, dt_eff);

  Wavepacket out = f;
  for (long long s = 0; s < n_steps; ++s) {
    stepper.step(out.samples);
    if (boundary_mass_fraction(out) > cfg.leak_tolerance)
      throw box_too_small_error("propagate_full: boundary mass above leak tolerance");
  }
  out.recompute_norm();

  const double span = std::abs(t);
  if (std::abs(out.norm - f.norm) > cfg.norm_drift_tol * std::max(1.0, span))
    throw step_size_error("propagate_full: norm drift above tolerance");
  const double e1 = energy_expectation(out, vr);
  if (std::abs(e1 - e0) > cfg.energy_drift_tol * std::max(1.0, span) * std::max(1.0, std::abs(e0)))
    throw step_size_error("propagate_full: energy drift above tolerance");
  return out;
}

}  // namespace sk
