#pragma once
#include <cmath>
#include <optional>
#include <vector>

#include "../core/errors.hpp"
#include "../core/grid.hpp"
#include "../core/potential.hpp"
#include "propagate.hpp"
#include "wavepacket.hpp"

namespace sk {

enum class ModifiedPhaseForm { short_range, average_potential, coulomb_log };

// Phase Xi(x, t) of the modified free evolution, with exact partials.
struct ModifiedPhase {
  ModifiedPhaseForm form = ModifiedPhaseForm::short_range;
  double kappa = 0;
  Potential V;  // average_potential only

  // int_0^1 V(s |x|) ds
  double line_average(double r) const {
    static const auto rule = [] {
      std::pair<std::vector<double>, std::vector<double>> g;
      gauss_legendre(64, g.first, g.second);
      return g;
    }();
    double a = 0;
    for (size_t i = 0; i < rule.first.size(); ++i) {
      const double s = 0.5 * (rule.first[i] + 1.0);
      a += 0.5 * rule.second[i] * V(s * r);
    }
    return a;
  }

  double xi(double x, double t) const {
    const double base = x * x / (4.0 * t);
    switch (form) {
      case ModifiedPhaseForm::short_range: return base;
      case ModifiedPhaseForm::average_potential: return base - t * line_average(std::abs(x));
      case ModifiedPhaseForm::coulomb_log:
        return base - kappa * t * std::log(std::abs(t)) / std::abs(x);
    }
    return base;
  }

  double xi_t(double x, double t) const {
    const double base = -x * x / (4.0 * t * t);
    switch (form) {
      case ModifiedPhaseForm::short_range: return base;
      case ModifiedPhaseForm::average_potential: return base - line_average(std::abs(x));
      case ModifiedPhaseForm::coulomb_log:
        return base - kappa * (std::log(std::abs(t)) + 1.0) / std::abs(x);
    }
    return base;
  }

  double xi_x(double x, double t) const {
    const double base = x / (2.0 * t);
    switch (form) {
      case ModifiedPhaseForm::short_range: return base;
      case ModifiedPhaseForm::average_potential: {
        const double r = std::abs(x);
        return base - t * (V(r) - line_average(r)) / x;
      }
      case ModifiedPhaseForm::coulomb_log:
        return base + kappa * t * std::log(std::abs(t)) / (x * std::abs(x));
    }
    return base;
  }
};

inline ModifiedPhase make_short_range_phase() { return {}; }

inline ModifiedPhase make_average_potential_phase(const Potential& V) {
  ModifiedPhase p;
  p.form = ModifiedPhaseForm::average_potential;
  p.V = V;
  return p;
}

inline ModifiedPhase make_coulomb_log_phase(double kappa) {
  ModifiedPhase p;
  p.form = ModifiedPhaseForm::coulomb_log;
  p.kappa = kappa;
  return p;
}

// Modified free evolution in coordinate form:
// (U0(t) f)(x) = exp(i Xi(x,t)) (2 i t)^{-1/2} fhat(x / (2t)).
// fhat is evaluated off-grid by direct summation, so this costs O(n^2).
inline Wavepacket dollard_free(const Wavepacket& f, double t, const ModifiedPhase& phase,
                               double leak_tolerance = 1e-6) {
  if (t == 0) throw invalid_argument_error("dollard_free: t must be nonzero");
  detail::require_horizon(f, t, 0.0);
  const size_t n = f.size();
  const complexd amp = std::pow(complexd(0.0, 2.0 * t), -0.5);
  const double c = f.dx / std::sqrt(2.0 * pi);
  const double xi_nyquist = pi / f.dx;
  Wavepacket out = f;
  for (size_t i = 0; i < n; ++i) {
    const double x = out.x(i);
    const double xi_pt = x / (2.0 * t);
    // beyond the Nyquist band the direct sum only aliases; the transform of a
    // resolved packet is negligible there
    if (std::abs(xi_pt) >= xi_nyquist) {
      out.samples[i] = 0;
      continue;
    }
    complexd fh = 0;
    for (size_t k = 0; k < n; ++k)
      fh += f.samples[k] * std::exp(complexd(0, -xi_pt * f.x(k)));
    fh *= c;
    const double xa = std::abs(x) < f.dx ? (x < 0 ? -f.dx : f.dx) : x;
    out.samples[i] = std::exp(complexd(0, phase.xi(xa, t))) * amp * fh;
  }
  out.recompute_norm();
  if (boundary_mass_fraction(out) > leak_tolerance)
    throw box_too_small_error("dollard_free: boundary mass above leak tolerance");
  return out;
}

struct MollerOptions {
  EvolutionConfig cfg;
  std::optional<ModifiedPhase> modifier;  // empty: sharp free comparison dynamics
};

struct MollerResult {
  std::vector<double> times;
  std::vector<Wavepacket> waves;      // exp(+i H T) U_as(T) f0 per horizon
  std::vector<double> residuals;      // successive differences, size times-1
  double isometry_defect = 0;         // at the largest horizon
  double energy_in = 0;               // <H0> of f0
  double energy_out = 0;              // <H> of the last wave
};

inline MollerResult moller_estimate(const Potential& V, const Wavepacket& f0,
                                    const std::vector<double>& times,
                                    const MollerOptions& opt) {
  if (times.empty()) throw invalid_argument_error("moller_estimate: no horizons");
  for (size_t k = 0; k < times.size(); ++k)
    if (!(times[k] > 0) || (k > 0 && !(times[k] > times[k - 1])))
      throw invalid_argument_error("moller_estimate: horizons must increase");

  MollerResult res;
  res.times = times;
  for (double T : times) {
    const Wavepacket g = opt.modifier
                             ? dollard_free(f0, T, *opt.modifier, opt.cfg.leak_tolerance)
                             : propagate_free(f0, T, opt.cfg.leak_tolerance);
    res.waves.push_back(propagate_full(g, V, opt.cfg, -T));
  }
  for (size_t k = 0; k + 1 < res.waves.size(); ++k)
    res.residuals.push_back(l2_distance(res.waves[k + 1], res.waves[k]));
  res.isometry_defect = std::abs(res.waves.back().norm / f0.norm - 1.0);
  res.energy_in = energy_expectation(f0, std::vector<double>(f0.size(), 0.0));
  res.energy_out = energy_expectation(res.waves.back(), V);
  return res;
}

struct ScatteringMapOptions {
  EvolutionConfig cfg;                // cfg.T is the one-sided horizon
  double capture_radius = 0;          // 0: derived from the potential range
  std::vector<double> report_times;   // outgoing free-data Cauchy diagnostics
};

struct ScatteringMapResult {
  Wavepacket f_plus;
  double norm_ratio = 0;
  double captured_fraction = 0;
  double spectral_l1_defect = 0;      // L1 gap between |fhat|^2 densities
  double transmitted_fraction = 0;    // outgoing mass at xi > 0
  double reflected_fraction = 0;
  std::vector<double> free_data_residuals;
};

// Free backward to -T, full forward to +T, free backward to 0.
inline ScatteringMapResult scattering_map(const Potential& V, const Wavepacket& f0_minus,
                                          ScatteringMapOptions opt) {
  const double T = opt.cfg.T;
  if (!(T > 0)) throw invalid_argument_error("scattering_map: cfg.T must be positive");
  double r_cap = opt.capture_radius;
  if (r_cap <= 0) r_cap = std::min(50.0, V.radius_where_below(1e-6));

  const Wavepacket past = propagate_free(f0_minus, -T, opt.cfg.leak_tolerance);

  std::vector<double> marks = opt.report_times;
  for (size_t k = 0; k < marks.size(); ++k)
    if (!(marks[k] > 0) || !(marks[k] <= T) || (k > 0 && !(marks[k] > marks[k - 1])))
      throw invalid_argument_error("scattering_map: report times must increase within (0, T]");
  if (marks.empty() || marks.back() < T) marks.push_back(T);

  ScatteringMapResult res;
  Wavepacket u = past;
  double done = -T;
  std::vector<Wavepacket> outgoing;
  for (double m : marks) {
    u = propagate_full(u, V, opt.cfg, m - done);
    done = m;
    outgoing.push_back(propagate_free(u, -m, opt.cfg.leak_tolerance));
  }
  for (size_t k = 0; k + 1 < outgoing.size(); ++k)
    res.free_data_residuals.push_back(l2_distance(outgoing[k], outgoing.back()));

  res.captured_fraction = mass_fraction_within(u, -r_cap, r_cap);
  res.f_plus = outgoing.back();
  res.norm_ratio = res.f_plus.norm / f0_minus.norm;

  const auto fh_m = fft(f0_minus.samples);
  const auto fh_p = fft(res.f_plus.samples);
  const size_t n = fh_m.size();
  const double dxi_weight = f0_minus.dx / static_cast<double>(n);
  // reflection moves mass between +xi and -xi on one energy shell, so the
  // preserved density is the shell sum
  double l1 = 0, trans = 0, total = 0;
  for (size_t j = 0; j < n; ++j) {
    const size_t jm = j == 0 ? 0 : n - j;
    l1 += std::abs(std::norm(fh_p[j]) + std::norm(fh_p[jm]) - std::norm(fh_m[j]) -
                   std::norm(fh_m[jm])) * 0.5;
    const double mass = std::norm(fh_p[j]);
    total += mass;
    if (fourier_xi(j, n, f0_minus.dx) > 0) trans += mass;
  }
  res.spectral_l1_defect = l1 * dxi_weight;
  res.transmitted_fraction = total > 0 ? trans / total : 0.0;
  res.reflected_fraction = 1.0 - res.transmitted_fraction;
  return res;
}

}  // namespace sk
