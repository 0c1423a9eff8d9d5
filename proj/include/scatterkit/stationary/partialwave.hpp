#pragma once
#include <cmath>
#include <vector>

#include "../core/errors.hpp"
#include "../core/grid.hpp"
#include "../core/potential.hpp"
#include "../core/special.hpp"
#include "../core/util.hpp"

namespace sk {

struct PhaseShiftOptions {
  double h = 5e-4;          // Numerov step
  double tail_eps = 1e-12;  // potential tail threshold defining the matching zone
  double r_cap = 60.0;      // truncation radius for slowly decaying tails
  int lmax_cap = 400;
  double lmax_tol = 1e-10;  // adaptive partial-wave cutoff on |delta_l|
  bool keep_wavefunction = false;
};

struct PartialWaveSolution {
  int l = 0;
  double k = 0;
  double delta = 0;  // principal branch in (-pi/2, pi/2]
  int branch = 0;    // node-count excess over the free solution
  RadialGrid grid;   // uniform midpoint mesh carrying the samples
  std::vector<double> u;  // scaled to sin(kr - l pi/2 + delta) at the matching zone

  double delta_total() const { return delta + branch * pi; }
  complexd s() const { return std::exp(complexd(0, 2.0 * delta)); }
};

// Truncation shared by both stationary solvers so they address the same
// Hamiltonian even for slowly decaying tails. Where the cap actually cuts
// into the tail, a C^3 taper replaces the hard edge; a sharp edge would put
// slowly decaying oscillations into the momentum-space kernels.
struct StationaryCutoff {
  double r_cut = 0, taper_from = 0;

  double window(double r) const {
    if (r >= r_cut) return 0.0;
    if (r <= taper_from) return 1.0;
    const double s = (r - taper_from) / (r_cut - taper_from);
    const double s2 = s * s;
    return 1.0 - s2 * s2 * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)));
  }
};

inline StationaryCutoff stationary_cutoff(const Potential& V, double tail_eps,
                                          double r_cap) {
  const double natural = V.radius_where_below(tail_eps);
  StationaryCutoff c;
  c.r_cut = std::min(natural, r_cap);
  c.taper_from = natural <= r_cap ? natural : 0.5 * r_cap;
  return c;
}

inline double stationary_truncation_radius(const Potential& V, double tail_eps,
                                           double r_cap) {
  return stationary_cutoff(V, tail_eps, r_cap).r_cut;
}

namespace detail {

// u'' = f u outward on midpoint nodes; returns the sign-change count and the
// samples (rescaled wholesale when they grow past 1e250, so ratios survive).
inline int numerov(const std::vector<double>& f, double h, double u0, double u1,
                   std::vector<double>& u) {
  const size_t n = f.size();
  u.resize(n);
  u[0] = u0;
  u[1] = u1;
  int nodes = 0;
  const double h12 = h * h / 12.0;
  double tm = h12 * f[0], tc = h12 * f[1];
  for (size_t i = 1; i + 1 < n; ++i) {
    const double tp = h12 * f[i + 1];
    u[i + 1] = ((2.0 + 10.0 * tc) * u[i] - (1.0 - tm) * u[i - 1]) / (1.0 - tp);
    if (u[i] != 0 && std::signbit(u[i + 1]) != std::signbit(u[i])) ++nodes;
    tm = tc;
    tc = tp;
    if (std::abs(u[i + 1]) > 1e250) {
      for (size_t j = 0; j <= i + 1; ++j) u[j] *= 1e-250;
    }
  }
  return nodes;
}

struct PartialWaveMesh {
  double k = 0, h = 0, r_cut = 0;
  int n = 0, i1 = 0, i2 = 0;
  std::vector<double> r, vr, inv_r2;  // nodes, truncated potential, 1/r^2
};

inline PartialWaveMesh build_partial_wave_mesh(const Potential& V, double k,
                                               const PhaseShiftOptions& opt) {
  if (!(k > 0)) throw invalid_argument_error("partial wave: k > 0 required");
  PartialWaveMesh m;
  m.k = k;
  m.h = opt.h;
  const auto cut = stationary_cutoff(V, opt.tail_eps, opt.r_cap);
  m.r_cut = cut.r_cut;
  const int di = std::max(3, static_cast<int>(std::lround(0.25 * pi / (k * m.h))));
  m.n = static_cast<int>(std::ceil((m.r_cut + 0.5) / m.h)) + di + 2;
  m.i2 = m.n - 1;
  m.i1 = m.i2 - di;
  m.r.resize(m.n);
  m.vr.resize(m.n);
  m.inv_r2.resize(m.n);
  for (int i = 0; i < m.n; ++i) {
    m.r[i] = (i + 0.5) * m.h;
    m.vr[i] = m.r[i] < m.r_cut ? V(m.r[i]) * cut.window(m.r[i]) : 0.0;
    m.inv_r2[i] = 1.0 / (m.r[i] * m.r[i]);
  }
  return m;
}

inline PartialWaveSolution solve_on_mesh(const PartialWaveMesh& m, int l,
                                         bool keep_wavefunction) {
  const double k = m.k;
  std::vector<double> f(m.n);
  const double cf = l * (l + 1.0);
  for (int i = 0; i < m.n; ++i)
    f[i] = m.vr[i] + cf * m.inv_r2[i] - k * k;
  // start values carry the regular r^{l+1} behavior; only ratios matter
  const double lr = (l + 1.0) * std::log(m.r[0] / m.r[1]);
  std::vector<double> u;
  const int nodes = numerov(f, m.h, std::exp(std::max(lr, -600.0)), 1.0, u);

  std::vector<double> ffree(m.n), ufree;
  for (int i = 0; i < m.n; ++i) ffree[i] = cf * m.inv_r2[i] - k * k;
  const int nodes_free = numerov(ffree, m.h, std::exp(std::max(lr, -600.0)), 1.0, ufree);

  const double x1 = k * m.r[m.i1], x2 = k * m.r[m.i2];
  const double j1 = x1 * sph_bessel_j_scalar(l, x1);
  const double j2 = x2 * sph_bessel_j_scalar(l, x2);
  const double y1 = x1 * sph_bessel_y(l, x1);
  const double y2 = x2 * sph_bessel_y(l, x2);
  const double u1 = u[m.i1], u2 = u[m.i2];
  double delta = std::atan2(j1 * u2 - j2 * u1, y1 * u2 - y2 * u1);
  if (delta > 0.5 * pi) delta -= pi;
  if (delta <= -0.5 * pi) delta += pi;

  PartialWaveSolution sol;
  sol.l = l;
  sol.k = k;
  sol.delta = delta;
  sol.branch = nodes - nodes_free;
  if (keep_wavefunction) {
    sol.grid = build_radial_grid(m.n, m.n * m.h, GridScheme::uniform_midpoint);
    const double target = j2 * std::cos(delta) - y2 * std::sin(delta);
    const double scale = target / u2;
    sol.u = std::move(u);
    for (double& v : sol.u) v *= scale;
  }
  return sol;
}

}  // namespace detail

inline PartialWaveSolution solve_partial_wave(const Potential& V, double k, int l,
                                              const PhaseShiftOptions& opt = {}) {
  if (l < 0) throw invalid_argument_error("solve_partial_wave: l >= 0 required");
  auto mesh = detail::build_partial_wave_mesh(V, k, opt);
  return detail::solve_on_mesh(mesh, l, opt.keep_wavefunction);
}

// Variant on a caller-supplied mesh; the matching zone must clear the
// potential's effective range.
inline PartialWaveSolution solve_partial_wave(const Potential& V, double k, int l,
                                              const RadialGrid& grid,
                                              const PhaseShiftOptions& opt = {}) {
  if (grid.scheme != GridScheme::uniform_midpoint)
    throw invalid_argument_error("solve_partial_wave: uniform midpoint grid required");
  detail::PartialWaveMesh m;
  m.k = k;
  m.h = grid.extent / static_cast<double>(grid.size());
  const auto cut = stationary_cutoff(V, opt.tail_eps, opt.r_cap);
  m.r_cut = cut.r_cut;
  const int di = std::max(3, static_cast<int>(std::lround(0.25 * pi / (k * m.h))));
  m.n = static_cast<int>(grid.size());
  m.i2 = m.n - 1;
  m.i1 = m.i2 - di;
  if (m.i1 < 2 || grid.nodes[m.i1] <= m.r_cut)
    throw grid_too_small_error("solve_partial_wave: matching zone inside potential range");
  m.r = grid.nodes;
  m.vr.resize(m.n);
  m.inv_r2.resize(m.n);
  for (int i = 0; i < m.n; ++i) {
    m.vr[i] = m.r[i] < m.r_cut ? V(m.r[i]) * cut.window(m.r[i]) : 0.0;
    m.inv_r2[i] = 1.0 / (m.r[i] * m.r[i]);
  }
  return detail::solve_on_mesh(m, l, opt.keep_wavefunction);
}

struct PhaseShifts {
  double k = 0;
  std::vector<PartialWaveSolution> waves;  // l = 0 .. lmax
  bool tail_converged = false;

  int lmax() const { return static_cast<int>(waves.size()) - 1; }
  std::vector<double> deltas() const {
    std::vector<double> d(waves.size());
    for (size_t i = 0; i < waves.size(); ++i) d[i] = waves[i].delta;
    return d;
  }
};

// Sweeps l upward until |delta_l| < lmax_tol twice in a row.
inline PhaseShifts phase_shifts(const Potential& V, double k,
                                const PhaseShiftOptions& opt = {}) {
  auto mesh = detail::build_partial_wave_mesh(V, k, opt);
  PhaseShifts out;
  out.k = k;
  int quiet = 0;
  for (int l = 0; l <= opt.lmax_cap; ++l) {
    out.waves.push_back(detail::solve_on_mesh(mesh, l, opt.keep_wavefunction));
    quiet = std::abs(out.waves.back().delta) < opt.lmax_tol ? quiet + 1 : 0;
    if (quiet >= 2) {
      out.tail_converged = true;
      break;
    }
  }
  return out;
}

}  // namespace sk
