#pragma once
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "../core.hpp"
#include "../stationary.hpp"
#include "../threebody.hpp"
#include "../timedep.hpp"
#include "bundle.hpp"
#include "config.hpp"

namespace sk {

namespace detail {

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  return v;
}

inline Box1D packet_box(const ExperimentConfig& c) {
  if (c.dx > 0) return {-0.5 * c.n * c.dx, 0.5 * c.n * c.dx};
  return {-c.box_half, c.box_half};
}

inline PhaseShiftOptions phase_options(const ExperimentConfig& c) {
  PhaseShiftOptions opt;
  if (c.l_max >= 0) {
    opt.lmax_cap = c.l_max;
    opt.lmax_tol = 0.0;  // forced sweep up to the cap
  }
  return opt;
}

inline void add_stationary_hash(ResultBundle& b, const ExperimentConfig& c,
                                const PhaseShiftOptions& opt) {
  std::vector<double> params = {opt.h, opt.tail_eps, opt.r_cap,
                                static_cast<double>(opt.lmax_cap)};
  params.insert(params.end(), c.lambda.begin(), c.lambda.end());
  b.add_hash("partial_wave_mesh", hash_doubles(params));
}

inline ResultBundle run_phaseshift(const ExperimentConfig& c) {
  const Potential V = build_potential(c);
  const auto opt = phase_options(c);
  ResultBundle b;
  Table& t = b.add_table("phase_shifts", {"lambda", "k", "l", "delta"});
  double max_delta = 0, max_unitarity = 0;
  for (double lam : c.lambda) {
    const auto ps = phase_shifts(V, std::sqrt(lam), opt);
    for (const auto& w : ps.waves) {
      t.add_row({lam, ps.k, static_cast<double>(w.l), w.delta});
      max_delta = std::max(max_delta, std::abs(w.delta));
      max_unitarity = std::max(
          max_unitarity, std::abs(std::abs(std::polar(1.0, 2.0 * w.delta)) - 1.0));
    }
  }
  b.add_scalar("n_energies", static_cast<double>(c.lambda.size()));
  b.add_scalar("max_abs_delta", max_delta);
  b.add_scalar("unitarity_max_deviation", max_unitarity);
  add_stationary_hash(b, c, opt);
  return b;
}

inline ResultBundle run_smatrix(const ExperimentConfig& c) {
  const Potential V = build_potential(c);
  const auto opt = phase_options(c);
  ResultBundle b;
  Table& t = b.add_table(
      "smatrix", {"lambda", "k", "l", "re_s", "im_s", "abs_s_minus_one",
                  "reconstruction_deviation"});
  double max_unitarity = 0, max_recon = 0;
  for (double lam : c.lambda) {
    const auto ps = phase_shifts(V, std::sqrt(lam), opt);
    const auto s = s_matrix(ps);
    for (size_t l = 0; l < s.size(); ++l) {
      const double dev = std::abs(s_from_amplitude(ps, static_cast<int>(l)) - s[l]);
      t.add_row({lam, ps.k, static_cast<double>(l), s[l].real(), s[l].imag(),
                 std::abs(s[l]) - 1.0, dev});
      max_unitarity = std::max(max_unitarity, std::abs(std::abs(s[l]) - 1.0));
      max_recon = std::max(max_recon, dev);
    }
  }
  b.add_scalar("max_unitarity_deviation", max_unitarity);
  b.add_scalar("max_reconstruction_deviation", max_recon);
  add_stationary_hash(b, c, opt);
  return b;
}

inline ResultBundle run_born(const ExperimentConfig& c) {
  const Potential V = build_potential(c);
  const double lam = c.lambda[0];
  const auto series = born_series(V, lam, c.l, c.orders);
  const auto ls = momentum_ls(V, series.k, c.l);
  ResultBundle b;
  Table& t = b.add_table(
      "born_terms", {"order", "term_norm", "re_t_partial", "im_t_partial",
                     "error_vs_ls"});
  for (size_t m = 0; m < series.t_partial.size(); ++m)
    t.add_row({static_cast<double>(m), series.term_norms[m],
               series.t_partial[m].real(), series.t_partial[m].imag(),
               std::abs(series.t_partial[m] - ls.t_on)});
  b.add_scalar("convergent", series.convergent ? 1.0 : 0.0);
  b.add_scalar("final_error", std::abs(series.t_partial.back() - ls.t_on));
  b.add_scalar("ls_delta", ls.delta);
  b.add_scalar("ls_unitarity_defect", ls.unitarity_defect);
  b.add_hash("momentum_kernel",
             hash_doubles({lam, static_cast<double>(c.l),
                           static_cast<double>(c.orders)}));
  return b;
}

inline ResultBundle run_crosssection(const ExperimentConfig& c) {
  const Potential V = build_potential(c);
  const auto opt = phase_options(c);
  ResultBundle b;
  Table& t = b.add_table(
      "cross_sections",
      {"lambda", "k", "sigma_total", "sigma_partial_sum", "optical_residual"});
  Table& d = b.add_table("differential", {"lambda", "cos_theta", "dsigma"});
  double max_resid = 0;
  for (double lam : c.lambda) {
    const auto ps = phase_shifts(V, std::sqrt(lam), opt);
    const auto cs = cross_sections(ps);
    t.add_row({lam, ps.k, cs.sigma_total, cs.sigma_partial_sum, cs.optical_residual});
    for (size_t i = 0; i < cs.cos_grid.size(); ++i)
      d.add_row({lam, cs.cos_grid[i], cs.dsigma[i]});
    max_resid = std::max(max_resid, cs.optical_residual);
  }
  b.add_scalar("max_optical_residual", max_resid);
  add_stationary_hash(b, c, opt);
  return b;
}

inline ResultBundle run_propagate(const ExperimentConfig& c) {
  const Potential V = build_potential(c);
  const Box1D box = packet_box(c);
  Wavepacket f = make_gaussian_packet(c.n, box, c.x0, c.xi0, c.width);
  const auto vr = sample_potential(V, f);
  const double e0 = energy_expectation(f, vr);
  const double norm0 = f.norm;
  EvolutionConfig cfg;
  cfg.dt = c.dt;
  ResultBundle b;
  Table& t = b.add_table("evolution",
                         {"t", "norm", "energy", "norm_drift", "energy_drift"});
  t.add_row({0.0, norm0, e0, 0.0, 0.0});
  double max_norm_drift = 0, max_energy_drift = 0;
  double done = 0;
  for (int j = 1; j <= c.samples; ++j) {
    const double tj = c.horizon * j / c.samples;
    f = propagate_full(f, V, cfg, tj - done);
    done = tj;
    const double ej = energy_expectation(f, vr);
    const double nd = std::abs(f.norm - norm0), ed = std::abs(ej - e0);
    t.add_row({tj, f.norm, ej, nd, ed});
    max_norm_drift = std::max(max_norm_drift, nd);
    max_energy_drift = std::max(max_energy_drift, ed);
  }
  b.add_scalar("norm_drift", max_norm_drift);
  b.add_scalar("energy_drift", max_energy_drift);
  b.add_hash("position_grid",
             hash_doubles({box.xmin, box.xmax, static_cast<double>(c.n)}));
  return b;
}

inline ResultBundle run_cook(const ExperimentConfig& c) {
  const Potential V = build_potential(c);
  const Box1D box = packet_box(c);
  const Wavepacket f = make_gaussian_packet(c.n, box, c.x0, c.xi0, c.width);
  CookOptions co;
  co.t0 = c.t0;
  co.points_per_octave = c.points_per_octave;
  const auto r = cook_integral(V, f, c.horizon, co);
  ResultBundle b;
  Table& t = b.add_table("cook", {"t", "integrand", "partial"});
  for (size_t i = 0; i < r.times.size(); ++i)
    t.add_row({r.times[i], r.integrand[i], r.partials[i]});
  b.add_scalar("fit_exponent", r.fit_exponent);
  b.add_scalar("cauchy", r.cauchy ? 1.0 : 0.0);
  b.add_scalar("last_doubling_increment", r.last_doubling_increment);
  b.add_scalar("prev_doubling_increment", r.prev_doubling_increment);
  b.add_hash("position_grid",
             hash_doubles({box.xmin, box.xmax, static_cast<double>(c.n)}));
  return b;
}

inline ResultBundle run_moller(const ExperimentConfig& c) {
  const Potential V = build_potential(c);
  const Box1D box = packet_box(c);
  const Wavepacket f0 = make_gaussian_packet(c.n, box, c.x0, c.xi0, c.width);
  std::vector<double> horizons;
  for (int j = 0; j <= c.doublings; ++j)
    horizons.push_back(c.t0 * std::pow(2.0, j));
  MollerOptions mo;
  mo.cfg.dt = c.dt;
  mo.cfg.energy_drift_tol = 1e-7;
  if (c.modifier == "coulomb-log") mo.modifier = make_coulomb_log_phase(V.p1);
  else if (c.modifier == "average") mo.modifier = make_average_potential_phase(V);
  const auto r = moller_estimate(V, f0, horizons, mo);
  ResultBundle b;
  Table& t = b.add_table("moller", {"t_prev", "t", "residual"});
  for (size_t kk = 0; kk + 1 < r.times.size(); ++kk)
    t.add_row({r.times[kk], r.times[kk + 1], r.residuals[kk]});
  b.add_scalar("first_residual", r.residuals.front());
  b.add_scalar("final_residual", r.residuals.back());
  b.add_scalar("residual_ratio", r.residuals.back() / r.residuals.front());
  b.add_scalar("isometry_defect", r.isometry_defect);
  b.add_scalar("energy_in", r.energy_in);
  b.add_scalar("energy_out", r.energy_out);
  b.add_scalar("energy_drift", std::abs(r.energy_out - r.energy_in));
  b.add_hash("position_grid",
             hash_doubles({box.xmin, box.xmax, static_cast<double>(c.n)}));
  return b;
}

inline double square_well_transmission_1d(double xi, double depth, double radius) {
  const double kp = std::sqrt(xi * xi - depth);
  const double s = std::sin(2.0 * kp * radius);
  return 1.0 / (1.0 + depth * depth * s * s / (4.0 * xi * xi * kp * kp));
}

inline ResultBundle run_scattering_map(const ExperimentConfig& c) {
  const Potential V = build_potential(c);
  const Box1D box = packet_box(c);
  const Wavepacket f0 = make_gaussian_packet(c.n, box, c.x0, c.xi0, c.width);
  ScatteringMapOptions so;
  so.cfg.T = c.horizon;
  so.cfg.dt = c.dt;
  so.capture_radius = c.capture_radius;
  for (int j = 1; j <= c.samples; ++j)
    so.report_times.push_back(c.horizon * j / c.samples);
  const auto r = scattering_map(V, f0, so);
  ResultBundle b;
  Table& t = b.add_table("free_data", {"t", "residual"});
  for (size_t kk = 0; kk < r.free_data_residuals.size(); ++kk)
    t.add_row({so.report_times[kk], r.free_data_residuals[kk]});
  Table& sp = b.add_table("spectral_density", {"xi", "density_in", "density_out"});
  {
    const auto fh_m = fft(f0.samples);
    const auto fh_p = fft(r.f_plus.samples);
    std::vector<std::vector<double>> rows;
    for (size_t j = 0; j < fh_m.size(); ++j)
      rows.push_back({fourier_xi(j, fh_m.size(), f0.dx), std::norm(fh_m[j]),
                      std::norm(fh_p[j])});
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& bb) { return a[0] < bb[0]; });
    for (auto& row : rows) sp.add_row(std::move(row));
  }
  b.add_scalar("norm_ratio", r.norm_ratio);
  b.add_scalar("captured_fraction", r.captured_fraction);
  b.add_scalar("spectral_l1_defect", r.spectral_l1_defect);
  b.add_scalar("transmitted_fraction", r.transmitted_fraction);
  b.add_scalar("reflected_fraction", r.reflected_fraction);
  if (V.kind == PotentialKind::square_well && V.p1 < 0) {
    const auto fh = fft(f0.samples);
    double tsum = 0, wsum = 0;
    for (size_t j = 0; j < fh.size(); ++j) {
      const double xi = fourier_xi(j, fh.size(), f0.dx);
      if (xi <= 0) continue;
      const double w = std::norm(fh[j]);
      tsum += w * square_well_transmission_1d(xi, V.p1, V.p2);
      wsum += w;
    }
    const double closed = tsum / wsum;
    b.add_scalar("transmission_closed", closed);
    b.add_scalar("transmission_rel_deviation",
                 std::abs(r.transmitted_fraction - closed) / closed);
  }
  b.add_hash("position_grid",
             hash_doubles({box.xmin, box.xmax, static_cast<double>(c.n)}));
  return b;
}

inline ResultBundle run_faddeev_bound(const ExperimentConfig& c) {
  const JacobiSystem jac = jacobi_setup(c.m1, c.m2, c.m3);
  const auto grid =
      build_momentum_grid(c.pair_n, c.pair_pmax, GridScheme::gauss_log, c.pair_inner);
  std::vector<SeparablePotential> pots;
  for (Pair a : {Pair::p12, Pair::p23, Pair::p31})
    pots.push_back(make_yamaguchi(
        a, yamaguchi_strength_for_energy(c.beta, jac.m(a), c.pair_energy), c.beta,
        grid));
  const auto pb =
      make_faddeev_problem(jac, pots, c.spectator_n, c.q_max, Cx(c.z_max, 0.0));
  ResultBundle b;
  Table& th = b.add_table("pair_thresholds", {"pair", "pair_ground"});
  for (int a = 0; a < 3; ++a) {
    const auto spct = pair_spectrum(pb.potentials[a], jac.m(static_cast<Pair>(a)));
    double ground = 0;
    for (double lam : spct.energies) ground = std::min(ground, lam);
    th.add_row({static_cast<double>(a), ground});
  }
  const double ehvz = hvz_bottom(pb);
  BoundStateOptions opt;
  opt.symmetric_reduction = c.symmetric && c.m1 == c.m2 && c.m2 == c.m3;
  const auto energies = bound_states(pb, c.z_min, c.z_max, opt);
  Table& t = b.add_table("bound_states", {"index", "energy"});
  for (size_t i = 0; i < energies.size(); ++i)
    t.add_row({static_cast<double>(i + 1), energies[i]});
  b.add_scalar("n_states", static_cast<double>(energies.size()));
  b.add_scalar("hvz_bottom", ehvz);
  if (!energies.empty())
    b.add_scalar("ground_energy",
                 *std::min_element(energies.begin(), energies.end()));
  b.add_hash("pair_grid", hash_doubles(grid.nodes));
  b.add_hash("spectator_grid", hash_doubles(pb.spectator_grid[0].nodes));
  return b;
}

inline ResultBundle run_coupling_scan(const ExperimentConfig& c) {
  const Potential V = build_potential(c);
  CouplingScanOptions so;
  so.n_points = c.n_points;
  so.l_max = c.scan_l_max;
  const auto rep =
      coupling_scan(V, c.mu, linspace(c.kappa_min, c.kappa_max, c.scan_n), so);
  ResultBundle b;
  Table& t = b.add_table("coupling_scan", {"kappa", "count"});
  for (size_t i = 0; i < rep.kappa.size(); ++i)
    t.add_row({rep.kappa[i], static_cast<double>(rep.count[i])});
  b.add_scalar("kappa0", rep.kappa0);
  b.add_scalar("resonance", rep.resonance ? 1.0 : 0.0);
  b.add_scalar("count_max", static_cast<double>(rep.count.back()));
  b.add_hash("radial_mesh",
             hash_doubles({so.r_max_factor, static_cast<double>(so.n_points),
                           static_cast<double>(so.l_max)}));
  return b;
}

inline ResultBundle run_efimov_count(const ExperimentConfig& c) {
  const JacobiSystem jac = jacobi_setup(c.m1, c.m2, c.m3);
  const auto grid =
      build_momentum_grid(c.pair_n, c.pair_pmax, GridScheme::gauss_log, c.pair_inner);
  std::vector<SeparablePotential> pots;
  for (Pair a : {Pair::p12, Pair::p23, Pair::p31}) {
    const auto probe = make_yamaguchi(a, -1.0, c.beta, grid);
    pots.push_back(make_yamaguchi(a, critical_strength_on_grid(probe, jac.m(a)),
                                  c.beta, grid));
  }
  const auto pb =
      make_faddeev_problem(jac, pots, c.spectator_n, c.q_max, Cx(c.z_probe, 0.0));
  EfimovOptions eo;
  eo.z_probe = c.z_probe;
  eo.spectator_n = c.spectator_n;
  const auto rep = efimov_count(pb, c.cutoffs, eo);
  ResultBundle b;
  Table& t = b.add_table("efimov_counts", {"cutoff", "count", "top"});
  bool nondecreasing = true;
  for (size_t i = 0; i < rep.cutoffs.size(); ++i) {
    t.add_row({rep.cutoffs[i], static_cast<double>(rep.counts[i]), rep.top[i]});
    if (i > 0) nondecreasing = nondecreasing && rep.counts[i] >= rep.counts[i - 1];
  }
  const auto energies =
      efimov_energies(pb, c.cutoffs.back(), c.max_states, c.z_shallow, c.z_deep);
  Table& te = b.add_table("efimov_energies", {"index", "energy"});
  for (size_t i = 0; i < energies.size(); ++i)
    te.add_row({static_cast<double>(i + 1), energies[i]});
  Table& tr = b.add_table("efimov_ratios", {"index", "ratio"});
  for (size_t i = 0; i + 1 < energies.size(); ++i)
    tr.add_row({static_cast<double>(i + 1), energies[i + 1] / energies[i]});
  b.add_scalar("n_cutoffs", static_cast<double>(rep.cutoffs.size()));
  b.add_scalar("count_first", static_cast<double>(rep.counts.front()));
  b.add_scalar("count_last", static_cast<double>(rep.counts.back()));
  b.add_scalar("counts_nondecreasing", nondecreasing ? 1.0 : 0.0);
  b.add_scalar("n_energies", static_cast<double>(energies.size()));
  if (energies.size() >= 2)
    b.add_scalar("ratio_last", energies.back() / energies[energies.size() - 2]);
  b.add_scalar("top_last", rep.top.back());
  b.add_hash("pair_grid", hash_doubles(grid.nodes));
  b.add_hash("spectator_grid", hash_doubles(pb.spectator_grid[0].nodes));
  return b;
}

inline ResultBundle run_channel_airy(const ExperimentConfig& c) {
  const auto r = effective_channel_build(c.rho, c.v12, c.level);
  ResultBundle b;
  Table& t = b.add_table("channel_residual", {"x1", "norm_y"});
  for (size_t i = 0; i < r.residual.x1.size(); ++i)
    t.add_row({r.residual.x1[i], r.residual.norm_y[i]});
  Table& m = b.add_table("channel_mode", {"xi", "psi", "w_eff"});
  for (size_t i = 0; i < r.model.xi.size(); ++i)
    m.add_row({r.model.xi[i], r.model.psi[i], r.model.w_eff[i]});
  b.add_scalar("lambda_level", r.model.lambda_level);
  b.add_scalar("sigma", r.model.sigma);
  b.add_scalar("b", r.model.b);
  b.add_scalar("residual_exponent", r.residual.exponent);
  b.add_scalar("trivial", r.model.trivial ? 1.0 : 0.0);
  const auto& airy = airy_zero_magnitudes();
  if (c.level <= static_cast<int>(airy.size())) {
    const double pred =
        airy[c.level - 1] * std::pow(c.v12 * c.rho, 2.0 / 3.0);
    b.add_scalar("airy_prediction", pred);
    b.add_scalar("airy_rel_deviation",
                 std::abs(r.model.lambda_level - pred) / pred);
  }
  b.add_hash("xi_grid", hash_doubles(r.model.xi));
  return b;
}

inline ResultBundle run_channel_cook(const ExperimentConfig& c) {
  const auto built = effective_channel_build(c.rho, c.v12, c.level);
  CookChannelOptions co;
  co.k0 = c.k0;
  co.k_width = c.k_width;
  co.x2_max = c.x2_max;
  co.t_pow_hi = c.t_pow_hi;
  const auto r = channel_cook_probe(built.model, co);
  ResultBundle b;
  Table& t = b.add_table("channel_cook", {"t", "plain", "modified"});
  for (size_t i = 0; i < r.t.size(); ++i)
    t.add_row({r.t[i], r.plain[i], r.modified[i]});
  Table& p = b.add_table("octave_partials",
                         {"octave", "plain_increment", "modified_increment"});
  for (size_t i = 0; i < r.partial_plain.size(); ++i)
    p.add_row({static_cast<double>(i), r.partial_plain[i], r.partial_modified[i]});
  b.add_scalar("exponent_plain", r.exponent_plain);
  b.add_scalar("exponent_modified", r.exponent_modified);
  b.add_scalar("isometry_defect", r.isometry_defect);
  b.add_scalar("lambda_level", built.model.lambda_level);
  b.add_hash("xi_grid", hash_doubles(built.model.xi));
  return b;
}

}  // namespace detail

inline ResultBundle run_experiment(const ExperimentConfig& c) {
  ResultBundle b;
  const std::string& e = c.experiment;
  if (e == "phaseshift") b = detail::run_phaseshift(c);
  else if (e == "smatrix") b = detail::run_smatrix(c);
  else if (e == "born") b = detail::run_born(c);
  else if (e == "crosssection") b = detail::run_crosssection(c);
  else if (e == "propagate") b = detail::run_propagate(c);
  else if (e == "cook") b = detail::run_cook(c);
  else if (e == "moller") b = detail::run_moller(c);
  else if (e == "scattering-map") b = detail::run_scattering_map(c);
  else if (e == "faddeev-bound") b = detail::run_faddeev_bound(c);
  else if (e == "coupling-scan") b = detail::run_coupling_scan(c);
  else if (e == "efimov-count") b = detail::run_efimov_count(c);
  else if (e == "channel-airy") b = detail::run_channel_airy(c);
  else if (e == "channel-cook") b = detail::run_channel_cook(c);
  else throw config_error("unknown experiment '" + e + "'");
  b.experiment = e;
  b.config_echo = config_document(c);
  finalize_bundle(b);
  return b;
}

}  // namespace sk
