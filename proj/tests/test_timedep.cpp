#include <algorithm>
#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <scatterkit/core.hpp>
#include <scatterkit/timedep.hpp>

using namespace sk;

namespace {

// closed-form free evolution of a Gaussian packet under the e^{-i xi^2 t} multiplier
Wavepacket gaussian_free_closed_form(const Wavepacket& like, double x0, double xi0,
                                     double w, double t) {
  Wavepacket u = like;
  const double N = std::pow(2.0 * pi * w * w, -0.25);
  const complexd A(1.0 / (4.0 * w * w), -1.0 / (4.0 * t));
  const complexd scale = N / std::sqrt(complexd(1.0, t / (w * w)));
  for (size_t i = 0; i < u.size(); ++i) {
    const double X = u.x(i) - x0;
    const double b = xi0 - X / (2.0 * t);
    u.samples[i] = scale * std::exp(complexd(0, X * X / (4.0 * t)) - b * b / (4.0 * A));
  }
  u.recompute_norm();
  return u;
}

// transmission probability of the depth-2 radius-1 well at wave number xi
double square_well_transmission(double xi) {
  const double kp = std::sqrt(xi * xi + 2.0);
  const double s = std::sin(2.0 * kp);
  return 1.0 / (1.0 + 4.0 * s * s / (4.0 * xi * xi * kp * kp));
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

TEST_CASE("gaussian packet construction and fourier identities") {
  Box1D box{-60, 60};
  auto f = make_gaussian_packet(2048, box, -5.0, 1.0, 1.5);
  CHECK(f.norm == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(f.dx == Catch::Approx(120.0 / 2048).epsilon(1e-15));
  CHECK(boundary_mass_fraction(f) < 1e-15);

  auto fh = fourier_samples(f);
  double plancherel = 0;
  const double dxi = 2.0 * pi / (f.size() * f.dx);
  for (const auto& c : fh) plancherel += std::norm(c) * dxi;
  CHECK(plancherel == Catch::Approx(1.0).epsilon(1e-12));

  // spectral density of exp(-x^2/(4w^2) + i xi0 x) peaks at xi0 with spread 1/(2w)
  CHECK(xi_quantile(f, 0.5) == Catch::Approx(1.0).margin(0.25));
  CHECK(xi_mass_below(f, 0.1) < 0.02);
  CHECK(xi_mass_below(f, 3.0) > 0.999);

  Wavepacket other = make_gaussian_packet(1024, box, 0.0, 0.0, 1.0);
  CHECK_THROWS_AS(l2_distance(f, other), invalid_argument_error);
}

TEST_CASE("bandlimit removes the low band and renormalizes") {
  Box1D box{-1000, 1000};
  auto f0 = make_gaussian_packet(8192, box, 0.0, 2.0, 1.5);
  auto f = bandlimit_below(f0, 1.0, 0.5);
  CHECK(f.norm == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(xi_mass_below(f, 1.0) < 1e-12);
  CHECK(l2_distance(f, f0) < 0.1);
}

TEST_CASE("free evolution matches the gaussian closed form") {
  Box1D box{-60, 60};
  auto f = make_gaussian_packet(2048, box, -5.0, 1.0, 1.5);
  auto u = propagate_free(f, 3.0);
  auto ref = gaussian_free_closed_form(f, -5.0, 1.0, 1.5, 3.0);
  CHECK(l2_distance(u, ref) < 1e-10);
  CHECK(u.norm == Catch::Approx(1.0).epsilon(1e-12));

  auto id = propagate_free(f, 0.0);
  CHECK(l2_distance(id, f) < 1e-13);
}

TEST_CASE("free evolution is ballistic: mass concentrates in the velocity wedge") {
  Box1D box{-300, 300};
  auto f = make_gaussian_packet(2048, box, 0.0, 1.5, 2.0);
  const double t = 40.0;
  auto u = propagate_free(f, t);
  CHECK(mass_fraction_within(u, 1.0 * t, 5.0 * t) > 0.95);
  CHECK(mass_fraction_within(u, -t, t) < 0.01);
}

TEST_CASE("high-pass packets vacate the classically forbidden region fast") {
  Box1D box{-1000, 1000};
  auto f0 = make_gaussian_packet(8192, box, 0.0, 2.0, 1.5);
  auto f = bandlimit_below(f0, 1.0, 0.5);
  std::vector<double> ts{2, 4, 8, 16, 32}, ms;
  for (double t : ts) {
    auto u = propagate_free(f, t);
    ms.push_back(mass_fraction_within(u, -t / 2.0, t / 2.0));
  }
  // group speed is at least 2 on the support, so |x| <= t/2 drains superpolynomially
  CHECK(strictly_decreasing(ms));
  CHECK(-fit_power_law(ts, ms, 10.0) > 4.0);
}

TEST_CASE("strang splitting holds norm and energy on a smooth well") {
  Box1D box{-150, 150};
  auto f = make_gaussian_packet(4096, box, -20.0, 1.5, 2.0);
  auto V = preset_potential("gaussian");
  EvolutionConfig cfg;
  auto vr = sample_potential(V, f);
  const double e0 = energy_expectation(f, vr);
  auto u = propagate_full(f, V, cfg, 20.0);
  CHECK(std::abs(u.norm - 1.0) < 1e-9);
  CHECK(std::abs(energy_expectation(u, vr) - e0) < 1e-8);
}

TEST_CASE("strang splitting with zero potential reproduces the exact multiplier") {
  Box1D box{-150, 150};
  auto f = make_gaussian_packet(2048, box, -20.0, 1.0, 2.0);
  EvolutionConfig cfg;
  auto a = propagate_full(f, preset_potential("zero"), cfg, 10.0);
  auto b = propagate_free(f, 10.0);
  CHECK(l2_distance(a, b) < 1e-8);

  cfg.scheme = EvolutionScheme::exact_free_multiplier;
  auto c = propagate_full(f, preset_potential("zero"), cfg, 10.0);
  CHECK(l2_distance(c, b) < 1e-12);
}

TEST_CASE("full evolution is unitary on random packets") {
  Box1D box{-120, 120};
  auto V = preset_potential("gaussian");
  EvolutionConfig cfg;
  // packets launched on top of the well see a larger splitting transient
  cfg.energy_drift_tol = 1e-6;
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> ux(-15.0, 15.0), uxi(-2.0, 2.0), uw(1.0, 2.5);
  for (int k = 0; k < 20; ++k) {
    auto f = make_gaussian_packet(1024, box, ux(rng), uxi(rng), uw(rng));
    auto u = propagate_full(f, V, cfg, 1.0);
    CHECK(std::abs(u.norm - 1.0) < 1e-10);
  }
}

TEST_CASE("bound eigenvector evolves by a pure phase at second order in dt") {
  Box1D box{-40, 40};
  const size_t n = 512;
  auto V = preset_potential("gaussian");
  auto bs = bound_states_1d(V, n, box);
  REQUIRE(bs.size() == 1);
  CHECK(bs[0].energy == Catch::Approx(-0.736357798240).margin(1e-9));

  auto f = to_wavepacket(bs[0], box);
  Wavepacket ref = f;
  const complexd ph = std::exp(complexd(0, -bs[0].energy * 2.0));
  for (auto& v : ref.samples) v *= ph;

  double err[2];
  int i = 0;
  for (double dt : {4e-4, 2e-4}) {
    EvolutionConfig cfg;
    cfg.dt = dt;
    err[i++] = l2_distance(propagate_full(f, V, cfg, 2.0), ref);
  }
  CHECK(err[1] < 5e-8);
  CHECK(err[0] / err[1] == Catch::Approx(4.0).margin(0.7));
}

TEST_CASE("dense hamiltonian is symmetric and bound-state projection is orthogonal") {
  Box1D box{-75, 75};
  auto V = preset_potential("gaussian");
  auto H = dense_hamiltonian_1d(V, 128, box);
  double asym = 0;
  for (int a = 0; a < 128; ++a)
    for (int b = 0; b < a; ++b) asym = std::max(asym, std::abs(H(a, b) - H(b, a)));
  CHECK(asym < 1e-12);

  auto bs = bound_states_1d(V, 256, box);
  REQUIRE(bs.size() == 1);
  CHECK(bs[0].energy == Catch::Approx(-0.736358393964).margin(1e-8));

  auto f0 = make_gaussian_packet(256, box, 0.0, 0.5, 2.0);
  auto f = project_out_bound_states(f0, bs);
  complexd ip = 0;
  for (size_t j = 0; j < f.size(); ++j) ip += bs[0].vec[j] * f.samples[j] * f.dx;
  CHECK(std::abs(ip) < 1e-12);
}

TEST_CASE("dollard evolution with trivial phase converges to the free one") {
  Box1D box{-2000, 2000};
  auto f = make_gaussian_packet(4096, box, 0.0, 0.0, 2.0);
  auto ph = make_short_range_phase();
  std::vector<double> ts{50, 100, 200, 400}, errs;
  for (double t : ts) {
    auto a = dollard_free(f, t, ph);
    CHECK(std::abs(a.norm - 1.0) < 1e-6);
    errs.push_back(l2_distance(a, propagate_free(f, t)));
  }
  // the stationary-phase correction decays like 1/t
  CHECK(fit_power_law(ts, errs, 10.0) == Catch::Approx(-1.0).margin(0.15));
  CHECK(errs.back() < 1e-2);
}

TEST_CASE("cook integrals converge for short range and stall for coulomb tails") {
  Box1D box{-900, 900};
  auto f = make_gaussian_packet(8192, box, 0.0, 1.5, 3.0);
  CookOptions co;

  auto g = cook_integral(preset_potential("power-tail-15"), f, 64.0, co);
  CHECK(g.cauchy);
  CHECK(g.fit_exponent == Catch::Approx(1.5).margin(0.15));
  CHECK(g.last_doubling_increment < 0.75 * g.prev_doubling_increment);

  auto p = cook_integral(preset_potential("power-tail-2"), f, 64.0, co);
  CHECK(p.cauchy);
  CHECK(p.fit_exponent == Catch::Approx(2.0).margin(0.15));

  auto c = cook_integral(preset_potential("truncated-coulomb"), f, 64.0, co);
  CHECK_FALSE(c.cauchy);
  CHECK(c.fit_exponent == Catch::Approx(1.0).margin(0.15));
  CHECK(c.last_doubling_increment > 0.9 * c.prev_doubling_increment);
}

TEST_CASE("cook integral rejects packets with mass below the momentum floor") {
  Box1D box{-900, 900};
  auto slow = make_gaussian_packet(4096, box, 0.0, 0.0, 2.0);
  CookOptions co;
  CHECK_THROWS_AS(cook_integral(preset_potential("gaussian"), slow, 64.0, co),
                  domain_error);
}

TEST_CASE("moller estimates converge for a short-range tail") {
  Box1D box{-600, 600};
  auto f0 = make_gaussian_packet(2048, box, 0.0, 1.5, 2.0);
  MollerOptions mo;
  mo.cfg.energy_drift_tol = 1e-7;
  auto r = moller_estimate(preset_potential("power-tail-2"), f0,
                           {1, 2, 4, 8, 16, 32, 64}, mo);
  REQUIRE(r.residuals.size() == 6);
  CHECK(strictly_decreasing(r.residuals));
  CHECK(r.residuals.back() / r.residuals.front() < 0.03);
  CHECK(r.residuals.back() < 1.5e-3);
  CHECK(r.isometry_defect < 1e-8);
  CHECK(std::abs(r.energy_out - r.energy_in) < 1e-3);
}

TEST_CASE("coulomb tail stalls the plain moller sequence and the log phase repairs it") {
  Box1D box{-600, 600};
  auto f0 = make_gaussian_packet(2048, box, 0.0, 1.5, 2.0);
  auto V = preset_potential("truncated-coulomb");
  MollerOptions mo;
  mo.cfg.energy_drift_tol = 1e-7;
  const std::vector<double> hs{1, 2, 4, 8, 16, 32, 64};

  auto plain = moller_estimate(V, f0, hs, mo);
  const auto& pr = plain.residuals;
  CHECK(pr.back() > 0.05);
  CHECK(pr.back() > 0.9 * pr[pr.size() - 2]);

  mo.modifier = make_coulomb_log_phase(0.4);
  auto mod = moller_estimate(V, f0, hs, mo);
  CHECK(strictly_decreasing(mod.residuals));
  CHECK(mod.residuals.back() < 0.05);
  CHECK(mod.residuals.back() < 0.5 * pr.back());
  CHECK(mod.isometry_defect < 1e-8);
}

TEST_CASE("scattering map reproduces the square-well transmission probability") {
  // 21 samples span the well exactly when dx = 2/21, so the sampled width is sharp
  const double dx = 2.0 / 21.0;
  const size_t n = 4096;
  Box1D box{-0.5 * n * dx, 0.5 * n * dx};
  auto f0 = make_gaussian_packet(n, box, 0.0, 1.5, 2.0);
  ScatteringMapOptions so;
  so.cfg.T = 16.0;
  so.report_times = {4, 8, 12, 16};
  auto r = scattering_map(preset_potential("square-well"), f0, so);

  const auto fh = fft(f0.samples);
  double tsum = 0, wsum = 0;
  for (size_t j = 0; j < fh.size(); ++j) {
    const double xi = fourier_xi(j, fh.size(), f0.dx);
    if (xi <= 0) continue;
    const double w = std::norm(fh[j]);
    tsum += w * square_well_transmission(xi);
    wsum += w;
  }
  const double closed = tsum / wsum;
  CHECK(std::abs(r.transmitted_fraction - closed) / closed < 0.02);
  CHECK(r.transmitted_fraction + r.reflected_fraction == Catch::Approx(1.0).epsilon(1e-12));

  CHECK(std::abs(r.norm_ratio - 1.0) < 1e-6);
  CHECK(r.captured_fraction < 1e-6);
  CHECK(r.spectral_l1_defect < 1e-3);

  REQUIRE(r.free_data_residuals.size() == 3);
  CHECK(strictly_decreasing(r.free_data_residuals));
  CHECK(r.free_data_residuals.back() < 5e-4);
}

TEST_CASE("eikonal residuals follow the phase-potential pairing") {
  EikonalRegion reg;
  reg.times = {8, 16, 32, 64, 128, 256};

  auto zero = eikonal_residual(make_short_range_phase(), preset_potential("zero"), reg);
  for (double s : zero.sup_residual) CHECK(s == 0.0);
  CHECK(std::isinf(zero.fit_exponent));

  auto tc = preset_potential("truncated-coulomb");
  auto clog = eikonal_residual(make_coulomb_log_phase(0.4), tc, reg);
  CHECK(clog.fit_exponent == Catch::Approx(1.44).margin(0.25));
  auto bare = eikonal_residual(make_short_range_phase(), tc, reg);
  CHECK(bare.fit_exponent == Catch::Approx(1.0).margin(0.15));
  CHECK(clog.fit_exponent > bare.fit_exponent + 0.3);

  EikonalRegion late;
  late.times = {2048, 4096, 8192, 16384, 32768, 65536};
  auto pt = make_power_tail(0.5, 0.8);
  auto avg = eikonal_residual(make_average_potential_phase(pt), pt, late);
  CHECK(avg.fit_exponent == Catch::Approx(1.6).margin(0.3));
}

TEST_CASE("smoothness integral saturates on the projected continuous part") {
  Box1D box{-600, 600};
  const size_t n = 2048;
  auto V = preset_potential("gaussian");

  // the sub grid shares the spacing 75/128 = 600/1024, so its eigenvector embeds exactly
  Box1D sub{-75, 75};
  auto bs_sub = bound_states_1d(V, 256, sub);
  REQUIRE(bs_sub.size() == 1);
  std::vector<BoundState1D> bs(1);
  bs[0].energy = bs_sub[0].energy;
  bs[0].vec.assign(n, 0.0);
  for (size_t j = 0; j < 256; ++j) bs[0].vec[896 + j] = bs_sub[0].vec[j];

  auto f0 = make_gaussian_packet(n, box, 0.0, 2.0, 2.0);
  auto f = project_out_bound_states(f0, bs);
  for (auto& v : f.samples) v /= f.norm;
  f.recompute_norm();

  SmoothnessOptions so;
  so.horizons = {8, 16, 32, 64};
  // the initial transit over the well sheds a fast spectral tail of mass ~1e-5
  // that reaches the box edge near the last horizon; it carries no weight here
  so.cfg.leak_tolerance = 1e-4;

  auto a = smoothness_integral(V, f, so);
  REQUIRE(a.partials.size() == 4);
  CHECK(a.saturated);
  CHECK_FALSE(a.inconclusive);
  CHECK(a.last_growth < 0.01);
  CHECK(a.partials.back() == Catch::Approx(0.798).margin(0.005));

  so.r = 0.3;
  auto c = smoothness_integral(V, f, so);
  CHECK_FALSE(c.saturated);
  CHECK(c.inconclusive);
}

TEST_CASE("smoothness integral grows linearly on a bound state") {
  Box1D sub{-75, 75};
  auto V = preset_potential("gaussian");
  auto bs = bound_states_1d(V, 256, sub);
  auto fb = to_wavepacket(bs[0], sub);
  SmoothnessOptions so;
  so.horizons = {8, 16, 32, 64};
  auto b = smoothness_integral(V, fb, so);
  REQUIRE(b.partials.size() == 4);
  CHECK_FALSE(b.saturated);
  CHECK_FALSE(b.inconclusive);
  // each horizon doubling doubles the integral
  CHECK(b.last_growth == Catch::Approx(0.5).margin(0.01));
  CHECK(b.partials[3] / b.partials[2] == Catch::Approx(2.0).margin(0.02));
}

TEST_CASE("smoothness integral reports inconclusive when the box leaks") {
  Box1D box{-100, 100};
  auto V = preset_potential("gaussian");
  auto f = make_gaussian_packet(512, box, 0.0, 2.0, 2.0);
  SmoothnessOptions so;
  so.horizons = {8, 16, 32, 64};
  auto r = smoothness_integral(V, f, so);
  CHECK(r.inconclusive);
  CHECK(r.partials.size() < 4);
}

TEST_CASE("configuration and domain errors are rejected") {
  Box1D box{-60, 60};
  auto f = make_gaussian_packet(2048, box, 0.0, 1.0, 2.0);
  auto V = preset_potential("gaussian");

  EvolutionConfig bad;
  bad.dt = 3e-3;
  CHECK_THROWS_AS(propagate_full(f, V, bad, 1.0), invalid_argument_error);

  CHECK_THROWS_AS(propagate_free(f, 1e6), box_too_small_error);

  EvolutionConfig exact;
  exact.scheme = EvolutionScheme::exact_free_multiplier;
  CHECK_THROWS_AS(propagate_full(f, V, exact, 1.0), invalid_argument_error);

  // the grid contains x = 0, where the yukawa factor diverges
  CHECK_THROWS_AS(sample_potential(preset_potential("yukawa"), f), invalid_argument_error);

  MollerOptions mo;
  CHECK_THROWS_AS(moller_estimate(V, f, {4, 2}, mo), invalid_argument_error);

  SmoothnessOptions so;
  so.horizons = {8, 16, 24};
  CHECK_THROWS_AS(smoothness_integral(V, f, so), invalid_argument_error);

  EikonalRegion reg;
  reg.times = {8, 16, 32};
  reg.c1 = 2.0;
  reg.c2 = 0.5;
  CHECK_THROWS_AS(eikonal_residual(make_short_range_phase(), V, reg),
                  invalid_argument_error);
}
