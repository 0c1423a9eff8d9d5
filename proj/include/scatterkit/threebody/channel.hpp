#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "../core/errors.hpp"
#include "../core/util.hpp"

namespace sk {

// t^{pt} x^{-px} with coefficient c
struct ChannelMonomial {
  double c = 0, pt = 0, px = 0;
};

// Effective scattering channel on the half plane x2 > 0 (Dirichlet wall at
// x2 = 0), d = 1, third particle fixed at the origin. The pair repulsion
// v12 |x1 - x2|^{-rho} linearized about x2 = 0 gives the rescaled boundary
// problem -Psi'' + b xi Psi = Lambda Psi, b = v12 rho, xi = x2 x1^{-sigma},
// and the channel energy lambda(x1) = v12 x1^{-rho} + Lambda x1^{-2 sigma}.
// The trivial variant freezes an exact pair eigenfunction instead: sigma = 0,
// lambda = Lambda constant.
struct ChannelModel {
  double rho = 0, v12 = 0;
  int level = 1;
  double sigma = 0, b = 0, lambda_level = 0;  // Lambda, absorbing b^{2/3}
  bool trivial = false;
  double well_depth = 0, well_radius = 0;

  std::vector<double> xi, psi, dpsi, w_eff;  // uniform grid, Psi normalized
  double h_xi = 0;

  std::vector<ChannelMonomial> phi, resid;  // phase correction and its defect

  double lambda_of(double x1) const {
    return v12 * std::pow(x1, -rho) + lambda_level * std::pow(x1, -2.0 * sigma);
  }
  double pair_potential(double x1, double x2) const {
    if (trivial) return x2 < well_radius ? well_depth : 0.0;
    return v12 * std::pow(std::abs(x1 - x2), -rho);
  }
  double phi_of(double x1, double t) const {
    double acc = 0;
    for (const auto& m : phi) acc += m.c * std::pow(t, m.pt) * std::pow(x1, -m.px);
    return acc;
  }
  double phi_x(double x1, double t) const {
    double acc = 0;
    for (const auto& m : phi)
      acc += -m.px * m.c * std::pow(t, m.pt) * std::pow(x1, -m.px - 1.0);
    return acc;
  }
  double phi_xx(double x1, double t) const {
    double acc = 0;
    for (const auto& m : phi)
      acc += m.px * (m.px + 1.0) * m.c * std::pow(t, m.pt) * std::pow(x1, -m.px - 2.0);
    return acc;
  }
  double resid_of(double x1, double t) const {
    double acc = 0;
    for (const auto& m : resid) acc += m.c * std::pow(t, m.pt) * std::pow(x1, -m.px);
    return acc;
  }
  double phase_Xi(double x1, double t) const {
    return x1 * x1 / (4.0 * t) + phi_of(x1, t);
  }
};

struct ChannelBuildOptions {
  int xi_n = 4000;           // boundary-problem grid points
  double xi_pad = 12.0;      // grid length past the turning point, in b^{-1/3}
  double cascade_eps = 0.5;  // drop phase sources decaying faster than t^{-1-eps}
  std::vector<double> x1_samples = {16, 32, 64, 128, 256, 512, 1024};
};

struct ChannelResidualReport {
  std::vector<double> x1, norm_y;  // ||(-d^2_{x2} + V12 - lambda) psi||(x1)
  double exponent = 0;             // fitted decay exponent, must exceed 1
};

struct ChannelBuildResult {
  ChannelModel model;
  ChannelResidualReport residual;
};

namespace detail {

// eigenvalues of the Dirichlet tridiagonal -u'' + w u strictly below e
inline int sturm_count_below(const std::vector<double>& w, double h, double e) {
  const double d2 = 2.0 / (h * h), o2 = 1.0 / (h * h * h * h);
  double q = 0;
  int count = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    q = i == 0 ? d2 + w[i] - e : d2 + w[i] - e - o2 / q;
    if (q == 0) q = 1e-300;
    if (q < 0) ++count;
  }
  return count;
}

inline double tridiag_level(const std::vector<double>& w, double h, int level) {
  double lo = *std::min_element(w.begin(), w.end()) - 1.0;
  double hi = lo + 1.0;
  for (int it = 0; it < 200 && sturm_count_below(w, h, hi) < level; ++it)
    hi = lo + 2.0 * (hi - lo);
  if (sturm_count_below(w, h, hi) < level)
    throw numerical_error("channel: eigenvalue bracket failed");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sturm_count_below(w, h, mid) >= level ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// one Thomas solve of (T - shift) u = rhs for the interior tridiagonal
inline void tridiag_solve(const std::vector<double>& w, double h, double shift,
                          std::vector<double>& u) {
  const std::size_t n = w.size();
  const double off = -1.0 / (h * h);
  std::vector<double> c(n), d(n);
  double piv = 2.0 / (h * h) + w[0] - shift;
  c[0] = off / piv;
  d[0] = u[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = 2.0 / (h * h) + w[i] - shift - off * c[i - 1];
    if (piv == 0) throw numerical_error("channel: singular inverse-iteration pivot");
    c[i] = off / piv;
    d[i] = (u[i] - off * d[i - 1]) / piv;
  }
  u[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) u[i] = d[i] - c[i] * u[i + 1];
}

inline std::vector<double> tridiag_vector(const std::vector<double>& w, double h,
                                          double e) {
  const std::size_t n = w.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(1.0 + static_cast<double>(i));
  for (int it = 0; it < 4; ++it) {
    tridiag_solve(w, h, e + 1e-10 * (1.0 + std::abs(e)), u);
    double nrm = 0;
    for (double v : u) nrm += v * v;
    nrm = std::sqrt(nrm * h);
    if (!(nrm > 0) || !std::isfinite(nrm))
      throw numerical_error("channel: inverse iteration failed");
    for (double& v : u) v /= nrm;
  }
  return u;
}

// 5-point derivative samples on the uniform grid (3-point at the edges)
inline std::vector<double> grid_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[1] = (f[2] - f[0]) / (2.0 * h);
  d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

// Solve phi_t + (x/t) phi_x + phi_x^2 + lambda = r by cancelling source
// monomials: a source c t^A x^{-B} is removed by the phase term
// -c/(A+1-B) t^{A+1} x^{-B}, whose phi_x^2 cross terms are new sources.
// Sources already decaying faster than t^{-1-eps} on x ~ t rays are kept
// as the exact defect r.
inline void phase_cascade(ChannelModel& model, double eps) {
  auto deriv = [](const ChannelMonomial& m) {
    return ChannelMonomial{-m.c * m.px, m.pt, m.px + 1.0};
  };
  auto push_merged = [](std::vector<ChannelMonomial>& list, ChannelMonomial m) {
    for (auto& e : list)
      if (std::abs(e.pt - m.pt) < 1e-12 && std::abs(e.px - m.px) < 1e-12) {
        e.c += m.c;
        return;
      }
    list.push_back(m);
  };
  std::vector<ChannelMonomial> src;
  if (model.v12 != 0 && !model.trivial) src.push_back({model.v12, 0, model.rho});
  src.push_back({model.lambda_level, 0, 2.0 * model.sigma});
  for (int guard = 0; !src.empty(); ++guard) {
    if (guard > 10000) throw numerical_error("channel: phase cascade did not terminate");
    ChannelMonomial m = src.back();
    src.pop_back();
    if (std::abs(m.c) < 1e-14) continue;
    if (m.pt - m.px < -1.0 - eps) {
      push_merged(model.resid, m);
      continue;
    }
    const double denom = m.pt + 1.0 - m.px;
    if (std::abs(denom) < 1e-9)
      throw numerical_error("channel: resonant phase monomial");
    const ChannelMonomial f{-m.c / denom, m.pt + 1.0, m.px};
    const ChannelMonomial fd = deriv(f);
    for (const auto& p : model.phi) {
      const ChannelMonomial pd = deriv(p);
      push_merged(src, {2.0 * fd.c * pd.c, fd.pt + pd.pt, fd.px + pd.px});
    }
    push_merged(src, {fd.c * fd.c, 2.0 * fd.pt, 2.0 * fd.px});
    push_merged(model.phi, f);
  }
}

}  // namespace detail

// negatives of the Airy zeros a_1..a_6
inline const std::vector<double>& airy_zero_magnitudes() {
  static const std::vector<double> z = {2.33810741045977, 4.08794944413097,
                                        5.52055982809555, 6.78670809007176,
                                        7.94413358712085, 9.02265085334098};
  return z;
}

inline ChannelBuildResult effective_channel_build(double rho, double v12, int level,
                                                  const ChannelBuildOptions& opt = {}) {
  if (!(rho > 0 && rho < 0.5))
    throw domain_error("effective_channel_build: rho must lie in (0, 1/2)");
  if (!(v12 > 0)) throw invalid_argument_error("effective_channel_build: v12 > 0 required");
  if (level < 1 || opt.xi_n < 200)
    throw invalid_argument_error("effective_channel_build: bad level or grid");
  ChannelBuildResult out;
  ChannelModel& cm = out.model;
  cm.rho = rho;
  cm.v12 = v12;
  cm.level = level;
  cm.sigma = (rho + 1.0) / 3.0;
  cm.b = v12 * rho;
  const double bs = std::pow(cm.b, -1.0 / 3.0);
  const double turn =
      level <= static_cast<int>(airy_zero_magnitudes().size())
          ? airy_zero_magnitudes()[level - 1]
          : 1.5 * level;
  const double len = (turn + opt.xi_pad) * bs;
  const int n = opt.xi_n;
  cm.h_xi = len / (n + 1);
  cm.xi.resize(n + 2);
  cm.psi.assign(n + 2, 0.0);
  cm.w_eff.resize(n + 2);
  std::vector<double> w(n);
  for (int i = 0; i < n + 2; ++i) {
    cm.xi[i] = i * cm.h_xi;
    cm.w_eff[i] = cm.b * cm.xi[i];
  }
  for (int i = 0; i < n; ++i) w[i] = cm.w_eff[i + 1];
  cm.lambda_level = detail::tridiag_level(w, cm.h_xi, level);
  auto u = detail::tridiag_vector(w, cm.h_xi, cm.lambda_level);
  if (u[1] < 0)
    for (double& v : u) v = -v;
  for (int i = 0; i < n; ++i) cm.psi[i + 1] = u[i];
  cm.dpsi = detail::grid_derivative(cm.psi, cm.h_xi);
  detail::phase_cascade(cm, opt.cascade_eps);

  // residual of the frozen channel: Y/psi has the closed form
  // x^{-2 sigma}(w_eff - Lambda) + lambda(x) - V12(x, x2)
  out.residual.x1 = opt.x1_samples;
  for (double x1 : opt.x1_samples) {
    const double xs = std::pow(x1, cm.sigma);
    double acc = 0;
    for (int i = 1; i < n + 1; ++i) {
      const double q = std::pow(x1, -2.0 * cm.sigma) * (cm.w_eff[i] - cm.lambda_level) +
                       cm.lambda_of(x1) - cm.pair_potential(x1, cm.xi[i] * xs);
      acc += cm.h_xi * q * q * cm.psi[i] * cm.psi[i];
    }
    out.residual.norm_y.push_back(std::sqrt(acc));
  }
  out.residual.exponent = -fit_power_law(out.residual.x1, out.residual.norm_y, 2.0);
  return out;
}

// Exact channel for comparison: Psi is the ground state of the half-line
// square well -u'' + W u with W = depth on (0, radius), lambda == Lambda.
inline ChannelModel make_trivial_channel(double depth, double radius, int xi_n = 4000) {
  if (!(depth < 0 && radius > 0))
    throw invalid_argument_error("make_trivial_channel: need depth < 0 < radius");
  ChannelModel cm;
  cm.trivial = true;
  cm.sigma = 0;
  cm.well_depth = depth;
  cm.well_radius = radius;
  // matching k cot(k radius) = -kappa, k^2 + kappa^2 = -depth
  const double v0 = -depth;
  double lo = 1e-9, hi = std::min(std::numbers::pi / radius, std::sqrt(v0)) - 1e-12;
  auto match = [&](double k) {
    const double kap = std::sqrt(v0 - k * k);
    return k * std::cos(k * radius) + kap * std::sin(k * radius);
  };
  if (match(lo) * match(hi) > 0)
    throw invalid_argument_error("make_trivial_channel: well holds no bound state");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (match(lo) * match(mid) <= 0 ? hi : lo) = mid;
  }
  const double k = 0.5 * (lo + hi);
  const double kap = std::sqrt(v0 - k * k);
  cm.lambda_level = -kap * kap;
  const double len = radius + 14.0 / kap;
  cm.h_xi = len / (xi_n + 1);
  cm.xi.resize(xi_n + 2);
  cm.psi.resize(xi_n + 2);
  cm.dpsi.resize(xi_n + 2);
  cm.w_eff.resize(xi_n + 2);
  const double edge = std::sin(k * radius);
  double nrm = 0;
  for (int i = 0; i < xi_n + 2; ++i) {
    const double x = i * cm.h_xi;
    cm.xi[i] = x;
    cm.w_eff[i] = x < radius ? depth : 0.0;
    if (x < radius) {
      cm.psi[i] = std::sin(k * x);
      cm.dpsi[i] = k * std::cos(k * x);
    } else {
      cm.psi[i] = edge * std::exp(-kap * (x - radius));
      cm.dpsi[i] = -kap * cm.psi[i];
    }
    nrm += cm.psi[i] * cm.psi[i] * cm.h_xi;
  }
  nrm = std::sqrt(nrm);
  for (int i = 0; i < xi_n + 2; ++i) {
    cm.psi[i] /= nrm;
    cm.dpsi[i] /= nrm;
  }
  detail::phase_cascade(cm, 0.5);
  return cm;
}

struct CookChannelOptions {
  double k0 = 2.0, k_width = 0.25;  // Gaussian \hat f_1, supported away from 0
  int n_x1 = 1024;
  int t_pow_lo = 3, t_pow_hi = 10;
  int xi_stride = 4;
  int sub_per_octave = 4;  // integrand samples per octave for Cook partials
  double x2_max = 1e5;
};

struct CookChannelReport {
  std::vector<double> t;
  std::vector<double> plain, modified;  // ||(i d_t - H) U(t) f|| traces
  double exponent_plain = 0, exponent_modified = 0;
  std::vector<double> partial_plain, partial_modified;  // per-octave increments
  double isometry_defect = 0;
};

namespace detail {

struct CookIntegrand {
  double plain = 0, modified = 0, norm = 0;
};

// One time slice of || (i d_t - H) U(t) f || for the plain evolution and the
// one carrying the extra phase exp(i sigma x2^2 / (4t)). The stationary-phase
// frame leaves amplitude coefficients of \hat f, \hat f', \hat f'': the
// common factors e^{i Xi} and the x2 phase have unit modulus and drop from
// the norm. For the modified trace the 1/t dilation terms
// x1 psi_x1 + sigma x2 psi_x2 + (sigma/2) psi cancel identically.
inline CookIntegrand cook_slice(const ChannelModel& cm, double t,
                                const CookChannelOptions& opt) {
  using Cx = std::complex<double>;
  const double sg = cm.sigma, c = -0.5 * sg;
  const double x_lo = 2.0 * t * (opt.k0 - 6.0 * opt.k_width);
  const double x_hi = 2.0 * t * (opt.k0 + 6.0 * opt.k_width);
  const double dx = (x_hi - x_lo) / opt.n_x1;
  const double nf = 1.0 / std::sqrt(opt.k_width * std::sqrt(std::numbers::pi));
  const double wq = cm.h_xi * opt.xi_stride;
  const std::size_t nxi = cm.xi.size();
  std::vector<double> row_p(opt.n_x1), row_m(opt.n_x1), row_n(opt.n_x1);
  parallel_for(static_cast<std::size_t>(opt.n_x1), [&](std::size_t ii) {
    const double x = x_lo + (ii + 0.5) * dx;
    const double k = x / (2.0 * t);
    const double u = (k - opt.k0) / opt.k_width;
    const double f0 = nf * std::exp(-0.5 * u * u);
    const double f1 = f0 * (-u / opt.k_width);
    const double f2 = f0 * ((u * u - 1.0) / (opt.k_width * opt.k_width));
    const double xs = std::pow(x, sg);
    const double xc = std::pow(x, c);
    const double lam = cm.lambda_of(x);
    const double px = cm.phi_x(x, t);
    const double pxx = cm.phi_xx(x, t);
    const double rv = cm.resid_of(x, t);
    double sp = 0, sm = 0, sn = 0;
    for (std::size_t j = opt.xi_stride; j + 1 < nxi;
         j += static_cast<std::size_t>(opt.xi_stride)) {
      const double xi = cm.xi[j];
      const double ps = cm.psi[j];
      if (ps == 0) continue;
      const double dps = cm.dpsi[j];
      const double pps = (cm.w_eff[j] - cm.lambda_level) * ps;
      const double x2 = xi * xs;
      const double psi = xc * ps;
      const double psi_x1 = std::pow(x, c - 1.0) * (c * ps - sg * xi * dps);
      const double psi_x1x1 =
          std::pow(x, c - 2.0) *
          (c * (c - 1.0) * ps - sg * (2.0 * c - 1.0 - sg) * xi * dps +
           sg * sg * xi * xi * pps);
      const double q = std::pow(x, -2.0 * sg) * (cm.w_eff[j] - cm.lambda_level) + lam -
                       cm.pair_potential(x, x2);
      const Cx b1p = psi * q + psi * Cx(-rv, pxx) + psi_x1x1 +
                     2.0 * psi_x1 * Cx(0.0, x / (2.0 * t) + px);
      const Cx b1m = psi * q + psi * Cx(-rv, pxx) + psi_x1x1 +
                     2.0 * psi_x1 * Cx(0.0, px) +
                     sg * (1.0 - sg) * x2 * x2 / (4.0 * t * t) * psi;
      const Cx a1 = Cx(psi_x1 / t, psi * px / t);
      const double a2 = psi / (4.0 * t * t);
      const Cx vp = b1p * f0 + a1 * f1 + a2 * f2;
      const Cx vm = b1m * f0 + a1 * f1 + a2 * f2;
      sp += std::norm(vp);
      sm += std::norm(vm);
      sn += psi * psi * f0 * f0;
    }
    row_p[ii] = sp * wq * xs;
    row_m[ii] = sm * wq * xs;
    row_n[ii] = sn * wq * xs;
  });
  CookIntegrand out;
  for (int ii = 0; ii < opt.n_x1; ++ii) {
    out.plain += row_p[ii];
    out.modified += row_m[ii];
    out.norm += row_n[ii];
  }
  const double measure = dx / (2.0 * t);
  out.plain = std::sqrt(out.plain * measure);
  out.modified = std::sqrt(out.modified * measure);
  out.norm = std::sqrt(out.norm * measure);
  return out;
}

}  // namespace detail

inline CookChannelReport channel_cook_probe(const ChannelModel& cm,
                                            const CookChannelOptions& opt = {}) {
  if (!(opt.k0 - 6.0 * opt.k_width > 0))
    throw invalid_argument_error("channel_cook_probe: momentum window touches zero");
  if (opt.t_pow_hi <= opt.t_pow_lo || opt.n_x1 < 16 || opt.xi_stride < 1)
    throw invalid_argument_error("channel_cook_probe: bad sampling parameters");
  const double t_max = std::pow(2.0, opt.t_pow_hi);
  const double x_max = 2.0 * t_max * (opt.k0 + 6.0 * opt.k_width);
  if (cm.xi.back() * std::pow(x_max, cm.sigma) > opt.x2_max)
    throw horizon_error("channel_cook_probe: x2 extent exceeds the grid horizon");
  CookChannelReport rep;
  for (int p = opt.t_pow_lo; p <= opt.t_pow_hi; ++p) {
    const double t = std::pow(2.0, p);
    auto slice = detail::cook_slice(cm, t, opt);
    rep.t.push_back(t);
    rep.plain.push_back(slice.plain);
    rep.modified.push_back(slice.modified);
    if (p == opt.t_pow_lo) rep.isometry_defect = std::abs(slice.norm - 1.0);
  }
  // per-octave Cook increments int_{2^p}^{2^{p+1}} ||...|| dt by the
  // trapezoid rule on sub_per_octave geometric sub-samples
  for (int p = opt.t_pow_lo; p < opt.t_pow_hi; ++p) {
    double accp = 0, accm = 0;
    double tprev = std::pow(2.0, p);
    auto prev = detail::cook_slice(cm, tprev, opt);
    for (int s = 1; s <= opt.sub_per_octave; ++s) {
      const double tcur =
          std::pow(2.0, p + static_cast<double>(s) / opt.sub_per_octave);
      auto cur = detail::cook_slice(cm, tcur, opt);
      accp += 0.5 * (prev.plain + cur.plain) * (tcur - tprev);
      accm += 0.5 * (prev.modified + cur.modified) * (tcur - tprev);
      tprev = tcur;
      prev = cur;
    }
    rep.partial_plain.push_back(accp);
    rep.partial_modified.push_back(accm);
  }
  rep.exponent_plain = -fit_power_law(rep.t, rep.plain, 1.0);
  rep.exponent_modified = -fit_power_law(rep.t, rep.modified, 1.0);
  return rep;
}

}  // namespace sk
