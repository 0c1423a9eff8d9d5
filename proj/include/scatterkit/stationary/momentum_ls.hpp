#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "../core/errors.hpp"
#include "../core/grid.hpp"
#include "../core/potential.hpp"
#include "../core/special.hpp"
#include "../core/util.hpp"
#include "partialwave.hpp"

namespace sk {

struct MomentumLSOptions {
  double p_max = 120.0;
  int n_low = 96;    // nodes on [0, 2k]; kept even so none lands on the shell
  int n_high = 192;  // nodes on [2k, p_max]
  double nodes_per_wavelength = 6.0;  // radial quadrature density for v
  double tail_eps = 1e-12;
  double r_cap = 60.0;
};

// (2/pi) int j_l(p r) V(r) j_l(p' r) r^2 dr on [0, r_cut] for all pairs from
// `p`, via a shared panel rule resolving the fastest oscillation. A taper
// start below r_cut applies the shared truncation window.
inline Eigen::MatrixXd potential_matrix(const Potential& V, int l,
                                        const std::vector<double>& p, double r_cut,
                                        double nodes_per_wavelength,
                                        double taper_from = -1.0) {
  StationaryCutoff cut;
  cut.r_cut = r_cut;
  cut.taper_from = taper_from >= 0 && taper_from < r_cut ? taper_from : r_cut;
  double pmax = 0;
  for (double v : p) pmax = std::max(pmax, v);
  const double waves = r_cut * 2.0 * pmax / (2.0 * pi) + 1.0;
  const int panels = static_cast<int>(std::ceil(waves * nodes_per_wavelength / 12.0)) + 1;
  std::vector<double> inner;
  for (int i = 1; i < panels; ++i) inner.push_back(r_cut * i / panels);
  for (double b : V.breakpoints()) inner.push_back(b);
  if (cut.taper_from > 0 && cut.taper_from < r_cut) inner.push_back(cut.taper_from);
  std::sort(inner.begin(), inner.end());
  std::vector<double> rq, wq;
  composite_gauss(0.0, r_cut, inner, 12, rq, wq);
  const int nq = static_cast<int>(rq.size());
  const int np = static_cast<int>(p.size());
  Eigen::MatrixXd B(nq, np);
  parallel_for(np, [&](size_t j) {
    for (int q = 0; q < nq; ++q) B(q, j) = sph_bessel_j_scalar(l, p[j] * rq[q]);
  });
  Eigen::VectorXd m(nq);
  for (int q = 0; q < nq; ++q)
    m(q) = wq[q] * V(rq[q]) * cut.window(rq[q]) * rq[q] * rq[q];
  return (2.0 / pi) * B.transpose() * m.asDiagonal() * B;
}

namespace detail {

// Discretized half-on-shell system T = b + M T with the on-shell node last;
// the principal-value pole is handled by subtraction plus the analytic
// truncation and i*pi terms.
struct MomentumKernel {
  int l = 0;
  double k = 0, p_max = 0;
  std::vector<double> q, w;  // integration nodes/weights, size n
  Eigen::MatrixXd v;         // (n+1) x (n+1), last row/col at p = k
  Eigen::MatrixXcd m;
  Eigen::VectorXcd b;
};

inline MomentumKernel build_momentum_kernel(const Potential& V, double k, int l,
                                            const MomentumLSOptions& opt) {
  if (!(k > 0)) throw invalid_argument_error("momentum_ls: k > 0 required");
  if (!(opt.p_max > 2 * k))
    throw invalid_argument_error("momentum_ls: p_max must exceed 2k");
  MomentumKernel K;
  K.l = l;
  K.k = k;
  K.p_max = opt.p_max;
  const int n_low = opt.n_low + (opt.n_low % 2);  // even: no node at q = k
  std::vector<double> gx, gw;
  gauss_legendre(n_low, gx, gw);
  for (int i = 0; i < n_low; ++i) {
    K.q.push_back(k * (gx[i] + 1.0));
    K.w.push_back(k * gw[i]);
  }
  gauss_legendre(opt.n_high, gx, gw);
  for (int i = 0; i < opt.n_high; ++i) {
    K.q.push_back(0.5 * (opt.p_max + 2 * k) + 0.5 * (opt.p_max - 2 * k) * gx[i]);
    K.w.push_back(0.5 * (opt.p_max - 2 * k) * gw[i]);
  }
  const int n = static_cast<int>(K.q.size());
  std::vector<double> p = K.q;
  p.push_back(k);
  const auto cut = stationary_cutoff(V, opt.tail_eps, opt.r_cap);
  K.v = potential_matrix(V, l, p, cut.r_cut, opt.nodes_per_wavelength, cut.taper_from);

  double pv_sum = 0;
  for (int j = 0; j < n; ++j) pv_sum += K.w[j] / (k * k - K.q[j] * K.q[j]);
  const double pv_exact = std::log((opt.p_max + k) / (opt.p_max - k)) / (2.0 * k);
  const complexd shell_coef =
      -k * k * pv_sum + k * k * pv_exact - complexd(0, 1) * pi * k / 2.0;

  K.m.resize(n + 1, n + 1);
  K.b.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j < n; ++j)
      K.m(i, j) = K.w[j] * K.q[j] * K.q[j] * K.v(i, j) / (k * k - K.q[j] * K.q[j]);
    K.m(i, n) = shell_coef * K.v(i, n);
    K.b(i) = K.v(i, n);
  }
  return K;
}

}  // namespace detail

struct MomentumLSResult {
  int l = 0;
  double k = 0;
  complexd t_on;     // on-shell T(k,k)
  complexd s;        // 1 - i pi k t_on
  double delta = 0;  // principal branch in (-pi/2, pi/2]
  double unitarity_defect = 0;
};

inline MomentumLSResult momentum_ls(const Potential& V, double k, int l,
                                    const MomentumLSOptions& opt = {}) {
  auto K = detail::build_momentum_kernel(V, k, l, opt);
  const int n = static_cast<int>(K.q.size());
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n + 1, n + 1) - K.m;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  if (lu.rcond() < 1e-13)
    throw numerical_error("momentum_ls: singular kernel; energy near a resonance of the discretization");
  Eigen::VectorXcd u = lu.solve(K.b);
  MomentumLSResult out;
  out.l = l;
  out.k = k;
  out.t_on = u(n);
  out.s = 1.0 - complexd(0, 1) * pi * k * out.t_on;
  out.delta = 0.5 * std::arg(out.s);
  if (out.delta <= -0.5 * pi) out.delta += pi;
  out.unitarity_defect = std::abs(std::abs(out.s) - 1.0);
  return out;
}

}  // namespace sk
