#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "../core/errors.hpp"
#include "../core/grid.hpp"
#include "../core/potential.hpp"
#include "../core/util.hpp"

namespace sk {

// s-wave half-line finite differences on midpoint nodes, Dirichlet at both
// ends (odd reflection through r = 0).
struct RadialFD {
  double R = 0, h = 0;
  std::vector<double> diag;
  double off = 0;
  int n() const { return static_cast<int>(diag.size()); }
};

inline RadialFD build_radial_fd(const Potential& V, double R, int n) {
  if (n < 3 || !(R > 0)) throw invalid_argument_error("build_radial_fd: bad size");
  RadialFD H;
  H.R = R;
  H.h = R / n;
  H.off = -1.0 / (H.h * H.h);
  H.diag.resize(n);
  for (int i = 0; i < n; ++i)
    H.diag[i] = 2.0 / (H.h * H.h) + V((i + 0.5) * H.h);
  H.diag.front() += 1.0 / (H.h * H.h);
  H.diag.back() += 1.0 / (H.h * H.h);
  return H;
}

// Sturm count: number of eigenvalues below x.
inline int eigencount_below(const RadialFD& H, double x) {
  int count = 0;
  double d = 1.0;
  const double o2 = H.off * H.off;
  for (int i = 0; i < H.n(); ++i) {
    d = (H.diag[i] - x) - (i > 0 ? o2 / d : 0.0);
    if (d == 0) d = -1e-300;
    if (d < 0) ++count;
  }
  return count;
}

inline double nearest_eigenvalue(const RadialFD& H, double x) {
  double lo_bound = H.diag[0], hi_bound = H.diag[0];
  for (double d : H.diag) {
    lo_bound = std::min(lo_bound, d);
    hi_bound = std::max(hi_bound, d);
  }
  lo_bound -= 2.0 * std::abs(H.off) + 1.0;
  hi_bound += 2.0 * std::abs(H.off) + 1.0;
  const int cx = eigencount_below(H, x);
  auto bisect = [&](double a, double b, int target) {
    // eigenvalue index `target` (0-based) inside (a, b)
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (eigencount_below(H, m) > target) b = m;
      else a = m;
      if (b - a < 1e-13 * (1.0 + std::abs(m))) break;
    }
    return 0.5 * (a + b);
  };
  double best = std::numeric_limits<double>::infinity();
  if (cx > 0) {
    const double below = bisect(lo_bound, x, cx - 1);
    best = std::min(best, std::abs(x - below));
  }
  if (cx < H.n()) {
    const double above = bisect(x, hi_bound, cx);
    best = std::min(best, std::abs(x - above));
  }
  if (!std::isfinite(best)) throw numerical_error("nearest_eigenvalue: empty spectrum");
  return best;
}

inline Eigen::MatrixXd dense_hamiltonian(const Potential& V, const RadialGrid& g) {
  if (g.scheme != GridScheme::uniform_midpoint)
    throw invalid_argument_error("dense_hamiltonian: uniform midpoint grid required");
  const int n = static_cast<int>(g.size());
  const double h = g.extent / n;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = 2.0 / (h * h) + V(g.nodes[i]);
    if (i > 0) H(i, i - 1) = -1.0 / (h * h);
    if (i + 1 < n) H(i, i + 1) = -1.0 / (h * h);
  }
  H(0, 0) += 1.0 / (h * h);
  H(n - 1, n - 1) += 1.0 / (h * h);
  return H;
}

// Dense discretized <x>^{-r} R(z) <x>^{-r} on a small radial grid.
struct SandwichedResolvent {
  complexd z;
  double r_weight = 0;
  RadialGrid grid;
  Eigen::MatrixXcd matrix;
};

inline SandwichedResolvent sandwiched_resolvent(const Potential& V,
                                                const RadialGrid& g, complexd z,
                                                double r_weight) {
  if (!(r_weight > 0.5))
    throw invalid_argument_error("sandwiched_resolvent: weight must exceed 1/2");
  const Eigen::MatrixXd H = dense_hamiltonian(V, g);
  if (z.imag() == 0) {
    RadialFD fd = build_radial_fd(V, g.extent, static_cast<int>(g.size()));
    if (nearest_eigenvalue(fd, z.real()) < 1e-9)
      throw excluded_energy_error("sandwiched_resolvent: z on a discrete eigenvalue");
  }
  const int n = static_cast<int>(g.size());
  Eigen::MatrixXcd A = H.cast<complexd>();
  A.diagonal().array() -= z;
  Eigen::MatrixXcd R = A.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));
  Eigen::VectorXcd w(n);
  for (int i = 0; i < n; ++i)
    w(i) = std::pow(1.0 + g.nodes[i] * g.nodes[i], -r_weight / 2.0);
  SandwichedResolvent out;
  out.z = z;
  out.r_weight = r_weight;
  out.grid = g;
  out.matrix = w.asDiagonal() * R * w.asDiagonal();
  return out;
}

// || R+ - R- - 2 i eps R+ R- ||_F / ||R+||_F on the dense discretization.
inline double hilbert_identity_residual(const Potential& V, const RadialGrid& g,
                                        double lambda, double eps) {
  const Eigen::MatrixXd H = dense_hamiltonian(V, g);
  const int n = static_cast<int>(g.size());
  Eigen::MatrixXcd Ap = H.cast<complexd>(), Am = H.cast<complexd>();
  Ap.diagonal().array() -= complexd(lambda, eps);
  Am.diagonal().array() -= complexd(lambda, -eps);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd Rp = Ap.partialPivLu().solve(I);
  const Eigen::MatrixXcd Rm = Am.partialPivLu().solve(I);
  return (Rp - Rm - complexd(0, 2.0 * eps) * Rp * Rm).norm() / Rp.norm();
}

// || R - R0 + R0 V R ||_F / ||R||_F on the dense discretization.
inline double resolvent_equation_residual(const Potential& V, const RadialGrid& g,
                                          complexd z) {
  const Eigen::MatrixXd H = dense_hamiltonian(V, g);
  const Potential zero = preset_potential("zero");
  const Eigen::MatrixXd H0 = dense_hamiltonian(zero, g);
  const int n = static_cast<int>(g.size());
  Eigen::MatrixXcd A = H.cast<complexd>(), A0 = H0.cast<complexd>();
  A.diagonal().array() -= z;
  A0.diagonal().array() -= z;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd R = A.partialPivLu().solve(I);
  const Eigen::MatrixXcd R0 = A0.partialPivLu().solve(I);
  Eigen::VectorXcd vd(n);
  for (int i = 0; i < n; ++i) vd(i) = V(g.nodes[i]);
  return (R - R0 + R0 * vd.asDiagonal() * R).norm() / R.norm();
}

struct LapOptions {
  double L = 400.0;  // kernel truncation radius
  double nodes_per_wavelength = 10.0;
  int power_iters = 400;
  double power_tol = 1e-9;
  double stabilization_tol = 1e-3;
};

struct LapTrace {
  std::vector<double> eps, norms;
  bool stabilized = false;
  double last_rel_change = 0;
  double fit_slope = 0;
};

namespace detail {

// Weighted norm of the half-line free-kernel resolvent at lambda + i eps,
// with the potential folded in through the resolvent equation. The kernel
// discretization has no box spectrum, so eps can go arbitrarily small.
inline double nystrom_weighted_norm(const Potential& V, double lambda, double eps,
                                    double r_weight, const LapOptions& opt) {
  const double k = std::sqrt(lambda);
  const double panel = 2.0 * pi / k;
  const int npan = static_cast<int>(std::ceil(opt.L / panel));
  const int per = std::max(6, static_cast<int>(std::lround(opt.nodes_per_wavelength)));
  std::vector<double> gx, gw;
  gauss_legendre(per, gx, gw);
  std::vector<double> r, w;
  for (int p = 0; p < npan; ++p) {
    const double a = p * panel, b = std::min(opt.L, (p + 1) * panel);
    for (int i = 0; i < per; ++i) {
      r.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[i]);
      w.push_back(0.5 * (b - a) * gw[i]);
    }
    if (b >= opt.L) break;
  }
  const int n = static_cast<int>(r.size());
  const complexd kap = std::sqrt(complexd(lambda, eps));
  Eigen::MatrixXcd K0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double rg = std::max(r[i], r[j]), rl = std::min(r[i], r[j]);
      K0(i, j) = std::exp(complexd(0, 1) * kap * rg) * std::sin(kap * rl) / kap;
    }
  bool has_v = false;
  Eigen::VectorXd vw(n);
  for (int i = 0; i < n; ++i) {
    vw(i) = V(r[i]) * w[i];
    if (vw(i) != 0) has_v = true;
  }
  Eigen::MatrixXcd R;
  if (has_v) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
    A += K0 * vw.cast<complexd>().asDiagonal();
    R = A.partialPivLu().solve(K0);
  } else {
    R = K0;
  }
  Eigen::VectorXcd s(n);
  for (int i = 0; i < n; ++i)
    s(i) = std::sqrt(w[i]) * std::pow(1.0 + r[i] * r[i], -r_weight / 2.0);
  const Eigen::MatrixXcd B = s.asDiagonal() * R * s.asDiagonal();
  Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(double(n)));
  double est = 0, prev = 0;
  for (int it = 0; it < opt.power_iters; ++it) {
    Eigen::VectorXcd u = B.adjoint() * (B * v);
    est = std::sqrt(u.norm());
    if (u.norm() == 0) return 0;
    v = u / u.norm();
    if (it > 2 && std::abs(est - prev) < opt.power_tol * est) break;
    prev = est;
  }
  return est;
}

}  // namespace detail

inline double weighted_resolvent_norm(const Potential& V, double lambda, double eps,
                                      double r_weight, const LapOptions& opt = {}) {
  if (!(lambda > 0)) throw domain_error("weighted_resolvent_norm: lambda > 0 required");
  if (!(eps > 0)) throw invalid_argument_error("weighted_resolvent_norm: eps > 0 required");
  return detail::nystrom_weighted_norm(V, lambda, eps, r_weight, opt);
}

inline LapTrace limiting_absorption_probe(const Potential& V, double lambda,
                                          double r_weight,
                                          const std::vector<double>& eps_list,
                                          const LapOptions& opt = {}) {
  if (!(lambda > 0)) throw domain_error("limiting_absorption_probe: lambda > 0 required");
  if (eps_list.size() < 2)
    throw invalid_argument_error("limiting_absorption_probe: need at least 2 eps values");
  for (size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0))
      throw invalid_argument_error("limiting_absorption_probe: eps must be positive");
    if (i > 0 && eps_list[i] >= eps_list[i - 1])
      throw invalid_argument_error("limiting_absorption_probe: eps must decrease");
  }
  LapTrace trace;
  trace.eps = eps_list;
  for (double eps : eps_list)
    trace.norms.push_back(detail::nystrom_weighted_norm(V, lambda, eps, r_weight, opt));
  const size_t n = trace.norms.size();
  trace.last_rel_change =
      std::abs(trace.norms[n - 1] - trace.norms[n - 2]) / trace.norms[n - 1];
  trace.stabilized = trace.last_rel_change < opt.stabilization_tol;
  trace.fit_slope = fit_power_law(trace.eps, trace.norms, 10.0);
  return trace;
}

}  // namespace sk
