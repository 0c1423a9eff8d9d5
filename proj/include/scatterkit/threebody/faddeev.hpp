#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "../core/errors.hpp"
#include "../core/grid.hpp"
#include "../core/util.hpp"
#include "jacobi.hpp"
#include "separable.hpp"

namespace sk {

using Cx = std::complex<double>;

// Three-body problem with rank-one pair interactions. Spectator momentum
// grids are indexed by pair; the pair-relative momentum integrals use each
// potential's own grid. z must lie strictly below the continuous spectrum
// (z < E = min pair energy) unless Im z != 0.
struct FaddeevProblem {
  JacobiSystem jacobi;
  std::vector<SeparablePotential> potentials;
  std::array<MomentumGrid, 3> spectator_grid;
  Cx z{-2.0, 0.0};
};

inline const SeparablePotential* find_potential(const FaddeevProblem& pb, Pair a) {
  for (const auto& V : pb.potentials)
    if (V.pair == a) return &V;
  return nullptr;
}

inline FaddeevProblem make_faddeev_problem(JacobiSystem jac,
                                           std::vector<SeparablePotential> pots,
                                           int spectator_n, double q_max, Cx z) {
  FaddeevProblem pb;
  pb.jacobi = jac;
  pb.potentials = std::move(pots);
  for (int a = 0; a < 3; ++a)
    pb.spectator_grid[a] = build_momentum_grid(spectator_n, q_max, GridScheme::gauss_log);
  pb.z = z;
  for (std::size_t i = 0; i < pb.potentials.size(); ++i)
    for (std::size_t j = i + 1; j < pb.potentials.size(); ++j)
      if (pb.potentials[i].pair == pb.potentials[j].pair)
        throw invalid_argument_error("faddeev: duplicate pair potential");
  return pb;
}

// bottom of the continuous spectrum, E = min over pairs of the pair ground
// energy (0 when no pair binds)
inline double hvz_bottom(const FaddeevProblem& pb) {
  double E = 0.0;
  for (const auto& V : pb.potentials) {
    const auto sp = pair_spectrum(V, pb.jacobi.m(V.pair));
    for (double lam : sp.energies) E = std::min(E, lam);
  }
  return E;
}

namespace detail {

inline Cx transform_c(const SeparablePotential& V, Cx zeta, double m) {
  if (zeta.imag() == 0.0 && zeta.real() > 0.0)
    throw excluded_energy_error("separable transform needs Re zeta <= 0 or Im zeta != 0");
  Cx acc = 0.0;
  for (std::size_t i = 0; i < V.grid.size(); ++i) {
    const double p = V.grid.nodes[i];
    acc += V.grid.weights[i] * p * p * V.g[i] * V.g[i] /
           (p * p / (2.0 * m) - zeta);
  }
  return 4.0 * std::numbers::pi * acc;
}

// int_{-1}^{1} du / (a + b u) for a factor that never vanishes on [-1, 1]
inline Cx log_ratio_integral(Cx a, Cx b) {
  if (std::abs(b) < 1e-9 * std::abs(a)) {
    const Cx r2 = (b / a) * (b / a);
    return (2.0 / a) * (1.0 + r2 / 3.0 + r2 * r2 / 5.0);
  }
  return std::log((a + b) / (a - b)) / b;
}

inline const std::pair<std::vector<double>, std::vector<double>>& gauss_u48() {
  static const auto nw = [] {
    std::vector<double> x, w;
    gauss_legendre(48, x, w);
    return std::make_pair(std::move(x), std::move(w));
  }();
  return nw;
}

// int_{-1}^{1} du / prod_k (a_k + b_k u) by partial fractions, with a
// quadrature fallback near coincident roots
inline Cx int_inv3(Cx a0, Cx b0, Cx a1, Cx b1, Cx a2, Cx b2) {
  const Cx a[3] = {a0, a1, a2};
  const Cx b[3] = {b0, b1, b2};
  bool separated = true;
  for (int i = 0; i < 3 && separated; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Cx d = a[i] * b[j] - a[j] * b[i];
      if (std::abs(d) <
          1e-7 * (std::abs(a[i] * b[j]) + std::abs(a[j] * b[i]) + 1e-300)) {
        separated = false;
        break;
      }
    }
  if (separated) {
    Cx s = 0.0;
    for (int i = 0; i < 3; ++i) {
      Cx prod = 1.0;
      for (int j = 0; j < 3; ++j)
        if (j != i) prod *= a[j] * b[i] - b[j] * a[i];
      s += b[i] * b[i] / prod * log_ratio_integral(a[i], b[i]);
    }
    return s;
  }
  const auto& [x, w] = gauss_u48();
  Cx s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    s += w[k] / ((a0 + b0 * x[k]) * (a1 + b1 * x[k]) * (a2 + b2 * x[k]));
  return s;
}

inline Cx int_inv2(Cx a1, Cx b1, Cx a2, Cx b2) {
  const Cx d = a2 * b1 - a1 * b2;
  if (std::abs(d) > 1e-7 * (std::abs(a2 * b1) + std::abs(a1 * b2) + 1e-300))
    return (b1 * log_ratio_integral(a1, b1) - b2 * log_ratio_integral(a2, b2)) / d;
  const auto& [x, w] = gauss_u48();
  Cx s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    s += w[k] / ((a1 + b1 * x[k]) * (a2 + b2 * x[k]));
  return s;
}

// geometry of the exchange integral between frames a and b at fixed
// spectator momenta (q, q'): |p_a|^2 = A1 + B1 u, |p_b|^2 = A2 + B2 u,
// E0 = |p_a|^2/(2 m_a) + q^2/(2 n_a)
struct ExchangeGeometry {
  double c_ab, c_ba, inv2m, inv2n;
};

inline ExchangeGeometry exchange_geometry(const JacobiSystem& jac, Pair a, Pair b) {
  if (jac.m3_infinite())
    throw invalid_argument_error("faddeev kernels need three finite masses");
  ExchangeGeometry g;
  g.c_ab = jac.exchange_coefficient(a, b);
  g.c_ba = jac.exchange_coefficient(b, a);
  g.inv2m = 0.5 / jac.m(a);
  g.inv2n = 0.5 / jac.n(a);
  return g;
}

// weighted angular integral int du g_a(|p_a|) g_b(|p_b|) [/(E0 - z)]
inline Cx exchange_u_integral(const ExchangeGeometry& geo,
                              const SeparablePotential& Va,
                              const SeparablePotential& Vb, double q, double qp,
                              Cx z, bool resolvent_weight) {
  const double A1 = qp * qp + geo.c_ab * geo.c_ab * q * q;
  const double B1 = 2.0 * geo.c_ab * q * qp;
  const double A2 = q * q + geo.c_ba * geo.c_ba * qp * qp;
  const double B2 = 2.0 * geo.c_ba * q * qp;
  if (Va.yamaguchi_beta > 0 && Vb.yamaguchi_beta > 0) {
    const Cx a1 = A1 + Va.yamaguchi_beta * Va.yamaguchi_beta;
    const Cx a2 = A2 + Vb.yamaguchi_beta * Vb.yamaguchi_beta;
    if (!resolvent_weight) return int_inv2(a1, B1, a2, B2);
    const Cx a0 = A1 * geo.inv2m + q * q * geo.inv2n - z;
    return int_inv3(a0, B1 * geo.inv2m, a1, B1, a2, B2);
  }
  const auto& [x, w] = gauss_u48();
  Cx s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double pa = std::sqrt(std::max(A1 + B1 * x[k], 0.0));
    const double pb = std::sqrt(std::max(A2 + B2 * x[k], 0.0));
    Cx term = Va.form(pa) * Vb.form(pb);
    if (resolvent_weight) term /= A1 * geo.inv2m + B1 * geo.inv2m * x[k] + q * q * geo.inv2n - z;
    s += w[k] * term;
  }
  return s;
}

}  // namespace detail

// Symmetrically balanced discretization of the Faddeev block kernel
// Q_ab(z) = sqrt|V_a| R_a(z) sqrt(V_b), a != b. block[a][b] holds
// S_ab = D_a^{-1/2} W_a M_ab W_b D_b^{-1/2} with W = diag(sqrt(w q^2));
// eigenvalues of S equal eigenvalues of Q.
struct FaddeevBlocks {
  std::array<std::array<Eigen::MatrixXcd, 3>, 3> block;
  std::array<Eigen::VectorXd, 3> scale;  // sqrt(w_i q_i^2)
  std::array<Eigen::VectorXcd, 3> dee;   // D_a(zeta_i) = 1 + s_a J_a(zeta_i)
  std::array<int, 3> n{};
  Cx z{};
  double spectrum_bottom = 0.0;

  int total() const { return n[0] + n[1] + n[2]; }

  Eigen::MatrixXcd assembled() const {
    const int N = total();
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
    int row = 0;
    for (int a = 0; a < 3; ++a) {
      int col = 0;
      for (int b = 0; b < 3; ++b) {
        if (a != b && block[a][b].size() > 0)
          S.block(row, col, n[a], n[b]) = block[a][b];
        col += n[b];
      }
      row += n[a];
    }
    return S;
  }

  Eigen::MatrixXd assembled_real() const {
    if (z.imag() != 0.0)
      throw invalid_argument_error("assembled_real needs real z");
    return assembled().real();
  }
};

inline FaddeevBlocks faddeev_assemble(const FaddeevProblem& pb) {
  FaddeevBlocks out;
  out.z = pb.z;
  out.spectrum_bottom = hvz_bottom(pb);
  if (pb.z.imag() == 0.0 && pb.z.real() >= out.spectrum_bottom)
    throw excluded_energy_error("faddeev_assemble: real z must lie below the spectrum bottom");

  const SeparablePotential* pot[3];
  for (int a = 0; a < 3; ++a) {
    pot[a] = find_potential(pb, static_cast<Pair>(a));
    const auto& grid = pb.spectator_grid[a];
    out.n[a] = static_cast<int>(grid.size());
    out.scale[a].resize(out.n[a]);
    out.dee[a] = Eigen::VectorXcd::Ones(out.n[a]);
    for (int i = 0; i < out.n[a]; ++i)
      out.scale[a][i] = std::sqrt(grid.weights[i] * grid.nodes[i] * grid.nodes[i]);
    if (pot[a] && pot[a]->strength != 0.0) {
      const double na = pb.jacobi.n(static_cast<Pair>(a));
      const double ma = pb.jacobi.m(static_cast<Pair>(a));
      for (int i = 0; i < out.n[a]; ++i) {
        const double q = grid.nodes[i];
        const Cx zeta = pb.z - q * q / (2.0 * na);
        out.dee[a][i] = 1.0 + pot[a]->strength * detail::transform_c(*pot[a], zeta, ma);
      }
    }
  }

  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      out.block[a][b] = Eigen::MatrixXcd::Zero(out.n[a], out.n[b]);
      if (!pot[a] || !pot[b] || pot[a]->strength == 0.0 || pot[b]->strength == 0.0)
        continue;
      const auto geo = detail::exchange_geometry(pb.jacobi, static_cast<Pair>(a),
                                                 static_cast<Pair>(b));
      const double sgn = pot[b]->strength < 0 ? -1.0 : 1.0;
      const double coupling =
          sgn * std::sqrt(std::abs(pot[a]->strength) * std::abs(pot[b]->strength));
      const auto& ga = pb.spectator_grid[a];
      const auto& gb = pb.spectator_grid[b];
      auto& blk = out.block[a][b];
      parallel_for(out.n[a], [&](int i) {
        const double q = ga.nodes[i];
        const Cx da = std::sqrt(out.dee[a][i]);
        for (int j = 0; j < out.n[b]; ++j) {
          const Cx iu = detail::exchange_u_integral(geo, *pot[a], *pot[b], q,
                                                    gb.nodes[j], pb.z, true);
          blk(i, j) = coupling * 2.0 * std::numbers::pi * iu * out.scale[a][i] *
                      out.scale[b][j] / (da * std::sqrt(out.dee[b][j]));
        }
      });
    }
  return out;
}

inline Eigen::VectorXd block_singular_values(const FaddeevBlocks& blocks, Pair a, Pair b) {
  const auto& blk = blocks.block[static_cast<int>(a)][static_cast<int>(b)];
  if (blk.size() == 0) throw invalid_argument_error("block_singular_values: empty block");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(blk);
  return svd.singularValues();
}

namespace detail {

// largest eigenvalue of a symmetric matrix with nonnegative entries, by
// shifted power iteration (Gershgorin shift keeps the target dominant)
inline double perron_largest(const Eigen::MatrixXd& B, double tol = 1e-12,
                             int max_iter = 20000) {
  const int n = static_cast<int>(B.rows());
  if (n == 0) return 0.0;
  const double shift = B.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
  double lam = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = B * v + shift * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    const double lam_new = w.dot(B * w);
    if (std::abs(lam_new - lam) <= tol * (std::abs(lam_new) + 1.0) && it > 4) {
      lam = lam_new;
      break;
    }
    lam = lam_new;
    v = w;
  }
  return lam;
}

inline void require_all_attractive(const FaddeevProblem& pb) {
  for (const auto& V : pb.potentials)
    if (V.strength > 0)
      throw invalid_argument_error("largest-eigenvalue search needs attractive pair potentials");
}

inline bool identical_boson_problem(const FaddeevProblem& pb) {
  if (pb.potentials.size() != 3) return false;
  const auto& m = pb.jacobi.mass;
  if (pb.jacobi.m3_infinite() || m[0] != m[1] || m[1] != m[2]) return false;
  const auto& V0 = pb.potentials[0];
  for (const auto& V : pb.potentials) {
    if (V.strength != V0.strength) return false;
    if (V.yamaguchi_beta <= 0 || V.yamaguchi_beta != V0.yamaguchi_beta) return false;
  }
  for (int a = 1; a < 3; ++a) {
    if (pb.spectator_grid[a].size() != pb.spectator_grid[0].size()) return false;
    if (pb.spectator_grid[a].extent != pb.spectator_grid[0].extent) return false;
  }
  return true;
}

}  // namespace detail

// largest eigenvalue mu(z) of -Q(z); attractive potentials only
inline double mu_largest(const FaddeevBlocks& blocks) {
  return detail::perron_largest(-blocks.assembled_real());
}

// identical bosons: the symmetric one-component reduction replaces the block
// system by twice a single off-diagonal block
inline double mu_largest_symmetric(const FaddeevBlocks& blocks) {
  return detail::perron_largest(-2.0 * blocks.block[0][1].real());
}

struct BoundStateOptions {
  int scan_points = 20;
  double z_tol = 1e-10;
  bool symmetric_reduction = false;
};

// energies z* below the spectrum bottom where mu(z) crosses 1
inline std::vector<double> bound_states(const FaddeevProblem& pb, double z_lo,
                                        double z_hi,
                                        const BoundStateOptions& opt = {}) {
  detail::require_all_attractive(pb);
  if (!(z_lo < z_hi)) throw invalid_argument_error("bound_states: need z_lo < z_hi");
  FaddeevProblem work = pb;
  work.z = Cx(z_hi, 0.0);
  const double E = hvz_bottom(pb);
  if (z_hi >= E)
    throw excluded_energy_error("bound_states: z range must stay below the spectrum bottom");
  if (opt.symmetric_reduction && !detail::identical_boson_problem(pb))
    throw invalid_argument_error("symmetric reduction needs an identical-boson problem");

  auto mu_at = [&](double z) {
    work.z = Cx(z, 0.0);
    const auto blocks = faddeev_assemble(work);
    return opt.symmetric_reduction ? mu_largest_symmetric(blocks) : mu_largest(blocks);
  };

  std::vector<double> zs(opt.scan_points), mus(opt.scan_points);
  for (int k = 0; k < opt.scan_points; ++k) {
    zs[k] = z_lo + (z_hi - z_lo) * k / (opt.scan_points - 1.0);
    mus[k] = mu_at(zs[k]);
  }
  std::vector<double> found;
  for (int k = 0; k + 1 < opt.scan_points; ++k) {
    if ((mus[k] - 1.0) * (mus[k + 1] - 1.0) > 0) continue;
    double lo = zs[k], hi = zs[k + 1];
    double flo = mus[k] - 1.0;
    while (hi - lo > opt.z_tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = mu_at(mid) - 1.0;
      if ((flo < 0) == (fm < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    found.push_back(0.5 * (lo + hi));
  }
  std::sort(found.begin(), found.end());
  return found;
}

namespace detail {

// number of eigenvalues of -S at or above the threshold, over the full
// three-component spectrum; single-block shortcut for identical bosons
inline int count_threshold_eigenvalues(const FaddeevBlocks& blocks, double threshold,
                                       bool exploit_symmetry) {
  if (exploit_symmetry && blocks.n[0] > 0 && blocks.block[0][1].size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blocks.block[0][1].real(),
                                                      Eigen::EigenvaluesOnly);
    int count = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double b = -es.eigenvalues()[i];  // eigenvalue of -S01
      if (2.0 * b >= threshold) ++count;      // symmetric sector
      if (-b >= threshold) count += 2;        // doubly degenerate sector
    }
    return count;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-blocks.assembled_real(),
                                                    Eigen::EigenvaluesOnly);
  int count = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] >= threshold) ++count;
  return count;
}

}  // namespace detail

struct EfimovOptions {
  double z_probe = -1e-12;
  double resonance_tol = 1e-6;
  int spectator_n = 320;
  double spectator_inner = 1e-8;
  bool exploit_symmetry = true;
};

struct EfimovReport {
  std::vector<double> cutoffs;
  std::vector<int> counts;
  std::vector<double> top;  // largest eigenvalue of -Q at the probe energy
};

// bound-state counts just below zero energy as a function of the spectator
// ultraviolet cutoff; every active pair must sit at its zero-energy resonance
inline EfimovReport efimov_count(const FaddeevProblem& pb,
                                 const std::vector<double>& cutoffs,
                                 const EfimovOptions& opt = {}) {
  detail::require_all_attractive(pb);
  for (const auto& V : pb.potentials) {
    if (V.strength == 0.0) continue;
    const double D0 = 1.0 + V.strength * V.transform(0.0, pb.jacobi.m(V.pair));
    if (std::abs(D0) > opt.resonance_tol)
      throw domain_error("efimov_count: pair potential not at zero-energy resonance");
  }
  EfimovReport rep;
  const bool sym = opt.exploit_symmetry && detail::identical_boson_problem(pb);
  for (double cut : cutoffs) {
    FaddeevProblem work = pb;
    work.z = Cx(opt.z_probe, 0.0);
    for (int a = 0; a < 3; ++a)
      work.spectator_grid[a] = build_momentum_grid(opt.spectator_n, cut,
                                                   GridScheme::gauss_log,
                                                   opt.spectator_inner);
    const auto blocks = faddeev_assemble(work);
    rep.cutoffs.push_back(cut);
    rep.counts.push_back(detail::count_threshold_eigenvalues(blocks, 1.0, sym));
    rep.top.push_back(sym ? mu_largest_symmetric(blocks) : mu_largest(blocks));
  }
  return rep;
}

// successive three-body energies at a fixed cutoff, located as jumps of the
// threshold count in z; returned deepest first
inline std::vector<double> efimov_energies(const FaddeevProblem& pb, double cutoff,
                                           int max_states, double z_shallow = -1e-13,
                                           double z_deep = -0.5,
                                           const EfimovOptions& opt = {}) {
  detail::require_all_attractive(pb);
  if (!(z_deep < z_shallow && z_shallow < 0))
    throw invalid_argument_error("efimov_energies: need z_deep < z_shallow < 0");
  const bool sym = opt.exploit_symmetry && detail::identical_boson_problem(pb);
  FaddeevProblem work = pb;
  for (int a = 0; a < 3; ++a)
    work.spectator_grid[a] = build_momentum_grid(opt.spectator_n, cutoff,
                                                 GridScheme::gauss_log,
                                                 opt.spectator_inner);
  // u = ln(-z); the count of threshold eigenvalues decreases by one each time
  // u crosses ln(-E_k) from below
  auto count_at = [&](double u) {
    work.z = Cx(-std::exp(u), 0.0);
    return detail::count_threshold_eigenvalues(faddeev_assemble(work), 1.0, sym);
  };
  std::vector<double> energies;
  const double u_lo = std::log(-z_shallow), u_hi = std::log(-z_deep);
  std::vector<std::array<double, 2>> stack{{u_lo, u_hi}};
  std::vector<std::array<int, 2>> cstack{{count_at(u_lo), count_at(u_hi)}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    const auto [clo, chi] = cstack.back();
    stack.pop_back();
    cstack.pop_back();
    if (clo <= chi) continue;
    if (hi - lo < 1e-3) {
      for (int k = 0; k < clo - chi; ++k) energies.push_back(-std::exp(0.5 * (lo + hi)));
      continue;
    }
    const double mid = 0.5 * (lo + hi);
    const int cmid = count_at(mid);
    stack.push_back({lo, mid});
    cstack.push_back({clo, cmid});
    stack.push_back({mid, hi});
    cstack.push_back({cmid, chi});
  }
  std::sort(energies.begin(), energies.end());
  if (static_cast<int>(energies.size()) > max_states) energies.resize(max_states);
  return energies;
}

// Test vector v = sum_g coeff[g] ghat_g(p_g) exp(-width[g] q_g^2); components
// with nonzero coefficients must have a matching potential form factor.
struct TestVector {
  std::array<Cx, 3> coeff{};
  std::array<double, 3> width{0.5, 0.5, 0.5};
};

struct FaddeevComponents {
  std::array<Eigen::VectorXcd, 3> t;   // sqrt|V_a| R(z) v on the spectator grids
  std::array<Eigen::VectorXcd, 3> t0;  // inhomogeneity sqrt|V_a| R_a(z) v
};

namespace detail {

struct ReconstructContext {
  const FaddeevProblem* pb;
  std::array<const SeparablePotential*, 3> pot{};
  std::array<double, 3> gnorm{};   // ||g_a||
  std::array<double, 3> s{};       // strengths
  std::array<Eigen::VectorXcd, 3> dee;
  std::array<Eigen::VectorXcd, 3> jay;  // J_a(zeta_i)
};

inline ReconstructContext make_context(const FaddeevProblem& pb,
                                       const FaddeevBlocks& blocks) {
  ReconstructContext ctx;
  ctx.pb = &pb;
  for (int a = 0; a < 3; ++a) {
    ctx.pot[a] = find_potential(pb, static_cast<Pair>(a));
    ctx.dee[a] = blocks.dee[a];
    const int n = blocks.n[a];
    ctx.jay[a] = Eigen::VectorXcd::Zero(n);
    if (ctx.pot[a]) {
      ctx.s[a] = ctx.pot[a]->strength;
      ctx.gnorm[a] = std::sqrt(ctx.pot[a]->norm2());
      const double ma = pb.jacobi.m(static_cast<Pair>(a));
      const double na = pb.jacobi.n(static_cast<Pair>(a));
      for (int i = 0; i < n; ++i) {
        const double q = pb.spectator_grid[a].nodes[i];
        ctx.jay[a][i] = transform_c(*ctx.pot[a], pb.z - q * q / (2.0 * na), ma);
      }
    }
  }
  return ctx;
}

// profile <g_d delta_{q_i}, X (g_c chi)> over the d spectator grid, where X
// is R0(z) (resolvent_weight) or the identity; chi is sampled on the c grid
inline Eigen::VectorXcd cross_profile(const ReconstructContext& ctx, int d, int c,
                                      const Eigen::VectorXcd& chi,
                                      bool resolvent_weight) {
  const auto& pb = *ctx.pb;
  const auto geo = exchange_geometry(pb.jacobi, static_cast<Pair>(d), static_cast<Pair>(c));
  const auto& gd = pb.spectator_grid[d];
  const auto& gc = pb.spectator_grid[c];
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(gd.size());
  parallel_for(static_cast<int>(gd.size()), [&](int i) {
    Cx acc = 0.0;
    for (std::size_t j = 0; j < gc.size(); ++j) {
      const double qp = gc.nodes[j];
      acc += gc.weights[j] * qp * qp * chi[j] *
             exchange_u_integral(geo, *ctx.pot[d], *ctx.pot[c], gd.nodes[i], qp,
                                 pb.z, resolvent_weight);
    }
    out[i] = 2.0 * std::numbers::pi * acc;
  });
  return out;
}

// <ghat_d delta_{q_i}, R0(z) v> for the Gaussian-profile test vector
inline Eigen::VectorXcd free_profile_of_v(const ReconstructContext& ctx, int d,
                                          const TestVector& v) {
  const auto& pb = *ctx.pb;
  const auto& gd = pb.spectator_grid[d];
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(gd.size());
  if (!ctx.pot[d]) return out;
  if (v.coeff[d] != 0.0) {
    for (std::size_t i = 0; i < gd.size(); ++i) {
      const double q = gd.nodes[i];
      out[i] = v.coeff[d] * std::exp(-v.width[d] * q * q) * ctx.jay[d][i] /
               (ctx.gnorm[d] * ctx.gnorm[d]);
    }
  }
  for (int c = 0; c < 3; ++c) {
    if (c == d || v.coeff[c] == 0.0) continue;
    const auto& gc = pb.spectator_grid[c];
    Eigen::VectorXcd chi(gc.size());
    for (std::size_t j = 0; j < gc.size(); ++j)
      chi[j] = std::exp(-v.width[c] * gc.nodes[j] * gc.nodes[j]);
    out += (v.coeff[c] / (ctx.gnorm[d] * ctx.gnorm[c])) *
           cross_profile(ctx, d, c, chi, true);
  }
  return out;
}

}  // namespace detail

// solve the component system (I + Q) t = t0 for the test vector v
inline FaddeevComponents solve_components(const FaddeevProblem& pb,
                                          const FaddeevBlocks& blocks,
                                          const TestVector& v) {
  for (int a = 0; a < 3; ++a)
    if (v.coeff[a] != 0.0 && !find_potential(pb, static_cast<Pair>(a)))
      throw invalid_argument_error("test vector component without a matching potential");
  const auto ctx = detail::make_context(pb, blocks);
  FaddeevComponents comp;
  const int N = blocks.total();
  Eigen::VectorXcd tau0 = Eigen::VectorXcd::Zero(N);
  int off = 0;
  for (int a = 0; a < 3; ++a) {
    const int n = blocks.n[a];
    comp.t0[a] = Eigen::VectorXcd::Zero(n);
    if (ctx.pot[a] && ctx.s[a] != 0.0) {
      const auto prof = detail::free_profile_of_v(ctx, a, v);
      for (int i = 0; i < n; ++i)
        comp.t0[a][i] = std::sqrt(std::abs(ctx.s[a])) * ctx.gnorm[a] * prof[i] /
                        ctx.dee[a][i];
    }
    for (int i = 0; i < n; ++i)
      tau0[off + i] = blocks.scale[a][i] * std::sqrt(blocks.dee[a][i]) * comp.t0[a][i];
    off += n;
  }
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(N, N) + blocks.assembled();
  Eigen::VectorXcd tau = A.partialPivLu().solve(tau0);
  off = 0;
  for (int a = 0; a < 3; ++a) {
    const int n = blocks.n[a];
    comp.t[a] = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < n; ++i)
      comp.t[a][i] = tau[off + i] / (blocks.scale[a][i] * std::sqrt(blocks.dee[a][i]));
    off += n;
  }
  return comp;
}

// moments <ghat_d delta_{q_i}, R(z) v> recovered through the pairing `route`:
// R = R_route - R_route sum_b sqrt(V_b) t_b
inline std::array<Eigen::VectorXcd, 3> resolvent_moments(const FaddeevProblem& pb,
                                                         const FaddeevBlocks& blocks,
                                                         const FaddeevComponents& comp,
                                                         const TestVector& v,
                                                         Pair route) {
  const auto ctx = detail::make_context(pb, blocks);
  const int al = static_cast<int>(route);

  // free profiles of f = v and of f_b = ghat_b tensor t_b, for every d
  std::array<Eigen::VectorXcd, 3> prof_v;
  std::array<std::array<Eigen::VectorXcd, 3>, 3> prof_t;  // [d][b]
  for (int d = 0; d < 3; ++d) {
    prof_v[d] = detail::free_profile_of_v(ctx, d, v);
    for (int b = 0; b < 3; ++b) {
      prof_t[d][b] = Eigen::VectorXcd::Zero(blocks.n[d]);
      if (!ctx.pot[b] || ctx.s[b] == 0.0 || !ctx.pot[d]) continue;
      if (d == b) {
        for (int i = 0; i < blocks.n[d]; ++i)
          prof_t[d][b][i] = comp.t[b][i] * ctx.jay[d][i] / (ctx.gnorm[d] * ctx.gnorm[d]);
      } else {
        prof_t[d][b] = detail::cross_profile(ctx, d, b, comp.t[b], true) /
                       (ctx.gnorm[d] * ctx.gnorm[b]);
      }
    }
  }

  // R_route f = R0 f - s_route R0 (g_route h_f), h_f = ||g|| prof_route(f) / D
  auto route_correction = [&](const Eigen::VectorXcd& prof_at_route) {
    Eigen::VectorXcd h(blocks.n[al]);
    for (int i = 0; i < blocks.n[al]; ++i)
      h[i] = ctx.gnorm[al] * prof_at_route[i] / ctx.dee[al][i];
    return h;
  };

  std::array<Eigen::VectorXcd, 3> moments;
  const bool route_active = ctx.pot[al] && ctx.s[al] != 0.0;
  Eigen::VectorXcd h_v;
  if (route_active) h_v = route_correction(prof_v[al]);
  std::array<Eigen::VectorXcd, 3> h_t;
  if (route_active)
    for (int b = 0; b < 3; ++b)
      if (b != al && ctx.pot[b] && ctx.s[b] != 0.0)
        h_t[b] = route_correction(prof_t[al][b]);

  for (int d = 0; d < 3; ++d) {
    moments[d] = prof_v[d];
    if (route_active) {
      // subtract s_route <.., R0 g_route h_v>
      Eigen::VectorXcd corr;
      if (d == al) {
        corr = Eigen::VectorXcd(blocks.n[d]);
        for (int i = 0; i < blocks.n[d]; ++i)
          corr[i] = h_v[i] * ctx.jay[d][i] / ctx.gnorm[d];
      } else if (ctx.pot[d]) {
        corr = detail::cross_profile(ctx, d, al, h_v, true) / ctx.gnorm[d];
      } else {
        corr = Eigen::VectorXcd::Zero(blocks.n[d]);
      }
      moments[d] -= ctx.s[al] * corr;
    }
    for (int b = 0; b < 3; ++b) {
      if (b == al || !ctx.pot[b] || ctx.s[b] == 0.0) continue;
      const double sgn = ctx.s[b] < 0 ? -1.0 : 1.0;
      const Cx w = sgn * std::sqrt(std::abs(ctx.s[b])) * ctx.gnorm[b];
      Eigen::VectorXcd term = prof_t[d][b];
      if (route_active) {
        Eigen::VectorXcd corr;
        if (d == al) {
          corr = Eigen::VectorXcd(blocks.n[d]);
          for (int i = 0; i < blocks.n[d]; ++i)
            corr[i] = h_t[b][i] * ctx.jay[d][i] / ctx.gnorm[d];
        } else if (ctx.pot[d]) {
          corr = detail::cross_profile(ctx, d, al, h_t[b], true) / ctx.gnorm[d];
        } else {
          corr = Eigen::VectorXcd::Zero(blocks.n[d]);
        }
        term -= ctx.s[al] * corr;
      }
      moments[d] -= w * term;
    }
  }
  return moments;
}

struct ReconstructReport {
  std::array<Eigen::VectorXcd, 3> moments;  // route-p12 profiles per pair
  double max_pairwise = 0.0;                // relative spread across routes
  double residual = 0.0;                    // relative (H - z) R v = v defect
};

inline ReconstructReport resolvent_reconstruct(const FaddeevProblem& pb,
                                               const TestVector& v) {
  const auto blocks = faddeev_assemble(pb);
  const auto comp = solve_components(pb, blocks, v);
  const auto ctx = detail::make_context(pb, blocks);

  std::array<std::array<Eigen::VectorXcd, 3>, 3> m;
  for (int al = 0; al < 3; ++al)
    m[al] = resolvent_moments(pb, blocks, comp, v, static_cast<Pair>(al));

  double scale = 0.0;
  for (int d = 0; d < 3; ++d)
    for (int i = 0; i < blocks.n[d]; ++i) scale = std::max(scale, std::abs(m[0][d][i]));
  double spread = 0.0;
  for (int a1 = 0; a1 < 3; ++a1)
    for (int a2 = a1 + 1; a2 < 3; ++a2)
      for (int d = 0; d < 3; ++d)
        for (int i = 0; i < blocks.n[d]; ++i)
          spread = std::max(spread, std::abs(m[a1][d][i] - m[a2][d][i]));

  ReconstructReport rep;
  rep.moments = m[0];
  rep.max_pairwise = scale > 0 ? spread / scale : 0.0;

  // defect of (H - z) R v = v, probed against the same moment functionals:
  // (H - z) R v - v = -sum_b sqrt(V_b)(t_b - sqrt|V_b| R v)
  double defect = 0.0, vscale = 0.0;
  for (int d = 0; d < 3; ++d) {
    if (!ctx.pot[d]) continue;
    const auto& gd = pb.spectator_grid[d];
    Eigen::VectorXcd vm = Eigen::VectorXcd::Zero(gd.size());
    if (v.coeff[d] != 0.0)
      for (std::size_t i = 0; i < gd.size(); ++i)
        vm[i] = v.coeff[d] * std::exp(-v.width[d] * gd.nodes[i] * gd.nodes[i]);
    for (int c = 0; c < 3; ++c) {
      if (c == d || v.coeff[c] == 0.0 || !ctx.pot[c]) continue;
      const auto& gc = pb.spectator_grid[c];
      Eigen::VectorXcd chi(gc.size());
      for (std::size_t j = 0; j < gc.size(); ++j)
        chi[j] = std::exp(-v.width[c] * gc.nodes[j] * gc.nodes[j]);
      vm += (v.coeff[c] / (ctx.gnorm[d] * ctx.gnorm[c])) *
            detail::cross_profile(ctx, d, c, chi, false);
    }
    for (std::size_t i = 0; i < gd.size(); ++i) vscale = std::max(vscale, std::abs(vm[i]));

    for (int route = 0; route < 3; ++route) {
      Eigen::VectorXcd def = Eigen::VectorXcd::Zero(gd.size());
      for (int b = 0; b < 3; ++b) {
        if (b == route || !ctx.pot[b] || ctx.s[b] == 0.0) continue;
        Eigen::VectorXcd diff(blocks.n[b]);
        for (int i = 0; i < blocks.n[b]; ++i) {
          const Cx u = std::sqrt(std::abs(ctx.s[b])) * ctx.gnorm[b] * m[route][b][i];
          diff[i] = u - comp.t[b][i];
        }
        const double sgn = ctx.s[b] < 0 ? -1.0 : 1.0;
        const Cx w = sgn * std::sqrt(std::abs(ctx.s[b])) * ctx.gnorm[b];
        if (b == d) {
          def += w * diff;
        } else {
          def += w * detail::cross_profile(ctx, d, b, diff, false) /
                 (ctx.gnorm[d] * ctx.gnorm[b]);
        }
      }
      for (std::size_t i = 0; i < gd.size(); ++i)
        defect = std::max(defect, std::abs(def[i]));
    }
  }
  rep.residual = vscale > 0 ? defect / vscale : 0.0;
  return rep;
}

}  // namespace sk
