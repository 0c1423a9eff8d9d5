#include <Eigen/Dense>
#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <scatterkit/core.hpp>
#include <scatterkit/threebody.hpp>

using namespace sk;

namespace {

bool strictly_decreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

// frozen identical-boson arena: unit masses, yamaguchi pairs tuned to a -1 dimer
FaddeevProblem boson_problem(double z) {
  auto jac = jacobi_setup(1, 1, 1);
  const double s = yamaguchi_strength_for_energy(1.0, jac.m(Pair::p12), -1.0);
  auto pgrid = build_momentum_grid(240, 60.0, GridScheme::gauss_log);
  std::vector<SeparablePotential> pots;
  for (int a = 0; a < 3; ++a) pots.push_back(make_yamaguchi((Pair)a, s, 1.0, pgrid));
  return make_faddeev_problem(jac, pots, 160, 30.0, Cx(z, 0));
}

// exp(ex0) * Int_{-1}^{1} exp(-s u) du without overflow in the cross term
double gauss_angular(double ex0, double s) {
  s = std::abs(s);
  if (s < 1e-8) return 2.0 * std::exp(ex0) * (1.0 + s * s / 6.0);
  return (std::exp(ex0 + s) - std::exp(ex0 - s)) / s;
}

// variational upper bound from a symmetrized gaussian tensor basis; the angular
// integral is closed form, so every matrix element is a 2-d quadrature
double galerkin_boson_ground(int nw, double w0, double wr, int nq, double P) {
  auto jac = jacobi_setup(1, 1, 1);
  const double m = jac.m(Pair::p12), n = jac.n(Pair::p12);
  const double beta = 1.0;
  const double s = yamaguchi_strength_for_energy(beta, m, -1.0);
  std::vector<double> widths(nw);
  for (int i = 0; i < nw; ++i) widths[i] = w0 * std::pow(wr, i);
  const int nb = nw * nw;
  std::array<Mat2, 3> R;
  for (int g = 0; g < 3; ++g) R[g] = jac.momentum_frame_change((Pair)g, Pair::p12);
  std::vector<double> x, w;
  gauss_legendre(nq, x, w);
  std::vector<double> pn(nq), pw(nq);
  for (int i = 0; i < nq; ++i) {
    pn[i] = 0.5 * P * (x[i] + 1.0);
    pw[i] = 0.5 * P * w[i];
  }
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(nb, nb), T = N, Vm = N;
  for (int ij = 0; ij < nb; ++ij) {
    const double ai = widths[ij / nw], bj = widths[ij % nw];
    for (int kl = ij; kl < nb; ++kl) {
      const double ak = widths[kl / nw], bl = widths[kl % nw];
      double nacc = 0, tacc = 0;
      for (int g = 0; g < 3; ++g) {
        const double A = ak * R[g][0][0] * R[g][0][0] + bl * R[g][1][0] * R[g][1][0];
        const double B = ak * R[g][0][1] * R[g][0][1] + bl * R[g][1][1] * R[g][1][1];
        const double C = 2.0 * (ak * R[g][0][0] * R[g][0][1] + bl * R[g][1][0] * R[g][1][1]);
        for (int iq = 0; iq < nq; ++iq) {
          const double q = pn[iq], q2 = q * q;
          double rowN = 0, rowT = 0;
          for (int ip = 0; ip < nq; ++ip) {
            const double p = pn[ip], p2 = p * p;
            const double val =
                pw[ip] * p2 * gauss_angular(-(ai + A) * p2 - (bj + B) * q2, C * p * q);
            rowN += val;
            rowT += val * (p2 / (2 * m) + q2 / (2 * n));
          }
          nacc += pw[iq] * q2 * rowN;
          tacc += pw[iq] * q2 * rowT;
        }
      }
      N(ij, kl) = N(kl, ij) = 8 * pi * pi * nacc;
      T(ij, kl) = T(kl, ij) = 8 * pi * pi * tacc;
    }
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nb, nq);
  for (int ij = 0; ij < nb; ++ij) {
    const double ai = widths[ij / nw], bj = widths[ij % nw];
    for (int g = 0; g < 3; ++g) {
      const double A = ai * R[g][0][0] * R[g][0][0] + bj * R[g][1][0] * R[g][1][0];
      const double B = ai * R[g][0][1] * R[g][0][1] + bj * R[g][1][1] * R[g][1][1];
      const double C = 2.0 * (ai * R[g][0][0] * R[g][0][1] + bj * R[g][1][0] * R[g][1][1]);
      for (int iq = 0; iq < nq; ++iq) {
        const double q = pn[iq];
        double acc = 0;
        for (int ip = 0; ip < nq; ++ip) {
          const double p = pn[ip];
          acc += pw[ip] * p * p / (p * p + beta * beta) * 0.5 *
                 gauss_angular(-A * p * p - B * q * q, C * p * q);
        }
        h(ij, iq) += 4 * pi * acc;
      }
    }
  }
  for (int ij = 0; ij < nb; ++ij)
    for (int kl = ij; kl < nb; ++kl) {
      double acc = 0;
      for (int iq = 0; iq < nq; ++iq) acc += pw[iq] * pn[iq] * pn[iq] * h(ij, iq) * h(kl, iq);
      Vm(ij, kl) = Vm(kl, ij) = s * 4 * pi * acc;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> en(N);
  const double emax = en.eigenvalues().maxCoeff();
  int keep = 0;
  for (int i = 0; i < nb; ++i)
    if (en.eigenvalues()[i] > 1e-10 * emax) ++keep;
  Eigen::MatrixXd W(nb, keep);
  for (int i = 0, c = 0; i < nb; ++i)
    if (en.eigenvalues()[i] > 1e-10 * emax)
      W.col(c++) = en.eigenvectors().col(i) / std::sqrt(en.eigenvalues()[i]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(W.transpose() * (T + Vm) * W,
                                                    Eigen::EigenvaluesOnly);
  return eh.eigenvalues()[0];
}

// lowest eigenvalue of -(2mu)^-1 d^2/dr^2 + V(|r|) on a Dirichlet box
double pair_ground_fd(const Potential& V, double mu, double L, int n) {
  const double h = 2.0 * L / (n + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  const double k = 1.0 / (2.0 * mu * h * h);
  for (int i = 0; i < n; ++i) {
    H(i, i) = 2.0 * k + V(std::abs(-L + (i + 1) * h));
    if (i + 1 < n) H(i, i + 1) = H(i + 1, i) = -k;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

struct ClusterArena {
  double ground, onset;
};

// planar finite-difference spectrum in the p12 frame; the onset is the first
// eigenvalue whose forward gap collapses relative to the largest gap seen
ClusterArena cluster_arena_fd(const JacobiSystem& jac, const Potential& V12,
                              const Potential& V23, const Potential& V31, int n1, int n2,
                              double Lx, double Ly) {
  const double mu = jac.m(Pair::p12), nu = jac.n(Pair::p12);
  auto M23 = jac.frame_change(Pair::p23, Pair::p12);
  auto M31 = jac.frame_change(Pair::p31, Pair::p12);
  const int nn = n1 * n2;
  const double hx = 2.0 * Lx / (n1 + 1), hy = 2.0 * Ly / (n2 + 1);
  const double kx = 1.0 / (2.0 * mu * hx * hx), ky = 1.0 / (2.0 * nu * hy * hy);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nn, nn);
  for (int i = 0; i < n1; ++i) {
    const double x = -Lx + (i + 1) * hx;
    for (int j = 0; j < n2; ++j) {
      const double y = -Ly + (j + 1) * hy;
      const int r = i * n2 + j;
      H(r, r) = 2.0 * kx + 2.0 * ky + V12(std::abs(x)) +
                V23(std::abs(M23[0][0] * x + M23[0][1] * y)) +
                V31(std::abs(M31[0][0] * x + M31[0][1] * y));
      if (i + 1 < n1) H(r, r + n2) = H(r + n2, r) = -kx;
      if (j + 1 < n2) H(r, r + 1) = H(r + 1, r) = -ky;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  auto ev = es.eigenvalues();
  double gmax = 0;
  for (int k = 0; k + 1 < nn; ++k) {
    const double g = ev[k + 1] - ev[k];
    gmax = std::max(gmax, g);
    if (g < 0.25 * gmax) return {ev[0], ev[k]};
  }
  return {ev[0], ev[nn - 1]};
}

}  // namespace

TEST_CASE("jacobi frames invert and satisfy the exchange relations") {
  {
    auto J = jacobi_setup(1, 1, 1);
    CHECK(J.m(Pair::p12) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(J.n(Pair::p12) == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_FALSE(J.m3_infinite());
  }
  {
    auto J = jacobi_setup(1, 1, std::numeric_limits<double>::infinity());
    CHECK(J.m3_infinite());
    CHECK(J.m(Pair::p12) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(J.n(Pair::p12) == Catch::Approx(2.0).epsilon(1e-15));
    CHECK(J.m(Pair::p23) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(J.n(Pair::p23) == Catch::Approx(1.0).epsilon(1e-15));
  }

  auto J = jacobi_setup(1.3, 0.7, 2.1);
  double worst = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      auto M = J.frame_change((Pair)b, (Pair)a);
      auto P = detail::mat2_mul(J.frame_change((Pair)a, (Pair)b), M);
      worst = std::max({worst, std::abs(P[0][0] - 1), std::abs(P[1][1] - 1),
                        std::abs(P[0][1]), std::abs(P[1][0])});
      auto N = J.momentum_frame_change((Pair)b, (Pair)a);
      worst = std::max({worst, std::abs(M[0][0] * N[0][0] + M[1][0] * N[1][0] - 1),
                        std::abs(M[0][0] * N[0][1] + M[1][0] * N[1][1]),
                        std::abs(M[0][1] * N[0][0] + M[1][1] * N[1][0]),
                        std::abs(M[0][1] * N[0][1] + M[1][1] * N[1][1] - 1)});
    }
  CHECK(worst < 1e-12);

  // random center-of-mass momenta: frame-independent free energy, and the
  // exchange relation p_a = eps (q_b + c_ab q_a) between distinct frames
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  double worstE = 0, worstX = 0;
  for (int rep = 0; rep < 50; ++rep) {
    double k[3][3];
    for (int c = 0; c < 3; ++c) {
      k[0][c] = U(rng);
      k[1][c] = U(rng);
      k[2][c] = -k[0][c] - k[1][c];
    }
    double pq[3][2][3], E0[3];
    for (int a = 0; a < 3; ++a) {
      auto rows = J.momentum_map((Pair)a);
      for (int c = 0; c < 3; ++c)
        for (int s = 0; s < 2; ++s)
          pq[a][s][c] = rows[s][0] * k[0][c] + rows[s][1] * k[1][c] + rows[s][2] * k[2][c];
      double p2 = 0, q2 = 0;
      for (int c = 0; c < 3; ++c) {
        p2 += pq[a][0][c] * pq[a][0][c];
        q2 += pq[a][1][c] * pq[a][1][c];
      }
      E0[a] = p2 / (2 * J.m((Pair)a)) + q2 / (2 * J.n((Pair)a));
    }
    worstE = std::max({worstE, std::abs(E0[0] - E0[1]), std::abs(E0[1] - E0[2])});
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        const double c_ab = J.exchange_coefficient((Pair)a, (Pair)b);
        const int eps = J.exchange_sign((Pair)a, (Pair)b);
        for (int c = 0; c < 3; ++c)
          worstX = std::max(worstX,
                            std::abs(pq[a][0][c] - eps * (pq[b][1][c] + c_ab * pq[a][1][c])));
      }
  }
  CHECK(worstE < 1e-13);
  CHECK(worstX < 1e-13);
}

TEST_CASE("separable pair closed forms and spectrum guards") {
  const double beta = 1.1, m = 0.7;
  auto grid = build_momentum_grid(240, 60.0, GridScheme::gauss_log);
  auto V = make_yamaguchi(Pair::p12, -1.0, beta, grid);

  // the grid norm is short of pi^2/beta by the truncated 4 pi / p_max tail
  const double tail = 4.0 * pi / 60.0;
  CHECK(pi * pi / beta - V.norm2() == Catch::Approx(tail).margin(1e-3));
  CHECK(V.transform(-0.8, m) ==
        Catch::Approx(yamaguchi_transform_closed(beta, m, -0.8)).epsilon(1e-4));
  CHECK_THROWS_AS(V.transform(0.5, m), excluded_energy_error);

  CHECK(critical_strength_on_grid(V, m) ==
        Catch::Approx(yamaguchi_critical_strength(beta, m)).epsilon(1e-3));

  const double s = yamaguchi_strength_for_energy(beta, m, -1.0);
  auto Vt = make_yamaguchi(Pair::p12, s, beta, grid);
  auto sp = pair_spectrum(Vt, m);
  REQUIRE(sp.energies.size() == 1);
  CHECK(sp.energies[0] == Catch::Approx(-0.999978271873).epsilon(1e-9));
  CHECK(sp.hvz_candidate == Catch::Approx(sp.energies[0]).epsilon(1e-14));
  REQUIRE(sp.eigenfunctions.size() == 1);

  // dense oracle on the same grid: identical ground energy and eigenvector
  const int n = (int)grid.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd u(n), w(n);
  for (int i = 0; i < n; ++i) {
    const double p = grid.nodes[i];
    H(i, i) = p * p / (2 * m);
    u[i] = std::sqrt(4 * pi * grid.weights[i]) * p * Vt.g[i];
    w[i] = std::sqrt(4 * pi * grid.weights[i]) * p * sp.eigenfunctions[0][i];
  }
  H += s * u * u.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  CHECK(std::abs(es.eigenvalues()[0] - sp.energies[0]) < 1e-8);
  CHECK(w.norm() == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(w.dot(es.eigenvectors().col(0))) == Catch::Approx(1.0).epsilon(1e-10));

  auto empty = pair_spectrum(make_yamaguchi(Pair::p12, 0.5 * critical_strength_on_grid(V, m),
                                            beta, grid),
                             m);
  CHECK(empty.energies.empty());
  CHECK(empty.hvz_candidate == 0.0);

  CHECK_THROWS_AS(
      pair_spectrum(make_yamaguchi(Pair::p12, yamaguchi_strength_for_energy(beta, m, -1e6),
                                   beta, grid),
                    m),
      grid_too_small_error);
  CHECK_THROWS_AS(
      pair_spectrum(make_yamaguchi(Pair::p12, strength_for_energy_on_grid(V, m, -1e-12),
                                   beta, grid),
                    m),
      grid_too_small_error);
}

TEST_CASE("faddeev kernel symmetry and separable rank structure") {
  auto pb = boson_problem(-3.0);
  CHECK(hvz_bottom(pb) == Catch::Approx(-0.999984289003).epsilon(1e-9));

  auto blocks = faddeev_assemble(pb);
  auto S = blocks.assembled_real();
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((blocks.block[0][1] - blocks.block[1][2]).cwiseAbs().maxCoeff() < 1e-13);

  auto sv = block_singular_values(blocks, Pair::p12, Pair::p23);
  CHECK(sv[0] == Catch::Approx(0.651596510593).epsilon(1e-6));
  CHECK(sv[49] / sv[0] < 1e-9);

  // same collapse one unit below the three-body ground state
  FaddeevProblem pe = pb;
  pe.z = Cx(-3.94576206217 - 1.0, 0);
  auto sve = block_singular_values(faddeev_assemble(pe), Pair::p12, Pair::p23);
  CHECK(sve[0] == Catch::Approx(0.406195).epsilon(1e-4));
  CHECK(sve[49] / sve[0] < 1e-9);
}

TEST_CASE("kernel norm and spectral radius decay toward large negative z") {
  auto pb = boson_problem(-3.0);
  const double normQ[3] = {0.987305023189, 0.530613984706, 0.2907104998};
  const double zs[3] = {-4.0, -8.0, -16.0};
  for (int k = 0; k < 3; ++k) {
    FaddeevProblem q = pb;
    q.z = Cx(zs[k], 0);
    auto b = faddeev_assemble(q);
    CHECK(detail::perron_largest(b.assembled_real().cwiseAbs()) ==
          Catch::Approx(normQ[k]).epsilon(1e-6));
    CHECK(mu_largest(b) == Catch::Approx(normQ[k]).epsilon(1e-6));
    CHECK(mu_largest_symmetric(b) == Catch::Approx(normQ[k]).epsilon(1e-6));
  }

  double prev = 0;
  for (int k = 0; k < 20; ++k) {
    FaddeevProblem q = pb;
    q.z = Cx(-6.0 + 4.5 * k / 19.0, 0);
    const double mu = mu_largest(faddeev_assemble(q));
    if (k == 0) CHECK(mu == Catch::Approx(0.683293456035).epsilon(1e-6));
    if (k == 19) CHECK(mu == Catch::Approx(3.00312428351).epsilon(1e-6));
    if (k > 0) CHECK(mu > prev);
    prev = mu;
  }
}

TEST_CASE("identical boson binding energy and symmetric reduction") {
  auto pb = boson_problem(-3.0);
  auto bs = bound_states(pb, -8.0, -1.05);
  REQUIRE(bs.size() == 1);
  CHECK(bs[0] == Catch::Approx(-3.94576206217).epsilon(1e-9));

  BoundStateOptions so;
  so.symmetric_reduction = true;
  auto bss = bound_states(pb, -8.0, -1.05, so);
  REQUIRE(bss.size() == 1);
  CHECK(std::abs(bss[0] - bs[0]) < 1e-10);
}

TEST_CASE("binding energies are independent of the jacobi pairing") {
  auto pgrid = build_momentum_grid(240, 60.0, GridScheme::gauss_log);
  struct Phys {
    double beta, e;
  };
  const Phys AB{1.1, -1.0}, BC{0.9, -0.8}, CA{1.3, -1.2};
  const double mA = 1.0, mB = 1.4, mC = 0.9;
  const double sAB = yamaguchi_strength_for_energy(AB.beta, mA * mB / (mA + mB), AB.e);
  const double sBC = yamaguchi_strength_for_energy(BC.beta, mB * mC / (mB + mC), BC.e);
  const double sCA = yamaguchi_strength_for_energy(CA.beta, mC * mA / (mC + mA), CA.e);
  struct Label {
    double m1, m2, m3;
    Phys v12, v23, v31;
    double s12, s23, s31;
  };
  const std::vector<Label> labels = {{mA, mB, mC, AB, BC, CA, sAB, sBC, sCA},
                                     {mB, mC, mA, BC, CA, AB, sBC, sCA, sAB},
                                     {mC, mA, mB, CA, AB, BC, sCA, sAB, sBC}};
  std::vector<std::vector<double>> es;
  for (const auto& L : labels) {
    auto jac = jacobi_setup(L.m1, L.m2, L.m3);
    std::vector<SeparablePotential> pots = {
        make_yamaguchi(Pair::p12, L.s12, L.v12.beta, pgrid),
        make_yamaguchi(Pair::p23, L.s23, L.v23.beta, pgrid),
        make_yamaguchi(Pair::p31, L.s31, L.v31.beta, pgrid)};
    auto pb = make_faddeev_problem(jac, pots, 160, 30.0, Cx(-3.0, 0));
    CHECK(hvz_bottom(pb) == Catch::Approx(-1.19996194213).epsilon(1e-9));
    es.push_back(bound_states(pb, -10.0, -1.25));
  }
  REQUIRE(es[0].size() == 1);
  CHECK(es[0][0] == Catch::Approx(-3.95403839604).epsilon(1e-9));
  for (size_t i = 1; i < es.size(); ++i) {
    REQUIRE(es[i].size() == es[0].size());
    for (size_t k = 0; k < es[0].size(); ++k) CHECK(std::abs(es[i][k] - es[0][k]) < 1e-8);
  }
}

TEST_CASE("resolvent reconstruction agrees across routes") {
  TestVector tv;
  tv.coeff = {Cx(0.9, 0), Cx(0.7, 0), Cx(1.2, 0)};
  tv.width = {0.4, 0.6, 0.9};

  auto pb = boson_problem(-3.0);
  pb.z = Cx(hvz_bottom(pb) - 0.5, 0);
  auto rep = resolvent_reconstruct(pb, tv);
  CHECK(rep.max_pairwise < 1e-10);
  CHECK(rep.residual < 1e-10);

  // with all strengths off the reconstruction must collapse to the free resolvent
  auto jac = jacobi_setup(1, 1, 1);
  auto pgrid = build_momentum_grid(240, 60.0, GridScheme::gauss_log);
  std::vector<SeparablePotential> off;
  for (int a = 0; a < 3; ++a) off.push_back(make_yamaguchi((Pair)a, 0.0, 1.0, pgrid));
  auto p0 = make_faddeev_problem(jac, off, 160, 30.0, Cx(-2.0, 0));
  auto rep0 = resolvent_reconstruct(p0, tv);
  CHECK(rep0.max_pairwise < 1e-14);
  CHECK(rep0.residual < 1e-14);
}

TEST_CASE("threshold state counts under resonant pair tuning") {
  auto jac = jacobi_setup(1, 1, 1);
  const double beta = 1.0, m = jac.m(Pair::p12);
  auto pgrid = build_momentum_grid(240, 60.0, GridScheme::gauss_log, 1e-9);
  const double s_res = critical_strength_on_grid(make_yamaguchi(Pair::p12, -1.0, beta, pgrid), m);
  CHECK(s_res == Catch::Approx(-0.10132138278894).epsilon(1e-9));
  CHECK(s_res == Catch::Approx(yamaguchi_critical_strength(beta, m)).epsilon(1e-5));

  std::vector<SeparablePotential> pots;
  for (int a = 0; a < 3; ++a) pots.push_back(make_yamaguchi((Pair)a, s_res, beta, pgrid));
  auto pb = make_faddeev_problem(jac, pots, 160, 30.0, Cx(-1e-12, 0));
  const std::vector<double> cuts = {beta / 4096.0, beta / 128.0, beta / 4.0};

  EfimovOptions opt;
  auto rep = efimov_count(pb, cuts, opt);
  REQUIRE(rep.counts.size() == 3);
  CHECK(rep.counts[0] == 2);
  CHECK(rep.counts[1] == 3);
  CHECK(rep.counts[2] == 4);
  CHECK(rep.top[0] == Catch::Approx(1.9415).epsilon(1e-3));
  CHECK(rep.top[2] == Catch::Approx(2.3034).epsilon(1e-3));

  // a single resonant pair has no exchange path, so the tower is absent
  std::vector<SeparablePotential> one = {make_yamaguchi(Pair::p12, s_res, beta, pgrid)};
  auto rep1 = efimov_count(make_faddeev_problem(jac, one, 160, 30.0, Cx(-1e-12, 0)), cuts, opt);
  CHECK(rep1.counts == std::vector<int>{0, 0, 0});

  // two resonant pairs still generate a tower, with a smaller growth rate
  auto pg2 = build_momentum_grid(240, 60.0, GridScheme::gauss_log, 1e-12);
  const double s2 = critical_strength_on_grid(make_yamaguchi(Pair::p12, -1.0, beta, pg2), m);
  std::vector<SeparablePotential> two = {make_yamaguchi(Pair::p12, s2, beta, pg2),
                                         make_yamaguchi(Pair::p23, s2, beta, pg2)};
  EfimovOptions o2;
  o2.z_probe = -1e-18;
  o2.spectator_inner = 1e-10;
  auto rep2 = efimov_count(make_faddeev_problem(jac, two, 160, 30.0, Cx(-1e-18, 0)),
                           {beta / 16777216.0, beta / 4096.0, beta}, o2);
  CHECK(rep2.counts == std::vector<int>{0, 1, 3});

  // a detuned pair is rejected up front
  std::vector<SeparablePotential> det = {make_yamaguchi(Pair::p12, s_res, beta, pgrid),
                                         make_yamaguchi(Pair::p23, 1.01 * s_res, beta, pgrid),
                                         make_yamaguchi(Pair::p31, s_res, beta, pgrid)};
  CHECK_THROWS_AS(
      efimov_count(make_faddeev_problem(jac, det, 160, 30.0, Cx(-1e-12, 0)), cuts, opt),
      domain_error);
}

TEST_CASE("threshold tower energies approach the universal ratio") {
  auto jac = jacobi_setup(1, 1, 1);
  const double beta = 1.0, m = jac.m(Pair::p12);
  auto pgrid = build_momentum_grid(240, 60.0, GridScheme::gauss_log, 1e-9);
  const double s_res = critical_strength_on_grid(make_yamaguchi(Pair::p12, -1.0, beta, pgrid), m);
  std::vector<SeparablePotential> pots;
  for (int a = 0; a < 3; ++a) pots.push_back(make_yamaguchi((Pair)a, s_res, beta, pgrid));
  auto pb = make_faddeev_problem(jac, pots, 160, 30.0, Cx(-1e-12, 0));

  auto en = efimov_energies(pb, beta / 4.0, 8, -1e-13, -10.0);
  REQUIRE(en.size() == 4);
  CHECK(en[0] == Catch::Approx(-0.00332008).epsilon(1e-4));
  CHECK(en[1] == Catch::Approx(-6.18082e-06).epsilon(1e-4));
  CHECK(en[2] == Catch::Approx(-1.20037e-08).epsilon(1e-4));
  CHECK(en[3] == Catch::Approx(-2.33123e-11).epsilon(1e-4));

  // geometric accumulation: successive ratios settle on exp(-2 pi / 1.00624)
  const double r1 = en[2] / en[1], r2 = en[3] / en[2];
  CHECK(std::abs(r2 - r1) / r1 < 0.15);
  CHECK(r2 == Catch::Approx(1.9434e-3).epsilon(0.05));
}

TEST_CASE("coupling scan locates the critical strength") {
  {
    auto V = make_square_well(-2.0, 1.5);
    std::vector<double> ks;
    for (int i = 0; i <= 20; ++i) ks.push_back(0.05 + 0.05 * i);
    auto rep = coupling_scan(V, 0.8, ks);
    CHECK(rep.resonance);
    CHECK(rep.kappa0 == Catch::Approx(0.342626095).epsilon(1e-6));
    const double closed = pi * pi / (8.0 * 0.8 * 2.0 * 1.5 * 1.5);
    CHECK(rep.kappa0 == Catch::Approx(closed).epsilon(1e-3));
    for (size_t i = 1; i < rep.count.size(); ++i) CHECK(rep.count[i] >= rep.count[i - 1]);
  }
  {
    auto V = make_gaussian(-1.0, 1.0);
    std::vector<double> ks;
    for (int i = 0; i < 14; ++i) ks.push_back(std::pow(1.3, i));
    auto rep = coupling_scan(V, 1.0, ks);
    CHECK(rep.count == std::vector<int>{0, 0, 1, 1, 1, 1, 1, 4, 4, 5, 10, 13, 14, 26});
    CHECK(rep.kappa0 == Catch::Approx(1.3420023255).epsilon(5e-6));
  }
  {
    auto V = make_square_well(-2.0, 1.5);
    CouplingScanOptions o;
    o.n_points = 120;
    CHECK_THROWS_AS(coupling_scan(V, 0.8, {30.0, 40.0}, o), step_size_error);
  }
}

TEST_CASE("separable coupling scan and quadratic shallow-binding margin") {
  const double beta = 1.1, m = 0.7;
  auto grid = build_momentum_grid(240, 60.0, GridScheme::gauss_log);
  auto V = make_yamaguchi(Pair::p12, -0.05, beta, grid);
  auto rep = coupling_scan(V, m, {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0});
  CHECK(rep.resonance);
  CHECK(rep.kappa0 == Catch::Approx(critical_strength_on_grid(V, m) / -0.05).epsilon(2e-6));
  CHECK(rep.kappa0 == Catch::Approx(yamaguchi_critical_strength(beta, m) / -0.05).epsilon(2e-4));

  // binding depth grows quadratically in the margin above the resonance
  auto fine = build_momentum_grid(320, 60.0, GridScheme::gauss_log, 1e-8);
  const double sc = critical_strength_on_grid(make_yamaguchi(Pair::p12, -1.0, beta, fine), m);
  const std::vector<double> deltas = {1e-1, 1e-2, 1e-3};
  std::vector<double> lam;
  for (double d : deltas) {
    auto sp = pair_spectrum(make_yamaguchi(Pair::p12, sc * (1.0 + d), beta, fine), m);
    REQUIRE(sp.energies.size() == 1);
    lam.push_back(-sp.energies[0]);
  }
  CHECK(lam[0] == Catch::Approx(0.00205898).epsilon(1e-4));
  CHECK(lam[2] == Catch::Approx(2.15967e-07).epsilon(1e-4));
  CHECK(std::log(lam[0] / lam[1]) / std::log(deltas[0] / deltas[1]) ==
        Catch::Approx(2.0).margin(0.05));
  CHECK(std::log(lam[1] / lam[2]) / std::log(deltas[1] / deltas[2]) ==
        Catch::Approx(2.0).margin(0.01));
}

TEST_CASE("effective channel matches the linearized airy problem") {
  auto zeros = airy_zero_magnitudes();
  const struct {
    double rho;
    int level;
  } presets[] = {{0.3, 1}, {0.4, 1}, {0.35, 2}};
  const double lam_pin[] = {1.04780004, 1.26931935, 2.03025412};
  const double exp_pin[] = {1.7844, 1.9097, 1.9371};
  for (int c = 0; c < 3; ++c) {
    auto res = effective_channel_build(presets[c].rho, 1.0, presets[c].level);
    const double b = presets[c].rho;
    CHECK(res.model.lambda_level ==
          Catch::Approx(zeros[presets[c].level - 1] * std::pow(b, 2.0 / 3.0)).epsilon(1e-5));
    CHECK(res.model.lambda_level == Catch::Approx(lam_pin[c]).epsilon(1e-6));
    CHECK(strictly_decreasing(res.residual.norm_y));
    CHECK(res.residual.exponent > 1.0);
    CHECK(res.residual.exponent == Catch::Approx(exp_pin[c]).margin(1e-3));
    // the trailing octave approaches the (rho + 4)/3 law from above
    const auto& ny = res.residual.norm_y;
    const double tail = std::log2(ny[ny.size() - 2] / ny.back());
    CHECK(tail == Catch::Approx((presets[c].rho + 4.0) / 3.0).margin(0.12));
  }

  CHECK_THROWS_AS(effective_channel_build(0.7, 1.0, 1), domain_error);
  CHECK_THROWS_AS(effective_channel_build(-0.1, 1.0, 1), domain_error);
  CHECK_THROWS_AS(effective_channel_build(0.3, -1.0, 1), invalid_argument_error);
  CHECK_THROWS_AS(effective_channel_build(0.3, 1.0, 0), invalid_argument_error);
  // exponent lattices hitting the marginal ray are rejected, not mis-summed
  CHECK_THROWS_AS(effective_channel_build(0.25, 1.0, 2), numerical_error);
  CHECK_THROWS_AS(effective_channel_build(0.2, 1.0, 1), numerical_error);
}

TEST_CASE("channel cook integrals separate plain from modified evolution") {
  auto res = effective_channel_build(0.3, 1.0, 1);
  auto rep = channel_cook_probe(res.model);
  CHECK(rep.isometry_defect < 1e-12);

  CHECK(rep.exponent_plain > 0.8);
  CHECK(rep.exponent_plain < 1.2);
  CHECK(rep.exponent_plain == Catch::Approx(1.0094).margin(1e-3));
  CHECK(rep.exponent_modified == Catch::Approx((4.0 - 2.0 * 0.3) / 3.0).margin(0.05));
  CHECK(rep.exponent_modified == Catch::Approx(1.1193).margin(1e-3));
  CHECK(rep.plain[0] == Catch::Approx(0.1039).epsilon(1e-2));
  CHECK(rep.modified[0] == Catch::Approx(0.1324).epsilon(1e-2));

  // octave increments: summable for the modified flow, borderline for the plain
  REQUIRE(rep.partial_modified.size() >= 5);
  CHECK(strictly_decreasing(rep.partial_modified));
  const auto& pm = rep.partial_modified;
  const auto& pp = rep.partial_plain;
  const double rm = pm.back() / pm[pm.size() - 2];
  const double rp = pp.back() / pp[pp.size() - 2];
  CHECK(rm < 0.93);
  CHECK(rm > 0.89);
  CHECK(rp > 0.97);

  // momentum window must stay away from zero speed
  CookChannelOptions bad;
  bad.k0 = 1.0;
  bad.k_width = 0.2;
  CHECK_THROWS_AS(channel_cook_probe(res.model, bad), invalid_argument_error);
  CookChannelOptions low;
  low.x2_max = 500.0;
  CHECK_THROWS_AS(channel_cook_probe(res.model, low), horizon_error);
}

TEST_CASE("trivial channel decays at the exact free rate") {
  auto cm = make_trivial_channel(-2.0, 1.5);
  CHECK(cm.trivial);
  CHECK(cm.lambda_level == Catch::Approx(-0.29004607).epsilon(1e-6));
  CHECK(cm.phi.size() == 1);
  CHECK(cm.resid.empty());

  auto rep = channel_cook_probe(cm);
  CHECK(rep.isometry_defect < 1e-6);
  CHECK(rep.exponent_plain == Catch::Approx(2.0).margin(1e-3));
  CHECK(rep.exponent_modified == Catch::Approx(2.0).margin(1e-3));
  CHECK(rep.plain[0] == Catch::Approx(0.05413).epsilon(1e-2));
}

TEST_CASE("tensor product factorization of the decoupled evolution") {
  auto V31 = make_square_well(-1.3, 2.0);
  auto V23 = make_gaussian(-0.9, 1.4);
  auto rep = tensor_factorization_check(1.0, 1.4, true, V31, V23, 0.0);
  CHECK(rep.evolution_deviation < 1e-10);
  CHECK(rep.projector_deviation < 1e-12);

  // with both wells off each factor is the free evolution
  auto none = make_square_well(0.0, 1.0);
  auto rep0 = tensor_factorization_check(1.0, 1.4, true, none, none, 0.0);
  CHECK(rep0.evolution_deviation < 1e-10);
  CHECK(rep0.projector_deviation < 1e-12);

  CHECK_THROWS_AS(tensor_factorization_check(1.0, 1.4, false, V31, V23, 0.0),
                  invalid_argument_error);
  CHECK_THROWS_AS(tensor_factorization_check(1.0, 1.4, true, V31, V23, -0.2),
                  invalid_argument_error);
  CHECK_THROWS_AS(tensor_factorization_check(-1.0, 1.4, true, V31, V23, 0.0),
                  invalid_argument_error);
}

TEST_CASE("variational gaussian basis brackets the boson ground state") {
  const double ref = -3.94576206217;
  const double e = galerkin_boson_ground(6, 0.06, 2.8, 192, 30.0);
  CHECK(e == Catch::Approx(-3.931057139).epsilon(1e-6));
  CHECK(e > ref);
  CHECK(std::abs(e - ref) / std::abs(ref) < 0.01);
}

TEST_CASE("finite difference clustering reproduces the pair threshold") {
  auto jac = jacobi_setup(1.0, 1.4, 0.9);
  auto V12 = make_gaussian(-0.6, 1.0);
  auto V23 = make_gaussian(-0.9, 1.2);
  auto V31 = make_gaussian(-0.5, 0.8);

  const double l12 = pair_ground_fd(V12, jac.m(Pair::p12), 20.0, 1500);
  const double l23 = pair_ground_fd(V23, jac.m(Pair::p23), 20.0, 1500);
  const double l31 = pair_ground_fd(V31, jac.m(Pair::p31), 20.0, 1500);
  CHECK(l12 == Catch::Approx(-0.17566829).epsilon(1e-4));
  CHECK(l23 == Catch::Approx(-0.37475967).epsilon(1e-4));
  CHECK(l31 == Catch::Approx(-0.08496981).epsilon(1e-4));
  const double ehvz = std::min({l12, l23, l31});

  auto a1 = cluster_arena_fd(jac, V12, V23, V31, 30, 48, 7.5, 10.5);
  auto a2 = cluster_arena_fd(jac, V12, V23, V31, 40, 64, 10.0, 14.0);

  // one isolated level below the threshold, box independent
  CHECK(a2.ground == Catch::Approx(-0.75497041).epsilon(1e-4));
  CHECK(std::abs(a1.ground - a2.ground) < 1e-3);
  CHECK(a2.ground < ehvz - 0.3);

  // the clustering onset extrapolates in the inverse squared box scale
  const double s1 = 0.75, s2 = 1.0;
  const double onset = (s2 * s2 * a2.onset - s1 * s1 * a1.onset) / (s2 * s2 - s1 * s1);
  CHECK(std::abs(onset - ehvz) / std::abs(ehvz) < 0.05);
  CHECK(onset == Catch::Approx(-0.37287618).epsilon(1e-3));
}
