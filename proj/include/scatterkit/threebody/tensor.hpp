#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "../core/errors.hpp"
#include "../core/potential.hpp"
#include "../timedep/spectral.hpp"

namespace sk {

struct TensorFactorizationOptions {
  std::size_t n = 32;  // per-coordinate grid, power of two
  double box_half = 10.0;
  double t = 3.0;
  int n_random = 3;
  std::uint64_t seed = 20260817;
};

struct TensorFactorizationReport {
  double evolution_deviation = 0;  // max_v ||e^{-iHt} v - (e^{-iH1 t} (x) e^{-iH2 t}) v||
  double projector_deviation = 0;  // max entry of (four projector blocks - I)
};

namespace detail {

// spectral projector onto the negative part of a dense symmetric matrix
inline Eigen::MatrixXd point_projector(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es) {
  const Eigen::Index n = es.eigenvalues().size();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    if (es.eigenvalues()(k) < 0)
      P += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose();
  return P;
}

inline Eigen::MatrixXcd evolution_factor(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                                         double t) {
  const Eigen::Index n = es.eigenvalues().size();
  Eigen::VectorXcd ph(n);
  for (Eigen::Index k = 0; k < n; ++k)
    ph(k) = std::exp(std::complex<double>(0.0, -es.eigenvalues()(k) * t));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

// With the third particle frozen at the origin and V12 absent, H splits as
// H1 (x) I + I (x) H2, so the evolution factorizes and the four projector
// blocks P_p/P_c per factor resolve the identity. Both statements are checked
// numerically on a dense two-coordinate grid.
inline TensorFactorizationReport tensor_factorization_check(
    double m1, double m2, bool m3_infinite, const Potential& V31, const Potential& V23,
    double v12_strength, const TensorFactorizationOptions& opt = {}) {
  if (!m3_infinite)
    throw invalid_argument_error("tensor_factorization_check: needs m3 = infinity");
  if (v12_strength != 0)
    throw invalid_argument_error("tensor_factorization_check: needs V12 = 0");
  if (!(m1 > 0) || !(m2 > 0))
    throw invalid_argument_error("tensor_factorization_check: masses must be positive");
  const std::size_t n = opt.n;
  const Box1D box{-opt.box_half, opt.box_half};
  const Potential zero = make_square_well(0.0, 1.0);
  const Eigen::MatrixXd K = dense_hamiltonian_1d(zero, n, box);
  const double dx = box.length() / static_cast<double>(n);
  Eigen::MatrixXd H1 = K / (2.0 * m1);
  Eigen::MatrixXd H2 = K / (2.0 * m2);
  for (std::size_t a = 0; a < n; ++a) {
    const double x = box.xmin + static_cast<double>(a) * dx;
    H1(a, a) += V31(std::abs(x));
    H2(a, a) += V23(std::abs(x));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(H1), es2(H2);
  if (es1.info() != Eigen::Success || es2.info() != Eigen::Success)
    throw numerical_error("tensor_factorization_check: factor eigensolve failed");

  const Eigen::Index nn = static_cast<Eigen::Index>(n * n);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nn, nn);
  for (std::size_t i1 = 0; i1 < n; ++i1)
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      const Eigen::Index row = static_cast<Eigen::Index>(i1 * n + i2);
      for (std::size_t j1 = 0; j1 < n; ++j1)
        H(row, static_cast<Eigen::Index>(j1 * n + i2)) += H1(i1, j1);
      for (std::size_t j2 = 0; j2 < n; ++j2)
        H(row, static_cast<Eigen::Index>(i1 * n + j2)) += H2(i2, j2);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esf(H);
  if (esf.info() != Eigen::Success)
    throw numerical_error("tensor_factorization_check: full eigensolve failed");

  const Eigen::MatrixXcd U1 = detail::evolution_factor(es1, opt.t);
  const Eigen::MatrixXcd U2 = detail::evolution_factor(es2, opt.t);
  Eigen::VectorXcd phf(nn);
  for (Eigen::Index k = 0; k < nn; ++k)
    phf(k) = std::exp(std::complex<double>(0.0, -esf.eigenvalues()(k) * opt.t));

  TensorFactorizationReport rep;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < opt.n_random; ++r) {
    Eigen::VectorXcd v(nn);
    for (Eigen::Index k = 0; k < nn; ++k)
      v(k) = std::complex<double>(gauss(rng), gauss(rng));
    v /= v.norm();
    const Eigen::VectorXcd full = esf.eigenvectors() *
                                  (phf.array() * (esf.eigenvectors().transpose() * v).array())
                                      .matrix();
    Eigen::MatrixXcd wm = Eigen::MatrixXcd::Zero(n, n);
    // v index (i1, i2) = i1 * n + i2: apply U1 on the i1 slot, U2 on the i2 slot
    for (std::size_t i1 = 0; i1 < n; ++i1)
      for (std::size_t i2 = 0; i2 < n; ++i2)
        wm(i2, i1) = v(static_cast<Eigen::Index>(i1 * n + i2));
    wm = U2 * wm * U1.transpose();
    Eigen::VectorXcd fact(nn);
    for (std::size_t i1 = 0; i1 < n; ++i1)
      for (std::size_t i2 = 0; i2 < n; ++i2)
        fact(static_cast<Eigen::Index>(i1 * n + i2)) = wm(i2, i1);
    rep.evolution_deviation = std::max(rep.evolution_deviation, (full - fact).norm());
  }

  const Eigen::MatrixXd P1 = detail::point_projector(es1);
  const Eigen::MatrixXd P2 = detail::point_projector(es2);
  const Eigen::MatrixXd C1 = Eigen::MatrixXd::Identity(n, n) - P1;
  const Eigen::MatrixXd C2 = Eigen::MatrixXd::Identity(n, n) - P2;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(nn, nn);
  auto add_kron = [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    for (std::size_t i1 = 0; i1 < n; ++i1)
      for (std::size_t i2 = 0; i2 < n; ++i2)
        for (std::size_t j1 = 0; j1 < n; ++j1)
          for (std::size_t j2 = 0; j2 < n; ++j2)
            sum(static_cast<Eigen::Index>(i1 * n + i2),
                static_cast<Eigen::Index>(j1 * n + j2)) += A(i1, j1) * B(i2, j2);
  };
  add_kron(P1, P2);
  add_kron(P1, C2);
  add_kron(C1, P2);
  add_kron(C1, C2);
  rep.projector_deviation =
      (sum - Eigen::MatrixXd::Identity(nn, nn)).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace sk
