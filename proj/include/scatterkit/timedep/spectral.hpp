#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "../core/errors.hpp"
#include "../core/fft.hpp"
#include "../core/potential.hpp"
#include "wavepacket.hpp"

namespace sk {

// Dense matrix of -d^2/dx^2 + V on the n-point periodic grid, with the
// Laplacian realized by the same Fourier multiplier the propagators use.
inline Eigen::MatrixXd dense_hamiltonian_1d(const Potential& V, size_t n, Box1D box) {
  if (!is_pow2(n)) throw invalid_argument_error("dense_hamiltonian_1d: power-of-two size");
  const double dx = box.length() / static_cast<double>(n);
  std::vector<complexd> mult(n);
  for (size_t j = 0; j < n; ++j) {
    const double xi = fourier_xi(j, n, dx);
    mult[j] = xi * xi;
  }
  const auto col = ifft(mult);
  Eigen::MatrixXd H(n, n);
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b)
      H(a, b) = col[(a + n - b) % n].real();
  for (size_t a = 0; a < n; ++a) {
    const double x = box.xmin + static_cast<double>(a) * dx;
    const double v = V(std::abs(x));
    if (!std::isfinite(v))
      throw invalid_argument_error("dense_hamiltonian_1d: potential unbounded on the grid");
    H(a, a) += v;
  }
  return H;
}

// Grid eigenpair; vec is L2-normalized against the dx measure.
struct BoundState1D {
  double energy = 0;
  std::vector<double> vec;
};

inline std::vector<BoundState1D> bound_states_1d(const Potential& V, size_t n, Box1D box) {
  const Eigen::MatrixXd H = dense_hamiltonian_1d(V, n, box);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success)
    throw numerical_error("bound_states_1d: eigensolve failed");
  const double dx = box.length() / static_cast<double>(n);
  std::vector<BoundState1D> out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) >= 0) break;
    BoundState1D b;
    b.energy = es.eigenvalues()(k);
    b.vec.resize(n);
    for (size_t i = 0; i < n; ++i) b.vec[i] = es.eigenvectors()(i, k) / std::sqrt(dx);
    out.push_back(std::move(b));
  }
  return out;
}

inline Wavepacket to_wavepacket(const BoundState1D& b, Box1D box) {
  Wavepacket f;
  f.box = box;
  f.dx = box.length() / static_cast<double>(b.vec.size());
  f.samples.assign(b.vec.begin(), b.vec.end());
  f.recompute_norm();
  return f;
}

inline Wavepacket project_out_bound_states(const Wavepacket& f,
                                           const std::vector<BoundState1D>& bound) {
  Wavepacket out = f;
  for (const BoundState1D& b : bound) {
    if (b.vec.size() != f.size())
      throw invalid_argument_error("project_out_bound_states: grid mismatch");
    complexd c = 0;
    for (size_t i = 0; i < f.size(); ++i) c += b.vec[i] * out.samples[i];
    c *= f.dx;
    for (size_t i = 0; i < f.size(); ++i) out.samples[i] -= c * b.vec[i];
  }
  out.recompute_norm();
  return out;
}

}  // namespace sk
