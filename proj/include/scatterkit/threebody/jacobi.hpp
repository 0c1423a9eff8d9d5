#pragma once
#include <array>
#include <cmath>
#include <limits>

#include "../core/errors.hpp"
#include "../core/util.hpp"

namespace sk {

enum class Pair { p12 = 0, p23 = 1, p31 = 2 };

inline const char* to_string(Pair a) {
  switch (a) {
    case Pair::p12: return "12";
    case Pair::p23: return "23";
    case Pair::p31: return "31";
  }
  return "?";
}

// particle indices (i, j, k): the pair is (i, j), the spectator is k
inline std::array<int, 3> pair_members(Pair a) {
  switch (a) {
    case Pair::p12: return {0, 1, 2};
    case Pair::p23: return {1, 2, 0};
    case Pair::p31: return {2, 0, 1};
  }
  return {0, 1, 2};
}

inline Pair cyclic_next(Pair a) { return static_cast<Pair>((static_cast<int>(a) + 1) % 3); }

using Mat2 = std::array<std::array<double, 2>, 2>;
using Row3 = std::array<double, 3>;

namespace detail {

// m_i / (m_i + m_j) with one argument allowed to be infinite
inline double mass_weight(double mi, double mj) {
  if (std::isinf(mi) && std::isinf(mj))
    throw invalid_argument_error("jacobi: two infinite masses");
  if (std::isinf(mi)) return 1.0;
  if (std::isinf(mj)) return 0.0;
  return mi / (mi + mj);
}

inline double reduced_mass(double mi, double mj) {
  if (std::isinf(mi)) return mj;
  if (std::isinf(mj)) return mi;
  return mi * mj / (mi + mj);
}

inline Mat2 mat2_mul(const Mat2& A, const Mat2& B) {
  Mat2 C{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      C[r][c] = A[r][0] * B[0][c] + A[r][1] * B[1][c];
  return C;
}

inline double mat2_det(const Mat2& A) { return A[0][0] * A[1][1] - A[0][1] * A[1][0]; }

}  // namespace detail

// Jacobi kinematics of three particles. Coordinates per pair a = (i, j) with
// spectator k: x_a = x_i - x_j, y_a = x_k - (m_i x_i + m_j x_j)/(m_i + m_j);
// conjugate momenta p_a = (m_j k_i - m_i k_j)/(m_i + m_j), q_a = k_k. The
// frame-change matrices live on the center-of-mass section sum(m x) = 0 and
// sum(k) = 0 (for infinite m3 the section is x3 = 0 with the convention
// k3 = -(k1 + k2)).
struct JacobiSystem {
  std::array<double, 3> mass{1, 1, 1};
  std::array<double, 3> m_pair{};  // reduced mass of the pair, m_a
  std::array<double, 3> n_pair{};  // reduced mass of pair vs spectator, n_a

  bool m3_infinite() const { return std::isinf(mass[2]); }

  double m(Pair a) const { return m_pair[static_cast<int>(a)]; }
  double n(Pair a) const { return n_pair[static_cast<int>(a)]; }

  // rows of the 2x3 map (x1,x2,x3) -> (x_a, y_a)
  std::array<Row3, 2> position_map(Pair a) const {
    const auto [i, j, k] = pair_members(a);
    const double wi = detail::mass_weight(mass[i], mass[j]);
    std::array<Row3, 2> rows{};
    rows[0][i] = 1.0;
    rows[0][j] = -1.0;
    rows[1][k] = 1.0;
    rows[1][i] = -wi;
    rows[1][j] = -(1.0 - wi);
    return rows;
  }

  // rows of the 2x3 map (k1,k2,k3) -> (p_a, q_a)
  std::array<Row3, 2> momentum_map(Pair a) const {
    const auto [i, j, k] = pair_members(a);
    const double wi = detail::mass_weight(mass[i], mass[j]);
    std::array<Row3, 2> rows{};
    rows[0][i] = 1.0 - wi;
    rows[0][j] = -wi;
    rows[1][k] = 1.0;
    return rows;
  }

  // (x_b; y_b) = M (x_a; y_a) on the center-of-mass section
  Mat2 frame_change(Pair b, Pair a) const {
    return compose(position_map(b), position_section(a));
  }

  // (p_b; q_b) = N (p_a; q_a); N is the contragredient of frame_change
  Mat2 momentum_frame_change(Pair b, Pair a) const {
    return compose(momentum_map(b), momentum_section(a));
  }

  // c_ab in p_a = +-(q_b + c_ab q_a) for distinct pairs a, b (finite masses)
  double exchange_coefficient(Pair a, Pair b) const {
    if (a == b) throw invalid_argument_error("exchange_coefficient: pairs must differ");
    const auto [i, j, k] = pair_members(a);
    const auto mb = pair_members(b);
    return mass[mb[2]] / (mass[i] + mass[j]);
  }

  int exchange_sign(Pair a, Pair b) const { return b == cyclic_next(a) ? +1 : -1; }

 private:
  // 3x2 right inverse of the position map under the section constraint
  std::array<std::array<double, 2>, 3> position_section(Pair a) const {
    Row3 constraint{};
    if (m3_infinite()) {
      constraint = {0, 0, 1};
    } else {
      const double mtot = mass[0] + mass[1] + mass[2];
      constraint = {mass[0] / mtot, mass[1] / mtot, mass[2] / mtot};
    }
    return solve_section(position_map(a), constraint);
  }

  std::array<std::array<double, 2>, 3> momentum_section(Pair a) const {
    return solve_section(momentum_map(a), Row3{1, 1, 1});
  }

  static std::array<std::array<double, 2>, 3> solve_section(
      const std::array<Row3, 2>& map, const Row3& constraint) {
    // invert [map; constraint] and keep the first two columns
    double A[3][3] = {{map[0][0], map[0][1], map[0][2]},
                      {map[1][0], map[1][1], map[1][2]},
                      {constraint[0], constraint[1], constraint[2]}};
    double inv[3][3];
    const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                       A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                       A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
    if (std::abs(det) < 1e-14)
      throw numerical_error("jacobi: singular section system");
    inv[0][0] = (A[1][1] * A[2][2] - A[1][2] * A[2][1]) / det;
    inv[0][1] = (A[0][2] * A[2][1] - A[0][1] * A[2][2]) / det;
    inv[0][2] = (A[0][1] * A[1][2] - A[0][2] * A[1][1]) / det;
    inv[1][0] = (A[1][2] * A[2][0] - A[1][0] * A[2][2]) / det;
    inv[1][1] = (A[0][0] * A[2][2] - A[0][2] * A[2][0]) / det;
    inv[1][2] = (A[0][2] * A[1][0] - A[0][0] * A[1][2]) / det;
    inv[2][0] = (A[1][0] * A[2][1] - A[1][1] * A[2][0]) / det;
    inv[2][1] = (A[0][1] * A[2][0] - A[0][0] * A[2][1]) / det;
    inv[2][2] = (A[0][0] * A[1][1] - A[0][1] * A[1][0]) / det;
    std::array<std::array<double, 2>, 3> S{};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 2; ++c) S[r][c] = inv[r][c];
    return S;
  }

  static Mat2 compose(const std::array<Row3, 2>& map,
                      const std::array<std::array<double, 2>, 3>& section) {
    Mat2 M{};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        M[r][c] = map[r][0] * section[0][c] + map[r][1] * section[1][c] +
                  map[r][2] * section[2][c];
    return M;
  }
};

inline JacobiSystem jacobi_setup(double m1, double m2, double m3) {
  if (!(m1 > 0) || std::isinf(m1) || !(m2 > 0) || std::isinf(m2))
    throw invalid_argument_error("jacobi_setup: m1, m2 must be positive and finite");
  if (!(m3 > 0)) throw invalid_argument_error("jacobi_setup: m3 must be positive");
  JacobiSystem sys;
  sys.mass = {m1, m2, m3};
  for (int a = 0; a < 3; ++a) {
    const auto [i, j, k] = pair_members(static_cast<Pair>(a));
    sys.m_pair[a] = detail::reduced_mass(sys.mass[i], sys.mass[j]);
    const double msum =
        std::isinf(sys.mass[i]) || std::isinf(sys.mass[j])
            ? std::numeric_limits<double>::infinity()
            : sys.mass[i] + sys.mass[j];
    sys.n_pair[a] = detail::reduced_mass(msum, sys.mass[k]);
  }
  return sys;
}

}  // namespace sk
