#pragma once
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "util.hpp"

namespace sk {

// Spherical Bessel j_0..j_lmax at x >= 0. Downward Miller recurrence from a
// padded start order, normalized with sum (2n+1) j_n^2 = 1.
inline std::vector<double> sph_bessel_j_array(int lmax, double x) {
  if (lmax < 0) throw invalid_argument_error("sph_bessel_j_array: lmax >= 0");
  std::vector<double> j(lmax + 1, 0.0);
  if (x == 0) {
    j[0] = 1.0;
    return j;
  }
  if (x < 0) throw invalid_argument_error("sph_bessel_j_array: x >= 0 required");
  if (x > lmax + 20) {
    // Upward recurrence is stable once x dominates the order.
    double jm = std::sin(x) / x;
    j[0] = jm;
    if (lmax == 0) return j;
    double jc = (std::sin(x) / x - std::cos(x)) / x;
    j[1] = jc;
    for (int l = 1; l < lmax; ++l) {
      const double jn = (2 * l + 1) / x * jc - jm;
      jm = jc;
      jc = jn;
      j[l + 1] = jc;
    }
    return j;
  }
  const int start = lmax + 20 + static_cast<int>(x);
  double fp = 0.0, fc = 1e-30;
  double norm = 0.0;
  for (int l = start; l >= 0; --l) {
    const double fm = (2 * l + 3) / x * fc - fp;
    fp = fc;
    fc = fm;
    if (l <= lmax) j[l] = fc;
    norm += (2 * l + 1) * fc * fc;
    if (std::abs(fc) > 1e250) {
      const double s = 1e-250;
      fp *= s;
      fc *= s;
      norm *= s * s;
      for (int m = l; m <= lmax; ++m) j[m] *= s;
    }
  }
  // The seed order sits below its first zero, so the unnormalized solution
  // carries a positive overall scale and the sign survives normalization.
  const double scale = 1.0 / std::sqrt(norm);
  for (double& v : j) v *= scale;
  return j;
}

inline double sph_bessel_j(int l, double x) { return sph_bessel_j_array(l, x)[l]; }

// Allocation-free j_l for hot loops (same algorithm, rolling registers).
inline double sph_bessel_j_scalar(int l, double x) {
  if (x == 0) return l == 0 ? 1.0 : 0.0;
  if (x < 0) throw invalid_argument_error("sph_bessel_j_scalar: x >= 0 required");
  if (x > l + 20) {
    double jm = std::sin(x) / x;
    if (l == 0) return jm;
    double jc = (std::sin(x) / x - std::cos(x)) / x;
    for (int m = 1; m < l; ++m) {
      const double jn = (2 * m + 1) / x * jc - jm;
      jm = jc;
      jc = jn;
    }
    return jc;
  }
  const int start = l + 20 + static_cast<int>(x);
  double fp = 0.0, fc = 1e-30, fl = 0.0, norm = 0.0;
  for (int n = start; n >= 0; --n) {
    const double fm = (2 * n + 3) / x * fc - fp;
    fp = fc;
    fc = fm;
    if (n == l) fl = fc;
    norm += (2 * n + 1) * fc * fc;
    if (std::abs(fc) > 1e250) {
      const double s = 1e-250;
      fp *= s;
      fc *= s;
      fl *= s;
      norm *= s * s;
    }
  }
  return fl / std::sqrt(norm);
}

// Spherical Bessel y_0..y_lmax at x > 0 by upward recurrence (stable for y).
inline std::vector<double> sph_bessel_y_array(int lmax, double x) {
  if (lmax < 0) throw invalid_argument_error("sph_bessel_y_array: lmax >= 0");
  if (!(x > 0)) throw invalid_argument_error("sph_bessel_y_array: x > 0 required");
  std::vector<double> y(lmax + 1);
  y[0] = -std::cos(x) / x;
  if (lmax >= 1) y[1] = (-std::cos(x) / x - std::sin(x)) / x;
  for (int l = 1; l < lmax; ++l) y[l + 1] = (2 * l + 1) / x * y[l] - y[l - 1];
  return y;
}

inline double sph_bessel_y(int l, double x) { return sph_bessel_y_array(l, x)[l]; }

// f'_l = f_{l-1} - (l+1)/x f_l for l >= 1; f'_0 = -f_1 for both families.
inline double sph_bessel_j_deriv(int l, double x) {
  auto j = sph_bessel_j_array(l + 1, x);
  if (l == 0) return -j[1];
  return j[l - 1] - (l + 1) / x * j[l];
}

inline double sph_bessel_y_deriv(int l, double x) {
  auto y = sph_bessel_y_array(l + 1, x);
  if (l == 0) return -y[1];
  return y[l - 1] - (l + 1) / x * y[l];
}

// Legendre P_0..P_lmax at t in [-1,1].
inline std::vector<double> legendre_array(int lmax, double t) {
  std::vector<double> p(lmax + 1);
  p[0] = 1.0;
  if (lmax >= 1) p[1] = t;
  for (int l = 1; l < lmax; ++l)
    p[l + 1] = ((2 * l + 1) * t * p[l] - l * p[l - 1]) / (l + 1);
  return p;
}

inline double legendre_p(int l, double t) { return legendre_array(l, t)[l]; }

namespace detail {

// Maclaurin pair for Airy: Ai = c1 f - c2 g, Bi = sqrt(3)(c1 f + c2 g).
inline void airy_series(double z, double& f, double& g, double& fp, double& gp) {
  const double z3 = z * z * z;
  double tf = 1.0, tg = z;
  f = tf;
  g = tg;
  fp = 0.0;
  gp = 1.0;
  for (int k = 0; k < 200; ++k) {
    tf *= z3 / ((3 * k + 2) * (3 * k + 3));
    tg *= z3 / ((3 * k + 3) * (3 * k + 4));
    f += tf;
    g += tg;
    fp += (3 * (k + 1)) * tf / z;
    gp += (3 * (k + 1) + 1) * tg / z;
    if (std::abs(tf) + std::abs(tg) < 1e-18 * (std::abs(f) + std::abs(g))) break;
  }
}

}  // namespace detail

// Airy Ai and Ai' on the real line: Maclaurin series on [-6.5, 4.5], the
// standard asymptotic expansions for x >= 8 and x < -6.5. The series loses
// digits to cancellation on (4.5, 8), so that window is filled by marching
// the differential equation down from x = 8 with Taylor steps; the marched
// solution grows, which keeps the errors relative.
inline void airy_ai(double x, double& ai, double& aip) {
  constexpr double c1 = 0.35502805388781723926;  // Ai(0)
  constexpr double c2 = 0.25881940379280679841;  // -Ai'(0)
  if (x < -6.5) {
    const double y = -x;
    const double zeta = 2.0 / 3.0 * std::pow(y, 1.5);
    double u = 1.0;
    double P = 0, Q = 0, R = 0, S = 0;
    for (int k = 0; k <= 17; ++k) {
      if (k > 0) u *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / (216.0 * k * (2.0 * k - 1));
      const double v = k == 0 ? 1.0 : -(6.0 * k + 1) / (6.0 * k - 1) * u;
      const double sgn = (k / 2) % 2 ? -1.0 : 1.0;
      const double zp = std::pow(zeta, -k);
      if (k % 2 == 0) {
        P += sgn * u * zp;
        R += sgn * v * zp;
      } else {
        Q += sgn * u * zp;
        S += sgn * v * zp;
      }
    }
    const double c = std::cos(zeta - 0.25 * pi), s = std::sin(zeta - 0.25 * pi);
    ai = (c * P + s * Q) / (std::sqrt(pi) * std::pow(y, 0.25));
    aip = (s * R - c * S) * std::pow(y, 0.25) / std::sqrt(pi);
    return;
  }
  if (x <= 4.5) {
    if (x == 0) {
      ai = c1;
      aip = -c2;
      return;
    }
    double f, g, fp, gp;
    detail::airy_series(x, f, g, fp, gp);
    ai = c1 * f - c2 * g;
    aip = c1 * fp - c2 * gp;
    return;
  }
  if (x < 8.0) {
    double a = 8.0, v, vp;
    airy_ai(a, v, vp);
    while (a - x > 1e-14) {
      const double dx = -std::min(1.0, a - x);
      std::vector<double> c(42);
      c[0] = v;
      c[1] = vp;
      c[2] = 0.5 * a * c[0];
      for (int k = 1; k + 2 < static_cast<int>(c.size()); ++k)
        c[k + 2] = (a * c[k] + c[k - 1]) / ((k + 1.0) * (k + 2.0));
      double s = 0, sp = 0;
      for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
        s = s * dx + c[k];
        sp = sp * dx + k * c[k];
      }
      s = s * dx + c[0];
      v = s;
      vp = sp;
      a += dx;
    }
    ai = v;
    aip = vp;
    return;
  }
  const double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
  double u = 1.0, su = 1.0, sv = 1.0;
  for (int k = 1; k <= 30; ++k) {
    u *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / (216.0 * k * (2.0 * k - 1));
    const double tu = (k % 2 ? -1.0 : 1.0) * u / std::pow(zeta, k);
    const double tv = -(6.0 * k + 1) / (6.0 * k - 1) * tu;
    su += tu;
    sv += tv;
    if (std::abs(tu) < 1e-18) break;
  }
  const double pre = std::exp(-zeta) / (2.0 * std::sqrt(pi));
  ai = pre * su / std::pow(x, 0.25);
  aip = -pre * sv * std::pow(x, 0.25);
}

inline double airy_ai(double x) {
  double a, ap;
  airy_ai(x, a, ap);
  return a;
}

inline double airy_ai_deriv(double x) {
  double a, ap;
  airy_ai(x, a, ap);
  return ap;
}

// n-th negative zero of Ai (n = 1, 2, ...), Newton from the McMahon estimate.
inline double airy_zero(int n) {
  if (n < 1) throw invalid_argument_error("airy_zero: n >= 1 required");
  double z = -std::pow(3.0 * pi * (4.0 * n - 1.0) / 8.0, 2.0 / 3.0);
  for (int it = 0; it < 60; ++it) {
    double a, ap;
    airy_ai(z, a, ap);
    const double dz = a / ap;
    z -= dz;
    if (std::abs(dz) < 1e-15) break;
  }
  return z;
}

}  // namespace sk
