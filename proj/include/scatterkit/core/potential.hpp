#pragma once
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "util.hpp"

namespace sk {

enum class PotentialKind { square_well, gaussian, yukawa, power_tail, truncated_coulomb };

inline const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::square_well: return "square-well";
    case PotentialKind::gaussian: return "gaussian";
    case PotentialKind::yukawa: return "yukawa";
    case PotentialKind::power_tail: return "power-tail";
    case PotentialKind::truncated_coulomb: return "truncated-coulomb";
  }
  return "?";
}

// Radial potential descriptor. p1/p2 are kind-specific: square_well
// (depth, radius), gaussian (amplitude, width), yukawa (coupling, screening),
// power_tail (amplitude, rho), truncated_coulomb (amplitude, -).
struct Potential {
  PotentialKind kind = PotentialKind::square_well;
  double p1 = 0;
  double p2 = 1;
  double decay_C = 0;    // |V(r)| <= decay_C (1+r)^{-decay_rho} on the sampled range
  double decay_rho = 0;
  std::string name;

  double operator()(double r) const {
    switch (kind) {
      case PotentialKind::square_well: return r < p2 ? p1 : 0.0;
      case PotentialKind::gaussian: return p1 * std::exp(-(r / p2) * (r / p2));
      case PotentialKind::yukawa: return p1 * std::exp(-p2 * r) / r;
      case PotentialKind::power_tail: return p1 * std::pow(1.0 + std::abs(r), -p2);
      case PotentialKind::truncated_coulomb: return p1 / std::sqrt(r * r + 1.0);
    }
    return 0;
  }

  double derivative(double r) const {
    switch (kind) {
      case PotentialKind::square_well: return 0.0;
      case PotentialKind::gaussian:
        return p1 * std::exp(-(r / p2) * (r / p2)) * (-2.0 * r / (p2 * p2));
      case PotentialKind::yukawa:
        return -p1 * std::exp(-p2 * r) * (p2 * r + 1.0) / (r * r);
      case PotentialKind::power_tail: {
        const double s = r < 0 ? -1.0 : 1.0;
        return -s * p1 * p2 * std::pow(1.0 + std::abs(r), -p2 - 1.0);
      }
      case PotentialKind::truncated_coulomb:
        return -p1 * r * std::pow(r * r + 1.0, -1.5);
    }
    return 0;
  }

  // Radii where V or V' is non-smooth; quadrature panels split here.
  std::vector<double> breakpoints() const {
    if (kind == PotentialKind::square_well && p1 != 0) return {p2};
    return {};
  }

  bool singular_at_origin() const { return kind == PotentialKind::yukawa; }

  // Smallest sampled radius with |V| below eps for all larger samples.
  double radius_where_below(double eps) const {
    if (kind == PotentialKind::square_well) return p2;
    double r = 1.0;
    for (int it = 0; it < 400; ++it) {
      if (std::abs((*this)(r)) < eps && std::abs((*this)(2 * r)) < eps) return r;
      r *= 1.25;
    }
    throw numerical_error("radius_where_below: no radius found under eps");
  }

  Potential scaled(double kappa) const {
    Potential q = *this;
    q.p1 *= kappa;
    q.decay_C *= std::abs(kappa);
    q.name = "";
    return q;
  }
};

namespace detail {

// sup |V(r)| (1+r)^rho over log-spaced samples of [r_lo, r_hi], padded 0.1%.
inline double envelope_constant(const Potential& V, double rho, double r_lo, double r_hi) {
  const int n = 4000;
  const double la = std::log(r_lo), lb = std::log(r_hi);
  double c = 0;
  for (int i = 0; i <= n; ++i) {
    const double r = std::exp(la + (lb - la) * i / n);
    c = std::max(c, std::abs(V(r)) * std::pow(1.0 + r, rho));
  }
  return c * 1.001;
}

}  // namespace detail

inline Potential make_square_well(double depth, double radius) {
  Potential V;
  V.kind = PotentialKind::square_well;
  V.p1 = depth;
  V.p2 = radius;
  V.decay_rho = 8.0;
  V.decay_C = std::abs(depth) * std::pow(1.0 + radius, 8.0) * 1.001;
  return V;
}

inline Potential make_gaussian(double amplitude, double width) {
  Potential V;
  V.kind = PotentialKind::gaussian;
  V.p1 = amplitude;
  V.p2 = width;
  V.decay_rho = 8.0;
  V.decay_C = detail::envelope_constant(V, 8.0, 1e-4, 50.0 * width);
  return V;
}

inline Potential make_yukawa(double coupling, double screening) {
  Potential V;
  V.kind = PotentialKind::yukawa;
  V.p1 = coupling;
  V.p2 = screening;
  V.decay_rho = 8.0;
  V.decay_C = detail::envelope_constant(V, 8.0, 1e-4, 100.0 / screening);
  return V;
}

inline Potential make_power_tail(double amplitude, double rho) {
  if (!(rho > 0)) throw invalid_argument_error("power_tail: rho must be positive");
  Potential V;
  V.kind = PotentialKind::power_tail;
  V.p1 = amplitude;
  V.p2 = rho;
  V.decay_rho = rho;
  V.decay_C = std::abs(amplitude);
  return V;
}

inline Potential make_truncated_coulomb(double amplitude) {
  Potential V;
  V.kind = PotentialKind::truncated_coulomb;
  V.p1 = amplitude;
  V.decay_rho = 1.0;
  V.decay_C = std::abs(amplitude) * std::sqrt(2.0) * 1.001;
  return V;
}

inline std::vector<std::string> preset_names() {
  return {"square-well", "gaussian", "yukawa", "power-tail-15",
          "power-tail-2", "truncated-coulomb", "zero"};
}

inline Potential preset_potential(const std::string& name) {
  Potential V;
  if (name == "square-well") V = make_square_well(-2.0, 1.0);
  else if (name == "gaussian") V = make_gaussian(-1.5, 1.2);
  else if (name == "yukawa") V = make_yukawa(-1.0, 1.0);
  else if (name == "power-tail-15") V = make_power_tail(0.5, 1.5);
  else if (name == "power-tail-2") V = make_power_tail(0.5, 2.0);
  else if (name == "truncated-coulomb") V = make_truncated_coulomb(0.4);
  else if (name == "zero") V = make_square_well(0.0, 1.0);
  else throw invalid_argument_error("unknown potential preset: " + name);
  V.name = name;
  return V;
}

}  // namespace sk
