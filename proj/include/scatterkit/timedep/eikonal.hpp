#pragma once
#include <cmath>
#include <limits>
#include <vector>

#include "../core/errors.hpp"
#include "../core/potential.hpp"
#include "../core/util.hpp"
#include "moller.hpp"

namespace sk {

// Space-time wedge c1 t <= x <= c2 t sampled at the given times.
struct EikonalRegion {
  std::vector<double> times;
  double c1 = 0.5;
  double c2 = 2.0;
  int nx = 64;
  double fit_decades = 10.0;
};

struct EikonalResidualResult {
  std::vector<double> times;
  std::vector<double> sup_residual;
  double fit_exponent = 0;  // sup ~ t^{-fit_exponent}; +inf when the sup vanishes
};

// sup over the wedge slice of |dXi/dt + (dXi/dx)^2 + V|.
inline EikonalResidualResult eikonal_residual(const ModifiedPhase& phase,
                                              const Potential& V,
                                              const EikonalRegion& region) {
  if (region.times.empty())
    throw invalid_argument_error("eikonal_residual: no times");
  if (!(region.c1 > 0) || !(region.c2 > region.c1))
    throw invalid_argument_error("eikonal_residual: need 0 < c1 < c2");
  if (region.nx < 2) throw invalid_argument_error("eikonal_residual: nx >= 2");

  EikonalResidualResult res;
  res.times = region.times;
  res.sup_residual.reserve(region.times.size());
  double prev_t = 0;
  for (double t : region.times) {
    if (!(t > prev_t))
      throw invalid_argument_error("eikonal_residual: times must increase from above 0");
    prev_t = t;
    double sup = 0;
    for (int i = 0; i < region.nx; ++i) {
      const double x = region.c1 * t +
                       (region.c2 - region.c1) * t * i / (region.nx - 1.0);
      const double gx = phase.xi_x(x, t);
      sup = std::max(sup, std::abs(phase.xi_t(x, t) + gx * gx + V(std::abs(x))));
    }
    res.sup_residual.push_back(sup);
  }

  bool positive = true;
  for (double s : res.sup_residual) positive = positive && s > 0;
  res.fit_exponent =
      positive ? -fit_power_law(res.times, res.sup_residual, region.fit_decades)
               : std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace sk
