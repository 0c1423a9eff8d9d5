#pragma once
#include <cmath>
#include <vector>

#include "momentum_ls.hpp"

namespace sk {

struct BornSeriesResult {
  int l = 0;
  double k = 0;
  std::vector<complexd> t_partial;  // on-shell partial sums, orders 0..N
  std::vector<complexd> s_partial;
  std::vector<double> term_norms;   // on-shell magnitude of each new term
  bool convergent = true;
};

// Partial sums of the iterated kernel applied to the first-order term; the
// per-term norms make (non-)convergence observable.
inline BornSeriesResult born_series(const Potential& V, double lambda, int l, int N,
                                    const MomentumLSOptions& opt = {}) {
  if (!(lambda > 0)) throw domain_error("born_series: lambda > 0 required");
  if (N < 0) throw invalid_argument_error("born_series: N >= 0 required");
  const double k = std::sqrt(lambda);
  auto K = detail::build_momentum_kernel(V, k, l, opt);
  const int n = static_cast<int>(K.q.size());
  BornSeriesResult out;
  out.l = l;
  out.k = k;
  Eigen::VectorXcd term = K.b, sum = K.b;
  out.term_norms.push_back(std::abs(term(n)));
  out.t_partial.push_back(sum(n));
  for (int m = 1; m <= N; ++m) {
    term = K.m * term;
    sum += term;
    out.term_norms.push_back(std::abs(term(n)));
    out.t_partial.push_back(sum(n));
  }
  for (const complexd& t : out.t_partial)
    out.s_partial.push_back(1.0 - complexd(0, 1) * pi * k * t);
  const size_t z = out.term_norms.size();
  if (z >= 3 && out.term_norms[z - 1] > out.term_norms[z - 2] &&
      out.term_norms[z - 2] > out.term_norms[z - 3])
    out.convergent = false;
  return out;
}

// First-order phase shift by direct quadrature, independent of the momentum
// kernel machinery.
inline double born_phase_1(const Potential& V, double k, int l,
                           double tail_eps = 1e-12, double r_cap = 60.0) {
  if (!(k > 0)) throw invalid_argument_error("born_phase_1: k > 0 required");
  const auto cut = stationary_cutoff(V, tail_eps, r_cap);
  const double waves = cut.r_cut * 2.0 * k / (2.0 * pi) + 1.0;
  const int panels = static_cast<int>(std::ceil(waves)) + 1;
  std::vector<double> inner;
  for (int i = 1; i < panels; ++i) inner.push_back(cut.r_cut * i / panels);
  for (double b : V.breakpoints()) inner.push_back(b);
  if (cut.taper_from < cut.r_cut) inner.push_back(cut.taper_from);
  std::sort(inner.begin(), inner.end());
  std::vector<double> rq, wq;
  composite_gauss(0.0, cut.r_cut, inner, 12, rq, wq);
  double s = 0;
  for (size_t i = 0; i < rq.size(); ++i) {
    const double j = sph_bessel_j_scalar(l, k * rq[i]);
    s += wq[i] * V(rq[i]) * cut.window(rq[i]) * j * j * rq[i] * rq[i];
  }
  return -k * s;
}

}  // namespace sk
