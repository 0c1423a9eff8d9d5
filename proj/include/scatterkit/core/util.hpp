#pragma once
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "errors.hpp"

namespace sk {

using complexd = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846264338327950288;

// Least-squares slope of log(y) against log(t), restricted to the trailing
// `decades` of the abscissa. Points with y <= 0 are skipped.
inline double fit_power_law(const std::vector<double>& t,
                            const std::vector<double>& y,
                            double decades = 1.0) {
  if (t.size() != y.size() || t.size() < 2)
    throw invalid_argument_error("fit_power_law: need matching samples");
  double tmax = 0;
  for (double v : t) tmax = std::max(tmax, v);
  const double tmin = tmax / std::pow(10.0, decades);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < tmin || y[i] <= 0) continue;
    const double lx = std::log(t[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw numerical_error("fit_power_law: fewer than 2 usable points");
  const double det = n * sxx - sx * sx;
  if (det == 0) throw numerical_error("fit_power_law: degenerate abscissa");
  return (n * sxy - sx * sy) / det;
}

// Slope of y against log(t) over the trailing decades (log growth tests).
inline double fit_log_slope(const std::vector<double>& t,
                            const std::vector<double>& y,
                            double decades = 1.0) {
  if (t.size() != y.size() || t.size() < 2)
    throw invalid_argument_error("fit_log_slope: need matching samples");
  double tmax = 0;
  for (double v : t) tmax = std::max(tmax, v);
  const double tmin = tmax / std::pow(10.0, decades);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < tmin) continue;
    const double lx = std::log(t[i]);
    sx += lx; sy += y[i]; sxx += lx * lx; sxy += lx * y[i];
    ++n;
  }
  if (n < 2) throw numerical_error("fit_log_slope: fewer than 2 usable points");
  const double det = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / det;
}

// FNV-1a over raw bytes; used for provenance hashes of grids.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t hash_doubles(const std::vector<double>& v, uint64_t seed = 0) {
  uint64_t h = fnv1a(&seed, sizeof seed);
  if (!v.empty()) h = fnv1a(v.data(), v.size() * sizeof(double), h);
  return h;
}

// Deterministic parallel for: the index decomposition is fixed by (n, nthreads),
// each worker writes only to its own index range.
inline int& worker_threads() {
  static int n = 1;
  return n;
}

inline void parallel_for(size_t n, const std::function<void(size_t)>& body) {
  const int nt = std::max(1, worker_threads());
  if (nt == 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const size_t chunk = (n + nt - 1) / nt;
  std::vector<std::thread> pool;
  for (int w = 0; w < nt; ++w) {
    const size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace sk
