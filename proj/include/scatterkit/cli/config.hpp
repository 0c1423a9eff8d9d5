#pragma once
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "../core/potential.hpp"
#include "../threebody/jacobi.hpp"
#include "../threebody/separable.hpp"
#include "ini.hpp"

namespace sk {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "phaseshift",  "smatrix",       "born",         "crosssection",
      "propagate",   "cook",          "moller",       "scattering-map",
      "faddeev-bound", "coupling-scan", "efimov-count", "channel-airy",
      "channel-cook"};
  return names;
}

struct ExperimentConfig {
  // [run]
  std::string experiment;
  std::uint64_t seed = 1;
  std::string out;

  // [potential]
  std::string preset = "square-well";
  bool has_p1 = false, has_p2 = false;
  double p1 = 0, p2 = 0;

  // [stationary]
  std::vector<double> lambda = {0.5, 1.0, 2.0};
  int l = 0;
  int orders = 8;
  int l_max = -1;  // -1: adaptive partial-wave cutoff

  // [timedep]
  int n = 4096;
  double box_half = 150.0;
  double dx = 0.0;  // > 0 overrides box_half with a sharp grid spacing
  double x0 = 0.0, xi0 = 1.5, width = 2.0;
  double t0 = 1.0, horizon = 20.0, dt = 2e-3;
  int samples = 20;
  int points_per_octave = 6;
  int doublings = 6;
  std::string modifier = "none";
  double capture_radius = 0.0;

  // [threebody]
  double m1 = 1.0, m2 = 1.0, m3 = 1.0;
  double beta = 1.0;
  double pair_energy = -1.0;
  int pair_n = 240;
  double pair_pmax = 60.0;
  double pair_inner = 1e-9;
  int spectator_n = 160;
  double q_max = 30.0;
  double z_min = -8.0, z_max = -1.05;
  bool symmetric = true;
  std::vector<double> cutoffs = {0.000244140625, 0.0078125, 0.25};
  int max_states = 4;
  double z_shallow = -1e-13, z_deep = -10.0;
  double z_probe = -1e-12;
  double mu = 1.0;
  double kappa_min = 0.05, kappa_max = 4.0;
  int scan_n = 24;
  int n_points = 40000;
  int scan_l_max = 60;

  // [channel]
  double rho = 0.3;
  double v12 = 1.0;
  int level = 1;
  double k0 = 2.0, k_width = 0.25, x2_max = 1e5;
  int t_pow_hi = 10;
};

namespace detail {

inline bool uses_potential(const std::string& e) {
  return e == "phaseshift" || e == "smatrix" || e == "born" ||
         e == "crosssection" || e == "propagate" || e == "cook" ||
         e == "moller" || e == "scattering-map" || e == "coupling-scan";
}

inline bool uses_stationary(const std::string& e) {
  return e == "phaseshift" || e == "smatrix" || e == "born" || e == "crosssection";
}

inline bool uses_timedep(const std::string& e) {
  return e == "propagate" || e == "cook" || e == "moller" || e == "scattering-map";
}

inline bool uses_threebody(const std::string& e) {
  return e == "faddeev-bound" || e == "coupling-scan" || e == "efimov-count";
}

inline bool uses_channel(const std::string& e) {
  return e == "channel-airy" || e == "channel-cook";
}

inline void apply_experiment_defaults(ExperimentConfig& c) {
  const std::string& e = c.experiment;
  if (e == "born") {
    c.preset = "yukawa";
    c.lambda = {1.0};
  } else if (e == "crosssection" || e == "coupling-scan") {
    c.preset = "gaussian";
  } else if (e == "propagate") {
    c.preset = "gaussian";
    c.x0 = -20.0;
  } else if (e == "cook") {
    c.preset = "power-tail-2";
    c.n = 8192;
    c.box_half = 400.0;
    c.width = 3.0;
    c.horizon = 64.0;
  } else if (e == "moller") {
    c.preset = "power-tail-2";
    c.n = 2048;
    c.box_half = 600.0;
  } else if (e == "scattering-map") {
    c.n = 4096;
    c.dx = 2.0 / 21.0;
    c.horizon = 16.0;
    c.samples = 4;
  } else if (e == "efimov-count") {
    c.spectator_n = 320;
  }
}

struct KeyReader {
  const IniDoc& doc;
  std::set<std::pair<std::string, std::string>> consumed;

  bool has(const std::string& sec, const std::string& key) {
    return doc.get(sec, key) != nullptr;
  }

  const std::string* take(const std::string& sec, const std::string& key) {
    const std::string* v = doc.get(sec, key);
    if (v) consumed.insert({sec, key});
    return v;
  }

  static double to_double(const std::string& sec, const std::string& key,
                          const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
      throw config_error("value of " + sec + "." + key + " is not a number: '" + v + "'");
    return x;
  }

  double number(const std::string& sec, const std::string& key, double def) {
    const std::string* v = take(sec, key);
    return v ? to_double(sec, key, *v) : def;
  }

  int integer(const std::string& sec, const std::string& key, int def) {
    const std::string* v = take(sec, key);
    if (!v) return def;
    const double x = to_double(sec, key, *v);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
      throw config_error("value of " + sec + "." + key + " is not an integer: '" + *v + "'");
    return i;
  }

  std::uint64_t unsigned64(const std::string& sec, const std::string& key,
                           std::uint64_t def) {
    const std::string* v = take(sec, key);
    if (!v) return def;
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0' || v->find('-') != std::string::npos)
      throw config_error("value of " + sec + "." + key +
                         " is not an unsigned integer: '" + *v + "'");
    return x;
  }

  bool boolean(const std::string& sec, const std::string& key, bool def) {
    const std::string* v = take(sec, key);
    if (!v) return def;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw config_error("value of " + sec + "." + key + " is not a boolean: '" + *v + "'");
  }

  std::string token(const std::string& sec, const std::string& key,
                    const std::string& def, const std::vector<std::string>& allowed) {
    const std::string* v = take(sec, key);
    const std::string s = v ? *v : def;
    for (const auto& a : allowed)
      if (s == a) return s;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw config_error("value of " + sec + "." + key + " must be one of {" + list +
                       "} (got '" + s + "')");
  }

  std::string raw(const std::string& sec, const std::string& key, std::string def) {
    const std::string* v = take(sec, key);
    return v ? *v : def;
  }

  std::vector<double> list(const std::string& sec, const std::string& key,
                           std::vector<double> def) {
    const std::string* v = take(sec, key);
    if (!v) return def;
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= v->size()) {
      size_t comma = v->find(',', pos);
      if (comma == std::string::npos) comma = v->size();
      const std::string item = ini_trim(v->substr(pos, comma - pos));
      if (item.empty())
        throw config_error("empty entry in list " + sec + "." + key);
      out.push_back(to_double(sec, key, item));
      pos = comma + 1;
    }
    return out;
  }

  void finish(const std::vector<std::string>& applicable) const {
    for (const auto& s : doc.sections) {
      bool ok = false;
      for (const auto& a : applicable) ok = ok || a == s.name;
      if (!ok)
        throw config_error("section [" + s.name + "] does not apply to this experiment");
      for (const auto& e : s.entries)
        if (!consumed.count({s.name, e.first}))
          throw config_error("unknown key " + s.name + "." + e.first);
    }
  }
};

}  // namespace detail

inline ExperimentConfig parse_config(const IniDoc& doc) {
  detail::KeyReader rd{doc, {}};
  ExperimentConfig c;
  if (!rd.has("run", "experiment"))
    throw config_error("missing run.experiment");
  c.experiment = rd.token("run", "experiment", "", experiment_names());
  c.seed = rd.unsigned64("run", "seed", 1);
  c.out = rd.raw("run", "out", "");
  detail::apply_experiment_defaults(c);

  const std::string& e = c.experiment;
  if (detail::uses_potential(e)) {
    c.preset = rd.token("potential", "preset", c.preset, preset_names());
    c.has_p1 = rd.has("potential", "p1");
    if (c.has_p1) c.p1 = rd.number("potential", "p1", 0);
    c.has_p2 = rd.has("potential", "p2");
    if (c.has_p2) c.p2 = rd.number("potential", "p2", 0);
  }
  if (detail::uses_stationary(e)) {
    c.lambda = rd.list("stationary", "lambda", c.lambda);
    if (e == "born") {
      c.l = rd.integer("stationary", "l", c.l);
      c.orders = rd.integer("stationary", "orders", c.orders);
    } else {
      c.l_max = rd.integer("stationary", "l_max", c.l_max);
    }
  }
  if (detail::uses_timedep(e)) {
    c.n = rd.integer("timedep", "n", c.n);
    c.box_half = rd.number("timedep", "box_half", c.box_half);
    c.dx = rd.number("timedep", "dx", c.dx);
    c.x0 = rd.number("timedep", "x0", c.x0);
    c.xi0 = rd.number("timedep", "xi0", c.xi0);
    c.width = rd.number("timedep", "width", c.width);
    if (e == "propagate" || e == "scattering-map") {
      c.horizon = rd.number("timedep", "horizon", c.horizon);
      c.dt = rd.number("timedep", "dt", c.dt);
      c.samples = rd.integer("timedep", "samples", c.samples);
    }
    if (e == "cook") {
      c.t0 = rd.number("timedep", "t0", c.t0);
      c.horizon = rd.number("timedep", "horizon", c.horizon);
      c.points_per_octave = rd.integer("timedep", "points_per_octave", c.points_per_octave);
    }
    if (e == "moller") {
      c.t0 = rd.number("timedep", "t0", c.t0);
      c.doublings = rd.integer("timedep", "doublings", c.doublings);
      c.dt = rd.number("timedep", "dt", c.dt);
      c.modifier = rd.token("timedep", "modifier", c.modifier,
                            {"none", "coulomb-log", "average"});
    }
    if (e == "scattering-map")
      c.capture_radius = rd.number("timedep", "capture_radius", c.capture_radius);
  }
  if (detail::uses_threebody(e)) {
    if (e == "faddeev-bound" || e == "efimov-count") {
      c.m1 = rd.number("threebody", "m1", c.m1);
      c.m2 = rd.number("threebody", "m2", c.m2);
      c.m3 = rd.number("threebody", "m3", c.m3);
      c.beta = rd.number("threebody", "beta", c.beta);
      c.pair_n = rd.integer("threebody", "pair_n", c.pair_n);
      c.pair_pmax = rd.number("threebody", "pair_pmax", c.pair_pmax);
      c.pair_inner = rd.number("threebody", "pair_inner", c.pair_inner);
      c.spectator_n = rd.integer("threebody", "spectator_n", c.spectator_n);
      c.q_max = rd.number("threebody", "q_max", c.q_max);
    }
    if (e == "faddeev-bound") {
      c.pair_energy = rd.number("threebody", "pair_energy", c.pair_energy);
      c.z_min = rd.number("threebody", "z_min", c.z_min);
      c.z_max = rd.number("threebody", "z_max", c.z_max);
      c.symmetric = rd.boolean("threebody", "symmetric", c.symmetric);
    }
    if (e == "efimov-count") {
      c.cutoffs = rd.list("threebody", "cutoffs", c.cutoffs);
      c.max_states = rd.integer("threebody", "max_states", c.max_states);
      c.z_shallow = rd.number("threebody", "z_shallow", c.z_shallow);
      c.z_deep = rd.number("threebody", "z_deep", c.z_deep);
      c.z_probe = rd.number("threebody", "z_probe", c.z_probe);
    }
    if (e == "coupling-scan") {
      c.mu = rd.number("threebody", "mu", c.mu);
      c.kappa_min = rd.number("threebody", "kappa_min", c.kappa_min);
      c.kappa_max = rd.number("threebody", "kappa_max", c.kappa_max);
      c.scan_n = rd.integer("threebody", "scan_n", c.scan_n);
      c.n_points = rd.integer("threebody", "n_points", c.n_points);
      c.scan_l_max = rd.integer("threebody", "l_max", c.scan_l_max);
    }
  }
  if (detail::uses_channel(e)) {
    c.rho = rd.number("channel", "rho", c.rho);
    c.v12 = rd.number("channel", "v12", c.v12);
    c.level = rd.integer("channel", "level", c.level);
    if (e == "channel-cook") {
      c.k0 = rd.number("channel", "k0", c.k0);
      c.k_width = rd.number("channel", "k_width", c.k_width);
      c.x2_max = rd.number("channel", "x2_max", c.x2_max);
      c.t_pow_hi = rd.integer("channel", "t_pow_hi", c.t_pow_hi);
    }
  }
  std::vector<std::string> applicable = {"run"};
  if (detail::uses_potential(e)) applicable.push_back("potential");
  if (detail::uses_stationary(e)) applicable.push_back("stationary");
  if (detail::uses_timedep(e)) applicable.push_back("timedep");
  if (detail::uses_threebody(e)) applicable.push_back("threebody");
  if (detail::uses_channel(e)) applicable.push_back("channel");
  rd.finish(applicable);
  return c;
}

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i)
    s += (i ? ", " : "") + format_g17(v[i]);
  return s;
}

inline IniDoc config_document(const ExperimentConfig& c) {
  IniDoc d;
  d.set("run", "experiment", c.experiment);
  d.set("run", "seed", std::to_string(c.seed));
  if (!c.out.empty()) d.set("run", "out", c.out);

  const std::string& e = c.experiment;
  if (detail::uses_potential(e)) {
    d.set("potential", "preset", c.preset);
    if (c.has_p1) d.set("potential", "p1", format_g17(c.p1));
    if (c.has_p2) d.set("potential", "p2", format_g17(c.p2));
  }
  if (detail::uses_stationary(e)) {
    d.set("stationary", "lambda", format_list(c.lambda));
    if (e == "born") {
      d.set("stationary", "l", std::to_string(c.l));
      d.set("stationary", "orders", std::to_string(c.orders));
    } else {
      d.set("stationary", "l_max", std::to_string(c.l_max));
    }
  }
  if (detail::uses_timedep(e)) {
    d.set("timedep", "n", std::to_string(c.n));
    d.set("timedep", "box_half", format_g17(c.box_half));
    d.set("timedep", "dx", format_g17(c.dx));
    d.set("timedep", "x0", format_g17(c.x0));
    d.set("timedep", "xi0", format_g17(c.xi0));
    d.set("timedep", "width", format_g17(c.width));
    if (e == "propagate" || e == "scattering-map") {
      d.set("timedep", "horizon", format_g17(c.horizon));
      d.set("timedep", "dt", format_g17(c.dt));
      d.set("timedep", "samples", std::to_string(c.samples));
    }
    if (e == "cook") {
      d.set("timedep", "t0", format_g17(c.t0));
      d.set("timedep", "horizon", format_g17(c.horizon));
      d.set("timedep", "points_per_octave", std::to_string(c.points_per_octave));
    }
    if (e == "moller") {
      d.set("timedep", "t0", format_g17(c.t0));
      d.set("timedep", "doublings", std::to_string(c.doublings));
      d.set("timedep", "dt", format_g17(c.dt));
      d.set("timedep", "modifier", c.modifier);
    }
    if (e == "scattering-map")
      d.set("timedep", "capture_radius", format_g17(c.capture_radius));
  }
  if (detail::uses_threebody(e)) {
    if (e == "faddeev-bound" || e == "efimov-count") {
      d.set("threebody", "m1", format_g17(c.m1));
      d.set("threebody", "m2", format_g17(c.m2));
      d.set("threebody", "m3", format_g17(c.m3));
      d.set("threebody", "beta", format_g17(c.beta));
      d.set("threebody", "pair_n", std::to_string(c.pair_n));
      d.set("threebody", "pair_pmax", format_g17(c.pair_pmax));
      d.set("threebody", "pair_inner", format_g17(c.pair_inner));
      d.set("threebody", "spectator_n", std::to_string(c.spectator_n));
      d.set("threebody", "q_max", format_g17(c.q_max));
    }
    if (e == "faddeev-bound") {
      d.set("threebody", "pair_energy", format_g17(c.pair_energy));
      d.set("threebody", "z_min", format_g17(c.z_min));
      d.set("threebody", "z_max", format_g17(c.z_max));
      d.set("threebody", "symmetric", c.symmetric ? "true" : "false");
    }
    if (e == "efimov-count") {
      d.set("threebody", "cutoffs", format_list(c.cutoffs));
      d.set("threebody", "max_states", std::to_string(c.max_states));
      d.set("threebody", "z_shallow", format_g17(c.z_shallow));
      d.set("threebody", "z_deep", format_g17(c.z_deep));
      d.set("threebody", "z_probe", format_g17(c.z_probe));
    }
    if (e == "coupling-scan") {
      d.set("threebody", "mu", format_g17(c.mu));
      d.set("threebody", "kappa_min", format_g17(c.kappa_min));
      d.set("threebody", "kappa_max", format_g17(c.kappa_max));
      d.set("threebody", "scan_n", std::to_string(c.scan_n));
      d.set("threebody", "n_points", std::to_string(c.n_points));
      d.set("threebody", "l_max", std::to_string(c.scan_l_max));
    }
  }
  if (detail::uses_channel(e)) {
    d.set("channel", "rho", format_g17(c.rho));
    d.set("channel", "v12", format_g17(c.v12));
    d.set("channel", "level", std::to_string(c.level));
    if (e == "channel-cook") {
      d.set("channel", "k0", format_g17(c.k0));
      d.set("channel", "k_width", format_g17(c.k_width));
      d.set("channel", "x2_max", format_g17(c.x2_max));
      d.set("channel", "t_pow_hi", std::to_string(c.t_pow_hi));
    }
  }
  return d;
}

inline std::string serialize_config(const ExperimentConfig& c) {
  return serialize_ini(config_document(c));
}

inline Potential build_potential(const ExperimentConfig& c) {
  Potential base = preset_potential(c.preset);
  if (!c.has_p1 && !c.has_p2) return base;
  const double p1 = c.has_p1 ? c.p1 : base.p1;
  const double p2 = c.has_p2 ? c.p2 : base.p2;
  Potential V;
  switch (base.kind) {
    case PotentialKind::square_well: V = make_square_well(p1, p2); break;
    case PotentialKind::gaussian: V = make_gaussian(p1, p2); break;
    case PotentialKind::yukawa: V = make_yukawa(p1, p2); break;
    case PotentialKind::power_tail: V = make_power_tail(p1, p2); break;
    case PotentialKind::truncated_coulomb: V = make_truncated_coulomb(p1); break;
  }
  V.name = c.preset;
  return V;
}

namespace detail {

inline bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

inline void range_fail(const std::string& what) { throw domain_error(what); }

}  // namespace detail

// Numeric bounds only; structural problems are reported by parse_config.
inline void range_check(const ExperimentConfig& c) {
  using detail::range_fail;
  const std::string& e = c.experiment;
  if (detail::uses_potential(e)) build_potential(c);
  if (detail::uses_stationary(e)) {
    if (c.lambda.empty())
      range_fail("range violation: stationary.lambda must contain at least one value");
    for (double lam : c.lambda)
      if (!(lam > 0))
        range_fail("range violation: stationary.lambda must be positive (got " +
                   format_g17(lam) + ")");
    if (e == "born") {
      if (c.lambda.size() != 1)
        range_fail("range violation: stationary.lambda must contain exactly one value for born");
      if (c.l < 0)
        range_fail("range violation: stationary.l must be nonnegative");
      if (c.orders < 0 || c.orders > 64)
        range_fail("range violation: stationary.orders must lie in [0, 64]");
    } else if (c.l_max < -1 || c.l_max > 400) {
      range_fail("range violation: stationary.l_max must lie in [-1, 400]");
    }
  }
  if (detail::uses_timedep(e)) {
    if (!detail::power_of_two(c.n) || c.n < 16)
      range_fail("range violation: timedep.n must be a power of two, at least 16");
    if (!(c.box_half > 0) && !(c.dx > 0))
      range_fail("range violation: timedep.box_half must be positive");
    if (c.dx < 0)
      range_fail("range violation: timedep.dx must be nonnegative");
    if (!(c.width > 0))
      range_fail("range violation: timedep.width must be positive");
    if (!(c.dt > 0))
      range_fail("range violation: timedep.dt must be positive");
    if (!(c.horizon > 0))
      range_fail("range violation: timedep.horizon must be positive");
    if ((e == "cook" || e == "moller") && !(c.t0 > 0))
      range_fail("range violation: timedep.t0 must be positive");
    if (e == "cook" && !(c.horizon > c.t0))
      range_fail("range violation: timedep.horizon must exceed timedep.t0");
    if (e == "cook" && c.points_per_octave < 2)
      range_fail("range violation: timedep.points_per_octave must be at least 2");
    if (e == "moller" && c.doublings < 1)
      range_fail("range violation: timedep.doublings must be at least 1");
    if ((e == "propagate" || e == "scattering-map") && c.samples < 1)
      range_fail("range violation: timedep.samples must be at least 1");
    if (e == "scattering-map" && c.capture_radius < 0)
      range_fail("range violation: timedep.capture_radius must be nonnegative");
  }
  if (detail::uses_threebody(e)) {
    if (e == "faddeev-bound" || e == "efimov-count") {
      if (!(c.m1 > 0) || !(c.m2 > 0) || !(c.m3 > 0))
        range_fail("range violation: threebody masses must be positive");
      if (!(c.beta > 0))
        range_fail("range violation: threebody.beta must be positive");
      if (c.pair_n < 16)
        range_fail("range violation: threebody.pair_n must be at least 16");
      if (!(c.pair_pmax > 0))
        range_fail("range violation: threebody.pair_pmax must be positive");
      if (!(c.pair_inner > 0) || !(c.pair_inner < c.pair_pmax))
        range_fail("range violation: threebody.pair_inner must lie in (0, pair_pmax)");
      if (c.spectator_n < 16)
        range_fail("range violation: threebody.spectator_n must be at least 16");
      if (!(c.q_max > 0))
        range_fail("range violation: threebody.q_max must be positive");
    }
    if (e == "faddeev-bound") {
      if (!(c.pair_energy < 0))
        range_fail("range violation: threebody.pair_energy must be negative (got " +
                   format_g17(c.pair_energy) + ")");
      if (!(c.z_min < c.z_max) || !(c.z_max < 0))
        range_fail("range violation: threebody z window needs z_min < z_max < 0");
    }
    if (e == "efimov-count") {
      if (c.cutoffs.empty())
        range_fail("range violation: threebody.cutoffs must contain at least one value");
      for (size_t i = 0; i < c.cutoffs.size(); ++i)
        if (!(c.cutoffs[i] > 0) || (i > 0 && !(c.cutoffs[i] > c.cutoffs[i - 1])))
          range_fail("range violation: threebody.cutoffs must be positive and increasing");
      if (c.max_states < 1)
        range_fail("range violation: threebody.max_states must be at least 1");
      if (!(c.z_deep < c.z_shallow) || !(c.z_shallow < 0))
        range_fail("range violation: threebody energy window needs z_deep < z_shallow < 0");
      if (!(c.z_probe < 0))
        range_fail("range violation: threebody.z_probe must be negative");
    }
    if (e == "coupling-scan") {
      if (!(c.mu > 0))
        range_fail("range violation: threebody.mu must be positive");
      if (!(c.kappa_min >= 0) || !(c.kappa_max > c.kappa_min))
        range_fail("range violation: threebody kappa window needs 0 <= kappa_min < kappa_max");
      if (c.scan_n < 2)
        range_fail("range violation: threebody.scan_n must be at least 2");
      if (c.n_points < 1000)
        range_fail("range violation: threebody.n_points must be at least 1000");
      if (c.scan_l_max < 0)
        range_fail("range violation: threebody.l_max must be nonnegative");
    }
  }
  if (detail::uses_channel(e)) {
    if (!(c.rho > 0) || !(c.rho < 0.5))
      range_fail("domain violation: channel.rho must lie in (0, 1/2) (got " +
                 format_g17(c.rho) + ")");
    if (!(c.v12 > 0))
      range_fail("range violation: channel.v12 must be positive");
    if (c.level < 1)
      range_fail("range violation: channel.level must be at least 1");
    if (e == "channel-cook") {
      if (!(c.k_width > 0))
        range_fail("range violation: channel.k_width must be positive");
      if (!(c.k0 - 6.0 * c.k_width > 0))
        range_fail("range violation: channel.k0 must exceed 6 * k_width");
      if (!(c.x2_max >= 1000.0))
        range_fail("range violation: channel.x2_max must be at least 1000");
      if (c.t_pow_hi < 4 || c.t_pow_hi > 20)
        range_fail("range violation: channel.t_pow_hi must lie in [4, 20]");
    }
  }
}

// Quantities implied by the configuration, cheap closed forms only.
inline std::vector<std::string> derived_quantities(const ExperimentConfig& c) {
  std::vector<std::string> out;
  const std::string& e = c.experiment;
  if (detail::uses_stationary(e)) {
    std::vector<double> ks;
    for (double lam : c.lambda) ks.push_back(std::sqrt(lam));
    out.push_back("k = " + format_list(ks));
  }
  if (detail::uses_channel(e)) {
    out.push_back("sigma = " + format_g17((c.rho + 1.0) / 3.0));
    out.push_back("tau = " + format_g17(2.0 * (1.0 - 2.0 * c.rho) / 3.0));
  }
  if (e == "faddeev-bound") {
    const JacobiSystem jac = jacobi_setup(c.m1, c.m2, c.m3);
    std::vector<double> ss;
    for (Pair a : {Pair::p12, Pair::p23, Pair::p31})
      ss.push_back(yamaguchi_strength_for_energy(c.beta, jac.m(a), c.pair_energy));
    out.push_back("strength = " + format_list(ss));
  }
  if (e == "efimov-count") {
    const JacobiSystem jac = jacobi_setup(c.m1, c.m2, c.m3);
    std::vector<double> ss;
    for (Pair a : {Pair::p12, Pair::p23, Pair::p31})
      ss.push_back(yamaguchi_critical_strength(c.beta, jac.m(a)));
    out.push_back("critical_strength = " + format_list(ss));
  }
  return out;
}

}  // namespace sk
