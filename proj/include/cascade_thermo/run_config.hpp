#pragma once

// Run configuration shared by the command-line front end: a flat key=value
// file, overridden by flags, validated before any computation and echoed
// back next to every output so a run can be replayed exactly.

#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cascade_thermo/common.hpp"
#include "cascade_thermo/gaussian_cascade.hpp"
#include "cascade_thermo/io.hpp"
#include "cascade_thermo/qubit_cascade.hpp"

namespace cascade_thermo::config {

enum class System { cv, qubit };
enum class Format { csv, json };

struct RunConfig {
  System system = System::cv;
  Coupling mode = Coupling::cascade;
  double gamma = 1.0;
  double N = 0.0;
  double NS = 1.0;
  double xi = 1.0;
  double xiS = 0.0;
  double c13 = 0.0;
  double c24 = 0.0;
  double re_rho23 = 0.0;
  double im_rho23 = 0.0;
  // Unset means 60 over the slowest decay rate of the chosen generator.
  std::optional<double> tmax;
  double dt = 1e-3;
  std::string out = "run";
  Format format = Format::csv;
};

// Keys in echo order. Flag names are "--" + key.
inline const std::vector<std::string>& keys() {
  static const std::vector<std::string> k{"system", "mode",     "gamma",    "N",    "NS",
                                          "xi",     "xiS",      "c13",      "c24",  "re-rho23",
                                          "im-rho23", "tmax",   "dt",       "out",  "format"};
  return k;
}

inline bool is_key(const std::string& key) {
  for (const auto& k : keys())
    if (k == key) return true;
  return false;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline void set(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "system") {
    if (v == "cv") c.system = System::cv;
    else if (v == "qubit") c.system = System::qubit;
    else throw ConfigError("system must be cv or qubit, got '" + v + "'");
  } else if (key == "mode") {
    if (v == "cascade") c.mode = Coupling::cascade;
    else if (v == "independent") c.mode = Coupling::independent;
    else throw ConfigError("mode must be cascade or independent, got '" + v + "'");
  } else if (key == "format") {
    if (v == "csv") c.format = Format::csv;
    else if (v == "json") c.format = Format::json;
    else throw ConfigError("format must be csv or json, got '" + v + "'");
  } else if (key == "out") {
    if (v.empty()) throw ConfigError("out must not be empty");
    c.out = v;
  } else if (key == "tmax") {
    if (v == "auto") c.tmax.reset();
    else c.tmax = io::parse_double(v);
  } else {
    const double x = io::parse_double(v);
    if (key == "gamma") c.gamma = x;
    else if (key == "N") c.N = x;
    else if (key == "NS") c.NS = x;
    else if (key == "xi") c.xi = x;
    else if (key == "xiS") c.xiS = x;
    else if (key == "c13") c.c13 = x;
    else if (key == "c24") c.c24 = x;
    else if (key == "re-rho23") c.re_rho23 = x;
    else if (key == "im-rho23") c.im_rho23 = x;
    else if (key == "dt") c.dt = x;
    else throw ConfigError("unknown configuration key '" + key + "'");
  }
}

// Lines are "key = value"; blank lines and '#' comments are skipped.
inline std::map<std::string, std::string> parse_pairs(std::istream& is) {
  std::map<std::string, std::string> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!is_key(key))
      throw ConfigError("line " + std::to_string(lineno) + ": unknown configuration key '" + key + "'");
    if (pairs.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    pairs[key] = trim(line.substr(eq + 1));
  }
  return pairs;
}

inline RunConfig parse(std::istream& is, RunConfig base = {}) {
  for (const auto& [k, v] : parse_pairs(is)) set(base, k, v);
  return base;
}

inline RunConfig load(const std::string& path, RunConfig base = {}) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open configuration file '" + path + "'");
  return parse(f, base);
}

inline gaussian::GaussianParams gaussian_params(const RunConfig& c) { return {c.gamma, c.N, c.NS}; }

inline qubit::QubitParams qubit_params(const RunConfig& c) { return {c.gamma, c.xi, c.xiS}; }

inline gaussian::CovMatrix initial_cov(const RunConfig& c) {
  return gaussian::correlated_cov(c.NS, c.c13, c.c24);
}

inline qubit::DensityMatrix4 initial_density(const RunConfig& c) {
  return qubit::correlated_qubit_state(c.xiS, {c.re_rho23, c.im_rho23});
}

// Rate of the slowest mode the trajectory can excite, used for the default
// horizon and the tail of the heat integral.
inline double decay_rate(const RunConfig& c) {
  if (c.system == System::cv) return c.gamma;
  const double slow = qubit::slowest_decay_rate(qubit::build_liouvillian(qubit_params(c), c.mode));
  return std::min(c.gamma, slow);
}

// Bounds are checked here, before any trajectory is computed; the error
// message names the violated bound.
inline void validate(const RunConfig& c) {
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt must be > 0");
  if (c.tmax && (!(*c.tmax > 0.0) || !std::isfinite(*c.tmax))) throw ConfigError("tmax must be > 0");
  if (c.system == System::cv) {
    gaussian_params(c).validate();
    (void)initial_cov(c);
  } else {
    qubit_params(c).validate();
    (void)initial_density(c);
  }
}

inline double horizon(const RunConfig& c) { return c.tmax ? *c.tmax : 60.0 / decay_rate(c); }

// The horizon is rounded up to a whole number of steps so that the echoed
// value reproduces the same grid.
inline RunConfig resolved(const RunConfig& c) {
  validate(c);
  RunConfig r = c;
  if (!r.tmax) {
    const double steps = horizon(c) / c.dt;
    const double whole = std::round(steps);
    r.tmax = (std::abs(steps - whole) < 1e-9 * steps ? whole : std::ceil(steps)) * c.dt;
  }
  return r;
}

inline TimeGrid grid(const RunConfig& c) { return uniform_grid(horizon(c), c.dt); }

inline std::string value_of(const RunConfig& c, const std::string& key) {
  if (key == "system") return c.system == System::cv ? "cv" : "qubit";
  if (key == "mode") return to_string(c.mode);
  if (key == "format") return c.format == Format::csv ? "csv" : "json";
  if (key == "out") return c.out;
  const auto num = [](double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  };
  if (key == "tmax") return c.tmax ? num(*c.tmax) : "auto";
  if (key == "gamma") return num(c.gamma);
  if (key == "N") return num(c.N);
  if (key == "NS") return num(c.NS);
  if (key == "xi") return num(c.xi);
  if (key == "xiS") return num(c.xiS);
  if (key == "c13") return num(c.c13);
  if (key == "c24") return num(c.c24);
  if (key == "re-rho23") return num(c.re_rho23);
  if (key == "im-rho23") return num(c.im_rho23);
  if (key == "dt") return num(c.dt);
  throw ConfigError("unknown configuration key '" + key + "'");
}

// Writes every key, so the echo does not depend on defaults. An unset tmax
// is written as its resolved value by callers that pass resolved(c).
inline void write(std::ostream& os, const RunConfig& c) {
  for (const auto& k : keys()) {
    if (k == "tmax" && !c.tmax) continue;
    os << k << " = " << value_of(c, k) << '\n';
  }
}

}  // namespace cascade_thermo::config
