#pragma once

// Heat released along a flux trajectory, thermalisation times, the
// discord/correlated-flux proportionality and parameter sweeps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cascade_thermo/common.hpp"
#include "cascade_thermo/correlations.hpp"
#include "cascade_thermo/gaussian_cascade.hpp"
#include "cascade_thermo/qubit_cascade.hpp"

namespace cascade_thermo::flux {

// Cumulative integral of f on the grid t. On uniform grids the trapezoid sum
// carries Gregory end corrections up to second differences, which makes it
// fourth order; non-uniform grids get the plain trapezoid rule.
inline std::vector<double> cumulative_integral(const std::vector<double>& t,
                                               const std::vector<double>& f) {
  if (t.size() != f.size()) throw ConfigError("grid and samples differ in length");
  std::vector<double> q(t.size(), 0.0);
  if (t.size() < 2) return q;
  if (t.size() < 3 || !is_uniform(t)) {
    for (std::size_t k = 1; k < t.size(); ++k)
      q[k] = q[k - 1] + 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
    return q;
  }
  const double h = t[1] - t[0];
  // First panel: integral of the quadratic through f0, f1, f2 over [t0, t1].
  q[1] = h * (5.0 * f[0] + 8.0 * f[1] - f[2]) / 12.0;
  const double d0 = f[1] - f[0];
  const double dd0 = f[2] - 2.0 * f[1] + f[0];
  double trap = 0.5 * h * (f[0] + f[1]);
  for (std::size_t k = 2; k < t.size(); ++k) {
    trap += 0.5 * h * (f[k] + f[k - 1]);
    const double dk = f[k] - f[k - 1];
    const double ddk = f[k] - 2.0 * f[k - 1] + f[k - 2];
    q[k] = trap - h / 12.0 * (dk - d0) - h / 24.0 * (ddk + dd0);
  }
  return q;
}

struct HeatLedger {
  TimeGrid t;
  std::vector<double> q;              // cumulative heat released, cascade model
  std::vector<double> q_independent;  // same for two independent reservoirs
  double q_infinity = 0.0;
  double q_independent_infinity = 0.0;
  double int_j1 = 0.0;
  double int_j2 = 0.0;
  double int_j12 = 0.0;
  // Difference between the full-grid result and the result on every second
  // node, divided by 15 (the Richardson factor of a fourth-order rule).
  double richardson_error = 0.0;
  double tail_flux = 0.0;
};

namespace detail {

inline std::vector<double> column(const FluxTrajectory& traj, double (*get)(const FluxSample&)) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& s : traj) out.push_back(get(s));
  return out;
}

inline double richardson(const std::vector<double>& t, const std::vector<double>& f,
                         double fine_total) {
  if (t.size() < 7 || t.size() % 2 == 0 || !is_uniform(t)) return 0.0;
  std::vector<double> tc, fc;
  for (std::size_t k = 0; k < t.size(); k += 2) {
    tc.push_back(t[k]);
    fc.push_back(f[k]);
  }
  return std::abs(fine_total - cumulative_integral(tc, fc).back()) / 15.0;
}

}  // namespace detail

// Integrates the flux components. Past the horizon the flux decays at least
// as fast as e^{-rate t}, so the remainder is J(T)/rate to leading order. For
// oscillators, and for qubits with a zero-temperature reservoir, rate = gamma;
// qubits at finite temperature have slower modes (qubit::slowest_decay_rate).
// The horizon must be long enough that the remainder is negligible.
inline HeatLedger integrate_heat(const FluxTrajectory& traj, double rate,
                                 double tail_tol = 1e-10) {
  if (traj.size() < 2) throw ConfigError("heat integration needs at least two samples");
  if (!(rate > 0.0)) throw ConfigError("decay rate must be > 0");
  HeatLedger h;
  h.t = detail::column(traj, [](const FluxSample& s) { return s.t; });
  check_grid(h.t);
  const auto jc = detail::column(traj, [](const FluxSample& s) { return s.j_cascade(); });
  const auto ji = detail::column(traj, [](const FluxSample& s) { return s.j_independent(); });
  const FluxSample& last = traj.back();
  h.tail_flux = std::max(std::abs(last.j_cascade()), std::abs(last.j_independent()));
  if (!(h.tail_flux < tail_tol)) {
    std::ostringstream os;
    os << "insufficient tail: |J(T)| = " << h.tail_flux << " at T = " << last.t
       << " exceeds " << tail_tol << "; extend the horizon";
    throw InsufficientTail(os.str());
  }
  h.q = cumulative_integral(h.t, jc);
  h.q_independent = cumulative_integral(h.t, ji);
  h.q_infinity = h.q.back() + last.j_cascade() / rate;
  h.q_independent_infinity = h.q_independent.back() + last.j_independent() / rate;
  h.int_j1 = cumulative_integral(h.t, detail::column(traj, [](const FluxSample& s) { return s.j1; })).back();
  h.int_j2 = cumulative_integral(h.t, detail::column(traj, [](const FluxSample& s) { return s.j2; })).back();
  h.int_j12 = cumulative_integral(h.t, detail::column(traj, [](const FluxSample& s) { return s.j12; })).back();
  h.richardson_error = detail::richardson(h.t, jc, h.q.back());
  return h;
}

struct TauReport {
  double p = 0.0;
  double tau = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |Q(tau)/Q(inf) - p/100|
  std::size_t bracket = 0;  // grid interval holding the first crossing
};

// Time at which p percent of the total heat has been released. The cumulative
// heat is interpolated by cubic Hermite segments, using the flux as the
// derivative, and the first crossing of the target is refined by bisection.
inline TauReport tau_p(const FluxTrajectory& traj, const HeatLedger& ledger, double p) {
  if (!(p > 0.0 && p < 100.0)) throw ConfigError("p must lie strictly between 0 and 100");
  if (ledger.q.size() != traj.size()) throw ConfigError("ledger does not match trajectory");
  const double qinf = ledger.q_infinity;
  if (!(std::abs(qinf) > 1e-300)) throw NumericalError("total heat is zero; tau_p undefined");
  const double target = p / 100.0;
  const auto ratio = [&](std::size_t k) { return ledger.q[k] / qinf; };

  std::size_t k = 1;
  while (k < traj.size() && ratio(k) < target) ++k;
  if (k == traj.size()) throw NumericalError("cumulative heat never reaches the requested fraction");

  const double t0 = traj[k - 1].t, t1 = traj[k].t, h = t1 - t0;
  const double q0 = ledger.q[k - 1], q1 = ledger.q[k];
  const double m0 = traj[k - 1].j_cascade(), m1 = traj[k].j_cascade();
  const auto hermite = [&](double t) {
    const double s = (t - t0) / h, s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * q0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * q1 +
           (s3 - s2) * h * m1;
  };

  TauReport rep;
  rep.p = p;
  rep.bracket = k - 1;
  double lo = t0, hi = t1, mid = t1;
  double res = std::abs(ratio(k) - target);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = hermite(mid) / qinf;
    res = std::abs(r - target);
    rep.iterations = it + 1;
    if (res < 1e-9 && hi - lo < 1e-12 * std::max(1.0, hi)) break;
    if (r < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;
  }
  rep.tau = mid;
  rep.residual = res;
  if (res >= 1e-9) {
    std::ostringstream os;
    os << "tau_p bisection stalled with residual " << res << " for p = " << p;
    throw NumericalError(os.str());
  }
  return rep;
}

inline TauReport tau_p(const FluxTrajectory& traj, double rate, double p) {
  return tau_p(traj, integrate_heat(traj, rate), p);
}

// ---------------------------------------------------------------------------
// Extrema of a sampled signal whose first and second derivatives are known at
// the samples. Sign changes of f' are bracketed on the grid and the root is
// refined on the cubic Hermite interpolant of f' (slopes f''); the value at
// the root comes from the Hermite interpolant of f (slopes f').

struct Extremum {
  double t = 0.0;
  double value = 0.0;
  bool minimum = false;
};

namespace detail {

inline double hermite(double t, double t0, double t1, double y0, double y1, double m0, double m1) {
  const double h = t1 - t0, s = (t - t0) / h, s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * h * m1;
}

}  // namespace detail

inline std::vector<Extremum> locate_extrema(const std::vector<double>& t,
                                            const std::vector<double>& f,
                                            const std::vector<double>& df,
                                            const std::vector<double>& d2f) {
  if (t.size() != f.size() || t.size() != df.size() || t.size() != d2f.size())
    throw ConfigError("extremum search: sample vectors differ in length");
  std::vector<Extremum> out;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double a = df[k - 1], b = df[k];
    if (!((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0))) continue;
    const auto dfi = [&](double x) {
      return detail::hermite(x, t[k - 1], t[k], a, b, d2f[k - 1], d2f[k]);
    };
    double lo = t[k - 1], hi = t[k];
    const bool rising = a < b;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((dfi(mid) < 0.0) == rising)
        lo = mid;
      else
        hi = mid;
    }
    Extremum e;
    e.t = 0.5 * (lo + hi);
    e.value = detail::hermite(e.t, t[k - 1], t[k], f[k - 1], f[k], a, b);
    e.minimum = rising;
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Correlated flux versus trace distance discord

struct TddFluxPoint {
  double t = 0.0;
  double abs_j12 = 0.0;
  double tdd = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  bool used = false;  // both sides above the threshold
  std::string error;  // optimiser failure at this point, if any
};

struct TddFluxReport {
  std::vector<TddFluxPoint> points;
  double fitted_constant = std::numeric_limits<double>::quiet_NaN();
  double expected_constant = 0.0;  // 4 gamma xi
  double relative_spread = std::numeric_limits<double>::quiet_NaN();
  double max_abs_j1 = 0.0;
  double max_abs_j12 = 0.0;
  double max_tdd = 0.0;
  std::size_t used_points = 0;
};

inline TddFluxReport verify_tdd_flux_relation(const qubit::QubitParams& p,
                                              const qubit::DensityMatrix4& rho0,
                                              const TimeGrid& grid,
                                              const correlations::TddOptions& opt = {},
                                              double threshold = 1e-4) {
  const auto states = qubit::evolve(rho0, p, grid);
  TddFluxReport rep;
  rep.expected_constant = 4.0 * p.gamma * p.xi;
  double sxy = 0.0, sxx = 0.0;
  std::vector<double> ratios;
  for (std::size_t k = 0; k < states.size(); ++k) {
    TddFluxPoint pt;
    pt.t = grid[k];
    const FluxSample f = qubit::fluxes(states[k], p, grid[k]);
    pt.abs_j12 = std::abs(f.j12);
    rep.max_abs_j1 = std::max(rep.max_abs_j1, std::abs(f.j1));
    rep.max_abs_j12 = std::max(rep.max_abs_j12, pt.abs_j12);
    try {
      pt.tdd = correlations::trace_distance_discord(states[k], opt).value;
    } catch (const std::exception& e) {
      pt.error = e.what();
      rep.points.push_back(pt);
      continue;
    }
    rep.max_tdd = std::max(rep.max_tdd, pt.tdd);
    if (pt.tdd > 0.0) pt.ratio = pt.abs_j12 / pt.tdd;
    if (pt.abs_j12 > threshold && pt.tdd > threshold) {
      pt.used = true;
      ratios.push_back(pt.ratio);
      sxy += pt.tdd * pt.abs_j12;
      sxx += pt.tdd * pt.tdd;
    }
    rep.points.push_back(pt);
  }
  rep.used_points = ratios.size();
  if (!ratios.empty()) {
    rep.fitted_constant = sxy / sxx;
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    rep.relative_spread = (*hi - *lo) / rep.fitted_constant;
  }
  return rep;
}

inline TddFluxReport verify_tdd_flux_relation(const qubit::QubitParams& p, double xi1, double xi2,
                                              const TimeGrid& grid,
                                              const correlations::TddOptions& opt = {},
                                              double threshold = 1e-4) {
  return verify_tdd_flux_relation(p, qubit::product_thermal_state(xi1, xi2), grid, opt, threshold);
}

// ---------------------------------------------------------------------------
// Thermalisation-time sweeps over the initial correlation parameter

enum class Family { cv_sum, qubit_re_rho23 };

struct SweepRow {
  double param = 0.0;
  double p = 0.0;
  double tau = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

struct SweepSpec {
  Family family = Family::cv_sum;
  double gamma = 1.0;
  double NS = 1.0;   // cv family
  double xiS = 0.0;  // qubit family
  double xi = 1.0;   // qubit family reservoir
  double t_max = 60.0;
  double dt = 1e-3;
};

// One trajectory per parameter value: s = c13 + c24 split evenly for
// oscillators (N = 0), Re rho23 for qubits.
inline FluxTrajectory family_trajectory(const SweepSpec& spec, double param) {
  const TimeGrid grid = uniform_grid(spec.t_max, spec.dt);
  if (spec.family == Family::cv_sum) {
    gaussian::GaussianParams gp{spec.gamma, 0.0, spec.NS};
    gaussian::check_sum_bound(spec.NS, param);
    return gaussian::simulate(gaussian::correlated_cov(spec.NS, 0.5 * param, 0.5 * param), gp, grid);
  }
  qubit::QubitParams qp{spec.gamma, spec.xi, spec.xiS};
  return qubit::simulate(qubit::correlated_qubit_state(spec.xiS, param), qp, grid);
}

// Decay rate used for the tail of the heat integral.
inline double family_decay_rate(const SweepSpec& spec) {
  if (spec.family == Family::cv_sum) return spec.gamma;
  const qubit::QubitParams qp{spec.gamma, spec.xi, spec.xiS};
  return std::min(spec.gamma, qubit::slowest_decay_rate(qubit::build_liouvillian(qp)));
}

inline double family_bound(const SweepSpec& spec) {
  return spec.family == Family::cv_sum ? 2.0 * spec.NS : 1.0 - spec.xiS * spec.xiS;
}

inline SweepTable sweep(const SweepSpec& spec, const std::vector<double>& params,
                        const std::vector<double>& p_list) {
  SweepTable table;
  const double bound = family_bound(spec);
  const double rate = family_decay_rate(spec);
  for (double x : params) {
    if (std::abs(x) > bound + 1e-12) {
      std::ostringstream os;
      os << "skipped parameter " << x << ": outside the physical range [" << -bound << ", "
         << bound << "]";
      table.warnings.push_back(os.str());
      continue;
    }
    const FluxTrajectory traj = family_trajectory(spec, x);
    const HeatLedger ledger = integrate_heat(traj, rate);
    for (double p : p_list) table.rows.push_back({x, p, tau_p(traj, ledger, p).tau});
  }
  return table;
}

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw ConfigError("linspace needs at least one point");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

inline const std::vector<double>& default_percentages() {
  static const std::vector<double> p{25, 50, 75, 86, 90, 95};
  return p;
}

}  // namespace cascade_thermo::flux
