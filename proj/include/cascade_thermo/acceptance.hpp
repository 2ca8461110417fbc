#pragma once

// End-to-end acceptance checks. Each criterion returns its measured values
// and a pass/fail verdict at fixed tolerances.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cascade_thermo/correlations.hpp"
#include "cascade_thermo/flux_analysis.hpp"
#include "cascade_thermo/gaussian_cascade.hpp"
#include "cascade_thermo/optimize.hpp"
#include "cascade_thermo/qubit_cascade.hpp"
#include "cascade_thermo/random_states.hpp"

namespace cascade_thermo::acceptance {

struct Measurement {
  std::string name;
  double value = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::vector<Measurement> measured;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  // Perturbs one generator entry before the cross-check, to prove the check
  // can fail.
  bool tamper_liouvillian = false;
  std::uint64_t seed = 0;  // 0: optimize::default_seed()
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline double max_flux_deviation(const FluxTrajectory& traj,
                                 const std::function<FluxSample(double)>& exact) {
  double e = 0.0;
  for (const auto& s : traj) {
    const FluxSample c = exact(s.t);
    e = std::max({e, std::abs(s.j1 - c.j1), std::abs(s.j2 - c.j2), std::abs(s.j12 - c.j12)});
  }
  return e;
}

inline std::uint64_t seed_of(const Options& o) {
  return o.seed != 0 ? o.seed : optimize::default_seed();
}

template <class F>
CriterionResult run(int id, std::string title, F&& body) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = e.what();
  }
  r.seconds = elapsed(t0);
  return r;
}

inline qubit::Mat16 maybe_tampered(const qubit::QubitParams& p, bool tamper) {
  qubit::Mat16 k = qubit::assemble_generator(p);
  if (tamper) k(5, 0) += 1e-3;
  return k;
}

}  // namespace detail

inline CriterionResult cv_closed_form(const Options&) {
  return detail::run(1, "oscillator fluxes match the closed forms", [](CriterionResult& r) {
    const auto t0 = detail::Clock::now();
    const TimeGrid grid = uniform_grid(10.0, 1e-3);
    double thermal = 0.0, correlated = 0.0;
    for (const auto& [NS, N] : std::vector<std::pair<double, double>>{{1, 0}, {2, 0.5}, {0.5, 1.5}}) {
      const gaussian::GaussianParams p{1.0, N, NS};
      const auto traj = gaussian::simulate(gaussian::thermal_cov(NS), p, grid);
      thermal = std::max(thermal, detail::max_flux_deviation(
                                      traj, [&](double t) { return gaussian::thermal_fluxes_closed(p, t); }));
    }
    const gaussian::GaussianParams p{1.0, 0.0, 1.0};
    for (double s : flux::linspace(-2.0, 2.0, 5)) {
      const auto traj = gaussian::simulate(gaussian::correlated_cov(1.0, 0.5 * s, 0.5 * s), p, grid);
      correlated = std::max(correlated, detail::max_flux_deviation(traj, [&](double t) {
                              return gaussian::correlated_fluxes_closed(p, s, t);
                            }));
    }
    const double secs = detail::elapsed(t0);
    r.measured = {{"thermal_max_abs_error", thermal},
                  {"correlated_max_abs_error", correlated},
                  {"runtime_seconds", secs}};
    r.passed = thermal < 1e-8 && correlated < 1e-8 && secs < 2.0;
  });
}

inline CriterionResult qubit_closed_form(const Options&) {
  return detail::run(2, "qubit fluxes match the zero-temperature closed forms", [](CriterionResult& r) {
    const TimeGrid grid = uniform_grid(10.0, 1e-3);
    double err = 0.0;
    for (double xiS : {0.0, 0.25, 0.5}) {
      for (double re : {-0.5, 0.0, 0.5, 0.75}) {
        const qubit::QubitParams p{1.0, 1.0, xiS};
        const auto traj = qubit::simulate(qubit::correlated_qubit_state(xiS, re), p, grid);
        err = std::max(err, detail::max_flux_deviation(traj, [&](double t) {
                         return qubit::correlated_fluxes_closed(p, re, t);
                       }));
      }
    }
    r.measured = {{"max_abs_error", err}};
    r.passed = err < 1e-8;
  });
}

inline CriterionResult steady_state(const Options& opt) {
  return detail::run(3, "thermal product states are stationary", [&](CriterionResult& r) {
    double cv = 0.0;
    for (double gamma : {0.5, 1.0, 2.0}) {
      for (double N : {0.0, 0.25, 0.5, 1.0, 2.0, 5.0}) {
        for (Coupling c : {Coupling::cascade, Coupling::independent}) {
          const gaussian::GaussianParams p{gamma, N, N};
          const auto dd = gaussian::drift_and_diffusion(p, c);
          const gaussian::Mat4 cstar = (N + 0.5) * gaussian::Mat4::Identity();
          cv = std::max(cv, gaussian::moment_rhs(dd, cstar).cwiseAbs().maxCoeff());
        }
      }
    }
    double qb = 0.0, trace_leak = 0.0;
    for (double gamma : {0.5, 1.0, 2.0}) {
      for (double xi : {0.0, 0.25, 0.4621, 0.75, 1.0}) {
        const qubit::QubitParams p{gamma, xi, xi};
        const auto gen =
            qubit::Liouvillian::from_matrix(detail::maybe_tampered(p, opt.tamper_liouvillian), p);
        const auto th = qubit::thermal_qubit_state(xi);
        qb = std::max(qb, (gen.matrix().cast<qubit::cd>() * qubit::vectorize(th.matrix()))
                              .cwiseAbs()
                              .maxCoeff());
        for (int col = 0; col < 16; ++col) {
          double s = 0.0;
          for (int k = 0; k < 4; ++k) s += gen.matrix()(qubit::vec_index(k, k), col);
          trace_leak = std::max(trace_leak, std::abs(s));
        }
      }
    }
    r.measured = {{"cv_max_residual", cv}, {"qubit_max_residual", qb}, {"qubit_trace_leak", trace_leak}};
    r.passed = cv < 1e-12 && qb < 1e-12;
  });
}

inline CriterionResult conservation(const Options& opt) {
  return detail::run(4, "cascade and independent reservoirs release the same heat", [&](CriterionResult& r) {
    random::Rng rng(detail::seed_of(opt));
    double dq_cv = 0.0, id_cv = 0.0, dq_qb = 0.0, id_qb = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double gamma = random::uniform(rng, 0.5, 2.0);
      const double NS = random::uniform(rng, 0.2, 3.0);
      const double N = random::uniform(rng, 0.0, 2.0);
      const gaussian::GaussianParams p{gamma, N, NS};
      const auto c0 = random::random_correlated_cov(rng, NS);
      const TimeGrid grid = uniform_grid(60.0 / gamma, 1e-3 / gamma);
      const auto casc = flux::integrate_heat(gaussian::simulate(c0, p, grid), gamma);
      const auto ind = flux::integrate_heat(gaussian::simulate(c0, p, grid, Coupling::independent), gamma);
      dq_cv = std::max(dq_cv, std::abs(casc.q_infinity - ind.q_infinity));
      id_cv = std::max(id_cv, std::abs((casc.int_j1 - casc.int_j2) - casc.int_j12));
    }
    for (int i = 0; i < 20; ++i) {
      const double gamma = random::uniform(rng, 0.5, 2.0);
      const double xiS = random::uniform(rng, 0.0, 1.0);
      // The slowest relaxation rate falls like xi^2 at high reservoir
      // temperature; below 0.25 the horizon would run to thousands of 1/gamma.
      const double xi = random::uniform(rng, 0.25, 1.0);
      const qubit::QubitParams p{gamma, xi, xiS};
      const auto rho0 = random::random_correlated_qubit(rng, xiS);
      const auto gen = qubit::build_liouvillian(p);
      const auto gen_ind = qubit::build_liouvillian(p, Coupling::independent);
      const double rate = std::min(qubit::slowest_decay_rate(gen), qubit::slowest_decay_rate(gen_ind));
      const double horizon = 60.0 / rate;
      const TimeGrid grid = uniform_grid(horizon, horizon / 60000.0);
      const auto casc = flux::integrate_heat(qubit::simulate(rho0, p, grid), rate);
      const auto ind = flux::integrate_heat(qubit::simulate(rho0, p, grid, Coupling::independent), rate);
      dq_qb = std::max(dq_qb, std::abs(casc.q_infinity - ind.q_infinity));
      id_qb = std::max(id_qb, std::abs((casc.int_j1 - casc.int_j2) - casc.int_j12));
    }
    r.measured = {{"cv_max_heat_gap", dq_cv},
                  {"cv_max_identity_gap", id_cv},
                  {"qubit_max_heat_gap", dq_qb},
                  {"qubit_max_identity_gap", id_qb}};
    r.passed = dq_cv < 1e-6 && id_cv < 1e-6 && dq_qb < 1e-6 && id_qb < 1e-6;
  });
}

inline CriterionResult stationary_geometry(const Options&) {
  return detail::run(5, "stationary points of the total flux", [](CriterionResult& r) {
    const double NS = 1.0;
    const gaussian::GaussianParams p{1.0, 0.0, NS};
    const TimeGrid grid = uniform_grid(10.0, 1e-3);
    double dt_err = 0.0, dv_err = 0.0;
    std::ostringstream notes;
    for (double s : {-1.4, -1.0, -0.7, 0.7, 1.4}) {
      const auto covs = gaussian::evolve_cov(gaussian::correlated_cov(NS, 0.5 * s, 0.5 * s), p, grid);
      std::vector<double> f, d1, d2;
      for (std::size_t k = 0; k < covs.size(); ++k) {
        f.push_back(gaussian::fluxes_from_cov(covs[k], p, grid[k]).j_cascade());
        const auto d = gaussian::flux_derivatives(covs[k], p, grid[k]);
        d1.push_back(d[0].j_cascade());
        d2.push_back(d[1].j_cascade());
      }
      const auto ext = flux::locate_extrema(grid, f, d1, d2);
      const auto sp = gaussian::stationary_points(NS, s, p.gamma);
      if (ext.size() != 2) {
        notes << "s=" << s << ": found " << ext.size() << " extrema; ";
        dt_err = std::numeric_limits<double>::infinity();
        continue;
      }
      for (const auto& e : ext) {
        const double t_expected = e.minimum ? sp.t_min : sp.t_max;
        const double v_expected = t_expected == sp.t1 ? sp.j_t1 : sp.j_t2;
        dt_err = std::max(dt_err, std::abs(e.t - t_expected));
        dv_err = std::max(dv_err, std::abs(e.value - v_expected));
      }
    }
    // |J12| of the thermal start.
    const auto covs = gaussian::evolve_cov(gaussian::thermal_cov(NS), p, grid);
    std::vector<double> f, d1, d2;
    for (std::size_t k = 0; k < covs.size(); ++k) {
      f.push_back(gaussian::fluxes_from_cov(covs[k], p, grid[k]).j12);
      const auto d = gaussian::flux_derivatives(covs[k], p, grid[k]);
      d1.push_back(d[0].j12);
      d2.push_back(d[1].j12);
    }
    const auto ext = flux::locate_extrema(grid, f, d1, d2);
    const double j12_t = ext.size() == 1 ? ext[0].t : std::numeric_limits<double>::quiet_NaN();
    r.measured = {{"max_time_error", dt_err}, {"max_value_error", dv_err}, {"j12_extremum_gamma_t", j12_t}};
    r.detail = notes.str();
    r.passed = dt_err < 1e-6 && dv_err < 1e-8 && std::abs(j12_t - 1.0) < 1e-3;
  });
}

inline CriterionResult tau_ordering(const Options&) {
  return detail::run(6, "thermalisation times order with the initial correlations", [](CriterionResult& r) {
    const auto& ps = flux::default_percentages();
    bool monotone = true;
    double worst_step = std::numeric_limits<double>::infinity();  // smallest decrease
    std::ostringstream notes;
    const auto check = [&](const flux::SweepSpec& spec, const std::vector<double>& grid, const char* label) {
      const auto table = flux::sweep(spec, grid, ps);
      if (!table.warnings.empty()) {
        monotone = false;
        notes << label << ": " << table.warnings.front() << "; ";
      }
      for (double p : ps) {
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& row : table.rows) {
          if (row.p != p) continue;
          worst_step = std::min(worst_step, prev - row.tau);
          if (!(row.tau < prev)) {
            monotone = false;
            notes << label << " p=" << p << " not decreasing at " << row.param << "; ";
          }
          prev = row.tau;
        }
      }
    };
    flux::SweepSpec cv;
    cv.family = flux::Family::cv_sum;
    cv.NS = 1.0;
    check(cv, flux::linspace(-2.0, 2.0, 11), "cv");
    for (double xiS : {0.0, 0.25}) {
      flux::SweepSpec qs;
      qs.family = flux::Family::qubit_re_rho23;
      qs.xiS = xiS;
      qs.xi = 1.0;
      const double b = 1.0 - xiS * xiS;
      check(qs, flux::linspace(-b, b, 11), "qubit");
    }
    // Thermal oscillators: tau_p does not depend on NS.
    double rescale = 0.0;
    const TimeGrid grid = uniform_grid(60.0, 1e-3);
    std::vector<double> ref;
    for (double NS : {0.5, 1.0, 2.0, 4.0}) {
      const auto traj = gaussian::simulate(gaussian::thermal_cov(NS), {1.0, 0.0, NS}, grid);
      const auto ledger = flux::integrate_heat(traj, 1.0);
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const double tau = flux::tau_p(traj, ledger, ps[i]).tau;
        if (ref.size() < ps.size())
          ref.push_back(tau);
        else
          rescale = std::max(rescale, std::abs(tau - ref[i]));
      }
    }
    r.measured = {{"smallest_decrease", worst_step}, {"ns_rescaling_max_gap", rescale}};
    r.detail = notes.str();
    r.passed = monotone && rescale < 1e-9;
  });
}

inline CriterionResult correlation_maps(const Options&) {
  return detail::run(7, "correlation maps", [](CriterionResult& r) {
    const double NS = 1.0;
    double en_line = 0.0;
    for (double c : flux::linspace(-NS, NS, 41))
      en_line = std::max(en_line, correlations::log_negativity(gaussian::correlated_cov(NS, c, c)));
    const double en_point = correlations::log_negativity(gaussian::correlated_cov(NS, 1.41, -1.41));

    double dg_origin = correlations::gaussian_discord(gaussian::thermal_cov(NS));
    double dg_min = std::numeric_limits<double>::infinity();
    for (double x : flux::linspace(-1.5, 1.5, 41)) {
      for (double y : flux::linspace(-1.5, 1.5, 41)) {
        if (std::abs(x) < 1e-12 && std::abs(y) < 1e-12) continue;
        gaussian::Mat4 m = (NS + 0.5) * gaussian::Mat4::Identity();
        m(0, 2) = m(2, 0) = x;
        m(1, 3) = m(3, 1) = y;
        if (!gaussian::check_physical(m).physical) continue;
        dg_min = std::min(dg_min, correlations::gaussian_discord(gaussian::CovMatrix::from(m)));
      }
    }

    const double xiS = 0.25;
    double dz_spread = 0.0;
    for (double radius : {0.25, 0.5, 0.75}) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int k = 0; k < 12; ++k) {
        const auto rho = qubit::correlated_qubit_state(xiS, std::polar(radius, 2.0 * std::numbers::pi * k / 12));
        const double v = correlations::quantum_discord(rho).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      dz_spread = std::max(dz_spread, hi - lo);
    }

    double conc = 0.0, conc_x = 0.0;
    const double b = 1.0 - xiS * xiS;
    for (double x : flux::linspace(-b, b, 21)) {
      for (double y : flux::linspace(-b, b, 21)) {
        if (std::hypot(x, y) > b) continue;
        const auto rho = qubit::correlated_qubit_state(xiS, {x, y});
        conc = std::max(conc, correlations::concurrence(rho));
        conc_x = std::max(conc_x, correlations::concurrence_x(rho));
      }
    }
    r.measured = {{"en_max_on_symmetric_line", en_line},
                  {"en_at_1.41_-1.41", en_point},
                  {"dg_at_origin", dg_origin},
                  {"dg_min_off_origin", dg_min},
                  {"dz_max_spread_on_circles", dz_spread},
                  {"concurrence_max", conc},
                  {"concurrence_x_max", conc_x}};
    r.passed = en_line == 0.0 && en_point > 0.0 && dg_origin == 0.0 && dg_min > 1e-9 &&
               dz_spread < 1e-8 && conc == 0.0 && conc_x == 0.0;
  });
}

inline CriterionResult darkness_and_decoupling(const Options&) {
  return detail::run(8, "singlet darkness and rho14 decoupling", [](CriterionResult& r) {
    const TimeGrid grid = uniform_grid(20.0, 0.01);
    const qubit::QubitParams p0{1.0, 1.0, 0.0};
    const auto singlet = qubit::singlet_state();
    const auto traj = qubit::evolve(singlet, p0, grid);
    double dev = 0.0;
    for (const auto& rho : traj) dev = std::max(dev, (rho.matrix() - singlet.matrix()).cwiseAbs().maxCoeff());
    // Rate of change of the singlet population at t = 0.
    const auto gen = qubit::build_liouvillian(p0);
    const qubit::CMat4 u = qubit::collective_basis_change();
    const double rate0 = (u * gen.apply(singlet.matrix()) * u.adjoint())(2, 2).real();

    double law = 0.0;
    for (double xi : {1.0, 0.4621, 0.0}) {
      qubit::CMat4 m = qubit::correlated_qubit_state(0.25, {0.3, -0.2}).matrix();
      m(0, 3) = 0.1;
      m(3, 0) = 0.1;
      const qubit::QubitParams p{1.0, xi, 0.25};
      const auto states = qubit::evolve(qubit::DensityMatrix4::from(m), p, grid);
      for (std::size_t k = 0; k < grid.size(); ++k)
        law = std::max(law, std::abs(states[k](0, 3) - 0.1 * std::exp(-grid[k])));
    }
    r.measured = {{"singlet_max_deviation", dev},
                  {"singlet_population_rate_at_t0", rate0},
                  {"rho14_max_deviation", law}};
    r.passed = dev < 1e-9 && law < 1e-9;
    if (dev >= 1e-9)
      r.detail =
          "the singlet is not stationary under the cascade generator: its dissipative loss rate "
          "vanishes at t = 0, but the coherent coupling between the two one-excitation "
          "collective states rotates it into the decaying symmetric state";
  });
}

inline CriterionResult discord_flux(const Options& opt) {
  return detail::run(9, "correlated flux is proportional to trace distance discord", [&](CriterionResult& r) {
    const double xi = 0.4621;
    const qubit::QubitParams p{1.0, xi, 0.0};
    const TimeGrid grid = uniform_grid(10.0, 0.5);
    correlations::TddOptions topt;
    topt.seed = detail::seed_of(opt);
    bool ok = true;
    int idx = 0;
    std::ostringstream notes;
    for (const auto& [x1, x2] : std::vector<std::pair<double, double>>{{0.2, 0.8}, {0.4621, 0.9}}) {
      const auto rep = flux::verify_tdd_flux_relation(p, x1, x2, grid, topt);
      const std::string tag = "start" + std::to_string(++idx) + "_";
      r.measured.push_back({tag + "fitted_constant", rep.fitted_constant});
      r.measured.push_back({tag + "expected_4_gamma_xi", rep.expected_constant});
      r.measured.push_back({tag + "relative_spread", rep.relative_spread});
      r.measured.push_back({tag + "points_used", static_cast<double>(rep.used_points)});
      if (rep.used_points > 0) {
        ok = ok && rep.relative_spread < 0.01;
      } else {
        // Nothing above threshold: the relation can only hold as 0 = 0.
        r.measured.push_back({tag + "max_abs_j12", rep.max_abs_j12});
        r.measured.push_back({tag + "max_tdd", rep.max_tdd});
        ok = ok && rep.max_abs_j12 < 1e-12 && rep.max_tdd < 1e-12;
        notes << "start " << idx << " (xi1 = " << x1 << ", xi2 = " << x2
              << "): both sides vanish identically, no points above threshold; ";
      }
    }
    const auto ce = flux::verify_tdd_flux_relation(p, qubit::coherent_counterexample_state(xi, xi), grid, topt);
    r.measured.push_back({"counterexample_max_abs_j1", ce.max_abs_j1});
    r.measured.push_back({"counterexample_max_abs_j12", ce.max_abs_j12});
    r.measured.push_back({"counterexample_max_tdd", ce.max_tdd});
    r.detail = notes.str();
    r.passed = ok && ce.max_abs_j1 < 1e-9 && ce.max_abs_j12 < 1e-9 && ce.max_tdd > 1e-3;
  });
}

inline CriterionResult positivity(const Options& opt) {
  return detail::run(10, "positivity is preserved along trajectories", [&](CriterionResult& r) {
    random::Rng rng(detail::seed_of(opt) + 10);
    const TimeGrid grid = uniform_grid(10.0, 0.05);
    double min_eig = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
      const qubit::QubitParams p{random::uniform(rng, 0.5, 2.0), random::uniform(rng, 0.0, 1.0), 0.0};
      const auto rho0 = random::random_density_matrix(rng);
      // evolve() rejects samples below the positivity tolerance; the minimum
      // is recomputed here so it can be reported.
      for (const auto& rho : qubit::evolve(rho0, p, grid)) {
        const double e = Eigen::SelfAdjointEigenSolver<qubit::CMat4>(rho.matrix(), Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
        min_eig = std::min(min_eig, e);
      }
    }
    double min_nu = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
      const gaussian::GaussianParams p{random::uniform(rng, 0.5, 2.0), random::uniform(rng, 0.0, 2.0), 0.0};
      const auto c0 = random::random_physical_cov(rng);
      for (const auto& c : gaussian::evolve_cov(c0, p, grid))
        min_nu = std::min(min_nu, gaussian::symplectic_eigenvalues(c.matrix())[0]);
    }
    r.measured = {{"qubit_min_eigenvalue", min_eig}, {"cv_min_symplectic_eigenvalue", min_nu}};
    r.passed = min_eig >= -1e-10 && min_nu >= 0.5 - 1e-10;
  });
}

inline std::vector<CriterionResult> run_all(const Options& opt = {}) {
  return {cv_closed_form(opt),     qubit_closed_form(opt), steady_state(opt),
          conservation(opt),       stationary_geometry(opt), tau_ordering(opt),
          correlation_maps(opt),   darkness_and_decoupling(opt), discord_flux(opt),
          positivity(opt)};
}

}  // namespace cascade_thermo::acceptance
