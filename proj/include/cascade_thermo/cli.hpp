#pragma once

// Command-line front end. Commands:
//
//   simulate   one trajectory: flux CSV, JSON sidecar, config echo
//   figure     preset datasets, one CSV per curve or map plus a manifest
//   sweep      thermalisation times over the correlation parameter
//   map        correlation measure on a grid of initial states
//   tdd-flux   correlated flux against trace distance discord
//   verify     the acceptance suite as JSON, nonzero exit on failure
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numerical failure (including an unconverged heat tail).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cascade_thermo/acceptance.hpp"
#include "cascade_thermo/common.hpp"
#include "cascade_thermo/correlations.hpp"
#include "cascade_thermo/flux_analysis.hpp"
#include "cascade_thermo/gaussian_cascade.hpp"
#include "cascade_thermo/io.hpp"
#include "cascade_thermo/qubit_cascade.hpp"
#include "cascade_thermo/run_config.hpp"

namespace cascade_thermo::cli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f.exceptions(std::ios::badbit);
  return f;
}

inline void write_text(const std::string& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
}

inline json ledger_json(const flux::HeatLedger& h) {
  return {{"q_infinity", h.q_infinity},
          {"q_independent_infinity", h.q_independent_infinity},
          {"int_j1", h.int_j1},
          {"int_j2", h.int_j2},
          {"int_j12", h.int_j12},
          {"richardson_error", h.richardson_error},
          {"tail_flux", h.tail_flux}};
}

inline json trajectory_json(const FluxTrajectory& traj) {
  json cols = {{"t", json::array()},  {"j1", json::array()},        {"j2", json::array()},
               {"j12", json::array()}, {"j_cascade", json::array()}, {"j_independent", json::array()}};
  for (const auto& s : traj) {
    cols["t"].push_back(s.t);
    cols["j1"].push_back(s.j1);
    cols["j2"].push_back(s.j2);
    cols["j12"].push_back(s.j12);
    cols["j_cascade"].push_back(s.j_cascade());
    cols["j_independent"].push_back(s.j_independent());
  }
  return cols;
}

inline json config_json(const config::RunConfig& c) {
  json j;
  for (const auto& k : config::keys()) j[k] = config::value_of(c, k);
  return j;
}

inline double max_residual(const FluxTrajectory& traj, const std::function<FluxSample(double)>& exact) {
  double e = 0.0;
  for (const auto& s : traj) {
    const FluxSample c = exact(s.t);
    e = std::max({e, std::abs(s.j1 - c.j1), std::abs(s.j2 - c.j2), std::abs(s.j12 - c.j12)});
  }
  return e;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate

struct Simulation {
  config::RunConfig config;  // resolved
  FluxTrajectory trajectory;
  json meta;
};

// Residual against the closed form that applies to this configuration, or
// null when none does.
inline json closed_form_residual(const config::RunConfig& c, const FluxTrajectory& traj) {
  if (c.mode != Coupling::cascade) return nullptr;
  if (c.system == config::System::cv) {
    const auto p = config::gaussian_params(c);
    if (c.c13 == 0.0 && c.c24 == 0.0)
      return {{"family", "thermal"},
              {"max_abs_residual",
               detail::max_residual(traj, [&](double t) { return gaussian::thermal_fluxes_closed(p, t); })}};
    if (c.N == 0.0) {
      const double s = c.c13 + c.c24;
      return {{"family", "correlated"},
              {"max_abs_residual", detail::max_residual(traj, [&](double t) {
                 return gaussian::correlated_fluxes_closed(p, s, t);
               })}};
    }
    return nullptr;
  }
  if (c.xi != 1.0) return nullptr;
  const auto p = config::qubit_params(c);
  return {{"family", "zero-temperature correlated"},
          {"max_abs_residual", detail::max_residual(traj, [&](double t) {
             return qubit::correlated_fluxes_closed(p, c.re_rho23, t);
           })}};
}

// With tau requested an unconverged tail is fatal; otherwise it is recorded
// in the metadata and the trajectory is still written.
inline Simulation simulate(const config::RunConfig& raw, bool with_tau) {
  Simulation sim;
  sim.config = config::resolved(raw);
  const auto& c = sim.config;
  const TimeGrid grid = config::grid(c);
  if (c.system == config::System::cv) {
    sim.trajectory = gaussian::simulate(config::initial_cov(c), config::gaussian_params(c), grid, c.mode);
  } else {
    sim.trajectory = qubit::simulate(config::initial_density(c), config::qubit_params(c), grid, c.mode);
  }
  const double rate = config::decay_rate(c);
  json meta;
  meta["config"] = detail::config_json(c);
  meta["columns"] = io::kFluxHeader;
  meta["samples"] = sim.trajectory.size();
  meta["decay_rate"] = rate;
  meta["initial_energy"] = c.system == config::System::cv
                               ? config::initial_cov(c).energy()
                               : qubit::polarisation_energy(config::initial_density(c));
  meta["closed_form"] = closed_form_residual(c, sim.trajectory);
  try {
    const auto ledger = flux::integrate_heat(sim.trajectory, rate);
    meta["heat"] = detail::ledger_json(ledger);
    if (with_tau) {
      json taus = json::array();
      for (double p : flux::default_percentages()) {
        const auto r = flux::tau_p(sim.trajectory, ledger, p);
        taus.push_back({{"p", p}, {"tau", r.tau}, {"residual", r.residual}});
      }
      meta["tau"] = taus;
    }
  } catch (const InsufficientTail& e) {
    if (with_tau) throw;
    meta["heat"] = {{"error", e.what()}};
  }
  sim.meta = std::move(meta);
  return sim;
}

// Returns the paths written.
inline std::vector<std::string> write_simulation(const Simulation& sim) {
  const auto& c = sim.config;
  std::vector<std::string> paths;
  if (c.format == config::Format::csv) {
    auto f = detail::open_out(c.out + ".csv");
    io::write_flux_csv(f, sim.trajectory);
    paths.push_back(c.out + ".csv");
    detail::write_text(c.out + ".json", sim.meta.dump(2) + "\n");
    paths.push_back(c.out + ".json");
  } else {
    json all = sim.meta;
    all["trajectory"] = detail::trajectory_json(sim.trajectory);
    detail::write_text(c.out + ".json", all.dump(2) + "\n");
    paths.push_back(c.out + ".json");
  }
  std::ostringstream cfg;
  config::write(cfg, c);
  detail::write_text(c.out + ".cfg", cfg.str());
  paths.push_back(c.out + ".cfg");
  return paths;
}

// ---------------------------------------------------------------------------
// correlation maps

enum class Measure { gaussian_discord, log_negativity, quantum_discord, concurrence };

inline Measure parse_measure(const std::string& s) {
  if (s == "dg") return Measure::gaussian_discord;
  if (s == "en") return Measure::log_negativity;
  if (s == "dz") return Measure::quantum_discord;
  if (s == "concurrence") return Measure::concurrence;
  throw ConfigError("measure must be one of dg, en, dz, concurrence; got '" + s + "'");
}

// The grid search of the discord optimiser is coarser than the default:
// the polish step recovers full accuracy and maps evaluate many states.
inline correlations::DiscordOptions map_discord_options() {
  correlations::DiscordOptions o;
  o.theta_points = 36;
  o.phi_points = 72;
  return o;
}

// Square grid of side 2 * extent centred at the origin; unphysical points
// are left out. Oscillators use (c13, c24) at occupation NS, qubits use
// (Re rho23, Im rho23) at polarisation xiS.
inline std::vector<io::MapPoint> correlation_map(Measure m, double NS, double xiS, double extent, int points) {
  if (points < 2) throw ConfigError("a map needs at least 2 points per axis");
  if (!(extent > 0.0)) throw ConfigError("map extent must be > 0");
  const auto axis = flux::linspace(-extent, extent, points);
  std::vector<io::MapPoint> out;
  const bool cv = m == Measure::gaussian_discord || m == Measure::log_negativity;
  for (double x : axis) {
    for (double y : axis) {
      if (cv) {
        gaussian::CovMatrix cov = gaussian::thermal_cov(NS);
        try {
          cov = gaussian::correlated_cov(NS, x, y);
        } catch (const ConfigError&) {
          continue;
        }
        const double v = m == Measure::gaussian_discord ? correlations::gaussian_discord(cov)
                                                        : correlations::log_negativity(cov);
        out.push_back({x, y, v});
      } else {
        if (std::hypot(x, y) > 1.0 - xiS * xiS) continue;
        const auto rho = qubit::correlated_qubit_state(xiS, {x, y});
        const double v = m == Measure::concurrence
                             ? correlations::concurrence(rho)
                             : correlations::quantum_discord(rho, map_discord_options()).value;
        out.push_back({x, y, v});
      }
    }
  }
  return out;
}

// For each value of s = c13 + c24 every physical state on the line is
// evaluated, parametrised by c13.
inline std::vector<io::MapPoint> correlation_band(Measure m, double NS, int s_points, int line_points) {
  std::vector<io::MapPoint> out;
  for (double s : flux::linspace(-2.0 * NS, 2.0 * NS, s_points)) {
    for (double c13 : flux::linspace(-2.0 * NS - 0.5, 2.0 * NS + 0.5, line_points)) {
      gaussian::CovMatrix cov = gaussian::thermal_cov(NS);
      try {
        cov = gaussian::correlated_cov(NS, c13, s - c13);
      } catch (const ConfigError&) {
        continue;
      }
      const double v = m == Measure::gaussian_discord ? correlations::gaussian_discord(cov)
                                                      : correlations::log_negativity(cov);
      out.push_back({s, c13, v});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// sweeps and the discord/flux report

inline void write_sweep_csv(std::ostream& os, const flux::SweepTable& table) {
  os << "param,p,tau_p\n";
  for (const auto& r : table.rows) os << io::fmt(r.param) << ',' << io::fmt(r.p) << ',' << io::fmt(r.tau) << '\n';
}

inline void write_tdd_csv(std::ostream& os, const flux::TddFluxReport& rep) {
  os << "t,abs_j12,tdd,ratio\n";
  for (const auto& p : rep.points)
    os << io::fmt(p.t) << ',' << io::fmt(p.abs_j12) << ',' << io::fmt(p.tdd) << ',' << io::fmt(p.ratio) << '\n';
}

inline json tdd_summary(const flux::TddFluxReport& rep) {
  json errors = json::array();
  for (const auto& p : rep.points)
    if (!p.error.empty()) errors.push_back({{"t", p.t}, {"error", p.error}});
  return {{"fitted_constant", rep.fitted_constant},
          {"expected_4_gamma_xi", rep.expected_constant},
          {"relative_spread", rep.relative_spread},
          {"points_used", rep.used_points},
          {"max_abs_j1", rep.max_abs_j1},
          {"max_abs_j12", rep.max_abs_j12},
          {"max_tdd", rep.max_tdd},
          {"errors", errors}};
}

// ---------------------------------------------------------------------------
// figure presets

struct PresetOutput {
  std::string id;
  json manifest;
  std::vector<std::string> files;
};

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6"};
  return ids;
}

namespace detail {

// Mean occupation of a mode at k_B T (in units of hbar omega).
inline double occupation_of_temperature(double T) { return 1.0 / std::expm1(1.0 / T); }

inline std::string tag(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

struct PresetWriter {
  std::string dir;
  PresetOutput out;

  std::string path(const std::string& name) const { return (std::filesystem::path(dir) / name).string(); }

  void curve(const std::string& name, const config::RunConfig& c, const json& params) {
    const auto sim = cli::simulate(c, false);
    auto f = open_out(path(name));
    io::write_flux_csv(f, sim.trajectory);
    out.files.push_back(name);
    out.manifest["files"][name] = params;
  }

  void map(const std::string& name, const std::vector<io::MapPoint>& pts, const json& params) {
    auto f = open_out(path(name));
    io::write_map_csv(f, pts);
    out.files.push_back(name);
    out.manifest["files"][name] = params;
  }

  void sweep(const std::string& name, const flux::SweepTable& table, const json& params) {
    auto f = open_out(path(name));
    write_sweep_csv(f, table);
    out.files.push_back(name);
    json p = params;
    p["warnings"] = table.warnings;
    out.manifest["files"][name] = p;
  }
};

}  // namespace detail

// Reservoir at k_B T = hbar omega for the thermal-state panels; the other
// presets use N = 0 (xi = 1) as printed with the corresponding figures.
inline PresetOutput figure(const std::string& id, const std::string& dir) {
  const auto& ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    std::string list;
    for (const auto& i : ids) list += (list.empty() ? "" : ", ") + i;
    throw ConfigError("unknown figure preset '" + id + "'; available: " + list);
  }
  detail::PresetWriter w{dir, {id, json::object(), {}}};
  w.out.manifest["figure"] = id;
  w.out.manifest["files"] = json::object();

  config::RunConfig base;
  base.tmax = 10.0;
  base.dt = 1e-3;

  if (id == "fig2") {
    const double T = 1.0;
    for (double TS : {0.25, 0.5, 2.0, 4.0}) {
      config::RunConfig cv = base;
      cv.N = detail::occupation_of_temperature(T);
      cv.NS = detail::occupation_of_temperature(TS);
      w.curve("fig2_cv_TS" + detail::tag(TS) + ".csv", cv,
              {{"system", "cv"}, {"T", T}, {"TS", TS}, {"N", cv.N}, {"NS", cv.NS}});
      config::RunConfig qb = base;
      qb.system = config::System::qubit;
      qb.xi = qubit::xi_of_temperature(T);
      qb.xiS = qubit::xi_of_temperature(TS);
      w.curve("fig2_qubit_TS" + detail::tag(TS) + ".csv", qb,
              {{"system", "qubit"}, {"T", T}, {"TS", TS}, {"xi", qb.xi}, {"xiS", qb.xiS}});
    }
  } else if (id == "fig3a") {
    for (double f : {-0.7, 0.0, 0.7}) {
      config::RunConfig c = base;
      c.NS = 1.0;
      c.c13 = c.c24 = f * c.NS;
      w.curve("fig3a_c" + detail::tag(f) + ".csv", c,
              {{"system", "cv"}, {"N", 0.0}, {"NS", c.NS}, {"c13", c.c13}, {"c24", c.c24}});
    }
  } else if (id == "fig3b") {
    for (double r : {-0.75, 0.0, 0.75}) {
      config::RunConfig c = base;
      c.system = config::System::qubit;
      c.xiS = 0.25;
      c.re_rho23 = r;
      w.curve("fig3b_r" + detail::tag(r) + ".csv", c,
              {{"system", "qubit"}, {"xi", 1.0}, {"xiS", c.xiS}, {"re_rho23", r}});
    }
  } else if (id == "fig4") {
    flux::SweepSpec spec;
    spec.family = flux::Family::cv_sum;
    spec.NS = 1.0;
    w.sweep("fig4a_tau.csv", flux::sweep(spec, flux::linspace(-2.0, 2.0, 41), flux::default_percentages()),
            {{"family", "cv_sum"}, {"NS", 1.0}, {"N", 0.0}, {"columns", "param,p,tau_p"}});
    w.map("fig4b_en.csv", correlation_band(Measure::log_negativity, 1.0, 41, 201),
          {{"measure", "log_negativity"}, {"NS", 1.0}, {"columns", "x = c13 + c24, y = c13"}});
    w.map("fig4c_dg.csv", correlation_band(Measure::gaussian_discord, 1.0, 41, 201),
          {{"measure", "gaussian_discord"}, {"NS", 1.0}, {"columns", "x = c13 + c24, y = c13"}});
  } else if (id == "fig5") {
    w.map("fig5a_dg.csv", correlation_map(Measure::gaussian_discord, 1.0, 0.0, 1.5, 61),
          {{"measure", "gaussian_discord"}, {"NS", 1.0}, {"columns", "x = c13, y = c24"}});
    w.map("fig5b_en.csv", correlation_map(Measure::log_negativity, 1.0, 0.0, 1.5, 61),
          {{"measure", "log_negativity"}, {"NS", 1.0}, {"columns", "x = c13, y = c24"}});
    w.map("fig5c_dz.csv", correlation_map(Measure::quantum_discord, 0.0, 0.25, 1.0, 41),
          {{"measure", "quantum_discord"}, {"xiS", 0.25}, {"columns", "x = Re rho23, y = Im rho23"}});
  } else {  // fig6
    flux::SweepSpec spec;
    spec.family = flux::Family::qubit_re_rho23;
    spec.xiS = 0.0;
    spec.xi = 1.0;
    w.sweep("fig6a_tau.csv", flux::sweep(spec, flux::linspace(-1.0, 1.0, 41), flux::default_percentages()),
            {{"family", "qubit_re_rho23"}, {"xiS", 0.0}, {"xi", 1.0}, {"columns", "param,p,tau_p"}});
    w.map("fig6b_dz.csv", correlation_map(Measure::quantum_discord, 0.0, 0.25, 1.0, 41),
          {{"measure", "quantum_discord"}, {"xiS", 0.25}, {"columns", "x = Re rho23, y = Im rho23"}});
  }
  detail::write_text(w.path(id + "_manifest.json"), w.out.manifest.dump(2) + "\n");
  w.out.files.push_back(id + "_manifest.json");
  return w.out;
}

// ---------------------------------------------------------------------------
// verify

inline json verify_json(const std::vector<acceptance::CriterionResult>& results) {
  json crit = json::array();
  bool all = true;
  for (const auto& r : results) {
    json m = json::object();
    for (const auto& x : r.measured) m[x.name] = x.value;
    crit.push_back({{"id", r.id},
                    {"title", r.title},
                    {"passed", r.passed},
                    {"measured", m},
                    {"detail", r.detail},
                    {"seconds", r.seconds}});
    all = all && r.passed;
  }
  return {{"passed", all}, {"criteria", crit}};
}

// ---------------------------------------------------------------------------
// entry point

namespace detail {

// Every run-configuration key becomes a string flag; only flags actually given
// override the configuration file.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "flat key = value configuration file");
    for (const auto& k : config::keys()) app->add_option("--" + k, values[k]);
  }

  config::RunConfig build(CLI::App* app) const {
    config::RunConfig c = file.empty() ? config::RunConfig{} : config::load(file);
    for (const auto& k : config::keys())
      if (app->count("--" + k) > 0) config::set(c, k, values.at(k));
    return c;
  }
};

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  for (const auto& cell : io::split(s, ',')) v.push_back(io::parse_double(config::trim(cell)));
  if (v.empty()) throw ConfigError("empty list");
  return v;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Heat flux of two oscillators or two qubits dissipating in cascade into a thermal reservoir"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "simulate one trajectory");
  detail::ConfigFlags flags;
  flags.attach(sim);
  bool with_tau = false;
  sim->add_flag("--tau", with_tau, "also report thermalisation times for p = 25, 50, 75, 86, 90, 95");

  auto* fig = app.add_subcommand("figure", "write a preset dataset");
  std::string fig_id, fig_dir = ".";
  fig->add_option("id", fig_id, "fig2, fig3a, fig3b, fig4, fig5 or fig6")->required();
  fig->add_option("--out", fig_dir, "output directory");

  auto* sw = app.add_subcommand("sweep", "thermalisation times over the correlation parameter");
  std::string sw_family = "cv", sw_p, sw_out = "sweep.csv";
  flux::SweepSpec sw_spec;
  double sw_from = std::nan(""), sw_to = std::nan("");
  int sw_points = 11;
  sw->add_option("--family", sw_family, "cv (s = c13 + c24) or qubit (Re rho23)");
  sw->add_option("--gamma", sw_spec.gamma);
  sw->add_option("--NS", sw_spec.NS);
  sw->add_option("--xiS", sw_spec.xiS);
  sw->add_option("--xi", sw_spec.xi);
  sw->add_option("--tmax", sw_spec.t_max);
  sw->add_option("--dt", sw_spec.dt);
  sw->add_option("--from", sw_from, "first parameter value (default: lower physical bound)");
  sw->add_option("--to", sw_to, "last parameter value (default: upper physical bound)");
  sw->add_option("--points", sw_points);
  sw->add_option("--p", sw_p, "comma separated percentages");
  sw->add_option("--out", sw_out);

  auto* mp = app.add_subcommand("map", "correlation measure over a grid of initial states");
  std::string mp_measure = "dg", mp_out = "map.csv";
  double mp_NS = 1.0, mp_xiS = 0.25, mp_extent = 1.5;
  int mp_points = 41;
  mp->add_option("--measure", mp_measure, "dg, en (oscillators), dz, concurrence (qubits)");
  mp->add_option("--NS", mp_NS);
  mp->add_option("--xiS", mp_xiS);
  mp->add_option("--extent", mp_extent, "half width of the square grid");
  mp->add_option("--points", mp_points, "points per axis");
  mp->add_option("--out", mp_out);

  auto* td = app.add_subcommand("tdd-flux", "correlated flux against trace distance discord");
  double td_gamma = 1.0, td_xi = 0.4621, td_xi1 = 0.2, td_xi2 = 0.8, td_tmax = 10.0, td_dt = 0.5;
  std::string td_out = "tdd_flux.csv";
  td->add_option("--gamma", td_gamma);
  td->add_option("--xi", td_xi);
  td->add_option("--xi1", td_xi1);
  td->add_option("--xi2", td_xi2);
  td->add_option("--tmax", td_tmax);
  td->add_option("--dt", td_dt);
  td->add_option("--out", td_out);

  auto* ver = app.add_subcommand("verify", "run the acceptance suite");
  acceptance::Options vopt;
  std::string ver_out;
  ver->add_option("--out", ver_out, "also write the report to this file");
  ver->add_flag("--tamper-liouvillian", vopt.tamper_liouvillian)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream os;
    const int code = app.exit(e, os, os);
    err << os.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sim) {
      const auto result = simulate(flags.build(sim), with_tau);
      for (const auto& p : write_simulation(result)) out << p << '\n';
      if (result.meta["heat"].contains("error"))
        err << "warning: " << result.meta["heat"]["error"].get<std::string>() << '\n';
    } else if (*fig) {
      const auto res = figure(fig_id, fig_dir);
      for (const auto& f : res.files) out << (std::filesystem::path(fig_dir) / f).string() << '\n';
    } else if (*sw) {
      if (sw_family == "cv") sw_spec.family = flux::Family::cv_sum;
      else if (sw_family == "qubit") sw_spec.family = flux::Family::qubit_re_rho23;
      else throw ConfigError("family must be cv or qubit, got '" + sw_family + "'");
      const double bound = flux::family_bound(sw_spec);
      const double a = std::isnan(sw_from) ? -bound : sw_from;
      const double b = std::isnan(sw_to) ? bound : sw_to;
      const auto ps = sw_p.empty() ? flux::default_percentages() : detail::parse_list(sw_p);
      for (double p : ps)
        if (!(p > 0.0 && p < 100.0)) throw ConfigError("percentages must lie in (0, 100)");
      const auto table = flux::sweep(sw_spec, flux::linspace(a, b, sw_points), ps);
      auto f = detail::open_out(sw_out);
      write_sweep_csv(f, table);
      for (const auto& w : table.warnings) err << "warning: " << w << '\n';
      out << sw_out << '\n';
    } else if (*mp) {
      const auto pts = correlation_map(parse_measure(mp_measure), mp_NS, mp_xiS, mp_extent, mp_points);
      auto f = detail::open_out(mp_out);
      io::write_map_csv(f, pts);
      out << mp_out << '\n';
    } else if (*td) {
      const qubit::QubitParams p{td_gamma, td_xi, 0.0};
      p.validate();
      const auto rep = flux::verify_tdd_flux_relation(p, td_xi1, td_xi2, uniform_grid(td_tmax, td_dt));
      auto f = detail::open_out(td_out);
      write_tdd_csv(f, rep);
      out << tdd_summary(rep).dump(2) << '\n';
    } else if (*ver) {
      const json report = verify_json(acceptance::run_all(vopt));
      out << report.dump(2) << '\n';
      if (!ver_out.empty()) detail::write_text(ver_out, report.dump(2) + "\n");
      return report["passed"].get<bool>() ? kExitOk : kExitFailed;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace cascade_thermo::cli
