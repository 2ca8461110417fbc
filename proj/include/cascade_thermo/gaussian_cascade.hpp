#pragma once

// Two bosonic modes dissipating in cascade into a thermal bosonic reservoir.
//
// States are zero-mean Gaussian states described by the 4x4 covariance matrix
// over the quadratures (X1, Y1, X2, Y2), with the vacuum at C = I/2. The
// master equation is equivalent to the Lyapunov-type moment equation
//
//     dC/dt = A C + C A^T + M,
//
// whose drift A carries the one-way coupling of mode 1 into mode 2.

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include "cascade_thermo/common.hpp"

namespace cascade_thermo::gaussian {

using Mat4 = Eigen::Matrix4d;

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPhysicalTol = 1e-10;

struct GaussianParams {
  double gamma = 1.0;  // relaxation rate
  double N = 0.0;      // reservoir mean excitation number
  double NS = 0.0;     // initial mean excitation number of each mode

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw ConfigError("gamma must be > 0");
    if (!(N >= 0.0) || !std::isfinite(N)) throw ConfigError("N must be >= 0");
    if (!(NS >= 0.0) || !std::isfinite(NS)) throw ConfigError("NS must be >= 0");
  }
};

// Symmetric covariance matrix. Physicality is checked separately by
// check_physical() since trajectories and tests also handle unphysical input.
class CovMatrix {
 public:
  static CovMatrix from(const Mat4& c) {
    if (!c.allFinite()) throw ConfigError("covariance matrix has non-finite entries");
    const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
      std::ostringstream os;
      os << "covariance matrix is not symmetric (max |C - C^T| = " << asym << ")";
      throw ConfigError(os.str());
    }
    return CovMatrix(0.5 * (c + c.transpose()));
  }

  const Mat4& matrix() const { return c_; }
  double operator()(int i, int j) const { return c_(i, j); }

  // Mean energy 1/2 Tr C in units of hbar*omega (zero-point energy included).
  double energy() const { return 0.5 * c_.trace(); }

 private:
  explicit CovMatrix(const Mat4& c) : c_(c) {}
  Mat4 c_;
};

struct PhysicalityReport {
  bool physical = false;
  bool positive = false;  // C > 0
  double nu_minus = 0.0;
  double nu_plus = 0.0;
  std::string failure;    // empty when physical
};

// Symplectic eigenvalues from the local invariants
// det C1, det C2, det C3 and det C of the 2x2 block form [[C1, C3], [C3^T, C2]].
inline std::array<double, 2> symplectic_eigenvalues(const Mat4& c) {
  const double ia = c.block<2, 2>(0, 0).determinant();
  const double ib = c.block<2, 2>(2, 2).determinant();
  const double ic = c.block<2, 2>(0, 2).determinant();
  const double isigma = c.determinant();
  const double delta = ia + ib + 2.0 * ic;
  const double disc = std::max(0.0, delta * delta - 4.0 * isigma);
  const double lo = 0.5 * (delta - std::sqrt(disc));
  const double hi = 0.5 * (delta + std::sqrt(disc));
  return {std::sqrt(std::max(0.0, lo)), std::sqrt(std::max(0.0, hi))};
}

inline PhysicalityReport check_physical(const CovMatrix& cov) {
  const Mat4& c = cov.matrix();
  PhysicalityReport r;
  const double min_eig = Eigen::SelfAdjointEigenSolver<Mat4>(c, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
  r.positive = min_eig > 0.0;
  const auto nu = symplectic_eigenvalues(c);
  r.nu_minus = nu[0];
  r.nu_plus = nu[1];
  if (!r.positive) {
    std::ostringstream os;
    os << "covariance positivity violated (smallest eigenvalue " << min_eig
       << "); for the correlated family this means |c13| or |c24| >= NS + 1/2";
    r.failure = os.str();
  } else if (r.nu_minus < 0.5 - kPhysicalTol) {
    std::ostringstream os;
    os << "uncertainty relation violated: symplectic eigenvalue nu_- = " << r.nu_minus
       << " < 1/2";
    r.failure = os.str();
  }
  r.physical = r.failure.empty();
  return r;
}

inline PhysicalityReport check_physical(const Mat4& c) {
  return check_physical(CovMatrix::from(c));
}

inline CovMatrix thermal_cov(double NS) {
  if (!(NS >= 0.0) || !std::isfinite(NS)) throw ConfigError("NS must be >= 0");
  return CovMatrix::from(Mat4::Identity() * (NS + 0.5));
}

// Locally thermal state with X1-X2 correlation c13 and Y1-Y2 correlation c24.
inline CovMatrix correlated_cov(double NS, double c13, double c24) {
  if (!(NS >= 0.0) || !std::isfinite(NS)) throw ConfigError("NS must be >= 0");
  if (NS == 0.0 && (c13 != 0.0 || c24 != 0.0))
    throw ConfigError("NS = 0 is the two-mode vacuum: only c13 = c24 = 0 is physical");
  Mat4 c = Mat4::Identity() * (NS + 0.5);
  c(0, 2) = c(2, 0) = c13;
  c(1, 3) = c(3, 1) = c24;
  auto cov = CovMatrix::from(c);
  const auto report = check_physical(cov);
  if (!report.physical) {
    std::ostringstream os;
    os << "unphysical correlations (NS=" << NS << ", c13=" << c13 << ", c24=" << c24
       << "): " << report.failure;
    throw ConfigError(os.str());
  }
  return cov;
}

struct DriftDiffusion {
  Mat4 A;
  Mat4 M;
};

inline DriftDiffusion drift_and_diffusion(const GaussianParams& p,
                                          Coupling coupling = Coupling::cascade) {
  p.validate();
  DriftDiffusion dd;
  dd.A = -0.5 * p.gamma * Mat4::Identity();
  dd.M = p.gamma * (p.N + 0.5) * Mat4::Identity();
  if (coupling == Coupling::cascade) {
    dd.A(2, 0) = dd.A(3, 1) = -p.gamma;
    dd.M(0, 2) = dd.M(2, 0) = dd.M(1, 3) = dd.M(3, 1) = p.gamma * (p.N + 0.5);
  }
  return dd;
}

inline Mat4 moment_rhs(const DriftDiffusion& dd, const Mat4& c) {
  return dd.A * c + c * dd.A.transpose() + dd.M;
}

struct IntegratorOptions {
  double step = 1e-3;  // RK4 step in units of 1/gamma
};

// Covariance matrix at every grid time, by classical fixed-step RK4.
// Grid intervals larger than the step are split into equal sub-steps.
inline std::vector<CovMatrix> evolve_cov(const CovMatrix& c0, const GaussianParams& p,
                                         const TimeGrid& grid,
                                         Coupling coupling = Coupling::cascade,
                                         IntegratorOptions opts = {}) {
  p.validate();
  check_grid(grid);
  if (!(opts.step > 0.0) || !std::isfinite(opts.step))
    throw ConfigError("integrator step must be positive");
  // RK4 on this system is stable for gamma*h < 2.78; stay well inside.
  if (opts.step > 0.5)
    throw ConfigError("integrator step " + std::to_string(opts.step) +
                      "/gamma is too coarse (max 0.5/gamma)");
  const auto report = check_physical(c0);
  if (!report.physical) throw ConfigError("initial covariance matrix: " + report.failure);

  const DriftDiffusion dd = drift_and_diffusion(p, coupling);
  using State = std::array<double, 16>;
  auto rhs = [&dd](const State& x, State& dxdt, double) {
    Eigen::Map<const Mat4> c(x.data());
    Eigen::Map<Mat4> d(dxdt.data());
    d = moment_rhs(dd, c);
  };
  boost::numeric::odeint::runge_kutta4<State> stepper;

  State x;
  Eigen::Map<Mat4>(x.data()) = c0.matrix();
  const double h_max = opts.step / p.gamma;

  std::vector<CovMatrix> out;
  out.reserve(grid.size());
  out.push_back(c0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double span = grid[k] - grid[k - 1];
    const auto n = static_cast<long>(std::ceil(span / h_max - 1e-9));
    const double h = span / static_cast<double>(n);
    double t = grid[k - 1];
    for (long s = 0; s < n; ++s) {
      stepper.do_step(rhs, x, t, h);
      t += h;
    }
    Eigen::Map<const Mat4> c(x.data());
    if (!c.allFinite())
      throw NumericalError("covariance integration produced non-finite values at t = " +
                           std::to_string(grid[k]));
    const Mat4 sym = 0.5 * (c + c.transpose());
    Eigen::Map<Mat4>(x.data()) = sym;
    out.push_back(CovMatrix::from(sym));
  }
  return out;
}

// The three flux components read off the covariance entries.
inline FluxSample fluxes_from_cov(const CovMatrix& cov, const GaussianParams& p,
                                  double t = 0.0, Coupling coupling = Coupling::cascade) {
  const Mat4& c = cov.matrix();
  const double nbar = p.N + 0.5;
  FluxSample s;
  s.t = t;
  s.j1 = p.gamma * (0.5 * (c(0, 0) + c(1, 1)) - nbar);
  s.j2 = p.gamma * (0.5 * (c(2, 2) + c(3, 3)) - nbar);
  s.j12 = coupling == Coupling::cascade ? p.gamma * (c(0, 2) + c(1, 3)) : 0.0;
  return s;
}

// First and second time derivatives of the flux components, read off
// dC/dt = A C + C A^T + M and d2C/dt2 = A C' + C' A^T.
inline std::array<FluxSample, 2> flux_derivatives(const CovMatrix& cov, const GaussianParams& p,
                                                  double t = 0.0,
                                                  Coupling coupling = Coupling::cascade) {
  const DriftDiffusion dd = drift_and_diffusion(p, coupling);
  const Mat4 c1 = moment_rhs(dd, cov.matrix());
  const Mat4 c2 = dd.A * c1 + c1 * dd.A.transpose();
  std::array<FluxSample, 2> out;
  for (int k = 0; k < 2; ++k) {
    const Mat4& d = k == 0 ? c1 : c2;
    out[k].t = t;
    out[k].j1 = 0.5 * p.gamma * (d(0, 0) + d(1, 1));
    out[k].j2 = 0.5 * p.gamma * (d(2, 2) + d(3, 3));
    out[k].j12 = coupling == Coupling::cascade ? p.gamma * (d(0, 2) + d(1, 3)) : 0.0;
  }
  return out;
}

inline FluxTrajectory simulate(const CovMatrix& c0, const GaussianParams& p,
                               const TimeGrid& grid, Coupling coupling = Coupling::cascade,
                               IntegratorOptions opts = {}) {
  const auto covs = evolve_cov(c0, p, grid, coupling, opts);
  FluxTrajectory traj;
  traj.reserve(covs.size());
  for (std::size_t k = 0; k < covs.size(); ++k)
    traj.push_back(fluxes_from_cov(covs[k], p, grid[k], coupling));
  return traj;
}

// Exact fluxes for the thermal product start C(0) = (NS + 1/2) I.
inline FluxSample thermal_fluxes_closed(const GaussianParams& p, double t) {
  p.validate();
  const double gt = p.gamma * t;
  FluxSample s;
  s.t = t;
  s.j1 = p.gamma * (p.NS - p.N) * std::exp(-gt);
  s.j2 = (1.0 + gt * gt) * s.j1;
  s.j12 = -2.0 * gt * s.j1;
  return s;
}

inline void check_sum_bound(double NS, double s) {
  if (!std::isfinite(s) || std::abs(s) > 2.0 * NS * (1.0 + 1e-12) + 1e-12) {
    std::ostringstream os;
    os << "c13 + c24 = " << s << " outside the physical range |c13 + c24| <= 2 NS = "
       << 2.0 * NS;
    throw ConfigError(os.str());
  }
}

// Exact fluxes for the locally thermal correlated family with s = c13 + c24.
// Only defined for a zero-temperature reservoir.
inline FluxSample correlated_fluxes_closed(const GaussianParams& p, double s, double t) {
  p.validate();
  if (p.N != 0.0)
    throw ConfigError("closed-form correlated fluxes require a zero-temperature reservoir (N = 0)");
  check_sum_bound(p.NS, s);
  const double gt = p.gamma * t;
  const double e = std::exp(-gt);
  FluxSample out = thermal_fluxes_closed(p, t);
  out.j2 -= p.gamma * gt * s * e;
  out.j12 += p.gamma * s * e;
  return out;
}

struct StationaryPoints {
  double t1 = 0.0;
  double t2 = 0.0;
  double j0 = 0.0;
  double j_t1 = 0.0;
  double j_t2 = 0.0;
  bool inflection = false;  // s == 0: the two points merge
  double t_min = 0.0;       // location of the local minimum of J_c
  double t_max = 0.0;       // location of the local maximum of J_c
};

// Stationary points of the total cascade flux for the correlated family at
// N = 0. For s > 0 the minimum is at t1 and the maximum at t2 > t1; for s < 0
// the order is reversed.
inline StationaryPoints stationary_points(double NS, double s, double gamma = 1.0) {
  if (!(NS > 0.0) || !std::isfinite(NS)) throw ConfigError("stationary points need NS > 0");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
  check_sum_bound(NS, s);
  StationaryPoints sp;
  sp.t1 = 2.0 / gamma;
  sp.t2 = (2.0 / gamma) * (1.0 + s / (2.0 * NS));
  sp.j0 = gamma * (2.0 * NS + s);
  sp.j_t1 = gamma * (2.0 * NS - s) * std::exp(-2.0);
  sp.j_t2 = gamma * (2.0 * NS + s) * std::exp(-(2.0 * NS + s) / NS);
  sp.inflection = (s == 0.0);
  if (s > 0.0) {
    sp.t_min = sp.t1;
    sp.t_max = sp.t2;
  } else {
    sp.t_min = sp.t2;
    sp.t_max = sp.t1;
  }
  return sp;
}

}  // namespace cascade_thermo::gaussian
