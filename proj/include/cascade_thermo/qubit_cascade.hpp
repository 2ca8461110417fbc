#pragma once

// Two qubits dissipating in cascade into a reservoir of thermal qubits.
//
// Density matrices use the uncoupled basis |ee>, |eg>, |ge>, |gg> (indices
// 0..3). The generator acts on row-major vectorised density matrices,
// vec(rho)[4k + j] = rho(k, j), and is written in the frame rotating with the
// free Hamiltonian, so it is real and frequency-free. Populations, fluxes and
// every correlation measure are invariant under that local rotation.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cascade_thermo/common.hpp"

namespace cascade_thermo::qubit {

using cd = std::complex<double>;
using CMat2 = Eigen::Matrix2cd;
using CMat4 = Eigen::Matrix4cd;
using Mat16 = Eigen::Matrix<double, 16, 16>;
using CVec16 = Eigen::Matrix<cd, 16, 1>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPositivityTol = 1e-10;

struct QubitParams {
  double gamma = 1.0;
  double xi = 1.0;   // reservoir polarisation tanh(hbar omega / 2 k_B T)
  double xiS = 0.0;  // initial polarisation of each qubit

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be > 0");
    if (!(xi >= 0.0 && xi <= 1.0)) throw ConfigError("xi must lie in [0, 1]");
    if (!(xiS >= 0.0 && xiS <= 1.0)) throw ConfigError("xiS must lie in [0, 1]");
  }
};

// Polarisation of a qubit in equilibrium at temperature T (k_B T in units of
// hbar omega). T = 0 maps to 1, T -> infinity to 0.
inline double xi_of_temperature(double T) {
  if (!(T >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (T == 0.0) return 1.0;
  if (std::isinf(T)) return 0.0;
  return std::tanh(0.5 / T);
}

inline void check_polarisation(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0))
    throw ConfigError(std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
}

class DensityMatrix4 {
 public:
  static DensityMatrix4 from(const CMat4& rho) {
    if (!rho.allFinite()) throw ConfigError("density matrix has non-finite entries");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) {
      std::ostringstream os;
      os << "density matrix is not Hermitian (max |rho - rho^dag| = " << herm << ")";
      throw ConfigError(os.str());
    }
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
      std::ostringstream os;
      os << "density matrix trace is " << tr << ", expected 1";
      throw ConfigError(os.str());
    }
    const CMat4 h = 0.5 * (rho + rho.adjoint());
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<CMat4>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (min_eig < -kPositivityTol) {
      std::ostringstream os;
      os << "density matrix is not positive (smallest eigenvalue " << min_eig << ")";
      throw ConfigError(os.str());
    }
    return DensityMatrix4(h);
  }

  const CMat4& matrix() const { return rho_; }
  cd operator()(int i, int j) const { return rho_(i, j); }

 private:
  explicit DensityMatrix4(const CMat4& rho) : rho_(rho) {}
  CMat4 rho_;
};

// Local thermal state diag(P_e, P_g) of one qubit in the (e, g) basis.
inline CMat2 local_thermal(double xi) {
  check_polarisation(xi, "polarisation");
  CMat2 r = CMat2::Zero();
  r(0, 0) = 0.5 * (1.0 - xi);
  r(1, 1) = 0.5 * (1.0 + xi);
  return r;
}

inline CMat4 kron(const CMat2& a, const CMat2& b) {
  CMat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

inline DensityMatrix4 product_thermal_state(double xi1, double xi2) {
  check_polarisation(xi1, "xi1");
  check_polarisation(xi2, "xi2");
  return DensityMatrix4::from(kron(local_thermal(xi1), local_thermal(xi2)));
}

inline DensityMatrix4 thermal_qubit_state(double xiS) {
  check_polarisation(xiS, "xiS");
  return product_thermal_state(xiS, xiS);
}

// Locally thermal X state with coherence rho23 / 4 between |eg> and |ge>.
// Positivity requires |rho23| <= 1 - xiS^2.
inline DensityMatrix4 correlated_qubit_state(double xiS, cd rho23) {
  check_polarisation(xiS, "xiS");
  const double bound = 1.0 - xiS * xiS;
  if (!(std::abs(rho23) <= bound + 1e-12)) {
    std::ostringstream os;
    os << "|rho23| = " << std::abs(rho23) << " exceeds the positivity bound 1 - xiS^2 = "
       << bound;
    throw ConfigError(os.str());
  }
  CMat4 r = CMat4::Zero();
  r(0, 0) = 0.25 * (1.0 - xiS) * (1.0 - xiS);
  r(1, 1) = r(2, 2) = 0.25 * bound;
  r(3, 3) = 0.25 * (1.0 + xiS) * (1.0 + xiS);
  r(1, 2) = 0.25 * rho23;
  r(2, 1) = 0.25 * std::conj(rho23);
  return DensityMatrix4::from(r);
}

// Qubit 1 pure with the populations of a thermal qubit at xi, qubit 2
// thermal at xi2:  |psi> = sqrt((1 - xi)/2) |e> + sqrt((1 + xi)/2) |g>.
inline DensityMatrix4 coherent_counterexample_state(double xi, double xi2) {
  check_polarisation(xi, "xi");
  check_polarisation(xi2, "xi2");
  Eigen::Vector2cd psi(std::sqrt(0.5 * (1.0 - xi)), std::sqrt(0.5 * (1.0 + xi)));
  return DensityMatrix4::from(kron(psi * psi.adjoint(), local_thermal(xi2)));
}

inline DensityMatrix4 singlet_state() {
  CMat4 r = CMat4::Zero();
  r(1, 1) = r(2, 2) = 0.5;
  r(1, 2) = r(2, 1) = -0.5;
  return DensityMatrix4::from(r);
}

// <sigma_1z + sigma_2z>. The fluxes below satisfy J1 + J2 + J12 = -d/dt of this
// quantity (times hbar omega), i.e. twice the rate of change of
// Tr[rho H] with H = hbar omega (sigma_1z + sigma_2z)/2.
inline double polarisation_energy(const DensityMatrix4& rho) {
  const CMat4& r = rho.matrix();
  return 2.0 * r(0, 0).real() - 2.0 * r(3, 3).real();
}

// ---------------------------------------------------------------------------
// Generator

namespace detail {

inline CMat4 sigma_minus(int which) {
  CMat2 sm = CMat2::Zero();
  sm(1, 0) = 1.0;  // |g><e|
  return which == 1 ? kron(sm, CMat2::Identity()) : kron(CMat2::Identity(), sm);
}

inline CMat4 comm(const CMat4& a, const CMat4& b) { return a * b - b * a; }

inline CMat4 apply_dissipators(const CMat4& rho, double gamma, double xi, Coupling coupling) {
  const double down = 0.25 * gamma * (1.0 + xi);
  const double up = 0.25 * gamma * (1.0 - xi);
  CMat4 out = CMat4::Zero();
  for (int q = 1; q <= 2; ++q) {
    const CMat4 sm = sigma_minus(q);
    const CMat4 sp = sm.adjoint();
    out += down * (2.0 * sm * rho * sp - rho * sp * sm - sp * sm * rho);
    out += up * (2.0 * sp * rho * sm - rho * sm * sp - sm * sp * rho);
  }
  if (coupling == Coupling::cascade) {
    const CMat4 s1m = sigma_minus(1), s2m = sigma_minus(2);
    const CMat4 s1p = s1m.adjoint(), s2p = s2m.adjoint();
    out += 0.5 * gamma * (1.0 + xi) * (s1m * comm(rho, s2p) + comm(s2m, rho) * s1p);
    out += 0.5 * gamma * (1.0 - xi) * (s1p * comm(rho, s2m) + comm(s2p, rho) * s1m);
  }
  return out;
}

// Printed form of the cascade generator, entries of 2K/gamma. Symbols:
//   a = 1+xi   b = 1-xi   m = xi-1   p = -1-xi   q = -2-xi   r = -2+xi
//   d = -2     A = -2(1+xi)          M = 2(xi-1)
inline constexpr std::array<const char*, 16> kPrintedGenerator = {
    "A0000bb00bb00000",  //
    "0qm0000b000b0000",  //
    "0pq0000b000b0000",  //
    "000d000000000000",  //
    "0000q000m0000bb0",  //
    "a0000dm00m00000b",  //
    "a0000pd000m0000b",  //
    "0aa0000r000m0000",  //
    "0000p000q0000bb0",  //
    "a0000p000dm0000b",  //
    "a00000p00pd0000b",  //
    "0aa0000p000r0000",  //
    "000000000000d000",  //
    "0000a000a0000rm0",  //
    "0000a000a0000pr0",  //
    "00000aa00aa0000M",  //
};

inline double printed_symbol(char s, double xi) {
  switch (s) {
    case '0': return 0.0;
    case 'a': return 1.0 + xi;
    case 'b': return 1.0 - xi;
    case 'm': return xi - 1.0;
    case 'p': return -1.0 - xi;
    case 'q': return -2.0 - xi;
    case 'r': return -2.0 + xi;
    case 'd': return -2.0;
    case 'A': return -2.0 * (1.0 + xi);
    case 'M': return 2.0 * (xi - 1.0);
  }
  throw std::logic_error(std::string("unknown generator symbol ") + s);
}

}  // namespace detail

inline int vec_index(int k, int j) { return 4 * k + j; }

inline CVec16 vectorize(const CMat4& rho) {
  CVec16 v;
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) v(vec_index(k, j)) = rho(k, j);
  return v;
}

inline CMat4 unvectorize(const CVec16& v) {
  CMat4 rho;
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) rho(k, j) = v(vec_index(k, j));
  return rho;
}

// The printed table scaled to the generator itself (K = gamma/2 * table).
inline Mat16 printed_generator(const QubitParams& p) {
  Mat16 k;
  for (int row = 0; row < 16; ++row)
    for (int col = 0; col < 16; ++col)
      k(row, col) = 0.5 * p.gamma * detail::printed_symbol(detail::kPrintedGenerator[row][col], p.xi);
  return k;
}

// K[(kj),(mn)] = <k| L(|m><n|) |j>, assembled from the dissipator definitions.
inline Mat16 assemble_generator(const QubitParams& p, Coupling coupling = Coupling::cascade) {
  Mat16 k;
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      CMat4 e = CMat4::Zero();
      e(m, n) = 1.0;
      const CMat4 y = detail::apply_dissipators(e, p.gamma, p.xi, coupling);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          if (std::abs(y(a, b).imag()) > 1e-14)
            throw NumericalError("dissipator produced a complex generator entry");
          k(vec_index(a, b), vec_index(m, n)) = y(a, b).real();
        }
      }
    }
  }
  return k;
}

struct GeneratorCheck {
  bool ok = true;
  double max_deviation = 0.0;
  int row = -1;
  int col = -1;
};

inline GeneratorCheck compare_generators(const Mat16& assembled, const Mat16& reference,
                                         double tol = 1e-12) {
  GeneratorCheck c;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      const double d = std::abs(assembled(i, j) - reference(i, j));
      if (d > c.max_deviation) {
        c.max_deviation = d;
        c.row = i;
        c.col = j;
      }
    }
  }
  c.ok = c.max_deviation <= tol;
  return c;
}

class Liouvillian {
 public:
  // Assembles the generator from the dissipators; for the cascade model it is
  // also cross-checked entry by entry against the printed table and any
  // discrepancy throws.
  static Liouvillian build(const QubitParams& p, Coupling coupling = Coupling::cascade) {
    p.validate();
    return from_matrix(assemble_generator(p, coupling), p, coupling);
  }

  // Wraps an externally supplied generator, applying the same cross-check.
  static Liouvillian from_matrix(const Mat16& k, const QubitParams& p,
                                 Coupling coupling = Coupling::cascade) {
    p.validate();
    if (coupling == Coupling::cascade) {
      const auto check = compare_generators(k, printed_generator(p));
      if (!check.ok) {
        std::ostringstream os;
        os << "Liouvillian cross-check failed: assembled and printed generator differ by "
           << check.max_deviation << " at entry (" << check.row << ", " << check.col << ")";
        throw NumericalError(os.str());
      }
    }
    return Liouvillian(k, p, coupling);
  }

  const Mat16& matrix() const { return k_; }
  const QubitParams& params() const { return params_; }
  Coupling coupling() const { return coupling_; }

  CMat4 apply(const CMat4& rho) const {
    return unvectorize(k_.cast<cd>() * vectorize(rho));
  }

  Mat16 propagator(double t) const { return Mat16((k_ * t).exp()); }

 private:
  Liouvillian(const Mat16& k, const QubitParams& p, Coupling c)
      : k_(k), params_(p), coupling_(c) {}
  Mat16 k_;
  QubitParams params_;
  Coupling coupling_;
};

inline Liouvillian build_liouvillian(const QubitParams& p, Coupling coupling = Coupling::cascade) {
  return Liouvillian::build(p, coupling);
}

// Smallest nonzero decay rate of the generator. For thermal reservoirs at
// intermediate temperatures it can be far below gamma (for the cascade it is
// 1.5 gamma - sqrt(2.25 - 2 xi^2) gamma), which sets how long a trajectory must
// run before the heat integral closes.
inline double slowest_decay_rate(const Liouvillian& gen) {
  const auto ev = Eigen::EigenSolver<Mat16>(gen.matrix(), false).eigenvalues();
  const double floor = 1e-9 * gen.params().gamma;
  double rate = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 16; ++i) {
    const double r = -ev(i).real();
    if (r > floor) rate = std::min(rate, r);
  }
  return rate;
}

// rho(t) = exp(K t) rho(0) on the grid. Uniform grids reuse one step
// propagator and re-anchor to the exact exponential every kAnchor steps.
inline std::vector<DensityMatrix4> evolve(const DensityMatrix4& rho0, const Liouvillian& gen,
                                          const TimeGrid& grid) {
  check_grid(grid);
  constexpr std::size_t kAnchor = 512;
  const CVec16 v0 = vectorize(rho0.matrix());
  const Mat16& k = gen.matrix();
  const bool uniform = is_uniform(grid);
  Eigen::Matrix<cd, 16, 16> step;
  if (uniform && grid.size() > 1) step = Mat16((k * (grid[1] - grid[0])).exp()).cast<cd>();

  std::vector<DensityMatrix4> out;
  out.reserve(grid.size());
  CVec16 v = v0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) {
      if (uniform && i % kAnchor != 0)
        v = step * v;
      else
        v = Mat16((k * grid[i]).exp()).cast<cd>() * v0;
    }
    if (!v.allFinite())
      throw NumericalError("density-matrix propagation produced non-finite values at t = " +
                           std::to_string(grid[i]));
    try {
      out.push_back(DensityMatrix4::from(unvectorize(v)));
    } catch (const ConfigError& e) {
      throw NumericalError("propagated state invalid at t = " + std::to_string(grid[i]) + ": " +
                           e.what());
    }
  }
  return out;
}

inline std::vector<DensityMatrix4> evolve(const DensityMatrix4& rho0, const QubitParams& p,
                                          const TimeGrid& grid,
                                          Coupling coupling = Coupling::cascade) {
  return evolve(rho0, Liouvillian::build(p, coupling), grid);
}

// Flux components from the density-matrix entries.
inline FluxSample fluxes(const DensityMatrix4& rho, const QubitParams& p, double t = 0.0,
                         Coupling coupling = Coupling::cascade) {
  const CMat4& r = rho.matrix();
  const double up = 1.0 + p.xi, dn = 1.0 - p.xi;
  const double r11 = r(0, 0).real(), r22 = r(1, 1).real(), r33 = r(2, 2).real(),
               r44 = r(3, 3).real();
  FluxSample s;
  s.t = t;
  s.j1 = p.gamma * (up * (r11 + r22) - dn * (r33 + r44));
  s.j2 = p.gamma * (up * (r11 + r33) - dn * (r22 + r44));
  s.j12 = coupling == Coupling::cascade ? 2.0 * p.gamma * p.xi * (r(1, 2) + r(2, 1)).real() : 0.0;
  return s;
}

inline FluxTrajectory simulate(const DensityMatrix4& rho0, const QubitParams& p,
                               const TimeGrid& grid, Coupling coupling = Coupling::cascade) {
  const auto states = evolve(rho0, p, grid, coupling);
  FluxTrajectory traj;
  traj.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k)
    traj.push_back(fluxes(states[k], p, grid[k], coupling));
  return traj;
}

// Exact fluxes for correlated_qubit_state(xiS, rho23) with a zero-temperature
// reservoir; they depend on rho23 only through its real part.
inline FluxSample correlated_fluxes_closed(const QubitParams& p, double re_rho23, double t) {
  p.validate();
  if (p.xi != 1.0)
    throw ConfigError("closed-form qubit fluxes require a zero-temperature reservoir (xi = 1)");
  if (!(std::abs(re_rho23) <= 1.0 - p.xiS * p.xiS + 1e-12))
    throw ConfigError("|Re rho23| exceeds 1 - xiS^2");
  const double g = p.gamma, gt = g * t, e = std::exp(-gt);
  const double a = 1.0 - p.xiS;
  FluxSample s;
  s.t = t;
  s.j1 = g * a * e;
  s.j2 = g * ((1.0 + gt * gt) * a + 2.0 * (1.0 - gt - e) * a * a - gt * re_rho23) * e;
  s.j12 = g * (2.0 * (1.0 - e) * a * a - 2.0 * gt * a + re_rho23) * e;
  return s;
}

// Change of basis to |ee>, |Psi+>, |Psi->, |gg> with
// |Psi+-> = (|eg> +- |ge>)/sqrt(2).
inline CMat4 collective_basis_change() {
  const double h = 1.0 / std::sqrt(2.0);
  CMat4 u = CMat4::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = h;
  u(1, 2) = h;
  u(2, 1) = h;
  u(2, 2) = -h;
  u(3, 3) = 1.0;
  return u;
}

inline DensityMatrix4 to_collective_basis(const DensityMatrix4& rho) {
  const CMat4 u = collective_basis_change();
  return DensityMatrix4::from(u * rho.matrix() * u.adjoint());
}

}  // namespace cascade_thermo::qubit
