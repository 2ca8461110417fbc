#pragma once

// Correlation measures. Gaussian states: Gaussian discord and logarithmic
// negativity from symplectic invariants. Two qubits: concurrence, entropic
// discord with projective measurements on qubit 1, and one-sided trace
// distance discord.
//
// Entropies and the Gaussian f(x) are in bits; the logarithmic negativity
// uses the natural logarithm.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cascade_thermo/common.hpp"
#include "cascade_thermo/gaussian_cascade.hpp"
#include "cascade_thermo/optimize.hpp"
#include "cascade_thermo/qubit_cascade.hpp"

namespace cascade_thermo::correlations {

struct CorrelationReport {
  std::string measure;
  double value = 0.0;
  int iterations = 0;
  long evaluations = 0;
  double residual = 0.0;  // final simplex size of the local refinement
  bool converged = true;
};

// ---------------------------------------------------------------------------
// Gaussian states

// Invariants of the covariance matrix in the convention where the vacuum
// block has determinant 1: I1 = 4 det C1, I2 = 4 det C2, I3 = 4 det C3,
// I4 = 16 det C.
struct SymplecticInvariants {
  double I1 = 1.0, I2 = 1.0, I3 = 0.0, I4 = 1.0, I_delta = 2.0;
};

inline SymplecticInvariants symplectic_invariants(const gaussian::CovMatrix& cov) {
  const gaussian::Mat4& c = cov.matrix();
  SymplecticInvariants s;
  s.I1 = 4.0 * c.block<2, 2>(0, 0).determinant();
  s.I2 = 4.0 * c.block<2, 2>(2, 2).determinant();
  s.I3 = 4.0 * c.block<2, 2>(0, 2).determinant();
  s.I4 = 16.0 * c.determinant();
  s.I_delta = s.I1 + s.I2 + 2.0 * s.I3;
  return s;
}

// Symplectic eigenvalues in the vacuum = 1 convention.
inline std::array<double, 2> invariant_eigenvalues(double delta, double I4) {
  const double disc = std::sqrt(std::max(0.0, delta * delta - 4.0 * I4));
  return {std::sqrt(std::max(0.0, 0.5 * (delta - disc))), std::sqrt(0.5 * (delta + disc))};
}

inline double gaussian_f(double x) {
  const double a = 0.5 * (x + 1.0), b = 0.5 * (x - 1.0);
  const double tb = b > 0.0 ? b * std::log2(b) : 0.0;
  return a * std::log2(a) - tb;
}

struct DiscordBranches {
  double w1 = 0.0;
  double w2 = 0.0;
  bool first = true;  // whether the branch condition selects w1
};

// The two closed-form expressions for W with subsystem 1 measured.
inline DiscordBranches discord_branches(double I1, double I2, double I3, double I4) {
  DiscordBranches b;
  const double x = I3 * I3 + (I1 - 1.0) * (I4 - I2);
  b.w1 = (2.0 * I3 * I3 + (I1 - 1.0) * (I4 - I2) + 2.0 * std::abs(I3) * std::sqrt(std::max(0.0, x))) /
         ((I1 - 1.0) * (I1 - 1.0));
  const double y = I3 * I3 * I3 * I3 + (I4 - I1 * I2) * (I4 - I1 * I2) -
                   2.0 * I3 * I3 * (I4 + I1 * I2);
  b.w2 = (I1 * I2 - I3 * I3 + I4 - std::sqrt(std::max(0.0, y))) / (2.0 * I1);
  b.first = (I4 - I1 * I2) * (I4 - I1 * I2) <= (1.0 + I1) * I3 * I3 * (I2 + I4);
  return b;
}

enum class Measured { first, second };

inline double gaussian_discord(const gaussian::CovMatrix& cov, Measured side = Measured::first) {
  const auto phys = gaussian::check_physical(cov);
  if (!phys.physical) throw ConfigError("Gaussian discord of an unphysical state: " + phys.failure);
  SymplecticInvariants s = symplectic_invariants(cov);
  if (side == Measured::second) std::swap(s.I1, s.I2);
  // A pure measured mode cannot share correlations with anything.
  if (s.I1 - 1.0 < 1e-12) return 0.0;
  const auto nu = invariant_eigenvalues(s.I_delta, s.I4);
  const auto b = discord_branches(s.I1, s.I2, s.I3, s.I4);
  const double w = b.first ? b.w1 : b.w2;
  const double d = gaussian_f(std::sqrt(s.I1)) - gaussian_f(std::max(1.0, nu[0])) -
                   gaussian_f(std::max(1.0, nu[1])) + gaussian_f(std::sqrt(std::max(1.0, w)));
  return d < 0.0 && d > -1e-12 ? 0.0 : d;
}

// Smallest symplectic eigenvalue of the partially transposed state, in the
// vacuum = 1/2 convention of the covariance matrix itself.
inline double pt_symplectic_min(const gaussian::CovMatrix& cov) {
  const gaussian::Mat4& c = cov.matrix();
  const double delta = c.block<2, 2>(0, 0).determinant() + c.block<2, 2>(2, 2).determinant() -
                       2.0 * c.block<2, 2>(0, 2).determinant();
  return invariant_eigenvalues(delta, c.determinant())[0];
}

inline double log_negativity(const gaussian::CovMatrix& cov) {
  const auto phys = gaussian::check_physical(cov);
  if (!phys.physical) throw ConfigError("log negativity of an unphysical state: " + phys.failure);
  return std::max(0.0, -std::log(2.0 * pt_symplectic_min(cov)));
}

// ---------------------------------------------------------------------------
// Two-qubit helpers

using qubit::CMat2;
using qubit::CMat4;
using qubit::DensityMatrix4;
using cd = std::complex<double>;

inline CMat2 partial_trace_first(const CMat4& r) {
  CMat2 out = CMat2::Zero();
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out(i, j) += r(2 * a + i, 2 * a + j);
  return out;
}

inline CMat2 partial_trace_second(const CMat4& r) {
  CMat2 out = CMat2::Zero();
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out(i, j) += r(2 * i + b, 2 * j + b);
  return out;
}

inline double entropy_term(double p) { return p > 1e-300 ? -p * std::log2(p) : 0.0; }

// Eigenvalues of a 2x2 Hermitian matrix, computed directly.
inline std::array<double, 2> eig2(const CMat2& m) {
  const double a = m(0, 0).real(), d = m(1, 1).real();
  const double mean = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
  return {mean - r, mean + r};
}

inline double entropy2(const CMat2& m) {
  const auto e = eig2(m);
  return entropy_term(e[0]) + entropy_term(e[1]);
}

inline double entropy4(const CMat4& m) {
  const auto e = Eigen::SelfAdjointEigenSolver<CMat4>(m, Eigen::EigenvaluesOnly).eigenvalues();
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += entropy_term(e(i));
  return s;
}

// |1> = cos(theta/2)|e> + e^{i phi} sin(theta/2)|g>,
// |2> = sin(theta/2)|e> - e^{i phi} cos(theta/2)|g>.
inline std::array<Eigen::Vector2cd, 2> measurement_basis(double theta, double phi) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const cd ph = std::polar(1.0, phi);
  return {Eigen::Vector2cd(c, ph * s), Eigen::Vector2cd(s, -ph * c)};
}

// (<u| x 1) rho (|v> x 1): an operator on qubit 2.
inline CMat2 sandwich_first(const CMat4& r, const Eigen::Vector2cd& u, const Eigen::Vector2cd& v) {
  CMat2 out = CMat2::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out += std::conj(u(a)) * v(b) * r.block<2, 2>(2 * a, 2 * b);
  return out;
}

// Trace norm of a general 2x2 matrix: s1 + s2 = sqrt(|M|_F^2 + 2 |det M|).
inline double trace_norm2(const CMat2& m) {
  return std::sqrt(std::max(0.0, m.squaredNorm() + 2.0 * std::abs(m.determinant())));
}

// ---------------------------------------------------------------------------
// Concurrence

inline CMat4 spin_flip() {
  CMat4 y = CMat4::Zero();
  y(0, 3) = -1.0;
  y(1, 2) = 1.0;
  y(2, 1) = 1.0;
  y(3, 0) = -1.0;
  return y;
}

inline double concurrence(const DensityMatrix4& rho) {
  const CMat4& r = rho.matrix();
  const CMat4 y = spin_flip();
  const CMat4 m = r * y * r.conjugate() * y;
  const auto ev = Eigen::ComplexEigenSolver<CMat4>(m, false).eigenvalues();
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) {
    // Round-off pushes zero eigenvalues slightly negative; anything beyond
    // that points at an invalid input.
    const double mu = ev(i).real();
    if (mu < -1e-9) throw NumericalError("concurrence: negative eigenvalue " + std::to_string(mu));
    lam[i] = mu < -1e-12 ? 0.0 : std::sqrt(std::max(0.0, mu));
  }
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

inline bool is_x_state(const DensityMatrix4& rho, double tol = 1e-12) {
  const CMat4& r = rho.matrix();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j && i + j != 3 && std::abs(r(i, j)) > tol) return false;
  return true;
}

inline double concurrence_x(const DensityMatrix4& rho) {
  if (!is_x_state(rho)) throw ConfigError("concurrence_x needs an X state");
  const CMat4& r = rho.matrix();
  const double a = r(0, 0).real(), b = r(1, 1).real(), c = r(2, 2).real(), d = r(3, 3).real();
  const double w = std::abs(r(3, 0)), z = std::abs(r(2, 1));
  return std::max({2.0 * (w - std::sqrt(b * c)), 2.0 * (z - std::sqrt(a * d)), 0.0});
}

// ---------------------------------------------------------------------------
// Entropic discord with projective measurements on qubit 1

struct DiscordOptions {
  int theta_points = 180;
  int phi_points = 360;
  optimize::NelderMeadOptions refine{};
};

// Average conditional entropy of qubit 2 after measuring qubit 1.
inline double conditional_entropy(const CMat4& r, double theta, double phi) {
  const auto basis = measurement_basis(theta, phi);
  double s = 0.0;
  for (const auto& l : basis) {
    const CMat2 sigma = sandwich_first(r, l, l);
    const double p = sigma.trace().real();
    if (p > 1e-300) s += p * entropy2(sigma / p);
  }
  return s;
}

namespace detail {

// Grid search over (theta, phi) followed by a Nelder-Mead polish from the
// best node. theta runs over [0, pi] inclusive, phi over [0, 2 pi).
template <class F>
optimize::MinimizeResult minimise_over_sphere(F&& f, int n_theta, int n_phi,
                                              const optimize::NelderMeadOptions& opt) {
  if (n_theta < 2 || n_phi < 1) throw ConfigError("angular grid too small");
  const double dth = std::numbers::pi / (n_theta - 1), dph = 2.0 * std::numbers::pi / n_phi;
  double best = std::numeric_limits<double>::infinity();
  double bt = 0.0, bp = 0.0;
  long evals = 0;
  for (int i = 0; i < n_theta; ++i) {
    const double th = i * dth;
    // At the poles phi is irrelevant.
    const int np = (i == 0 || i == n_theta - 1) ? 1 : n_phi;
    for (int j = 0; j < np; ++j) {
      const double v = f(th, j * dph);
      ++evals;
      if (v < best) {
        best = v;
        bt = th;
        bp = j * dph;
      }
    }
  }
  auto res = optimize::nelder_mead([&](const double* x) { return f(x[0], x[1]); }, {bt, bp},
                                   {0.5 * dth, 0.5 * dph}, opt);
  if (!(res.value <= best)) {
    res.value = best;
    res.x = {bt, bp};
  }
  res.evaluations += evals;
  return res;
}

}  // namespace detail

inline CorrelationReport quantum_discord(const DensityMatrix4& rho, const DiscordOptions& opt = {}) {
  const CMat4& r = rho.matrix();
  const double sa = entropy2(partial_trace_second(r));
  const double sab = entropy4(r);
  auto res = detail::minimise_over_sphere(
      [&](double th, double ph) { return conditional_entropy(r, th, ph); }, opt.theta_points,
      opt.phi_points, opt.refine);
  CorrelationReport rep;
  rep.measure = "quantum_discord";
  const double d = sa - sab + res.value;
  rep.value = d < 0.0 && d > -1e-10 ? 0.0 : d;
  if (rep.value < 0.0)
    throw NumericalError("quantum discord came out negative: " + std::to_string(d));
  rep.iterations = res.iterations;
  rep.evaluations = res.evaluations;
  rep.residual = res.simplex_size;
  rep.converged = res.converged;
  return rep;
}

// ---------------------------------------------------------------------------
// Trace distance discord, one-sided (classical on qubit 1)
//
// Two independent searches run and the smaller value is reported:
//  * dephasing search: for a fixed basis {|a1>, |a2>} of qubit 1 the nearest
//    classical-quantum state is the state dephased in that basis, so the
//    distance reduces to the trace norm of the off-diagonal block
//    (<a1| x 1) rho (|a2> x 1). Minimised over the basis angles.
//  * full search: Nelder-Mead over the basis angles and two unnormalised
//    positive qubit-2 operators (Cholesky factors), with random restarts.
// The full search cannot beat the dephasing search except through numerical
// error, so it acts as a cross-check.

struct TddOptions {
  int theta_points = 90;
  int phi_points = 180;
  int restarts = 16;
  bool full_search = true;
  std::uint64_t seed = 0;  // 0: use optimize::default_seed()
  optimize::NelderMeadOptions refine{};
  optimize::NelderMeadOptions full{1e-8, 20000, 0, 1e-12};
};

struct TddReport : CorrelationReport {
  double dephasing_value = 0.0;
  double full_search_value = std::numeric_limits<double>::quiet_NaN();
};

inline double dephasing_distance(const CMat4& r, double theta, double phi) {
  const auto b = measurement_basis(theta, phi);
  return trace_norm2(sandwich_first(r, b[0], b[1]));
}

inline double trace_norm_hermitian(const CMat4& m) {
  const auto e = Eigen::SelfAdjointEigenSolver<CMat4>(m, Eigen::EigenvaluesOnly).eigenvalues();
  return e.cwiseAbs().sum();
}

// 0.5 || rho - sum_l |a_l><a_l| x w_l ||_1 with w_l = L_l L_l^dag normalised
// so that the classical-quantum state has unit trace.
inline double cq_distance(const CMat4& r, const double* x) {
  const auto basis = measurement_basis(x[0], x[1]);
  CMat2 w[2];
  double tr = 0.0;
  for (int l = 0; l < 2; ++l) {
    const double* c = x + 2 + 4 * l;
    CMat2 low = CMat2::Zero();
    low(0, 0) = c[0];
    low(1, 0) = cd(c[1], c[2]);
    low(1, 1) = c[3];
    w[l] = low * low.adjoint();
    tr += w[l].trace().real();
  }
  if (!(tr > 1e-300)) return 2.0;
  CMat4 cq = CMat4::Zero();
  for (int l = 0; l < 2; ++l) cq += qubit::kron(basis[l] * basis[l].adjoint(), w[l] / tr);
  return 0.5 * trace_norm_hermitian(r - cq);
}

inline TddReport trace_distance_discord(const DensityMatrix4& rho, const TddOptions& opt = {}) {
  const CMat4& r = rho.matrix();
  TddReport rep;
  rep.measure = "trace_distance_discord";

  auto a = detail::minimise_over_sphere(
      [&](double th, double ph) { return dephasing_distance(r, th, ph); }, opt.theta_points,
      opt.phi_points, opt.refine);
  rep.dephasing_value = a.value;
  rep.value = a.value;
  rep.iterations = a.iterations;
  rep.evaluations = a.evaluations;
  rep.residual = a.simplex_size;
  rep.converged = a.converged;

  if (opt.full_search && opt.restarts > 0) {
    std::mt19937_64 rng(opt.seed != 0 ? opt.seed : optimize::default_seed());
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto objective = [&](const double* x) { return cq_distance(r, x); };

    // The first start sits on the dephased state of the best basis found above.
    std::vector<double> start(10);
    const auto dephased_start = [&](double th, double ph) {
      const auto b = measurement_basis(th, ph);
      std::vector<double> x{th, ph};
      for (int l = 0; l < 2; ++l) {
        const CMat2 w = sandwich_first(r, b[l], b[l]) + 1e-9 * CMat2::Identity();
        const Eigen::LLT<CMat2> llt(w);
        const CMat2 low = llt.matrixL();
        x.insert(x.end(), {low(0, 0).real(), low(1, 0).real(), low(1, 0).imag(), low(1, 1).real()});
      }
      return x;
    };

    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opt.restarts; ++k) {
      if (k == 0) {
        start = dephased_start(a.x[0], a.x[1]);
      } else {
        start[0] = std::acos(u(rng));
        start[1] = std::numbers::pi * (1.0 + u(rng));
        for (int i = 2; i < 10; ++i) start[i] = 0.5 * u(rng);
      }
      const auto res = optimize::nelder_mead(objective, start, 0.1, opt.full);
      rep.evaluations += res.evaluations;
      rep.iterations += res.iterations;
      best = std::min(best, res.value);
    }
    rep.full_search_value = best;
    rep.value = std::min(rep.value, best);
  }
  if (rep.value < 0.0) rep.value = 0.0;
  return rep;
}

}  // namespace cascade_thermo::correlations
