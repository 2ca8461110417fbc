#pragma once

// Reference implementations used only by the tests. They share no code with
// the library: the oscillator moments come from an exact matrix exponential of
// the vectorised Lyapunov equation, the qubit generator is built from jump
// operators with column-stacking vectorisation, and the correlation measures
// are brute-force searches over measurements.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cd = std::complex<double>;
using M4 = Eigen::Matrix4d;
using C2 = Eigen::Matrix2cd;
using C4 = Eigen::Matrix4cd;
using C16 = Eigen::Matrix<cd, 16, 16>;
using V16 = Eigen::Matrix<cd, 16, 1>;

// ---------------------------------------------------------------------------
// Oscillators. Heisenberg-Langevin: both modes see the same input noise, mode
// 2 is driven by the output of mode 1.

inline M4 cv_exact(const M4& c0, double gamma, double N, double t, bool cascade) {
  M4 a = -0.5 * gamma * M4::Identity();
  M4 m = gamma * (N + 0.5) * M4::Identity();
  if (cascade) {
    a(2, 0) = a(3, 1) = -gamma;
    m(0, 2) = m(2, 0) = m(1, 3) = m(3, 1) = gamma * (N + 0.5);
  }
  Eigen::Matrix<double, 17, 17> aug = Eigen::Matrix<double, 17, 17>::Zero();
  const M4 id = M4::Identity();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          aug(4 * j + i, 4 * l + k) = id(j, l) * a(i, k) + a(j, l) * id(i, k);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) aug(4 * j + i, 16) = m(i, j);
  Eigen::Matrix<double, 17, 1> v;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) v(4 * j + i) = c0(i, j);
  v(16) = 1.0;
  const Eigen::Matrix<double, 17, 17> e = (aug * t).exp();
  const Eigen::Matrix<double, 17, 1> w = e * v;
  M4 c;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) c(i, j) = w(4 * j + i);
  return c;
}

struct Flux {
  double j1, j2, j12;
};

inline Flux cv_flux(const M4& c, double gamma, double N) {
  return {gamma * (0.5 * (c(0, 0) + c(1, 1)) - N - 0.5), gamma * (0.5 * (c(2, 2) + c(3, 3)) - N - 0.5),
          gamma * (c(0, 2) + c(1, 3))};
}

inline M4 cv_family(double NS, double c13, double c24) {
  M4 c = (NS + 0.5) * M4::Identity();
  c(0, 2) = c(2, 0) = c13;
  c(1, 3) = c(3, 1) = c24;
  return c;
}

// Smallest symplectic eigenvalue (vacuum 1/2) from the spectrum of i Omega C.
inline double symplectic_min(const M4& c) {
  M4 om = M4::Zero();
  om(0, 1) = om(2, 3) = 1.0;
  om(1, 0) = om(3, 2) = -1.0;
  const auto ev = Eigen::EigenSolver<M4>(om * c).eigenvalues();
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) lo = std::min(lo, std::abs(ev(i).imag()));
  return lo;
}

inline double log_negativity(const M4& c) {
  M4 p = M4::Identity();
  p(3, 3) = -1.0;
  return std::max(0.0, -std::log(2.0 * symplectic_min(p * c * p)));
}

inline double entropy_f(double x) {
  const double a = 0.5 * (x + 1.0), b = 0.5 * (x - 1.0);
  return a * std::log2(a) - (b > 1e-300 ? b * std::log2(b) : 0.0);
}

// Discord with mode 1 measured, minimising the conditional entropy of mode 2
// over pure single-mode Gaussian measurements (squeezing r, angle phi) by a
// grid search followed by shrinking pattern search.
inline double gaussian_discord(const M4& c) {
  const M4 s = 2.0 * c;
  const Eigen::Matrix2d a = s.block<2, 2>(0, 0), b = s.block<2, 2>(2, 2), x = s.block<2, 2>(0, 2);
  M4 om = M4::Zero();
  om(0, 1) = om(2, 3) = 1.0;
  om(1, 0) = om(3, 2) = -1.0;
  const auto ev = Eigen::EigenSolver<M4>(om * s).eigenvalues();
  double nu[2] = {std::abs(ev(0).imag()), std::abs(ev(0).imag())};
  for (int i = 1; i < 4; ++i) {
    const double v = std::abs(ev(i).imag());
    if (std::abs(v - nu[0]) > 1e-9 * v) nu[1] = v;
  }
  const auto cond = [&](double r, double ph) {
    Eigen::Matrix2d rot;
    rot << std::cos(ph), -std::sin(ph), std::sin(ph), std::cos(ph);
    const Eigen::Matrix2d m = rot * Eigen::Vector2d(std::exp(2 * r), std::exp(-2 * r)).asDiagonal() * rot.transpose();
    const Eigen::Matrix2d e = b - x.transpose() * (a + m).inverse() * x;
    return entropy_f(std::sqrt(std::max(1.0, e.determinant())));
  };
  double best = std::numeric_limits<double>::infinity(), br = 0, bp = 0;
  for (int i = 0; i <= 160; ++i)
    for (int j = 0; j <= 60; ++j) {
      const double r = -8.0 + 0.1 * i, ph = M_PI * j / 60.0;
      const double v = cond(r, ph);
      if (v < best) best = v, br = r, bp = ph;
    }
  for (double h = 0.1; h > 1e-10; h *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (auto [dr, dp] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}}) {
        const double v = cond(br + dr, bp + dp);
        if (v < best) best = v, br += dr, bp += dp, moved = true;
      }
    }
  }
  return entropy_f(std::sqrt(a.determinant())) - entropy_f(nu[0]) - entropy_f(nu[1]) + best;
}

// ---------------------------------------------------------------------------
// Qubits. Basis |e>, |g> per qubit; column-stacked vec(X) with
// vec(A X B) = (B^T kron A) vec(X).

inline C4 kron2(const C2& a, const C2& b) {
  C4 k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

inline C16 kron4(const C4& a, const C4& b) {
  C16 k;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) k.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return k;
}

inline C16 spre(const C4& a) { return kron4(C4::Identity(), a); }
inline C16 spost(const C4& b) { return kron4(b.transpose(), C4::Identity()); }

inline C16 lindblad(const C4& l) {
  const C4 ld = l.adjoint();
  return spre(l) * spost(ld) - 0.5 * spre(ld * l) - 0.5 * spost(ld * l);
}

// [a rho, b^dag] + [b, rho a^dag]
inline C16 cascade_term(const C4& a, const C4& b) {
  const C4 ad = a.adjoint(), bd = b.adjoint();
  return spre(a) * spost(bd) - spre(bd) * spre(a) + spre(b) * spost(ad) - spost(b) * spost(ad);
}

struct QubitGenerators {
  C16 local1, local2, cross;
  C16 total(bool cascade = true) const { return cascade ? C16(local1 + local2 + cross) : C16(local1 + local2); }
};

inline QubitGenerators qubit_generators(double gamma, double xi) {
  C2 sm = C2::Zero();
  sm(1, 0) = 1.0;  // |g><e|
  const C4 s1 = kron2(sm, C2::Identity()), s2 = kron2(C2::Identity(), sm);
  const double gp = 0.5 * (1 + xi), gm = 0.5 * (1 - xi);
  QubitGenerators g;
  g.local1 = gamma * (gp * lindblad(s1) + gm * lindblad(s1.adjoint()));
  g.local2 = gamma * (gp * lindblad(s2) + gm * lindblad(s2.adjoint()));
  g.cross = gamma * (gp * cascade_term(s1, s2) + gm * cascade_term(s1.adjoint(), s2.adjoint()));
  return g;
}

inline V16 vec(const C4& r) {
  V16 v;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) v(4 * j + i) = r(i, j);
  return v;
}

inline C4 unvec(const V16& v) {
  C4 r;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) r(i, j) = v(4 * j + i);
  return r;
}

inline C4 apply(const C16& l, const C4& r) { return unvec(l * vec(r)); }

inline C4 evolve(const C16& l, const C4& r0, double t) { return unvec(C16(l * t).exp() * vec(r0)); }

// -Tr[(sigma_1z + sigma_2z) L(rho)]
inline double qubit_flux(const C16& l, const C4& r) {
  const C4 d = apply(l, r);
  const double z[4] = {2.0, 0.0, 0.0, -2.0};
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += z[i] * d(i, i).real();
  return -s;
}

inline C2 local_thermal(double xi) {
  C2 m = C2::Zero();
  m(0, 0) = 0.5 * (1 - xi);
  m(1, 1) = 0.5 * (1 + xi);
  return m;
}

inline C4 correlated_state(double xiS, cd rho23) {
  C4 r = C4::Zero();
  r(0, 0) = 0.25 * (1 - xiS) * (1 - xiS);
  r(1, 1) = r(2, 2) = 0.25 * (1 - xiS * xiS);
  r(3, 3) = 0.25 * (1 + xiS) * (1 + xiS);
  r(1, 2) = 0.25 * rho23;
  r(2, 1) = 0.25 * std::conj(rho23);
  return r;
}

inline double von_neumann(const Eigen::MatrixXcd& m) {
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m).eigenvalues();
  double s = 0.0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-15) s -= ev(i) * std::log2(ev(i));
  return s;
}

inline C2 trace_out_first(const C4& r) {
  C2 m = C2::Zero();
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) += r(2 * a + i, 2 * a + j);
  return m;
}

inline C2 trace_out_second(const C4& r) {
  C2 m = C2::Zero();
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) += r(2 * i + b, 2 * j + b);
  return m;
}

// Zurek discord with qubit 1 measured by projective measurements along
// Bloch direction (theta, phi): dense grid then pattern search.
inline double quantum_discord(const C4& r) {
  const double s1 = von_neumann(trace_out_second(r)), s2 = von_neumann(trace_out_first(r));
  const double mutual = s1 + s2 - von_neumann(r);
  const auto cond = [&](double th, double ph) {
    const Eigen::Vector3d n(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    double ce = 0.0;
    for (int sign : {1, -1}) {
      C2 p;
      p << 0.5 * (1 + sign * n.z()), 0.5 * sign * cd(n.x(), -n.y()), 0.5 * sign * cd(n.x(), n.y()),
          0.5 * (1 - sign * n.z());
      const C4 proj = kron2(p, C2::Identity());
      const C4 m = proj * r * proj;
      const double pk = m.trace().real();
      if (pk > 1e-15) ce += pk * von_neumann(trace_out_first(m) / pk);
    }
    return ce;
  };
  double best = std::numeric_limits<double>::infinity(), bt = 0, bp = 0;
  for (int i = 0; i <= 90; ++i)
    for (int j = 0; j < 72; ++j) {
      const double th = M_PI * i / 90.0, ph = 2 * M_PI * j / 72.0;
      const double v = cond(th, ph);
      if (v < best) best = v, bt = th, bp = ph;
    }
  for (double h = 0.05; h > 1e-10; h *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (auto [dt, dp] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}}) {
        const double v = cond(bt + dt, bp + dp);
        if (v < best) best = v, bt += dt, bp += dp, moved = true;
      }
    }
  }
  return mutual - (s2 - best);
}

// ---------------------------------------------------------------------------
// Thermalisation time of thermal oscillators at N = 0: the released fraction
// is 1 - exp(-t) (2 + t^2) / 2, which is monotone, so bisection suffices.

inline double tau_thermal(double p) {
  const auto frac = [](double t) { return 1.0 - std::exp(-t) * (2.0 + t * t) / 2.0; };
  double lo = 0.0, hi = 100.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (frac(mid) < p / 100.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
