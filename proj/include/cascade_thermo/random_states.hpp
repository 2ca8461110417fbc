#pragma once

// Seeded generators of valid random initial states, used by the property
// checks and the acceptance suite.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cascade_thermo/gaussian_cascade.hpp"
#include "cascade_thermo/qubit_cascade.hpp"

namespace cascade_thermo::random {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

// Symplectic form for the quadrature order (X1, Y1, X2, Y2).
inline gaussian::Mat4 symplectic_form() {
  gaussian::Mat4 om = gaussian::Mat4::Zero();
  om(0, 1) = om(2, 3) = 1.0;
  om(1, 0) = om(3, 2) = -1.0;
  return om;
}

// exp(Omega H) with H symmetric is symplectic.
inline gaussian::Mat4 random_symplectic(Rng& rng, double scale = 0.4) {
  std::normal_distribution<double> n(0.0, scale);
  gaussian::Mat4 h;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) h(i, j) = h(j, i) = n(rng);
  return gaussian::Mat4((symplectic_form() * h).exp());
}

// S diag(nu1, nu1, nu2, nu2) S^T with nu1, nu2 >= 1/2: a generic physical
// two-mode covariance matrix.
inline gaussian::CovMatrix random_physical_cov(Rng& rng) {
  const double nu1 = uniform(rng, 0.5, 2.5), nu2 = uniform(rng, 0.5, 2.5);
  const gaussian::Mat4 s = random_symplectic(rng);
  const gaussian::Mat4 d = Eigen::Vector4d(nu1, nu1, nu2, nu2).asDiagonal();
  const gaussian::Mat4 c = s * d * s.transpose();
  return gaussian::CovMatrix::from(0.5 * (c + c.transpose()));
}

// Member of the locally thermal correlated family at occupation NS.
inline gaussian::CovMatrix random_correlated_cov(Rng& rng, double NS) {
  for (;;) {
    const double c13 = uniform(rng, -NS, NS), c24 = uniform(rng, -NS, NS);
    try {
      return gaussian::correlated_cov(NS, c13, c24);
    } catch (const ConfigError&) {
    }
  }
}

// Ginibre ensemble: G G^dag / Tr.
inline qubit::DensityMatrix4 random_density_matrix(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  qubit::CMat4 g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = {n(rng), n(rng)};
  qubit::CMat4 r = g * g.adjoint();
  r /= r.trace().real();
  return qubit::DensityMatrix4::from(0.5 * (r + r.adjoint()));
}

// Locally thermal X state with a coherence drawn uniformly from its disc.
inline qubit::DensityMatrix4 random_correlated_qubit(Rng& rng, double xiS) {
  const double radius = (1.0 - xiS * xiS) * std::sqrt(uniform(rng, 0.0, 1.0));
  const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return qubit::correlated_qubit_state(xiS, std::polar(radius, phase));
}

}  // namespace cascade_thermo::random
