#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cascade_thermo/flux_analysis.hpp"
#include "cascade_thermo/gaussian_cascade.hpp"
#include "cascade_thermo/io.hpp"
#include "cascade_thermo/random_states.hpp"
#include "oracles.hpp"

using namespace cascade_thermo;
using gaussian::GaussianParams;

namespace {

double max_dev(const FluxTrajectory& a, const std::function<FluxSample(double)>& f) {
  double e = 0.0;
  for (const auto& s : a) {
    const FluxSample c = f(s.t);
    e = std::max({e, std::abs(s.j1 - c.j1), std::abs(s.j2 - c.j2), std::abs(s.j12 - c.j12)});
  }
  return e;
}

}  // namespace

TEST(GaussianParams, RejectsOutOfRange) {
  EXPECT_THROW((GaussianParams{0.0, 0.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((GaussianParams{1.0, -0.1, 1.0}.validate()), ConfigError);
  EXPECT_THROW((GaussianParams{1.0, 0.0, -1.0}.validate()), ConfigError);
  EXPECT_NO_THROW((GaussianParams{2.0, 0.5, 0.0}.validate()));
}

TEST(CovMatrix, RejectsAsymmetricAndNonFinite) {
  gaussian::Mat4 c = gaussian::Mat4::Identity();
  c(0, 1) = 0.1;
  EXPECT_THROW(gaussian::CovMatrix::from(c), ConfigError);
  c(0, 1) = NAN;
  EXPECT_THROW(gaussian::CovMatrix::from(c), ConfigError);
}

TEST(CovMatrix, PhysicalityOfCorrelatedFamily) {
  EXPECT_NO_THROW(gaussian::correlated_cov(1.0, 1.41, -1.41));
  EXPECT_THROW(gaussian::correlated_cov(1.0, 1.5, 1.5), ConfigError);
  EXPECT_THROW(gaussian::correlated_cov(1.0, 1.2, 1.2), ConfigError);
  EXPECT_THROW(gaussian::correlated_cov(0.0, 0.1, 0.0), ConfigError);
  const auto r = gaussian::check_physical(gaussian::thermal_cov(2.0));
  EXPECT_TRUE(r.physical);
  EXPECT_NEAR(r.nu_minus, 2.5, 1e-14);
  EXPECT_NEAR(r.nu_plus, 2.5, 1e-14);
}

TEST(CovMatrix, SymplecticEigenvaluesAgreeWithSpectralOracle) {
  random::Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const auto c = random::random_physical_cov(rng);
    EXPECT_NEAR(gaussian::symplectic_eigenvalues(c.matrix())[0], oracle::symplectic_min(c.matrix()), 1e-9);
  }
}

TEST(GaussianCascade, ThermalStateIsStationary) {
  for (double N : {0.0, 0.3, 1.0, 5.0}) {
    const GaussianParams p{1.3, N, N};
    const auto dd = gaussian::drift_and_diffusion(p);
    EXPECT_LT(gaussian::moment_rhs(dd, gaussian::thermal_cov(N).matrix()).cwiseAbs().maxCoeff(), 1e-12);
    const auto di = gaussian::drift_and_diffusion(p, Coupling::independent);
    EXPECT_LT(gaussian::moment_rhs(di, gaussian::thermal_cov(N).matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GaussianCascade, ThermalClosedForm) {
  const auto grid = uniform_grid(10.0, 1e-3);
  for (auto [NS, N] : {std::pair{1.0, 0.0}, {0.2, 1.5}, {3.0, 0.7}}) {
    const GaussianParams p{1.0, N, NS};
    const auto traj = gaussian::simulate(gaussian::thermal_cov(NS), p, grid);
    EXPECT_LT(max_dev(traj, [&](double t) { return gaussian::thermal_fluxes_closed(p, t); }), 1e-8);
  }
}

TEST(GaussianCascade, CorrelatedClosedForm) {
  const auto grid = uniform_grid(10.0, 1e-3);
  const GaussianParams p{1.0, 0.0, 1.0};
  for (double s : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const auto traj = gaussian::simulate(gaussian::correlated_cov(1.0, 0.5 * s, 0.5 * s), p, grid);
    EXPECT_LT(max_dev(traj, [&](double t) { return gaussian::correlated_fluxes_closed(p, s, t); }), 1e-8)
        << "s = " << s;
  }
  EXPECT_THROW(gaussian::correlated_fluxes_closed({1.0, 0.1, 1.0}, 0.5, 1.0), ConfigError);
  EXPECT_THROW(gaussian::correlated_fluxes_closed(p, 2.5, 1.0), ConfigError);
}

// Values frozen from the exact Lyapunov propagator in oracles.hpp.
TEST(GaussianCascade, MatchesLyapunovOracleAtFiniteTemperature) {
  const oracle::M4 c0 = oracle::cv_family(1.0, 0.4, -0.1);
  const auto o = oracle::cv_flux(oracle::cv_exact(c0, 1.0, 0.3, 1.5, true), 1.0, 0.3);
  EXPECT_NEAR(o.j1, 0.15619111210390124, 1e-12);
  EXPECT_NEAR(o.j2, 0.4072125422708861, 1e-12);
  EXPECT_NEAR(o.j12, -0.4016342882671729, 1e-12);

  const GaussianParams p{1.0, 0.3, 1.0};
  const auto traj = gaussian::simulate(gaussian::correlated_cov(1.0, 0.4, -0.1), p, uniform_grid(1.5, 1e-3));
  EXPECT_NEAR(traj.back().j1, 0.15619111210390124, 1e-10);
  EXPECT_NEAR(traj.back().j2, 0.4072125422708861, 1e-10);
  EXPECT_NEAR(traj.back().j12, -0.4016342882671729, 1e-10);
}

TEST(GaussianCascade, MatchesLyapunovOracleOnRandomStates) {
  random::Rng rng(11);
  for (int i = 0; i < 10; ++i) {
    const double gamma = random::uniform(rng, 0.5, 2.0), N = random::uniform(rng, 0.0, 2.0);
    const auto c0 = random::random_physical_cov(rng);
    for (auto coupling : {Coupling::cascade, Coupling::independent}) {
      const auto covs = gaussian::evolve_cov(c0, {gamma, N, 0.0}, uniform_grid(3.0, 0.5), coupling);
      const oracle::M4 exact = oracle::cv_exact(c0.matrix(), gamma, N, 3.0, coupling == Coupling::cascade);
      EXPECT_LT((covs.back().matrix() - exact).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(GaussianCascade, FluxesDependOnlyOnTheSum) {
  const GaussianParams p{1.0, 0.0, 1.0};
  const auto grid = uniform_grid(8.0, 1e-2);
  const auto a = gaussian::simulate(gaussian::correlated_cov(1.0, 0.8, -0.2), p, grid);
  const auto b = gaussian::simulate(gaussian::correlated_cov(1.0, 0.3, 0.3), p, grid);
  const auto c = gaussian::simulate(gaussian::correlated_cov(1.0, -0.2, 0.8), p, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(a[k].j_cascade(), b[k].j_cascade(), 1e-10);
    EXPECT_NEAR(c[k].j2, b[k].j2, 1e-10);
    EXPECT_NEAR(c[k].j12, b[k].j12, 1e-10);
  }
}

// Mode 1 never sees mode 2, so its flux is the same with or without the
// cascade link, to the last bit.
TEST(GaussianCascade, LocalFluxOfFirstModeIsDecoupled) {
  random::Rng rng(3);
  const auto c0 = random::random_physical_cov(rng);
  const GaussianParams p{1.0, 0.4, 0.0};
  const auto grid = uniform_grid(5.0, 1e-2);
  const auto cas = gaussian::simulate(c0, p, grid, Coupling::cascade);
  const auto ind = gaussian::simulate(c0, p, grid, Coupling::independent);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(cas[k].j1, ind[k].j1);
    EXPECT_EQ(ind[k].j12, 0.0);
  }
}

// Positive flux is energy leaving the system: d/dt (1/2 Tr C) = -(J1 + J2 + J12).
TEST(GaussianCascade, EnergyBookkeeping) {
  random::Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto c = random::random_physical_cov(rng);
    const GaussianParams p{random::uniform(rng, 0.5, 2.0), random::uniform(rng, 0.0, 2.0), 0.0};
    for (auto coupling : {Coupling::cascade, Coupling::independent}) {
      const auto dd = gaussian::drift_and_diffusion(p, coupling);
      const double de = 0.5 * gaussian::moment_rhs(dd, c.matrix()).trace();
      const auto f = gaussian::fluxes_from_cov(c, p, 0.0, coupling);
      EXPECT_NEAR(de, -(f.j1 + f.j2 + f.j12), 1e-12);
    }
  }
}

TEST(GaussianCascade, FluxDerivativesMatchClosedForm) {
  const GaussianParams p{1.0, 0.0, 1.0};
  const double s = 0.9;
  const auto covs = gaussian::evolve_cov(gaussian::correlated_cov(1.0, 0.45, 0.45), p, uniform_grid(2.0, 1e-3));
  const auto d = gaussian::flux_derivatives(covs.back(), p, 2.0);
  const double h = 1e-4;
  const auto jc = [&](double t) { return gaussian::correlated_fluxes_closed(p, s, t).j_cascade(); };
  EXPECT_NEAR(d[0].j_cascade(), (jc(2.0 + h) - jc(2.0 - h)) / (2 * h), 1e-7);
  EXPECT_NEAR(d[1].j_cascade(), (jc(2.0 + h) - 2 * jc(2.0) + jc(2.0 - h)) / (h * h), 1e-5);
}

TEST(StationaryPoints, MatchLocatedExtrema) {
  const GaussianParams p{1.0, 0.0, 1.0};
  const auto grid = uniform_grid(12.0, 1e-2);
  for (double s : {-1.4, -0.7, 0.7, 1.4}) {
    const auto covs = gaussian::evolve_cov(gaussian::correlated_cov(1.0, 0.5 * s, 0.5 * s), p, grid);
    std::vector<double> f, df, d2f;
    for (std::size_t k = 0; k < covs.size(); ++k) {
      const auto d = gaussian::flux_derivatives(covs[k], p, grid[k]);
      f.push_back(gaussian::fluxes_from_cov(covs[k], p, grid[k]).j_cascade());
      df.push_back(d[0].j_cascade());
      d2f.push_back(d[1].j_cascade());
    }
    const auto ext = flux::locate_extrema(grid, f, df, d2f);
    const auto sp = gaussian::stationary_points(1.0, s);
    ASSERT_EQ(ext.size(), 2u) << "s = " << s;
    for (const auto& e : ext) {
      const double expect_t = e.minimum ? sp.t_min : sp.t_max;
      const double expect_v = expect_t == sp.t1 ? sp.j_t1 : sp.j_t2;
      EXPECT_NEAR(e.t, expect_t, 1e-6);
      EXPECT_NEAR(e.value, expect_v, 1e-8);
    }
  }
}

TEST(StationaryPoints, ClosedFormValues) {
  const auto sp = gaussian::stationary_points(1.0, 0.7);
  EXPECT_DOUBLE_EQ(sp.t1, 2.0);
  EXPECT_DOUBLE_EQ(sp.t2, 2.7);
  EXPECT_NEAR(sp.j_t1, gaussian::correlated_fluxes_closed({1.0, 0.0, 1.0}, 0.7, 2.0).j_cascade(), 1e-14);
  EXPECT_NEAR(sp.j_t2, gaussian::correlated_fluxes_closed({1.0, 0.0, 1.0}, 0.7, 2.7).j_cascade(), 1e-14);
  EXPECT_TRUE(gaussian::stationary_points(1.0, 0.0).inflection);
  EXPECT_THROW(gaussian::stationary_points(1.0, 2.5), ConfigError);
}

// For thermal starts J_c - J_ind = (NS - N)(gamma t)(gamma t - 2) e^{-gamma t}:
// one sign change, at gamma t = 2.
TEST(GaussianCascade, CascadeAndIndependentCrossAtTwoOverGamma) {
  for (auto [NS, N] : {std::pair{1.0, 0.0}, {0.1, 0.8}}) {
    const GaussianParams p{1.0, N, NS};
    const auto grid = uniform_grid(20.0, 1e-3);
    const auto traj = gaussian::simulate(gaussian::thermal_cov(NS), p, grid);
    int changes = 0;
    double where = 0.0;
    for (std::size_t k = 2; k < traj.size(); ++k) {
      const double a = traj[k - 1].j_cascade() - traj[k - 1].j_independent();
      const double b = traj[k].j_cascade() - traj[k].j_independent();
      if (a * b < 0.0) ++changes, where = grid[k];
    }
    EXPECT_EQ(changes, 1);
    EXPECT_NEAR(where, 2.0, 2e-3);
  }
}

TEST(GaussianCascade, PreservesPhysicality) {
  random::Rng rng(13);
  for (int i = 0; i < 30; ++i) {
    const auto c0 = random::random_physical_cov(rng);
    const GaussianParams p{random::uniform(rng, 0.5, 2.0), random::uniform(rng, 0.0, 2.0), 0.0};
    for (const auto& c : gaussian::evolve_cov(c0, p, uniform_grid(10.0, 0.1)))
      EXPECT_GE(gaussian::symplectic_eigenvalues(c.matrix())[0], 0.5 - 1e-10);
  }
}

TEST(GaussianCascade, RejectsBadInputs) {
  gaussian::Mat4 bad = 0.2 * gaussian::Mat4::Identity();
  EXPECT_THROW(gaussian::evolve_cov(gaussian::CovMatrix::from(bad), {1.0, 0.0, 0.0}, uniform_grid(1.0, 0.1)),
               ConfigError);
  EXPECT_THROW(gaussian::evolve_cov(gaussian::thermal_cov(1.0), {1.0, 0.0, 1.0}, {0.0, 1.0}, Coupling::cascade,
                                    {0.6}),
               ConfigError);
  EXPECT_THROW(gaussian::evolve_cov(gaussian::thermal_cov(1.0), {1.0, 0.0, 1.0}, {0.0, 2.0, 1.0}),
               ConfigError);
}

TEST(GaussianCascade, CovarianceRoundTrip) {
  random::Rng rng(17);
  const auto c = random::random_physical_cov(rng);
  std::stringstream ss;
  io::write_cov(ss, c);
  const auto back = io::read_cov(ss);
  EXPECT_LT((back.matrix() - c.matrix()).cwiseAbs().maxCoeff(), 1e-11);
}
