// Heat released by two correlated oscillators and two correlated qubits,
// cascade against independent reservoirs, for a few initial correlations.

#include <cstdio>

#include "cascade_thermo/flux_analysis.hpp"
#include "cascade_thermo/gaussian_cascade.hpp"
#include "cascade_thermo/qubit_cascade.hpp"

using namespace cascade_thermo;

int main() {
  const TimeGrid grid = uniform_grid(60.0, 1e-3);

  std::printf("oscillators, NS = 1, zero-temperature reservoir\n");
  std::printf("%8s %12s %12s %10s %10s\n", "s", "Q cascade", "Q indep", "tau50", "tau90");
  const gaussian::GaussianParams gp{1.0, 0.0, 1.0};
  for (double s : {-1.8, -0.9, 0.0, 0.9, 1.8}) {
    const auto c0 = gaussian::correlated_cov(1.0, 0.5 * s, 0.5 * s);
    const auto casc = gaussian::simulate(c0, gp, grid);
    const auto ind = gaussian::simulate(c0, gp, grid, Coupling::independent);
    const auto hc = flux::integrate_heat(casc, 1.0);
    const auto hi = flux::integrate_heat(ind, 1.0);
    std::printf("%8.2f %12.8f %12.8f %10.5f %10.5f\n", s, hc.q_infinity, hi.q_infinity,
                flux::tau_p(casc, hc, 50).tau, flux::tau_p(casc, hc, 90).tau);
  }

  std::printf("\nqubits, xiS = 0.25, zero-temperature reservoir\n");
  std::printf("%8s %12s %12s %10s %10s\n", "Re rho23", "Q cascade", "Q indep", "tau50", "tau90");
  const qubit::QubitParams qp{1.0, 1.0, 0.25};
  for (double r : {-0.9, -0.45, 0.0, 0.45, 0.9}) {
    const auto rho0 = qubit::correlated_qubit_state(0.25, {r, 0.0});
    const auto casc = qubit::simulate(rho0, qp, grid);
    const auto ind = qubit::simulate(rho0, qp, grid, Coupling::independent);
    const auto hc = flux::integrate_heat(casc, 1.0);
    const auto hi = flux::integrate_heat(ind, 1.0);
    std::printf("%8.2f %12.8f %12.8f %10.5f %10.5f\n", r, hc.q_infinity, hi.q_infinity,
                flux::tau_p(casc, hc, 50).tau, flux::tau_p(casc, hc, 90).tau);
  }
  return 0;
}
