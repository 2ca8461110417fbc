#pragma once

// Shared value types, error classes and time-grid helpers.
//
// Units used throughout the library: the energy quantum hbar*omega is 1,
// times are in units of 1/gamma when gamma = 1, and every flux is reported
// in units of hbar*omega*gamma.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade_thermo {

// Bad parameters, unphysical states and malformed configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Integration, propagation or optimisation failures.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The flux has not decayed enough at the end of a trajectory to close the
// heat integral.
class InsufficientTail : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Whether the non-local dissipator linking subsystem 1 to subsystem 2 is on.
enum class Coupling { cascade, independent };

inline const char* to_string(Coupling c) {
  return c == Coupling::cascade ? "cascade" : "independent";
}

// One point of a heat-flux trajectory. The three stored components are the
// local flux of subsystem 1, the local flux of subsystem 2 and the correlated
// flux generated by the cascade dissipator. Positive values mean energy
// leaving the system.
struct FluxSample {
  double t = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;
  double j12 = 0.0;

  double j_cascade() const { return j1 + j2 + j12; }
  // Total flux of the two-independent-reservoirs model for initial states
  // that are symmetric under exchange of the subsystems.
  double j_independent() const { return 2.0 * j1; }
};

using FluxTrajectory = std::vector<FluxSample>;
using TimeGrid = std::vector<double>;

// 0, dt, 2 dt, ... up to t_max. The last point is t_max itself.
inline TimeGrid uniform_grid(double t_max, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("time step must be positive, got " + std::to_string(dt));
  if (!(t_max >= 0.0) || !std::isfinite(t_max))
    throw ConfigError("t_max must be non-negative, got " + std::to_string(t_max));
  const auto n = static_cast<std::size_t>(std::llround(t_max / dt));
  TimeGrid grid(n + 1);
  for (std::size_t k = 0; k <= n; ++k) grid[k] = static_cast<double>(k) * dt;
  grid.back() = t_max;
  if (n > 0 && std::abs(static_cast<double>(n) * dt - t_max) > 1e-9 * std::max(1.0, t_max))
    throw ConfigError("t_max must be an integer multiple of dt");
  return grid;
}

inline void check_grid(const TimeGrid& grid) {
  if (grid.empty()) throw ConfigError("time grid is empty");
  if (grid.front() != 0.0) throw ConfigError("time grid must start at t = 0");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1]))
      throw ConfigError("time grid must be strictly increasing");
  }
}

// True when consecutive spacings agree to a relative 1e-9.
inline bool is_uniform(const TimeGrid& grid) {
  if (grid.size() < 3) return true;
  const double h = grid[1] - grid[0];
  for (std::size_t k = 2; k < grid.size(); ++k) {
    if (std::abs((grid[k] - grid[k - 1]) - h) > 1e-9 * h) return false;
  }
  return true;
}

}  // namespace cascade_thermo
