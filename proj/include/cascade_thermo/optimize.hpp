#pragma once

// Thin wrapper over the GSL Nelder-Mead simplex minimiser (nmsimplex2).

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "cascade_thermo/common.hpp"

namespace cascade_thermo::optimize {

struct NelderMeadOptions {
  double size_tol = 1e-10;
  int max_iter = 20000;
  // Fresh simplices started from the incumbent once a run has converged;
  // a restart that gains less than restart_gain ends the sequence.
  int restarts = 2;
  double restart_gain = 1e-13;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  long evaluations = 0;
  double simplex_size = 0.0;
  bool converged = false;
};

using Objective = std::function<double(const double*)>;

namespace detail {

struct Context {
  const Objective* f;
  long evaluations = 0;
};

inline double trampoline(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<Context*>(params);
  ++ctx->evaluations;
  const double y = (*ctx->f)(v->data);
  return std::isfinite(y) ? y : std::numeric_limits<double>::max();
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

inline void silence_gsl() {
  static const bool once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

inline MinimizeResult single_run(const Objective& f, const std::vector<double>& x0,
                                 const std::vector<double>& steps, const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> ss(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set(ss.get(), i, steps[i]);
  }
  Context ctx{&f};
  gsl_multimin_function fn{&trampoline, n, &ctx};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  if (gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), ss.get()) != GSL_SUCCESS)
    throw NumericalError("Nelder-Mead initialisation failed");

  MinimizeResult r;
  int status = GSL_CONTINUE;
  while (status == GSL_CONTINUE && r.iterations < opt.max_iter) {
    ++r.iterations;
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    r.simplex_size = gsl_multimin_fminimizer_size(m.get());
    status = gsl_multimin_test_size(r.simplex_size, opt.size_tol);
  }
  r.converged = status == GSL_SUCCESS;
  r.value = gsl_multimin_fminimizer_minimum(m.get());
  const gsl_vector* best = gsl_multimin_fminimizer_x(m.get());
  r.x.assign(best->data, best->data + n);
  r.evaluations = ctx.evaluations;
  return r;
}

}  // namespace detail

inline MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                                  std::vector<double> steps, const NelderMeadOptions& opt = {}) {
  if (x0.empty()) throw ConfigError("Nelder-Mead needs at least one parameter");
  if (steps.size() != x0.size()) throw ConfigError("Nelder-Mead step vector has the wrong size");
  detail::silence_gsl();

  MinimizeResult best = detail::single_run(f, x0, steps, opt);
  for (int k = 0; k < opt.restarts; ++k) {
    MinimizeResult next = detail::single_run(f, best.x, steps, opt);
    next.iterations += best.iterations;
    next.evaluations += best.evaluations;
    const bool gained = next.value < best.value - opt.restart_gain;
    if (next.value <= best.value) {
      best = std::move(next);
    } else {
      best.iterations = next.iterations;
      best.evaluations = next.evaluations;
    }
    if (!gained) break;
  }
  return best;
}

inline MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0, double step,
                                  const NelderMeadOptions& opt = {}) {
  std::vector<double> steps(x0.size(), step);
  return nelder_mead(f, std::move(x0), std::move(steps), opt);
}

// Seed for stochastic searches: CASCADE_THERMO_SEED when set, otherwise a
// fixed default so runs are reproducible.
inline std::uint64_t default_seed() {
  constexpr std::uint64_t kFallback = 20240229;
  const char* env = std::getenv("CASCADE_THERMO_SEED");
  if (env == nullptr || *env == '\0') return kFallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw ConfigError(std::string("CASCADE_THERMO_SEED is not an unsigned integer: ") + env);
  return static_cast<std::uint64_t>(v);
}

}  // namespace cascade_thermo::optimize
