#pragma once

// Fiber maximization u -> n(u) and minimization of J o n over the unit sphere
// of X+.

#include "nehari/backend.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nehari {

struct FiberOptions {
  /// Stop when |J'(n)| restricted to span{u} + X~ is below tol * max(1, t).
  double tol = 1e-12;
  int max_iter = 200;
};

struct FiberStart {
  double t = 1.0;
  Vec c_tilde;
};

struct NehariPoint {
  Vec direction;  ///< u in X+, |u| = 1
  double t = 0.0;
  Vec c_tilde;    ///< coefficients over backend.tilde_basis()
  Vec point;      ///< n(u) = t u + T c
  double energy = 0.0;
  double residual = 0.0;  ///< fiber-stationarity residual
  int iterations = 0;
};

/// Unique maximum of J on R+ u (+) X~. Throws NumericError when no t > 0 with
/// positive energy is found (a degenerate direction).
NehariPoint fiber_maximize(const FunctionalBackend& backend, const Vec& u,
                           const std::optional<FiberStart>& start = std::nullopt,
                           const FiberOptions& opts = {});

struct SphereOptions {
  double tol = 1e-8;
  int max_iter = 5000;
  /// Random starts used when no start directions are given.
  int random_starts = 1;
  std::uint64_t seed = 0;
  std::vector<Vec> starts;
  FiberOptions fiber;
};

struct SphereResult {
  NehariPoint point;
  double grad_norm = 0.0;  ///< Riemannian gradient norm of J o n at the minimizer
  double residual = 0.0;   ///< dual norm of J'(n(u))
  int iterations = 0;
  int start_index = 0;
  std::vector<double> start_energies;  ///< NaN where a start failed
};

/// Riemannian gradient of J o n at u, as a vector in X+:
/// t * (riesz J'(n(u)) - <riesz J'(n(u)), u> u).
Vec sphere_gradient(const FunctionalBackend& backend, const NehariPoint& at);

/// Steepest descent from one start. Throws ConvergenceError with the best iterate.
SphereResult descend(const FunctionalBackend& backend, const Vec& start,
                     const SphereOptions& opts,
                     const std::optional<FiberStart>& fiber_start = std::nullopt);

/// Best result over every start. Throws ConvergenceError if no start converged.
SphereResult sphere_minimize(const FunctionalBackend& backend, const SphereOptions& opts);

/// J(E) - J(t E + v) + J'(E)((t^2 - 1)/2 E + t v), v in X~.
double fiber_slack(const FunctionalBackend& backend, const Vec& E, double t, const Vec& v);

struct CriticalPoint {
  Vec field;
  double energy = 0.0;
  double residual = 0.0;
  int start_index = 0;
};

/// Descends from +-each start, keeps converged points below energy_cap and
/// identifies E with -E (for even backends) at relative distance dedup_tol.
std::vector<CriticalPoint> multistart_bound_states(const FunctionalBackend& backend,
                                                   const std::vector<Vec>& starts,
                                                   double dedup_tol, double energy_cap,
                                                   const SphereOptions& opts);

}  // namespace nehari
