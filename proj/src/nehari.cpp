#include "nehari/nehari.hpp"

#include "nehari/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace nehari {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kNoise = 1e-13;

double initial_t(const FunctionalBackend& backend, const Vec& u) {
  if (const auto guess = backend.ray_guess(u); guess && std::isfinite(*guess) && *guess > 0.0)
    return *guess;
  double best_t = 0.0;
  double best_f = 0.0;
  for (int k = -80; k <= 80; ++k) {
    const double t = std::exp2(0.5 * k);
    const double f = backend.value(t * u);
    if (std::isfinite(f) && f > best_f) {
      best_f = f;
      best_t = t;
    }
  }
  if (best_t == 0.0)
    throw NumericError("degenerate direction: J(t u) <= 0 for every sampled t > 0");
  return best_t;
}

}  // namespace

NehariPoint fiber_maximize(const FunctionalBackend& backend, const Vec& u,
                           const std::optional<FiberStart>& start, const FiberOptions& opts) {
  const Matrix& T = backend.tilde_basis();
  const Eigen::Index k = T.cols();

  double s = 0.0;
  Vec c = Vec::Zero(k);
  if (start && start->t > 0.0 && std::isfinite(start->t)) {
    s = std::log(start->t);
    if (start->c_tilde.size() == k) c = start->c_tilde;
  } else {
    s = std::log(initial_t(backend, u));
  }

  auto point_at = [&](double s_, const Vec& c_) -> Vec {
    Vec x = std::exp(s_) * u;
    if (k > 0) x.noalias() += T * c_;
    return x;
  };

  Vec x = point_at(s, c);
  double f = backend.value(x);
  double res = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const double t = std::exp(s);
    const Vec g = backend.gradient(x);
    const double gu = g.dot(u);
    const Vec gc = k > 0 ? Vec(T.transpose() * g) : Vec();
    res = std::sqrt(gu * gu + (k > 0 ? gc.squaredNorm() : 0.0));
    if (res <= opts.tol * std::max(1.0, t)) break;

    Vec grad(k + 1);
    grad[0] = t * gu;
    if (k > 0) grad.tail(k) = gc;

    const Vec Hu = backend.hessian_apply(x, u);
    Matrix H(k + 1, k + 1);
    H(0, 0) = t * t * u.dot(Hu) + t * gu;
    for (Eigen::Index j = 0; j < k; ++j) {
      const Vec Htj = backend.hessian_apply(x, T.col(j));
      H(0, j + 1) = H(j + 1, 0) = t * T.col(j).dot(Hu);
      for (Eigen::Index i = 0; i <= j; ++i) H(i + 1, j + 1) = H(j + 1, i + 1) = T.col(i).dot(Htj);
    }

    Vec d;
    Eigen::LLT<Matrix> llt(-H);
    if (llt.info() == Eigen::Success) {
      d = llt.solve(grad);
    } else {
      // Indefinite: Newton with |curvature|, still an ascent direction.
      Eigen::SelfAdjointEigenSolver<Matrix> es(-H);
      const Vec mu = es.eigenvalues().cwiseAbs();
      const double floor = std::max(1e-12, 1e-8 * mu.maxCoeff());
      d = es.eigenvectors() *
          (es.eigenvectors().transpose() * grad).cwiseQuotient(mu.cwiseMax(floor));
    }
    if (std::abs(d[0]) > 2.0) d *= 2.0 / std::abs(d[0]);

    const double slope = grad.dot(d);
    const double noise = kNoise * std::max(1.0, std::abs(f));
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const double s1 = s + step * d[0];
      const Vec c1 = k > 0 ? Vec(c + step * d.tail(k)) : c;
      const Vec x1 = point_at(s1, c1);
      const double f1 = backend.value(x1);
      if (std::isfinite(f1) &&
          (f1 >= f + kArmijo * step * slope || (slope <= noise && f1 >= f - noise))) {
        s = s1;
        c = c1;
        x = x1;
        f = f1;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }

  const double t = std::exp(s);
  if (iter == opts.max_iter || res > opts.tol * std::max(1.0, t)) {
    const Vec g = backend.gradient(x);
    const double gu = g.dot(u);
    res = std::sqrt(gu * gu + (k > 0 ? (T.transpose() * g).squaredNorm() : 0.0));
  }
  if (!(f > 0.0) || !(t > 0.0) || !std::isfinite(f))
    throw NumericError("degenerate direction: no fiber point with t > 0 and positive energy");
  if (res > 1e-9 * std::max(1.0, t)) {
    std::ostringstream msg;
    msg << "fiber maximization stalled with residual " << res;
    throw ConvergenceError(msg.str(), x, f, res);
  }

  NehariPoint out;
  out.direction = u;
  out.t = t;
  out.c_tilde = c;
  out.point = std::move(x);
  out.energy = f;
  out.residual = res;
  out.iterations = iter;
  return out;
}

Vec sphere_gradient(const FunctionalBackend& backend, const NehariPoint& at) {
  const Vec rg = backend.riesz(backend.gradient(at.point));
  return at.t * (rg - backend.inner(rg, at.direction) * at.direction);
}

SphereResult descend(const FunctionalBackend& backend, const Vec& start, const SphereOptions& opts,
                     const std::optional<FiberStart>& fiber_start) {
  Vec u = backend.project_plus(start);
  const double len = backend.norm(u);
  if (!(len > 0.0) || !std::isfinite(len))
    throw NumericError("start direction has no component in X+");
  u /= len;

  NehariPoint pt = fiber_maximize(backend, u, fiber_start, opts.fiber);
  Vec r = sphere_gradient(backend, pt);
  double gn = backend.norm(r);
  double alpha = 1.0 / std::max(pt.t * pt.t, 1e-12);

  int it = 0;
  for (;; ++it) {
    const double phi = pt.energy;
    if (gn <= opts.tol * std::max(1.0, std::abs(phi))) break;
    if (it >= opts.max_iter) {
      std::ostringstream msg;
      msg << "sphere descent used " << opts.max_iter << " iterations, gradient norm " << gn;
      throw ConvergenceError(msg.str(), pt.point, phi, gn);
    }

    const double noise = kNoise * std::max(1.0, std::abs(phi));
    double a = alpha;
    bool accepted = false;
    NehariPoint next;
    Vec r_next;
    double gn_next = 0.0;
    for (int bt = 0; bt < 60 && !accepted; ++bt, a *= 0.5) {
      Vec u1 = u - a * r;
      u1 /= backend.norm(u1);
      try {
        next = fiber_maximize(backend, u1, FiberStart{pt.t, pt.c_tilde}, opts.fiber);
      } catch (const NumericError&) {
        continue;
      }
      if (next.energy <= phi - kArmijo * a * gn * gn) {
        accepted = true;
      } else if (next.energy <= phi + noise) {
        // Below the resolution of the energy: accept if the gradient shrinks.
        r_next = sphere_gradient(backend, next);
        gn_next = backend.norm(r_next);
        if (gn_next < gn) {
          accepted = true;
          break;
        }
        continue;
      }
      if (accepted) {
        r_next = sphere_gradient(backend, next);
        gn_next = backend.norm(r_next);
        break;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "sphere descent line search stalled at gradient norm " << gn;
      throw ConvergenceError(msg.str(), pt.point, phi, gn);
    }

    const Vec s = next.direction - u;
    const Vec y = r_next - r;
    const double sy = backend.inner(s, y);
    const double scale = 1.0 / std::max(next.t * next.t, 1e-12);
    alpha = sy > 0.0 ? backend.inner(s, s) / sy : 2.0 * a;
    alpha = std::clamp(alpha, 1e-8 * scale, 1e8 * scale);

    u = next.direction;
    pt = std::move(next);
    r = std::move(r_next);
    gn = gn_next;
  }

  SphereResult out;
  out.residual = backend.dual_norm(backend.gradient(pt.point));
  out.point = std::move(pt);
  out.grad_norm = gn;
  out.iterations = it;
  return out;
}

SphereResult sphere_minimize(const FunctionalBackend& backend, const SphereOptions& opts) {
  std::vector<Vec> starts = opts.starts;
  if (starts.empty()) {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    for (int i = 0; i < std::max(1, opts.random_starts); ++i) {
      Vec v(backend.dimension());
      for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = normal(rng);
      starts.push_back(std::move(v));
    }
  }

  std::optional<SphereResult> best;
  std::vector<double> energies(starts.size(), std::numeric_limits<double>::quiet_NaN());
  Vec fallback;
  double fallback_energy = std::numeric_limits<double>::infinity();
  double fallback_residual = std::numeric_limits<double>::infinity();
  std::string last_error = "no start direction";
  for (std::size_t i = 0; i < starts.size(); ++i) {
    try {
      SphereResult r = descend(backend, starts[i], opts);
      r.start_index = static_cast<int>(i);
      energies[i] = r.point.energy;
      if (!best || r.point.energy < best->point.energy) best = std::move(r);
    } catch (const ConvergenceError& e) {
      last_error = e.what();
      if (e.energy() < fallback_energy) {
        fallback = e.best();
        fallback_energy = e.energy();
        fallback_residual = e.residual();
      }
    } catch (const NumericError& e) {
      last_error = e.what();
    }
  }
  if (!best) throw ConvergenceError("no start converged: " + last_error, fallback, fallback_energy,
                                    fallback_residual);
  best->start_energies = std::move(energies);
  return std::move(*best);
}

double fiber_slack(const FunctionalBackend& backend, const Vec& E, double t, const Vec& v) {
  const Vec g = backend.gradient(E);
  const Vec dir = 0.5 * (t * t - 1.0) * E + t * v;
  return backend.value(E) - backend.value(t * E + v) + g.dot(dir);
}

std::vector<CriticalPoint> multistart_bound_states(const FunctionalBackend& backend,
                                                   const std::vector<Vec>& starts,
                                                   double dedup_tol, double energy_cap,
                                                   const SphereOptions& opts) {
  std::vector<CriticalPoint> found;
  const Vec zero = Vec::Zero(backend.dimension());
  auto same = [&](const Vec& a, const Vec& b) {
    const double scale = std::max(backend.distance(a, zero), backend.distance(b, zero));
    double d = backend.distance(a, b);
    if (backend.is_even()) d = std::min(d, backend.distance(a, -b));
    return d <= dedup_tol * scale;
  };

  for (std::size_t i = 0; i < starts.size(); ++i) {
    for (const double sign : {1.0, -1.0}) {
      SphereResult r;
      try {
        r = descend(backend, sign * starts[i], opts);
      } catch (const NumericError&) {
        continue;
      }
      if (!(r.point.energy < energy_cap)) continue;
      CriticalPoint cp{r.point.point, r.point.energy, r.residual, static_cast<int>(i)};
      auto dup = std::find_if(found.begin(), found.end(),
                              [&](const CriticalPoint& q) { return same(q.field, cp.field); });
      if (dup == found.end())
        found.push_back(std::move(cp));
      else if (cp.energy < dup->energy)
        *dup = std::move(cp);
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const CriticalPoint& a, const CriticalPoint& b) { return a.energy < b.energy; });
  return found;
}

}  // namespace nehari
