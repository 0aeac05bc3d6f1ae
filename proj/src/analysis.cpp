#include "nehari/analysis.hpp"

#include "nehari/error.hpp"
#include "nehari/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace nehari {
namespace {

double exponent_factor(double p) { return 0.5 - 1.0 / p; }

std::span<const double> view(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

bool unit_linear_materials(const MaterialField& m) {
  return (m.a_V.array() == 1.0).all() && (m.a_Gamma.array() == 1.0).all();
}

/// Spectrum with at least `extra` eigenvectors of X+ for this lambda.
SpectralSplit spectrum_for(const DiscreteForms& forms, double lambda, int extra,
                           const EigenOptions& eig) {
  const int n = static_cast<int>(forms.size());
  SpectralSplit s = eigenpairs_for(forms, lambda, std::max(1, extra), eig);
  const int need = std::min(n, spectral_index(s.eigenvalues, lambda) - 1 + std::max(1, extra));
  if (need > s.count()) s = eigenpairs(forms, need, eig);
  return s;
}

// Tangential A-gradient of R(u) = |u|_A^2 / (sum vol |u|^q)^{2/q} at an A-unit u.
struct Quotient {
  const DiscreteForms& forms;
  double q;

  double value(const Vec& u) const {
    return quad_A(forms, u) / std::pow(power_sum(forms.volume, u, q), 2.0 / q);
  }
  Vec gradient(const Vec& u, double R) const {
    Vec nl(u.size());
    kernels::power_gradient(view(forms.volume), view(u), q,
                            {nl.data(), static_cast<std::size_t>(nl.size())});
    const double N = power_sum(forms.volume, u, q);
    Vec r = 2.0 * R * (u - forms.solve_stiffness(nl) / N);
    r -= (u.dot(forms.A * r)) * u;
    return r;
  }
};

SobolevResult minimize_quotient(const Quotient& Rq, Vec u, const SobolevOptions& opts) {
  const DiscreteForms& forms = Rq.forms;
  auto a_norm = [&](const Vec& v) { return std::sqrt(quad_A(forms, v)); };
  u /= a_norm(u);
  double R = Rq.value(u);
  Vec r = Rq.gradient(u, R);
  double gn = a_norm(r);
  double alpha = 1.0 / std::max(R, 1e-12);
  int it = 0;
  for (;; ++it) {
    if (gn <= opts.tol * std::max(1.0, R)) break;
    if (it >= opts.max_iter)
      throw ConvergenceError("quotient descent exhausted its iteration budget", u, R, gn);
    const double noise = 1e-13 * std::max(1.0, R);
    double a = alpha;
    bool accepted = false;
    Vec u1;
    Vec r1;
    double R1 = 0.0;
    double gn1 = 0.0;
    for (int bt = 0; bt < 60; ++bt, a *= 0.5) {
      u1 = u - a * r;
      u1 /= a_norm(u1);
      R1 = Rq.value(u1);
      if (R1 <= R - 1e-4 * a * gn * gn) {
        accepted = true;
      } else if (R1 <= R + noise) {
        r1 = Rq.gradient(u1, R1);
        gn1 = a_norm(r1);
        if (gn1 < gn) {
          accepted = true;
          break;
        }
        continue;
      }
      if (accepted) {
        r1 = Rq.gradient(u1, R1);
        gn1 = a_norm(r1);
        break;
      }
    }
    if (!accepted) throw ConvergenceError("quotient descent line search stalled", u, R, gn);
    const Vec s = u1 - u;
    const Vec y = r1 - r;
    const double sy = s.dot(forms.A * y);
    alpha = sy > 0.0 ? quad_A(forms, s) / sy : 2.0 * a;
    alpha = std::clamp(alpha, 1e-8 / R1, 1e8 / R1);
    u = std::move(u1);
    r = std::move(r1);
    R = R1;
    gn = gn1;
  }
  SobolevResult out;
  out.value = R;
  out.field = std::move(u);
  out.grad_norm = gn;
  out.iterations = it;
  return out;
}

SobolevOptions sobolev_like(const GroundStateOptions& g) {
  SobolevOptions s;
  s.eigen_starts = std::max(1, g.eigen_starts);
  s.concentration_starts = g.concentration_starts;
  s.random_starts = g.random_starts;
  s.seed = g.seed;
  return s;
}

}  // namespace

std::vector<Vec> concentration_starts(const MeridianGrid& grid) {
  std::vector<int> axis;
  for (int j = 1; j < grid.n_z(); ++j)
    if (grid.interior(1, j)) axis.push_back(j);
  std::vector<Vec> out;
  if (axis.empty()) return out;
  std::vector<int> centres;
  for (const std::size_t q : {2u, 1u, 3u}) {
    const int j = axis[std::min(axis.size() - 1, q * axis.size() / 4)];
    if (std::find(centres.begin(), centres.end(), j) == centres.end()) centres.push_back(j);
  }
  const double h = std::min(grid.h_r(), grid.h_z());
  for (const int j : centres) {
    const double zc = grid.z(j);
    for (const double s : {1.0, 2.0, 4.0}) {
      const double w = s * h;
      out.push_back(grid.sample([&](double r, double z) {
        return r * std::exp(-(r * r + (z - zc) * (z - zc)) / (2.0 * w * w));
      }));
    }
  }
  return out;
}

SobolevResult compute_S(const DiscreteForms& forms, double q, const SobolevOptions& opts) {
  if (!(q >= 2.0 && q <= 6.0)) throw ConfigError("exponent for S must lie in [2, 6]");
  const Quotient Rq{forms, q};
  std::vector<Vec> starts;
  if (opts.eigen_starts > 0) {
    const int k = std::min<int>(opts.eigen_starts, static_cast<int>(forms.size()));
    const SpectralSplit s = eigenpairs(forms, k);
    for (int j = 0; j < k; ++j) starts.emplace_back(s.eigenvectors.col(j));
  }
  if (opts.concentration_starts)
    for (Vec& v : concentration_starts(forms.grid)) starts.push_back(std::move(v));
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < opts.random_starts; ++i) {
    Vec v(forms.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = normal(rng);
    starts.push_back(std::move(v));
  }
  if (starts.empty()) throw ConfigError("compute_S needs at least one start");

  std::optional<SobolevResult> best;
  std::vector<double> values(starts.size(), std::numeric_limits<double>::quiet_NaN());
  double fallback = std::numeric_limits<double>::infinity();
  Vec fallback_field;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    try {
      SobolevResult r = minimize_quotient(Rq, starts[i], opts);
      r.start_index = static_cast<int>(i);
      values[i] = r.value;
      if (!best || r.value < best->value) best = std::move(r);
    } catch (const ConvergenceError& e) {
      if (e.energy() < fallback) {
        fallback = e.energy();
        fallback_field = e.best();
      }
    }
  }
  if (!best) throw ConvergenceError("S_h minimization did not converge", fallback_field, fallback,
                                    std::numeric_limits<double>::quiet_NaN());
  best->start_values = std::move(values);
  return std::move(*best);
}

EnergyBounds energy_bounds(const SpectralSplit& spectrum, double S, double p, double mu_omega,
                           double lambda, std::optional<int> expected_nu) {
  const Vec& ev = spectrum.eigenvalues;
  if (ev.size() == 0) throw ConfigError("empty spectrum");
  if (!(p > 2.0)) throw ConfigError("energy bounds need p > 2");
  std::ostringstream msg;
  if (lambda > 0.0 || !(lambda > -ev[ev.size() - 1])) {
    msg << "lambda = " << lambda << " is in no admissible window; admissible lambda lie in ("
        << -ev[ev.size() - 1] << ", 0] for the computed spectrum";
    throw ConfigError(msg.str());
  }
  EnergyBounds b;
  b.lambda = lambda;
  b.p = p;
  b.S = S;
  b.mu_omega = mu_omega;
  b.nu = spectral_index(ev, lambda);
  b.lambda_nu = ev[b.nu - 1];
  b.window_lo = -b.lambda_nu;
  b.window_hi = b.nu >= 2 ? -ev[b.nu - 2] : 0.0;
  if (expected_nu && *expected_nu != b.nu) {
    msg << "lambda = " << lambda << " is not in the window of nu = " << *expected_nu
        << "; it belongs to nu = " << b.nu << ", i.e. (" << b.window_lo << ", " << b.window_hi
        << "]";
    throw ConfigError(msg.str());
  }
  const double e = p / (p - 2.0);
  b.upper = exponent_factor(p) * std::pow(lambda + b.lambda_nu, e) * mu_omega;
  b.lower = exponent_factor(p) * std::pow(S, e);
  b.beta0 = b.lower;
  b.threshold = S * std::pow(mu_omega, (2.0 - p) / p);
  b.precondition = lambda + b.lambda_nu < b.threshold;
  b.sanity = b.threshold <= b.lambda_nu;
  return b;
}

double GroundStateResult::manifold_gap() const {
  const double ref = exponent_factor(p) * power;
  return std::abs(energy - ref) / std::max(std::abs(energy), 1e-300);
}

GroundStateResult ground_state(const DiscreteForms& forms, const SpectralSplit& spectrum,
                               double lambda, const GroundStateOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const bool full = opts.flavor == Flavor::Full;
  SpectralSplit spl = split(spectrum, full ? lambda : 0.0);
  if (!full) spl.lambda = lambda;
  const CurlCurlBackend backend = make_backend(forms, spl, lambda, opts.flavor);

  SphereOptions so;
  so.tol = opts.tol;
  so.max_iter = opts.max_iter;
  so.seed = opts.seed;
  if (opts.warm_start) so.starts.push_back(*opts.warm_start);
  const int first = full ? spl.nu - 1 : 0;
  for (int j = 0; j < opts.eigen_starts && first + j < spl.count(); ++j)
    so.starts.emplace_back(spl.eigenvectors.col(first + j));
  if (opts.concentration_starts)
    for (Vec& v : concentration_starts(forms.grid)) so.starts.push_back(std::move(v));
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  const int randoms = so.starts.empty() ? std::max(1, opts.random_starts) : opts.random_starts;
  for (int i = 0; i < randoms; ++i) {
    Vec v(forms.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = normal(rng);
    so.starts.push_back(std::move(v));
  }

  SphereResult sr = sphere_minimize(backend, so);

  GroundStateResult g;
  g.field = sr.point.point;
  g.energy = sr.point.energy;
  g.lambda = lambda;
  g.p = forms.p;
  g.residual = sr.residual;
  g.grad_norm = sr.grad_norm;
  g.iterations = sr.iterations;
  g.start_index = sr.start_index;
  g.nu = full ? spl.nu : 1;
  g.lp_norm = lp_norm(forms, g.field, forms.p);
  g.a_norm = std::sqrt(quad_A(forms, g.field));
  g.m_quad = quad_M(forms, g.field);
  g.power = power_sum(forms, g.field);
  g.start_energies = std::move(sr.start_energies);
  if (full && unit_linear_materials(forms.materials)) {
    const double lnu = spl.eigenvalues[spl.nu - 1];
    g.upper_bound = exponent_factor(forms.p) * std::pow(lambda + lnu, forms.p / (forms.p - 2.0)) *
                    forms.mu_omega;
    if (g.energy > *g.upper_bound + opts.tol * std::max(1.0, *g.upper_bound)) {
      std::ostringstream msg;
      msg << "ground state level " << g.energy << " exceeds the upper bound " << *g.upper_bound;
      throw NumericError(msg.str());
    }
  }
  g.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return g;
}

GroundStateResult ground_state(const DiscreteForms& forms, double lambda,
                               const GroundStateOptions& opts) {
  if (lambda > 0.0) throw ConfigError("ground states require lambda <= 0");
  const SpectralSplit s = spectrum_for(forms, lambda, opts.eigen_starts, opts.eigen);
  return ground_state(forms, s, lambda, opts);
}

SweepResult lambda_sweep(const DiscreteForms& forms, std::vector<double> lambdas,
                         const SweepOptions& opts) {
  if (lambdas.empty()) throw ConfigError("lambda grid is empty");
  std::sort(lambdas.begin(), lambdas.end());
  if (lambdas.back() > 0.0) throw ConfigError("lambda grid must satisfy lambda <= 0");

  SweepResult out;
  const SpectralSplit spectrum =
      spectrum_for(forms, lambdas.front(), opts.ground.eigen_starts, opts.ground.eigen);
  out.spectrum = spectrum.eigenvalues;
  out.S = opts.S ? *opts.S : compute_S(forms, forms.p, sobolev_like(opts.ground)).value;
  const double lower = exponent_factor(forms.p) * std::pow(out.S, forms.p / (forms.p - 2.0));

  const std::size_t n = lambdas.size();
  out.points.resize(n);
  auto run_chunk = [&](std::size_t begin, std::size_t end) {
    std::optional<Vec> warm;
    for (std::size_t i = begin; i < end; ++i) {
      SweepPoint& pt = out.points[i];
      pt.lambda = lambdas[i];
      pt.nu = spectral_index(spectrum.eigenvalues, pt.lambda);
      pt.lower = lower;
      pt.upper = exponent_factor(forms.p) *
                 std::pow(pt.lambda + spectrum.eigenvalues[pt.nu - 1], forms.p / (forms.p - 2.0)) *
                 forms.mu_omega;
      GroundStateOptions g = opts.ground;
      g.warm_start = warm;
      try {
        const GroundStateResult r = ground_state(forms, spectrum, pt.lambda, g);
        pt.attained = true;
        pt.energy = r.energy;
        pt.residual = r.residual;
        pt.m_quad = r.m_quad;
        warm = r.field;
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(1, opts.threads)), 1, n);
  if (threads == 1) {
    run_chunk(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t base = n / threads;
    const std::size_t extra = n % threads;
    std::size_t begin = 0;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t len = base + (t < extra ? 1 : 0);
      pool.emplace_back(run_chunk, begin, begin + len);
      begin += len;
    }
    for (auto& th : pool) th.join();
  }

  for (const auto& pt : out.points)
    if (pt.attained) out.lipschitz = std::max(out.lipschitz, 0.5 * pt.m_quad);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const SweepPoint& a = out.points[i];
    const SweepPoint& b = out.points[i + 1];
    if (!a.attained || !b.attained || a.nu != b.nu) continue;
    std::ostringstream note;
    if (b.energy < a.energy - opts.slack) {
      out.monotone = false;
      note << "decrease between lambda " << a.lambda << " and " << b.lambda;
    }
    if (!(b.energy > a.energy)) out.strictly_increasing = false;
    const double L = 0.5 * std::max(a.m_quad, b.m_quad);
    if (std::abs(b.energy - a.energy) > L * (b.lambda - a.lambda) * (1.0 + 1e-6) + opts.slack) {
      out.continuity = false;
      note << "Lipschitz estimate exceeded between lambda " << a.lambda << " and " << b.lambda;
    }
    if (!note.str().empty()) out.notes.push_back(note.str());
  }
  for (const auto& pt : out.points)
    if (!pt.attained) out.notes.push_back("lambda " + std::to_string(pt.lambda) + ": " + pt.error);
  return out;
}

EpsNuResult estimate_eps_nu(const DiscreteForms& forms, int nu, const EpsNuOptions& opts) {
  if (nu < 1) throw ConfigError("nu must be at least 1");
  const SpectralSplit spectrum =
      eigenpairs(forms, std::min<int>(static_cast<int>(forms.size()), nu + opts.ground.eigen_starts),
                 opts.ground.eigen);
  if (nu > spectrum.count()) throw ConfigError("nu exceeds the number of unknowns");

  EpsNuResult out;
  out.nu = nu;
  out.lambda_nu = spectrum.eigenvalues[nu - 1];
  out.S = opts.S ? *opts.S : compute_S(forms, forms.p, sobolev_like(opts.ground)).value;
  out.lower_bound = out.S * std::pow(forms.mu_omega, (2.0 - forms.p) / forms.p);
  out.c0 = ground_state(forms, spectrum, 0.0, opts.ground).energy;
  out.gap_tol = opts.gap_factor * opts.ground.tol * std::max(1.0, out.c0);

  std::optional<Vec> warm;
  auto probe = [&](double eps) -> const EpsProbe& {
    EpsProbe pr;
    pr.eps = eps;
    pr.lambda = -out.lambda_nu + eps;
    GroundStateOptions g = opts.ground;
    g.warm_start = warm;
    const GroundStateResult r = ground_state(forms, spectrum, pr.lambda, g);
    warm = r.field;
    pr.energy = r.energy;
    if (r.energy < out.c0 - out.gap_tol)
      pr.decision = "below";
    else if (r.energy > out.c0 + out.gap_tol)
      pr.decision = "above";
    else
      pr.decision = "undecided";
    out.probes.push_back(pr);
    return out.probes.back();
  };

  double lo = 0.0;
  double eps = 0.5 * std::min(out.lower_bound, out.lambda_nu);
  for (int i = 0; i < 40; ++i, eps *= 0.5) {
    if (probe(eps).decision == "below") {
      lo = eps;
      break;
    }
  }
  if (lo == 0.0) out.warnings.push_back("no eps with c_lambda < c_0 found near -lambda_nu");

  double hi = out.lambda_nu;
  out.probes.push_back(EpsProbe{hi, 0.0, out.c0, "equal"});
  const double width = opts.width * out.lambda_nu;
  while (lo > 0.0 && hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    const EpsProbe& pr = probe(mid);
    if (pr.decision == "below") {
      lo = mid;
    } else {
      hi = mid;
      if (pr.decision == "undecided") {
        std::ostringstream w;
        w << "comparison at eps = " << mid << " is within the noise band; bracket kept wide";
        out.warnings.push_back(w.str());
      }
    }
  }
  out.eps_hat = lo;
  out.eps_upper = hi;
  return out;
}

namespace {

MultiplicityCount count_window(const SpectralSplit& spectrum, double lo, double hi) {
  const Vec& ev = spectrum.eigenvalues;
  if (ev.size() == 0 || ev[ev.size() - 1] < hi) {
    std::ostringstream msg;
    msg << "computed spectrum ends at " << (ev.size() ? ev[ev.size() - 1] : 0.0)
        << " but the window reaches " << hi << "; request more eigenpairs";
    throw NumericError(msg.str());
  }
  MultiplicityCount c;
  c.lo = lo;
  c.hi = hi;
  if (!(hi > lo)) return c;
  const double* first = ev.data();
  const double* last = ev.data() + ev.size();
  const auto begin = std::upper_bound(first, last, lo) - first;
  const auto end = std::lower_bound(first, last, hi) - first;
  for (auto k = begin; k < end; ++k) {
    c.indices.push_back(static_cast<int>(k) + 1);
    c.multiplicities.push_back(spectrum.multiplicity(static_cast<int>(k)));
  }
  c.count = static_cast<int>(c.indices.size());
  return c;
}

}  // namespace

MultiplicityCount count_m_tilde(const SpectralSplit& spectrum, double S, double p,
                                double mu_omega, double lambda) {
  const double T = S * std::pow(mu_omega, (2.0 - p) / p);
  return count_window(spectrum, -lambda, -lambda + T);
}

AnisoReport count_m_tilde_aniso(const SpectralSplit& spectrum, const MaterialField& materials,
                                double S, double p, double mu_omega) {
  AnisoReport r;
  r.constants = {materials.mu_inf(), materials.V_inf(), materials.Gamma_inf(), materials.Gamma_0()};
  const auto& k = r.constants;
  r.kappa = k.V_inf * k.mu_inf * std::pow(k.Gamma_inf / k.Gamma_0, 2.0 / p);
  r.threshold = S * std::pow(mu_omega, (2.0 - p) / p);
  r.count = count_window(spectrum, 1.0, 1.0 + r.threshold / r.kappa);

  const double f = exponent_factor(p);
  const double e = p / (p - 2.0);
  r.d_lower = f * std::pow(S / k.mu_inf, e) * std::pow(k.Gamma_inf, -2.0 * p / (p - 2.0));
  r.d_lower_gamma =
      f * std::pow(S, e) * std::pow(k.mu_inf, -e) * std::pow(p * k.Gamma_inf, -2.0 / (p - 2.0));
  if (r.count.count > 0) {
    const double gap = spectrum.eigenvalues[r.count.indices.front() - 1] - 1.0;
    const double base = std::pow(gap * k.V_inf, e) * mu_omega;
    r.c_upper = f * base * std::pow(k.Gamma_0, -2.0 * p / (p - 2.0));
    r.c_upper_gamma = f * base * std::pow(p * k.Gamma_0, -2.0 / (p - 2.0));
  }
  return r;
}

BubbleResult bubble(const DiscreteForms& forms, const Vec& phi, double eps, double z0,
                    const std::vector<Vec>& tests) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("bubble scale eps must lie in (0, 1]");
  const MeridianGrid& grid = forms.grid;
  if (!(z0 >= grid.z_min() && z0 <= grid.z_max()))
    throw ConfigError("bubble centre must lie on the axis segment of the domain");
  const Vec nodal = grid.to_nodal(phi);
  const int nr = grid.n_r();
  const int nz = grid.n_z();

  auto interp = [&](double r, double z) {
    double x = r / grid.h_r();
    double y = (z - grid.z_min()) / grid.h_z();
    constexpr double slop = 1e-9;
    if (x < -slop || x > nr + slop || y < -slop || y > nz + slop) return 0.0;
    x = std::clamp(x, 0.0, static_cast<double>(nr));
    y = std::clamp(y, 0.0, static_cast<double>(nz));
    const int i = std::min(static_cast<int>(x), nr - 1);
    const int j = std::min(static_cast<int>(y), nz - 1);
    const double fx = x - i;
    const double fy = y - j;
    auto at = [&](int a, int b) { return nodal[static_cast<Eigen::Index>(grid.node(a, b))]; };
    return (1 - fx) * (1 - fy) * at(i, j) + fx * (1 - fy) * at(i + 1, j) +
           (1 - fx) * fy * at(i, j + 1) + fx * fy * at(i + 1, j + 1);
  };

  const double scale = 1.0 / std::sqrt(eps);
  const double leak = 1e-12 * scale * std::max(phi.cwiseAbs().maxCoeff(), 1e-300);
  BubbleResult out;
  out.eps = eps;
  out.z0 = z0;
  out.field = Vec::Zero(phi.size());
  for (int i = 0; i <= nr; ++i) {
    for (int j = 0; j <= nz; ++j) {
      const double v = scale * interp(grid.r(i) / eps, (grid.z(j) - z0) / eps + z0);
      const int k = grid.unknown(i, j);
      if (k >= 0) {
        out.field[k] = v;
      } else if (std::abs(v) > leak) {
        throw ConfigError("rescaled field leaves the domain; the domain must be star-shaped "
                          "about the bubble centre");
      }
    }
  }
  out.l6_norm = lp_norm(forms, out.field, 6.0);
  out.a_norm = std::sqrt(quad_A(forms, out.field));
  out.j0 = evaluate_J(forms, 0.0, out.field);
  for (const Vec& psi : tests) out.test_inner.push_back(inner_M(forms, out.field, psi));
  return out;
}

ContinuityReport continuity_of_ground_states(const DiscreteForms& forms, double lambda_ref,
                                             const std::vector<double>& sequence,
                                             const GroundStateOptions& opts) {
  double lowest = lambda_ref;
  for (double l : sequence) lowest = std::min(lowest, l);
  const SpectralSplit spectrum = spectrum_for(forms, lowest, opts.eigen_starts, opts.eigen);
  const int nu = spectral_index(spectrum.eigenvalues, lambda_ref);
  for (double l : sequence) {
    if (l > 0.0 || spectral_index(spectrum.eigenvalues, l) != nu) {
      std::ostringstream msg;
      msg << "lambda = " << l << " is not in the window of lambda_ref = " << lambda_ref;
      throw ConfigError(msg.str());
    }
  }
  const GroundStateResult ref = ground_state(forms, spectrum, lambda_ref, opts);
  ContinuityReport rep;
  rep.lambda_ref = lambda_ref;
  rep.energy_ref = ref.energy;
  for (double l : sequence) {
    GroundStateOptions g = opts;
    g.warm_start = ref.field;
    const GroundStateResult r = ground_state(forms, spectrum, l, g);
    ContinuityEntry e;
    e.lambda = l;
    e.energy = r.energy;
    e.energy_gap = std::abs(r.energy - ref.energy);
    e.distance = std::sqrt(std::min(quad_M(forms, r.field - ref.field),
                                    quad_M(forms, r.field + ref.field)));
    e.bound = 0.5 * std::max(r.m_quad, ref.m_quad) * std::abs(l - lambda_ref);
    e.within = e.energy_gap <= e.bound * (1.0 + 1e-6) + 1e-9 * std::max(1.0, ref.energy);
    rep.energy_continuous = rep.energy_continuous && e.within;
    rep.entries.push_back(e);
  }
  return rep;
}

BoundStateReport bound_states(const DiscreteForms& forms, const SpectralSplit& spectrum,
                              double S, double lambda, const GroundStateOptions& opts,
                              double dedup_tol) {
  BoundStateReport rep;
  rep.count = count_m_tilde(spectrum, S, forms.p, forms.mu_omega, lambda);
  rep.beta0 = exponent_factor(forms.p) * std::pow(S, forms.p / (forms.p - 2.0));
  const SpectralSplit spl = split(spectrum, lambda);
  const CurlCurlBackend backend = make_backend(forms, spl, lambda, Flavor::Full);
  std::vector<Vec> starts;
  for (int idx : rep.count.indices) starts.emplace_back(spl.eigenvectors.col(idx - 1));
  if (starts.empty()) starts.emplace_back(spl.eigenvectors.col(spl.nu - 1));
  SphereOptions so;
  so.tol = opts.tol;
  so.max_iter = opts.max_iter;
  so.seed = opts.seed;
  rep.states = multistart_bound_states(backend, starts, dedup_tol, rep.beta0, so);
  return rep;
}

}  // namespace nehari
