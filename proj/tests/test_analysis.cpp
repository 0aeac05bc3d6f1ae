#include "nehari/analysis.hpp"
#include "nehari/error.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace nehari;

namespace {

DiscreteForms cylinder(int n, double p, double scale = 1.0) {
  const MeridianGrid g = build_grid(scale, 0, scale, n, n);
  return assemble_forms(g, MaterialField::isotropic(g), p);
}

SpectralSplit synthetic(std::vector<double> values) {
  SpectralSplit s;
  s.eigenvalues = Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
  s.eigenvectors = Matrix::Zero(1, s.eigenvalues.size());
  s.cluster = cluster_eigenvalues(s.eigenvalues, 1e-6);
  return s;
}

int brute_count(const Vec& ev, double lo, double hi) {
  int n = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) n += (ev[k] > lo && ev[k] < hi) ? 1 : 0;
  return n;
}

double factor(double p) { return 0.5 - 1.0 / p; }

}  // namespace

TEST(Sobolev, QuadraticIsFirstEigenvalue) {
  const DiscreteForms f = cylinder(12, 4.0);
  const double l1 = eigenpairs(f, 1).eigenvalues[0];
  EXPECT_NEAR(compute_S(f, 2.0).value, l1, 1e-8 * l1);
}

TEST(Sobolev, CoarseQuarticMatchesOracle) {
  EXPECT_NEAR(compute_S(cylinder(8, 4.0), 4.0).value, oracle::kS4_8, 1e-10 * oracle::kS4_8);
}

TEST(Sobolev, CriticalDilationInvariant) {
  const double a = compute_S(cylinder(16, 6.0), 6.0).value;
  const double b = compute_S(cylinder(16, 6.0, 2.0), 6.0).value;
  EXPECT_NEAR(a, b, 1e-8 * a);
}

TEST(Sobolev, CriticalMatchesMultiStartOracle) {
  for (auto [n, ref] : {std::pair{16, oracle::kS6_16}, std::pair{64, oracle::kS6_64}}) {
    const double S = compute_S(cylinder(n, 6.0), 6.0).value;
    EXPECT_LE(S, ref * (1.0 + 1e-7)) << n;
    EXPECT_GE(S, ref * (1.0 - 1e-4)) << n;
  }
}

TEST(Sobolev, ConcentrationStartsSitOnTheAxis) {
  const MeridianGrid g = build_grid(1, 0, 1, 16, 16);
  const std::vector<Vec> starts = concentration_starts(g);
  ASSERT_EQ(starts.size(), 9u);
  for (const Vec& v : starts) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    EXPECT_LE(g.node_i(g.unknown_nodes()[static_cast<std::size_t>(arg)]), 4);
  }
}

TEST(Bounds, FormulaExamples) {
  const SpectralSplit s = synthetic({2.0, 5.0, 9.0});
  const EnergyBounds b = energy_bounds(s, 1.0, 6.0, std::numbers::pi, -1.0);
  EXPECT_EQ(b.nu, 1);
  EXPECT_NEAR(b.upper, oracle::kUpperExample, 1e-15);
  EXPECT_NEAR(b.lower, oracle::kLowerExample, 1e-15);
  EXPECT_EQ(b.beta0, b.lower);
  EXPECT_DOUBLE_EQ(b.threshold, std::pow(std::numbers::pi, -2.0 / 3.0));
}

TEST(Bounds, UpperVanishesAtWindowEdge) {
  const SpectralSplit s = synthetic({2.0, 5.0, 9.0});
  double prev = 1e300;
  for (double d : {1e-1, 1e-2, 1e-4, 1e-8}) {
    const EnergyBounds b = energy_bounds(s, 1.0, 6.0, 1.0, -2.0 + d);
    EXPECT_LT(b.upper, prev);
    prev = b.upper;
  }
  EXPECT_LT(prev, 1e-11);
}

TEST(Bounds, WindowErrors) {
  const SpectralSplit s = synthetic({2.0, 5.0, 9.0});
  try {
    energy_bounds(s, 1.0, 6.0, 1.0, 0.5);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("admissible"), std::string::npos);
  }
  EXPECT_THROW(energy_bounds(s, 1.0, 6.0, 1.0, -9.5), ConfigError);
  try {
    energy_bounds(s, 1.0, 6.0, 1.0, -3.0, 1);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("nu = 2"), std::string::npos);
  }
  const EnergyBounds b = energy_bounds(s, 1.0, 6.0, 1.0, -2.0);
  EXPECT_EQ(b.nu, 2);
  EXPECT_EQ(b.window_lo, -5.0);
  EXPECT_EQ(b.window_hi, -2.0);
}

TEST(Ground, ReproducibleAcrossSeeds) {
  const DiscreteForms f = cylinder(32, 4.0);
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    GroundStateOptions o;
    o.seed = seed;
    o.random_starts = 2;
    const GroundStateResult r = ground_state(f, 0.0, o);
    EXPECT_NEAR(r.energy, oracle::kC0p4_32, 1e-6 * oracle::kC0p4_32) << seed;
    EXPECT_LE(r.manifold_gap(), 1e-8);
    EXPECT_LE(r.residual, 1e-6);
  }
}

TEST(Ground, LowerBoundChain) {
  for (double p : {4.0, 6.0}) {
    const DiscreteForms f = cylinder(16, p);
    const double S = compute_S(f, p).value;
    const GroundStateResult r = ground_state(f, 0.0);
    EXPECT_GE(r.energy, factor(p) * std::pow(S, p / (p - 2.0)) - 1e-6) << p;
    ASSERT_TRUE(r.upper_bound.has_value());
    EXPECT_LE(r.energy, *r.upper_bound + 1e-6);
    EXPECT_LE(r.manifold_gap(), 1e-8);
  }
}

TEST(Ground, UpperBoundInsideWindow) {
  const DiscreteForms f = cylinder(16, 6.0);
  const SpectralSplit s = eigenpairs(f, 8);
  for (double frac : {0.9, 0.5, 0.1, 0.01}) {
    const double lambda = -s.eigenvalues[0] * (1.0 - frac);
    const GroundStateResult r = ground_state(f, s, lambda);
    EXPECT_LE(r.energy, *r.upper_bound + 1e-6) << lambda;
    EXPECT_EQ(r.nu, 1);
  }
}

TEST(Ground, CompactPerturbationIsLambdaIndependent) {
  const DiscreteForms f = cylinder(12, 4.0);
  GroundStateOptions o;
  o.flavor = Flavor::CompactPerturbation;
  const double a = ground_state(f, 0.0, o).energy;
  const double b = ground_state(f, -30.0, o).energy;
  EXPECT_NEAR(a, b, 1e-9 * a);
}

TEST(Sweep, MonotoneAndStrictForQuartic) {
  const DiscreteForms f = cylinder(16, 4.0);
  const double l1 = eigenpairs(f, 1).eigenvalues[0];
  std::vector<double> grid;
  for (int i = 0; i < 8; ++i) grid.push_back(-l1 + l1 * (i + 0.5) / 8.0);
  const SweepResult r = lambda_sweep(f, grid);
  ASSERT_EQ(r.points.size(), 8u);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.strictly_increasing);
  EXPECT_TRUE(r.continuity);
  for (const SweepPoint& p : r.points) {
    EXPECT_TRUE(p.attained);
    EXPECT_LE(p.energy, p.upper + 1e-6);
  }
  EXPECT_LT(r.points.front().energy, 1e-2 * r.points.back().energy);

  SweepOptions threaded;
  threaded.threads = 3;
  const SweepResult t = lambda_sweep(f, grid, threaded);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(t.points[i].energy, r.points[i].energy, 1e-7 * r.points[i].energy);
}

TEST(Sweep, RecordsFailuresAndContinues) {
  const DiscreteForms f = cylinder(8, 4.0);
  SweepOptions o;
  o.ground.max_iter = 1;
  const SweepResult r = lambda_sweep(f, {-5.0, 0.0}, o);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_THROW(lambda_sweep(f, {0.5}), ConfigError);
}

TEST(EpsNu, LowerBoundAndCertifiedWindow) {
  const DiscreteForms f = cylinder(16, 4.0);
  EpsNuOptions o;
  o.width = 1e-2;
  const EpsNuResult r = estimate_eps_nu(f, 1, o);
  EXPECT_GE(r.eps_hat, r.lower_bound - o.ground.tol);
  EXPECT_LE(r.eps_hat, r.lambda_nu);
  EXPECT_LE(r.eps_upper - r.eps_hat, o.width * r.lambda_nu + 1e-12);
  const double lambda = -r.lambda_nu + 0.5 * r.eps_hat;
  const GroundStateResult g = ground_state(f, lambda);
  EXPECT_LT(g.energy, r.c0 - 3.0 * o.ground.tol * std::max(1.0, r.c0));
  bool endpoint = false;
  for (const EpsProbe& p : r.probes) endpoint |= p.decision == "equal" && p.eps == r.lambda_nu;
  EXPECT_TRUE(endpoint);
}

TEST(MTilde, AgreesWithLinearScan) {
  const DiscreteForms f = cylinder(16, 4.0);
  const SpectralSplit s = eigenpairs(f, 40);
  const double S = 25.0;
  const double T = S * std::pow(f.mu_omega, (2.0 - f.p) / f.p);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-s.eigenvalues[20], 0.0);
  for (int i = 0; i < 200; ++i) {
    const double lambda = u(rng);
    const MultiplicityCount c = count_m_tilde(s, S, f.p, f.mu_omega, lambda);
    EXPECT_EQ(c.count, brute_count(s.eigenvalues, -lambda, -lambda + T));
    EXPECT_EQ(c.indices.size(), c.multiplicities.size());
  }
}

TEST(MTilde, Examples) {
  const DiscreteForms f = cylinder(16, 6.0);
  const SpectralSplit s = eigenpairs(f, 30);
  const double S = compute_S(f, 6.0).value;
  const double T = S * std::pow(f.mu_omega, -2.0 / 3.0);
  EXPECT_EQ(count_m_tilde(s, S, 6.0, f.mu_omega, 0.0).count,
            brute_count(s.eigenvalues, 0.0, T));
  const MultiplicityCount c = count_m_tilde(s, S, 6.0, f.mu_omega, -s.eigenvalues[0] + 0.5 * T);
  EXPECT_GE(c.count, s.multiplicity(0));
  // Between windows.
  const double gap_lambda = -s.eigenvalues[1] + T + 0.5 * (s.eigenvalues[1] - s.eigenvalues[0] - T);
  if (s.eigenvalues[1] - s.eigenvalues[0] > T)
    EXPECT_EQ(count_m_tilde(s, S, 6.0, f.mu_omega, gap_lambda).count, 0);
  EXPECT_THROW(count_m_tilde(eigenpairs(f, 2), S, 6.0, f.mu_omega, -1000.0), NumericError);
}

TEST(MTilde, AnisotropicUnitAndScaled) {
  const MeridianGrid g = build_grid(3, 0, 3, 16, 16);
  const DiscreteForms unit = assemble_forms(g, MaterialField::isotropic(g), 6.0);
  const SpectralSplit su = eigenpairs(unit, 30);
  const double S = compute_S(unit, 6.0).value;
  const AnisoReport a = count_m_tilde_aniso(su, unit.materials, S, 6.0, unit.mu_omega);
  EXPECT_EQ(a.kappa, 1.0);
  EXPECT_EQ(a.count.count, count_m_tilde(su, S, 6.0, unit.mu_omega, -1.0).count);
  EXPECT_NEAR(a.d_lower_gamma, a.d_lower * std::pow(6.0, -0.5), 1e-14 * a.d_lower);

  const MaterialField m = MaterialField::constant(g, 1.5, 0.7, 0.5, 1.2);
  const DiscreteForms f = assemble_forms(g, m, 6.0);
  const SpectralSplit s = eigenpairs(f, 30);
  const AnisoReport r = count_m_tilde_aniso(s, f.materials, S, 6.0, f.mu_omega);
  EXPECT_NEAR(r.kappa, 0.5 * 1.5, 1e-15);
  int brute = 0;
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    const double x = (s.eigenvalues[k] - 1.0) * r.kappa;
    brute += (x > 0.0 && x < r.threshold) ? 1 : 0;
  }
  EXPECT_EQ(r.count.count, brute);
}

TEST(Bubble, IdentityAtUnitScale) {
  const DiscreteForms f = cylinder(32, 6.0);
  const Vec phi = f.grid.sample([](double r, double z) { return r * (1 - r) * std::sin(3 * z); });
  const BubbleResult b = bubble(f, phi, 1.0, 0.5, {phi});
  EXPECT_LT((b.field - phi).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(b.l6_norm, lp_norm(f, phi, 6.0), 1e-14);
  EXPECT_NEAR(b.test_inner[0], quad_M(f, phi), 1e-14);
}

TEST(Bubble, ScaleInvarianceAndWeakDecay) {
  const DiscreteForms f = cylinder(64, 6.0);
  const Vec phi = f.grid.sample(
      [](double r, double z) { return r * (1 - r) * std::sin(std::numbers::pi * z); });
  const Vec psi = f.grid.sample([](double r, double) { return r * (1 - r); });
  const double l6 = lp_norm(f, phi, 6.0);
  const double a = std::sqrt(quad_A(f, phi));
  double prev = bubble(f, phi, 1.0, 0.5, {psi}).test_inner[0];
  for (double eps : {0.5, 0.25}) {
    const BubbleResult b = bubble(f, phi, eps, 0.5, {psi});
    EXPECT_NEAR(b.l6_norm / l6, 1.0, 0.05) << eps;
    EXPECT_NEAR(b.a_norm / a, 1.0, 0.1) << eps;
    EXPECT_LT(b.test_inner[0], 0.5 * prev) << eps;
    prev = b.test_inner[0];
  }
}

TEST(Bubble, Errors) {
  const DiscreteForms f = cylinder(16, 6.0);
  const Vec phi = Vec::Ones(f.size());
  EXPECT_THROW(bubble(f, phi, 0.0, 0.5), ConfigError);
  EXPECT_THROW(bubble(f, phi, 1.5, 0.5), ConfigError);
  EXPECT_THROW(bubble(f, phi, 0.5, 2.0), ConfigError);
  const MeridianGrid g = build_grid(1, 0, 1, 16, 16, Shape::annulus(0.5));
  const DiscreteForms hollow = assemble_forms(g, MaterialField::isotropic(g), 6.0);
  EXPECT_THROW(bubble(hollow, Vec::Ones(hollow.size()), 0.5, 0.5), ConfigError);
}

TEST(Continuity, ConstantAndShrinkingSequences) {
  const DiscreteForms f = cylinder(16, 4.0);
  const ContinuityReport c = continuity_of_ground_states(f, -10.0, {-10.0, -10.0});
  for (const ContinuityEntry& e : c.entries) {
    EXPECT_LT(e.distance, 1e-6);
    EXPECT_LT(e.energy_gap, 1e-8 * c.energy_ref);
  }
  const ContinuityReport r =
      continuity_of_ground_states(f, -10.0, {-10.0 + 1e-1, -10.0 + 1e-2, -10.0 + 1e-3});
  EXPECT_TRUE(r.energy_continuous);
  for (const ContinuityEntry& e : r.entries) EXPECT_LE(e.energy_gap, e.bound * (1 + 1e-6) + 1e-7);
  EXPECT_THROW(continuity_of_ground_states(f, -10.0, {-60.0}), ConfigError);
}

TEST(BoundStates, AtLeastOnePairInsideWindow) {
  const DiscreteForms f = cylinder(16, 4.0);
  const SpectralSplit s = eigenpairs(f, 20);
  const double S = compute_S(f, 4.0).value;
  const double T = S * std::pow(f.mu_omega, -0.5);
  const double lambda = -s.eigenvalues[0] + 0.5 * T;
  const BoundStateReport r = bound_states(f, s, S, lambda);
  EXPECT_GE(r.count.count, 1);
  ASSERT_GE(r.states.size(), 1u);
  for (const CriticalPoint& p : r.states) {
    EXPECT_LT(p.energy, r.beta0);
    EXPECT_LE(p.residual, 1e-6);
  }
}
