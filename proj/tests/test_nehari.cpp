#include "nehari/curlcurl.hpp"
#include "nehari/error.hpp"
#include "nehari/nehari.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

using namespace nehari;

namespace {

Vec e(int n, int k) {
  Vec v = Vec::Zero(n);
  v[k] = 1.0;
  return v;
}

// 10 x 10 cylinder, p = 4, lambda between -lambda_2 and -lambda_1: X~ is one
// dimensional, so every fiber has a nontrivial X~ part.
struct Window2 {
  DiscreteForms forms;
  SpectralSplit spec;
  double lambda = 0.0;
  std::unique_ptr<CurlCurlBackend> backend;

  static DiscreteForms make(double p) {
    const MeridianGrid g = build_grid(1, 0, 1, 10, 10);
    return assemble_forms(g, MaterialField::isotropic(g), p);
  }

  explicit Window2(double p = 4.0) : forms(make(p)) {
    const SpectralSplit e = eigenpairs(forms, 8);
    lambda = -0.5 * (e.eigenvalues[0] + e.eigenvalues[1]);
    spec = split(e, lambda);
    backend = std::make_unique<CurlCurlBackend>(make_backend(forms, spec, lambda));
  }

  Vec random_direction(std::mt19937_64& rng) const {
    std::normal_distribution<double> g;
    Vec v(forms.size());
    for (auto& x : v) x = g(rng);
    v = backend->project_plus(v);
    return v / backend->norm(v);
  }
};

}  // namespace

TEST(Toy, FiberAtE1) {
  const QuarticToyBackend toy;
  const NehariPoint n = fiber_maximize(toy, e(2, 0));
  EXPECT_NEAR(n.t, 1.0, 1e-12);
  EXPECT_NEAR(n.c_tilde[0], 0.0, 1e-12);
  EXPECT_NEAR(n.energy, oracle::kToyLevel, 1e-14);
}

TEST(Toy, FiberUniqueFromRandomInits) {
  const QuarticToyBackend toy;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> t(0.05, 3.0), c(-3.0, 3.0);
  for (int i = 0; i < 10; ++i) {
    Vec ct(1);
    ct[0] = c(rng);
    const NehariPoint n = fiber_maximize(toy, e(2, 0), FiberStart{t(rng), ct});
    EXPECT_NEAR(n.t, 1.0, 1e-6);
    EXPECT_NEAR(n.c_tilde[0], 0.0, 1e-6);
  }
}

TEST(Toy, SphereMinimum) {
  const QuarticToyBackend toy;
  SphereOptions o;
  o.random_starts = 4;
  const SphereResult r = sphere_minimize(toy, o);
  EXPECT_NEAR(r.point.energy, 0.25, 1e-10);
  EXPECT_NEAR(std::abs(r.point.point[0]), 1.0, 1e-8);
  EXPECT_NEAR(r.point.point[1], 0.0, 1e-8);
}

TEST(Toy, OnePairFromE1) {
  const QuarticToyBackend toy;
  const auto found = multistart_bound_states(toy, {e(2, 0)}, 1e-3, 1.0, {});
  ASSERT_EQ(found.size(), 1u);
  EXPECT_NEAR(found[0].energy, 0.25, 1e-10);
  const auto dup = multistart_bound_states(toy, {e(2, 0), e(2, 0), Vec(-2.0 * e(2, 0))}, 1e-3,
                                           1.0, {});
  EXPECT_EQ(dup.size(), 1u);
  EXPECT_TRUE(multistart_bound_states(toy, {e(2, 0)}, 1e-3, 0.2, {}).empty());
}

TEST(Toy, DegenerateDirectionThrows) {
  const QuarticToyBackend toy;
  SphereOptions o;
  o.starts = {e(2, 1)};
  EXPECT_THROW(sphere_minimize(toy, o), ConvergenceError);
}

TEST(Fiber, PurePowerClosedForm) {
  const MeridianGrid g = build_grid(1, 0, 1, 8, 8);
  const DiscreteForms f = assemble_forms(g, MaterialField::isotropic(g), 6.0);
  const SpectralSplit s = split(eigenpairs(f, 4), 0.0);
  const CurlCurlBackend b = make_backend(f, s, 0.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  Vec u(f.size());
  for (auto& x : u) x = gauss(rng);
  u /= b.norm(u);
  const double P = power_sum(f, u);
  const NehariPoint n = fiber_maximize(b, u);
  EXPECT_NEAR(n.t, std::pow(1.0 / P, 0.25), 1e-10 * n.t);
  EXPECT_NEAR(n.energy, (0.5 - 1.0 / 6.0) * std::pow(1.0 / std::pow(P, 2.0 / 6.0), 1.5),
              1e-10 * n.energy);
}

TEST(Fiber, UniqueAndGlobal) {
  const Window2 w;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ut(0.1, 4.0), uc(-3.0, 3.0);
  for (int trial = 0; trial < 3; ++trial) {
    const Vec u = w.random_direction(rng);
    const NehariPoint ref = fiber_maximize(*w.backend, u);
    ASSERT_GT(ref.t, 0.0);
    ASSERT_GT(ref.energy, 0.0);
    const double scale = std::max(1.0, ref.t);
    for (int i = 0; i < 10; ++i) {
      Vec c(1);
      c[0] = uc(rng) * scale;
      const NehariPoint n = fiber_maximize(*w.backend, u, FiberStart{ut(rng) * scale, c});
      EXPECT_NEAR(n.t, ref.t, 1e-6 * scale);
      EXPECT_NEAR(n.c_tilde[0], ref.c_tilde[0], 1e-6 * scale);
    }
    const Matrix& T = w.backend->tilde_basis();
    for (int i = 0; i < 200; ++i) {
      const double t = ut(rng) * scale * 0.75;
      const Vec pt = t * u + T * Vec::Constant(1, uc(rng) * scale);
      EXPECT_GE(ref.energy, w.backend->value(pt) - 1e-10 * std::max(1.0, ref.energy));
    }
  }
}

TEST(Fiber, Idempotent) {
  const Window2 w;
  std::mt19937_64 rng(9);
  const NehariPoint n = fiber_maximize(*w.backend, w.random_direction(rng));
  const Vec plus = w.backend->project_plus(n.point);
  const NehariPoint again = fiber_maximize(*w.backend, plus / w.backend->norm(plus));
  EXPECT_LT(w.backend->norm(again.point - n.point), 1e-8 * w.backend->norm(n.point));
  EXPECT_NEAR(again.t, w.backend->norm(plus), 1e-8 * again.t);
}

TEST(Fiber, Evenness) {
  const Window2 w;
  std::mt19937_64 rng(10);
  const Vec u = w.random_direction(rng);
  const NehariPoint a = fiber_maximize(*w.backend, u);
  const NehariPoint b = fiber_maximize(*w.backend, -u);
  EXPECT_NEAR(a.energy, b.energy, 1e-12 * a.energy);
}

TEST(Sphere, GradientIdentity) {
  const Window2 w;
  std::mt19937_64 rng(12);
  for (int s = 0; s < 5; ++s) {
    const Vec u = w.random_direction(rng);
    Vec d = w.random_direction(rng);
    d -= w.backend->inner(d, u) * u;
    const NehariPoint n = fiber_maximize(*w.backend, u);
    const double analytic = n.t * w.backend->gradient(n.point).dot(d);
    const double h = 1e-6;
    auto phi = [&](double s) {
      Vec v = u + s * d;
      v /= w.backend->norm(v);
      return fiber_maximize(*w.backend, v).energy;
    };
    const double fd = (phi(h) - phi(-h)) / (2 * h);
    EXPECT_NEAR(fd, analytic, 1e-5 * std::abs(analytic));
    const Vec rg = sphere_gradient(*w.backend, n);
    EXPECT_NEAR(w.backend->inner(rg, d), analytic, 1e-8 * std::abs(analytic));
  }
}

TEST(Sphere, CoarseMultiStartAgrees) {
  const MeridianGrid g = build_grid(1, 0, 1, 8, 8);
  const DiscreteForms f = assemble_forms(g, MaterialField::isotropic(g), 4.0);
  const SpectralSplit s = split(eigenpairs(f, 5), 0.0);
  const CurlCurlBackend b = make_backend(f, s, 0.0);
  SphereOptions o;
  for (int k = 0; k < 5; ++k) o.starts.emplace_back(s.eigenvectors.col(k));
  const SphereResult r = sphere_minimize(b, o);
  EXPECT_NEAR(r.point.energy, oracle::kC0p4_8, 1e-8 * oracle::kC0p4_8);
  // Every start ends on a level the brute-force oracle also finds.
  for (double en : r.start_energies) {
    const bool ground = std::abs(en - oracle::kC0p4_8) <= 1e-6 * en;
    const bool local = std::abs(en - oracle::kC0p4_8_local) <= 1e-6 * en;
    EXPECT_TRUE(ground || local) << en;
  }
  int at_ground = 0;
  for (double en : r.start_energies) at_ground += std::abs(en - oracle::kC0p4_8) <= 1e-6 * en;
  EXPECT_GE(at_ground, 4);
}

TEST(Sphere, ManifoldEquations) {
  const Window2 w;
  SphereOptions o;
  o.starts = {w.spec.eigenvectors.col(1), w.spec.eigenvectors.col(2)};
  const SphereResult r = sphere_minimize(*w.backend, o);
  const Vec g = w.backend->gradient(r.point.point);
  const double scale = std::max(1.0, r.point.energy);
  EXPECT_LT(std::abs(g.dot(r.point.point)), 1e-8 * scale);
  const Matrix& T = w.backend->tilde_basis();
  for (Eigen::Index k = 0; k < T.cols(); ++k)
    EXPECT_LT(std::abs(g.dot(T.col(k))), 1e-8 * scale);
  EXPECT_GT(r.point.energy, 0.0);
  EXPECT_LT(r.residual, 1e-6);
}

TEST(FiberSlack, SlackNonnegative) {
  const Window2 w;
  SphereOptions o;
  o.starts = {w.spec.eigenvectors.col(1)};
  const SphereResult r = sphere_minimize(*w.backend, o);
  const Vec& E = r.point.point;
  EXPECT_EQ(fiber_slack(*w.backend, E, 1.0, Vec::Zero(E.size())), 0.0);
  const double at0 = fiber_slack(*w.backend, E, 0.0, Vec::Zero(E.size()));
  EXPECT_NEAR(at0, (0.5 - 1.0 / w.forms.p) * power_sum(w.forms, E), 1e-8 * at0);

  const double tol = 1e-8;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ut(0.0, 3.0), uc(-1.0, 1.0);
  const Matrix& T = w.backend->tilde_basis();
  for (int i = 0; i < 1000; ++i) {
    Vec c(T.cols());
    for (auto& x : c) x = uc(rng);
    const double len = c.norm();
    if (len > 0) c *= 3.0 * std::abs(uc(rng)) / len;
    EXPECT_GE(fiber_slack(*w.backend, E, ut(rng), T * c), -10.0 * tol * std::max(1.0, r.point.energy));
  }
}

TEST(Multistart, CurlCurlFindsPairs) {
  const Window2 w;
  SphereOptions o;
  std::vector<Vec> starts = {w.spec.eigenvectors.col(1), w.spec.eigenvectors.col(1),
                             w.spec.eigenvectors.col(2)};
  const auto found = multistart_bound_states(*w.backend, starts, 1e-3, 1e300, o);
  ASSERT_GE(found.size(), 1u);
  for (std::size_t i = 1; i < found.size(); ++i) EXPECT_GE(found[i].energy, found[i - 1].energy);
  for (std::size_t i = 0; i < found.size(); ++i)
    for (std::size_t j = i + 1; j < found.size(); ++j) {
      const double d = std::min(w.backend->distance(found[i].field, found[j].field),
                                w.backend->distance(found[i].field, -found[j].field));
      EXPECT_GT(d, 1e-3 * w.backend->distance(found[i].field, Vec::Zero(w.forms.size())));
    }
}
