#include "nehari/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace k = nehari::kernels;

namespace {

struct Data {
  std::vector<double> w, x, y;
};

Data make_data(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 2.0);
  std::normal_distribution<double> g;
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.w.push_back(pos(rng));
    d.x.push_back(g(rng));
    d.y.push_back(g(rng));
  }
  return d;
}

class KernelIsa : public ::testing::Test {
 protected:
  void SetUp() override { saved_ = k::active_isa(); }
  void TearDown() override { k::force_isa(saved_); }

 private:
  k::Isa saved_ = k::Isa::Scalar;
};

const double kPowers[] = {2.5, 3.0, 4.0, 6.0};

}  // namespace

TEST_F(KernelIsa, ScalarAlwaysAvailable) {
  EXPECT_TRUE(k::isa_supported(k::Isa::Scalar));
  EXPECT_NO_THROW(k::force_isa(k::Isa::Scalar));
  EXPECT_EQ(k::active_isa(), k::Isa::Scalar);
  EXPECT_EQ(k::isa_name(k::Isa::Scalar), "scalar");
}

TEST_F(KernelIsa, ForcedScalarIsBitwiseReference) {
  k::force_isa(k::Isa::Scalar);
  const Data d = make_data(103, 1);
  EXPECT_EQ(k::dot(d.x, d.y), k::scalar::dot(d.x, d.y));
  EXPECT_EQ(k::weighted_dot(d.w, d.x, d.y), k::scalar::weighted_dot(d.w, d.x, d.y));
  for (double p : kPowers) EXPECT_EQ(k::power_sum(d.w, d.x, p), k::scalar::power_sum(d.w, d.x, p));
}

TEST_F(KernelIsa, Avx2MatchesScalarOnReductions) {
  if (!k::isa_supported(k::Isa::Avx2)) GTEST_SKIP() << "AVX2 not available";
  k::force_isa(k::Isa::Avx2);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 16u, 17u, 31u, 1000u, 4099u}) {
    const Data d = make_data(n, static_cast<unsigned>(n) + 7);
    double absdot = 0.0, absw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      absdot += std::abs(d.x[i] * d.y[i]);
      absw += std::abs(d.w[i] * d.x[i] * d.y[i]);
    }
    EXPECT_NEAR(k::dot(d.x, d.y), k::scalar::dot(d.x, d.y), 1e-14 * (1.0 + absdot)) << n;
    EXPECT_NEAR(k::weighted_dot(d.w, d.x, d.y), k::scalar::weighted_dot(d.w, d.x, d.y),
                1e-14 * (1.0 + absw))
        << n;
    for (double p : kPowers) {
      const double ref = k::scalar::power_sum(d.w, d.x, p);
      EXPECT_NEAR(k::power_sum(d.w, d.x, p), ref, 1e-13 * (1.0 + ref)) << n << " p=" << p;
    }
  }
}

TEST_F(KernelIsa, Avx2MatchesScalarElementwise) {
  if (!k::isa_supported(k::Isa::Avx2)) GTEST_SKIP() << "AVX2 not available";
  k::force_isa(k::Isa::Avx2);
  for (std::size_t n : {1u, 5u, 12u, 257u}) {
    const Data d = make_data(n, static_cast<unsigned>(n));
    for (double p : kPowers) {
      std::vector<double> a(n), b(n), c(n), e(n);
      k::power_gradient(d.w, d.x, p, a);
      k::scalar::power_gradient(d.w, d.x, p, b);
      k::power_curvature(d.w, d.x, p, c);
      k::scalar::power_curvature(d.w, d.x, p, e);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(a[i], b[i], 1e-14 * (1.0 + std::abs(b[i])));
        EXPECT_NEAR(c[i], e[i], 1e-14 * (1.0 + std::abs(e[i])));
      }
    }
  }
}

TEST_F(KernelIsa, ZeroAndSignHandling) {
  for (k::Isa isa : {k::Isa::Scalar, k::Isa::Avx2}) {
    if (!k::isa_supported(isa)) continue;
    k::force_isa(isa);
    const std::vector<double> w(9, 1.0);
    std::vector<double> x = {0, -1, 1, -2, 2, 0, -0.5, 0.5, 0};
    EXPECT_DOUBLE_EQ(k::power_sum(w, x, 4.0), 0 + 1 + 1 + 16 + 16 + 0 + 0.0625 + 0.0625 + 0);
    std::vector<double> g(9);
    k::power_gradient(w, x, 4.0, g);
    EXPECT_DOUBLE_EQ(g[3], -8.0);
    EXPECT_DOUBLE_EQ(g[4], 8.0);
    EXPECT_EQ(g[0], 0.0);
  }
}
