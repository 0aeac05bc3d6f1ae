// Compiled with -mavx2 -mfma; only called after a runtime CPU check.

#include "avx2.hpp"

#include "nehari/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace nehari::kernels::avx2 {
namespace {

constexpr std::size_t kLanes = 4;
constexpr int kMaxIntegerExponent = 16;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline __m256d vabs(__m256d v) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign, v);
}

// |x|^n for a small nonnegative integer n by repeated squaring.
inline __m256d ipow(__m256d base, int n) {
  __m256d result = _mm256_set1_pd(1.0);
  while (n > 0) {
    if (n & 1) result = _mm256_mul_pd(result, base);
    base = _mm256_mul_pd(base, base);
    n >>= 1;
  }
  return result;
}

inline double ipow(double base, int n) {
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

// Exponent p-2 as a small integer, or -1 when p is not integral.
inline int integral_excess(double p) {
  const double e = p - 2.0;
  if (e < 0.0 || e > kMaxIntegerExponent || std::floor(e) != e) return -1;
  return static_cast<int>(e);
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i + kLanes),
                           _mm256_loadu_pd(y.data() + i + kLanes), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d wx = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(x.data() + i));
    acc = _mm256_fmadd_pd(wx, _mm256_loadu_pd(y.data() + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

double power_sum(std::span<const double> w, std::span<const double> x, double p) {
  const int m = integral_excess(p);
  if (m < 0) return scalar::power_sum(w, x, p);
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    const __m256d a = ipow(vabs(v), m);
    const __m256d sq = _mm256_mul_pd(v, v);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w.data() + i), a), sq, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * ipow(std::abs(x[i]), m) * x[i] * x[i];
  return s;
}

void power_gradient(std::span<const double> w, std::span<const double> x, double p,
                    std::span<double> out) {
  const int m = integral_excess(p);
  if (m < 0) return scalar::power_gradient(w, x, p, out);
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    const __m256d a = ipow(vabs(v), m);
    _mm256_storeu_pd(out.data() + i,
                     _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w.data() + i), a), v));
  }
  for (; i < n; ++i) out[i] = w[i] * ipow(std::abs(x[i]), m) * x[i];
}

void power_curvature(std::span<const double> w, std::span<const double> x, double p,
                     std::span<double> out) {
  const int m = integral_excess(p);
  if (m < 0) return scalar::power_curvature(w, x, p, out);
  const std::size_t n = x.size();
  const __m256d factor = _mm256_set1_pd(p - 1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d a = ipow(vabs(_mm256_loadu_pd(x.data() + i)), m);
    _mm256_storeu_pd(out.data() + i,
                     _mm256_mul_pd(_mm256_mul_pd(factor, _mm256_loadu_pd(w.data() + i)), a));
  }
  for (; i < n; ++i) out[i] = (p - 1.0) * w[i] * ipow(std::abs(x[i]), m);
}

}  // namespace nehari::kernels::avx2
