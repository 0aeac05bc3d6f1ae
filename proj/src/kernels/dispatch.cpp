#include "nehari/kernels.hpp"

#ifdef NEHARI_WITH_AVX2
#include "avx2.hpp"
#endif

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace nehari::kernels {
namespace {

struct Table {
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*weighted_dot)(std::span<const double>, std::span<const double>,
                         std::span<const double>);
  double (*power_sum)(std::span<const double>, std::span<const double>, double);
  void (*power_gradient)(std::span<const double>, std::span<const double>, double,
                         std::span<double>);
  void (*power_curvature)(std::span<const double>, std::span<const double>, double,
                          std::span<double>);
};

constexpr Table kScalar{scalar::dot, scalar::weighted_dot, scalar::power_sum,
                        scalar::power_gradient, scalar::power_curvature};
#ifdef NEHARI_WITH_AVX2
constexpr Table kAvx2{avx2::dot, avx2::weighted_dot, avx2::power_sum, avx2::power_gradient,
                      avx2::power_curvature};
#endif

const Table& table_for(Isa isa) {
#ifdef NEHARI_WITH_AVX2
  if (isa == Isa::Avx2) return kAvx2;
#endif
  (void)isa;
  return kScalar;
}

// NEHARI_SIMD=scalar pins the reference kernels for a whole process.
Isa detect() {
  if (const char* env = std::getenv("NEHARI_SIMD"); env && std::strcmp(env, "scalar") == 0)
    return Isa::Scalar;
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

const Table& active() { return table_for(current().load(std::memory_order_relaxed)); }

}  // namespace

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(NEHARI_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("kernel set not supported on this CPU: " +
                                std::string(isa_name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) noexcept {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> x, std::span<const double> y) { return active().dot(x, y); }

double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y) {
  return active().weighted_dot(w, x, y);
}

double power_sum(std::span<const double> w, std::span<const double> x, double p) {
  return active().power_sum(w, x, p);
}

void power_gradient(std::span<const double> w, std::span<const double> x, double p,
                    std::span<double> out) {
  active().power_gradient(w, x, p, out);
}

void power_curvature(std::span<const double> w, std::span<const double> x, double p,
                     std::span<double> out) {
  active().power_curvature(w, x, p, out);
}

}  // namespace nehari::kernels
