#pragma once

// Data-parallel inner loops used by the energy evaluation. Every kernel has a
// scalar reference version and, where the CPU allows, an AVX2/FMA version.
// The active set is picked once at runtime; tests may force either set.

#include <span>
#include <string_view>

namespace nehari::kernels {

enum class Isa { Scalar, Avx2 };

bool isa_supported(Isa isa) noexcept;
Isa active_isa() noexcept;
/// Throws std::invalid_argument if the requested set is not available.
void force_isa(Isa isa);
std::string_view isa_name(Isa isa) noexcept;

double dot(std::span<const double> x, std::span<const double> y);
/// sum_i w_i x_i y_i
double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y);
/// sum_i w_i |x_i|^p
double power_sum(std::span<const double> w, std::span<const double> x, double p);
/// out_i = w_i |x_i|^(p-2) x_i
void power_gradient(std::span<const double> w, std::span<const double> x, double p,
                    std::span<double> out);
/// out_i = (p-1) w_i |x_i|^(p-2)
void power_curvature(std::span<const double> w, std::span<const double> x, double p,
                     std::span<double> out);

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y);
double power_sum(std::span<const double> w, std::span<const double> x, double p);
void power_gradient(std::span<const double> w, std::span<const double> x, double p,
                    std::span<double> out);
void power_curvature(std::span<const double> w, std::span<const double> x, double p,
                     std::span<double> out);
}  // namespace scalar

}  // namespace nehari::kernels
