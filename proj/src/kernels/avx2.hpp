#pragma once

#include <span>

namespace nehari::kernels::avx2 {

double dot(std::span<const double> x, std::span<const double> y);
double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y);
double power_sum(std::span<const double> w, std::span<const double> x, double p);
void power_gradient(std::span<const double> w, std::span<const double> x, double p,
                    std::span<double> out);
void power_curvature(std::span<const double> w, std::span<const double> x, double p,
                     std::span<double> out);

}  // namespace nehari::kernels::avx2
