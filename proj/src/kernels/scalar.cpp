#include "nehari/kernels.hpp"

#include <cmath>
#include <cstddef>

namespace nehari::kernels::scalar {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * y[i];
  return s;
}

double power_sum(std::span<const double> w, std::span<const double> x, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(std::abs(x[i]), p);
  return s;
}

void power_gradient(std::span<const double> w, std::span<const double> x, double p,
                    std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = w[i] * std::pow(std::abs(x[i]), p - 2.0) * x[i];
}

void power_curvature(std::span<const double> w, std::span<const double> x, double p,
                     std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = (p - 1.0) * w[i] * std::pow(std::abs(x[i]), p - 2.0);
}

}  // namespace nehari::kernels::scalar
