#include "nehari/curlcurl.hpp"

#include "nehari/error.hpp"

#include <cmath>
#include <string>

namespace nehari {

Flavor parse_flavor(std::string_view name) {
  if (name == "full") return Flavor::Full;
  if (name == "cp") return Flavor::CompactPerturbation;
  throw ConfigError("unknown flavor '" + std::string(name) + "' (expected full or cp)");
}

std::string_view flavor_name(Flavor flavor) {
  return flavor == Flavor::Full ? "full" : "cp";
}

CurlCurlBackend::CurlCurlBackend(std::shared_ptr<const DiscreteForms> forms,
                                 const SpectralSplit& split, double lambda, Flavor flavor)
    : forms_(std::move(forms)), lambda_(lambda), flavor_(flavor) {
  if (flavor_ == Flavor::CompactPerturbation) {
    lambda_ = 0.0;
    tilde_ = Matrix(forms_->size(), 0);
    return;
  }
  const int k = split.tilde_dim();
  tilde_ = split.eigenvectors.leftCols(k);
  for (int j = 0; j < k; ++j) tilde_.col(j) /= std::sqrt(split.eigenvalues[j]);
}

double CurlCurlBackend::value(const Vec& u) const { return evaluate_J(*forms_, lambda_, u); }

Vec CurlCurlBackend::gradient(const Vec& u) const { return evaluate_dJ(*forms_, lambda_, u); }

Vec CurlCurlBackend::hessian_apply(const Vec& u, const Vec& dir) const {
  return apply_d2J(*forms_, lambda_, u, dir);
}

double CurlCurlBackend::dual_norm(const Vec& g) const {
  return std::sqrt(g.cwiseAbs2().cwiseQuotient(forms_->mass).sum());
}

double CurlCurlBackend::distance(const Vec& a, const Vec& b) const {
  return std::sqrt(quad_M(*forms_, a - b));
}

std::optional<double> CurlCurlBackend::ray_guess(const Vec& u) const {
  const double q = quad_A(*forms_, u) + lambda_ * quad_M(*forms_, u);
  const double n = power_sum(*forms_, u);
  if (!(q > 0.0) || !(n > 0.0)) return std::nullopt;
  return std::pow(q / n, 1.0 / (forms_->p - 2.0));
}

namespace {

void check_split(const DiscreteForms& forms, const SpectralSplit& split, double lambda) {
  if (split.eigenvectors.rows() != forms.size())
    throw ConfigError("spectral split does not belong to these forms");
  if (!split.lambda || *split.lambda != lambda)
    throw ConfigError("spectral split was made for a different lambda");
}

}  // namespace

CurlCurlBackend make_backend(const DiscreteForms& forms, const SpectralSplit& split, double lambda,
                             Flavor flavor) {
  if (lambda > 0.0) throw ConfigError("backends require lambda <= 0");
  if (flavor == Flavor::Full) check_split(forms, split, lambda);
  return CurlCurlBackend(std::make_shared<const DiscreteForms>(forms), split, lambda, flavor);
}

CurlCurlBackend make_aniso_backend(const DiscreteForms& forms, const SpectralSplit& split,
                                   Flavor flavor) {
  if (flavor == Flavor::Full) check_split(forms, split, -1.0);
  return CurlCurlBackend(std::make_shared<const DiscreteForms>(forms), split, -1.0, flavor);
}

double residual(const DiscreteForms& forms, double lambda, const Vec& phi, bool include_power) {
  Vec g = include_power ? evaluate_dJ(forms, lambda, phi)
                        : Vec(forms.A * phi + lambda * forms.mass.cwiseProduct(phi));
  return std::sqrt(g.cwiseAbs2().cwiseQuotient(forms.mass).sum());
}

double residual(const CurlCurlBackend& backend, const Vec& phi) {
  return residual(backend.forms(), backend.lambda(), phi);
}

double brezis_lieb_defect(const DiscreteForms& forms, const Vec& phi0, const Vec& psi) {
  return std::abs(power_sum(forms, phi0 + psi) - power_sum(forms, psi) - power_sum(forms, phi0));
}

}  // namespace nehari
