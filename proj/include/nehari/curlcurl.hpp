#pragma once

// The curl-curl energy as a FunctionalBackend. With the splitting from
// SpectralSplit,
//
//   J(phi) = 1/2 |phi+|_A^2 - I(phi),
//   I(phi) = -1/2 |phi~|_A^2 - lambda/2 phi'M phi + 1/p sum w |phi|^p.
//
// The anisotropic functional is the same construction on (A_mu, M_V) with
// lambda = -1, so the negative space collects eigenvalues <= 1.

#include "nehari/backend.hpp"
#include "nehari/forms.hpp"
#include "nehari/spectral.hpp"

#include <memory>
#include <string_view>

namespace nehari {

enum class Flavor {
  Full,                ///< J_lambda with the spectral splitting
  CompactPerturbation  ///< lambda-independent J_0, X~ = {0}
};

Flavor parse_flavor(std::string_view name);
std::string_view flavor_name(Flavor flavor);

class CurlCurlBackend final : public FunctionalBackend {
 public:
  CurlCurlBackend(std::shared_ptr<const DiscreteForms> forms, const SpectralSplit& split,
                  double lambda, Flavor flavor);

  const DiscreteForms& forms() const noexcept { return *forms_; }
  /// Coefficient of the mass term actually used (0 for the cp flavor).
  double lambda() const noexcept { return lambda_; }
  Flavor flavor() const noexcept { return flavor_; }

  Eigen::Index dimension() const override { return forms_->size(); }
  Vec gram_apply(const Vec& v) const override { return forms_->A * v; }
  Vec gram_solve(const Vec& g) const override { return forms_->solve_stiffness(g); }
  const Matrix& tilde_basis() const override { return tilde_; }
  double value(const Vec& u) const override;
  Vec gradient(const Vec& u) const override;
  Vec hessian_apply(const Vec& u, const Vec& dir) const override;
  double dual_norm(const Vec& g) const override;
  double distance(const Vec& a, const Vec& b) const override;
  std::optional<double> ray_guess(const Vec& u) const override;

 private:
  std::shared_ptr<const DiscreteForms> forms_;
  double lambda_;
  Flavor flavor_;
  Matrix tilde_;  // A-orthonormal
};

/// Isotropic backend. Throws ConfigError for lambda > 0 and when the split was
/// made for a different lambda.
CurlCurlBackend make_backend(const DiscreteForms& forms, const SpectralSplit& split, double lambda,
                             Flavor flavor = Flavor::Full);

/// Anisotropic backend; the split must be made at lambda = -1.
CurlCurlBackend make_aniso_backend(const DiscreteForms& forms, const SpectralSplit& split,
                                   Flavor flavor = Flavor::Full);

/// |A phi + lambda M phi - w |phi|^{p-2} phi|_{M^{-1}}; the power term can be
/// left out to check linear eigen-equations.
double residual(const DiscreteForms& forms, double lambda, const Vec& phi,
                bool include_power = true);
double residual(const CurlCurlBackend& backend, const Vec& phi);

/// |sum w|phi0 + psi|^p - sum w|psi|^p - sum w|phi0|^p|
double brezis_lieb_defect(const DiscreteForms& forms, const Vec& phi0, const Vec& psi);

}  // namespace nehari
