#pragma once

// Abstract functional J(u) = 1/2 |u+|^2 - I(u) over a finite-dimensional
// splitting X = X+ (+) X~, where X~ is finite dimensional and |.| is the norm
// of a fixed inner product for which X+ and X~ are orthogonal.
//
// Vectors live in one ambient coordinate space. Derivatives are returned as
// covectors (plain partial derivatives); riesz() turns a covector into its
// representative in X+.

#include <Eigen/Core>

#include <optional>

namespace nehari {

using Vec = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class FunctionalBackend {
 public:
  virtual ~FunctionalBackend() = default;

  virtual Eigen::Index dimension() const = 0;

  /// Gram operator G of the inner product, <a, b> = a' G b.
  virtual Vec gram_apply(const Vec& v) const = 0;
  /// G^{-1} g
  virtual Vec gram_solve(const Vec& g) const = 0;
  /// Inner-orthonormal basis of X~ (may have zero columns).
  virtual const Matrix& tilde_basis() const = 0;

  virtual double value(const Vec& u) const = 0;
  virtual Vec gradient(const Vec& u) const = 0;
  virtual Vec hessian_apply(const Vec& u, const Vec& dir) const = 0;

  /// Norm used to report the full Euler-Lagrange residual |J'(u)|.
  virtual double dual_norm(const Vec& g) const = 0;
  /// Distance used to tell critical points apart.
  virtual double distance(const Vec& a, const Vec& b) const = 0;
  virtual bool is_even() const { return true; }
  /// Optional starting value of t for the ray t -> J(t u), u in X+.
  virtual std::optional<double> ray_guess(const Vec& /*u*/) const { return std::nullopt; }

  double inner(const Vec& a, const Vec& b) const { return a.dot(gram_apply(b)); }
  double norm(const Vec& a) const;
  /// Orthogonal projection onto X+.
  Vec project_plus(const Vec& v) const;
  /// Representative in X+ of the restriction of g to X+.
  Vec riesz(const Vec& g) const { return project_plus(gram_solve(g)); }

  /// I(u) = 1/2 |u+|^2 - J(u) and its covector derivative.
  double nonlinear_value(const Vec& u) const;
  Vec nonlinear_gradient(const Vec& u) const;
};

/// X = R^2 with the Euclidean inner product, X+ = span e1, X~ = span e2 and
/// I(u) = |u|^4 / 4. The ground state is +-e1 at level 1/4.
class QuarticToyBackend final : public FunctionalBackend {
 public:
  QuarticToyBackend();

  Eigen::Index dimension() const override { return 2; }
  Vec gram_apply(const Vec& v) const override { return v; }
  Vec gram_solve(const Vec& g) const override { return g; }
  const Matrix& tilde_basis() const override { return tilde_; }
  double value(const Vec& u) const override;
  Vec gradient(const Vec& u) const override;
  Vec hessian_apply(const Vec& u, const Vec& dir) const override;
  double dual_norm(const Vec& g) const override { return g.norm(); }
  double distance(const Vec& a, const Vec& b) const override { return (a - b).norm(); }

 private:
  Matrix tilde_;
};

}  // namespace nehari
