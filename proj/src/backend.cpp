#include "nehari/backend.hpp"

#include <cmath>

namespace nehari {

double FunctionalBackend::norm(const Vec& a) const { return std::sqrt(inner(a, a)); }

Vec FunctionalBackend::project_plus(const Vec& v) const {
  const Matrix& T = tilde_basis();
  if (T.cols() == 0) return v;
  const Vec coeff = T.transpose() * gram_apply(v);
  return v - T * coeff;
}

double FunctionalBackend::nonlinear_value(const Vec& u) const {
  const Vec plus = project_plus(u);
  return 0.5 * inner(plus, plus) - value(u);
}

Vec FunctionalBackend::nonlinear_gradient(const Vec& u) const {
  return gram_apply(project_plus(u)) - gradient(u);
}

QuarticToyBackend::QuarticToyBackend() : tilde_(Matrix::Zero(2, 1)) { tilde_(1, 0) = 1.0; }

double QuarticToyBackend::value(const Vec& u) const {
  const double n2 = u.squaredNorm();
  return 0.5 * u[0] * u[0] - 0.25 * n2 * n2;
}

Vec QuarticToyBackend::gradient(const Vec& u) const {
  Vec g = -u.squaredNorm() * u;
  g[0] += u[0];
  return g;
}

Vec QuarticToyBackend::hessian_apply(const Vec& u, const Vec& dir) const {
  Vec h = -u.squaredNorm() * dir - 2.0 * u.dot(dir) * u;
  h[0] += dir[0];
  return h;
}

}  // namespace nehari
