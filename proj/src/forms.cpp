#include "nehari/forms.hpp"

#include "nehari/error.hpp"
#include "nehari/kernels.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace nehari {
namespace {

std::span<const double> view(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void require_finite(const Vec& phi) {
  if (!phi.allFinite()) throw NumericError("field contains non-finite entries");
}

}  // namespace

StiffnessSolver::StiffnessSolver(const SparseMatrix& A) {
  ldlt_.compute(A);
  if (ldlt_.info() != Eigen::Success)
    throw NumericError("factorization of the curl-energy form failed");
}

Vec StiffnessSolver::solve(const Vec& rhs) const { return ldlt_.solve(rhs); }

DiscreteForms assemble_forms(const MeridianGrid& grid, const MaterialField& materials,
                             double p) {
  if (!(p > 2.0 && p <= 6.0)) throw ConfigError("exponent p must lie in (2, 6]");
  materials.validate(grid);

  const double two_pi = 2.0 * std::numbers::pi;
  const double hr = grid.h_r();
  const double hz = grid.h_z();
  const int nr = grid.n_r();
  const int nz = grid.n_z();
  const auto nodes = static_cast<Eigen::Index>(grid.node_count());

  // Flux form: every half-node carries one difference quotient q = sum_a c_a phi_a
  // and contributes weight * q^2 to the energy. Only edges touching an unknown
  // matter; Dirichlet nodes are zero.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nodes) * 8);
  auto add_edge = [&](std::size_t a, std::size_t b, double ca, double cb, double weight) {
    if (grid.unknown_of_node(a) < 0 && grid.unknown_of_node(b) < 0) return;
    const double aa = weight * ca * ca;
    const double bb = weight * cb * cb;
    const double ab = weight * ca * cb;
    triplets.emplace_back(static_cast<int>(a), static_cast<int>(a), aa);
    triplets.emplace_back(static_cast<int>(b), static_cast<int>(b), bb);
    triplets.emplace_back(static_cast<int>(a), static_cast<int>(b), ab);
    triplets.emplace_back(static_cast<int>(b), static_cast<int>(a), ab);
  };

  // z-component of the curl, (1/r) d_r (r phi), at (r_{i+1/2}, z_j), weighted by 1/b.
  for (int i = 0; i < nr; ++i) {
    const double r0 = grid.r(i);
    const double r1 = grid.r(i + 1);
    const double rh = 0.5 * (r0 + r1);
    for (int j = 0; j <= nz; ++j) {
      const std::size_t a = grid.node(i, j);
      const std::size_t b = grid.node(i + 1, j);
      const double inv_b = 0.5 * (1.0 / materials.b_mu[static_cast<Eigen::Index>(a)] +
                                  1.0 / materials.b_mu[static_cast<Eigen::Index>(b)]);
      add_edge(a, b, -r0 / (rh * hr), r1 / (rh * hr), two_pi * inv_b * rh * hr * hz);
    }
  }
  // r-component of the curl, -d_z phi, at (r_i, z_{j+1/2}), weighted by 1/a.
  for (int i = 1; i <= nr; ++i) {
    const double ri = grid.r(i);
    for (int j = 0; j < nz; ++j) {
      const std::size_t a = grid.node(i, j);
      const std::size_t b = grid.node(i, j + 1);
      const double inv_a = 0.5 * (1.0 / materials.a_mu[static_cast<Eigen::Index>(a)] +
                                  1.0 / materials.a_mu[static_cast<Eigen::Index>(b)]);
      add_edge(a, b, -1.0 / hz, 1.0 / hz, two_pi * inv_a * ri * hr * hz);
    }
  }

  SparseMatrix K(nodes, nodes);
  K.setFromTriplets(triplets.begin(), triplets.end());

  const int n = grid.unknown_count();
  SparseMatrix P(n, nodes);
  {
    std::vector<Eigen::Triplet<double>> sel;
    sel.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
      sel.emplace_back(k, static_cast<int>(grid.unknown_nodes()[static_cast<std::size_t>(k)]),
                       1.0);
    P.setFromTriplets(sel.begin(), sel.end());
  }

  DiscreteForms f{grid, materials, p, {}, {}, {}, {}, {}, 0.0, nullptr};
  f.A_trace = P * K;
  f.A = SparseMatrix(f.A_trace * P.transpose());
  f.A.makeCompressed();

  f.mass.resize(n);
  f.weights.resize(n);
  f.volume.resize(n);
  double measure = 0.0;
  for (int k = 0; k < n; ++k) {
    const std::size_t node = grid.unknown_nodes()[static_cast<std::size_t>(k)];
    const auto nk = static_cast<Eigen::Index>(node);
    const double vol = two_pi * grid.r(grid.node_i(node)) * hr * hz;
    f.volume[k] = vol;
    f.mass[k] = materials.a_V[nk] * vol;
    f.weights[k] = std::pow(materials.a_Gamma[nk], p) * vol;
    measure += vol;
  }
  f.mu_omega = measure;
  f.stiffness = std::make_shared<const StiffnessSolver>(f.A);
  return f;
}

double quad_A(const DiscreteForms& forms, const Vec& phi) {
  const Vec Aphi = forms.A * phi;
  return kernels::dot(view(phi), view(Aphi));
}

double quad_M(const DiscreteForms& forms, const Vec& phi) {
  return kernels::weighted_dot(view(forms.mass), view(phi), view(phi));
}

double inner_M(const DiscreteForms& forms, const Vec& a, const Vec& b) {
  return kernels::weighted_dot(view(forms.mass), view(a), view(b));
}

double power_sum(const Vec& weights, const Vec& phi, double q) {
  return kernels::power_sum(view(weights), view(phi), q);
}

double power_sum(const DiscreteForms& forms, const Vec& phi) {
  return power_sum(forms.weights, phi, forms.p);
}

double lp_norm(const DiscreteForms& forms, const Vec& phi, double q) {
  return std::pow(power_sum(forms.volume, phi, q), 1.0 / q);
}

double evaluate_J(const DiscreteForms& forms, double lambda, const Vec& phi) {
  require_finite(phi);
  return 0.5 * quad_A(forms, phi) + 0.5 * lambda * quad_M(forms, phi) -
         power_sum(forms, phi) / forms.p;
}

Vec evaluate_dJ(const DiscreteForms& forms, double lambda, const Vec& phi) {
  require_finite(phi);
  Vec nonlinear(phi.size());
  kernels::power_gradient(view(forms.weights), view(phi), forms.p,
                          {nonlinear.data(), static_cast<std::size_t>(nonlinear.size())});
  Vec g = forms.A * phi;
  g.array() += lambda * forms.mass.array() * phi.array() - nonlinear.array();
  return g;
}

Vec apply_d2J(const DiscreteForms& forms, double lambda, const Vec& phi, const Vec& dir) {
  require_finite(phi);
  Vec curvature(phi.size());
  kernels::power_curvature(view(forms.weights), view(phi), forms.p,
                           {curvature.data(), static_cast<std::size_t>(curvature.size())});
  Vec h = forms.A * dir;
  h.array() += (lambda * forms.mass.array() - curvature.array()) * dir.array();
  return h;
}

Vec apply_with_trace(const DiscreteForms& forms, const Vec& nodal) {
  if (nodal.size() != static_cast<Eigen::Index>(forms.grid.node_count()))
    throw ConfigError("nodal field size does not match the grid");
  return forms.A_trace * nodal;
}

}  // namespace nehari
