#pragma once

// Discrete quadratic forms and nonlinear quadrature realizing the energy
//
//   J(phi) = 1/2 phi'A phi + lambda/2 phi'M phi - 1/p sum_i w_i |phi_i|^p
//
// for azimuthal fields E = phi(r, z) e_theta. A is the curl energy in flux
// form, M the V-weighted lumped mass, w the Gamma^p-weighted nodal volumes.
// The 2*pi meridian factor is carried in every form so values compare
// directly with integrals over the 3D domain.

#include "nehari/grid.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>

namespace nehari {

using Vec = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

class StiffnessSolver {
 public:
  explicit StiffnessSolver(const SparseMatrix& A);
  Vec solve(const Vec& rhs) const;

 private:
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

struct DiscreteForms {
  MeridianGrid grid;
  MaterialField materials;
  double p = 6.0;

  SparseMatrix A;            ///< unknowns x unknowns, symmetric positive definite
  SparseMatrix A_trace;      ///< unknowns x all nodes; acts on fields with boundary data
  Vec mass;                  ///< diagonal of M: 2 pi a_V r h_r h_z
  Vec weights;               ///< w: 2 pi r h_r h_z a_Gamma^p
  Vec volume;                ///< 2 pi r h_r h_z (unit quadrature)
  double mu_omega = 0.0;     ///< measure of the 3D domain, sum of volume
  std::shared_ptr<const StiffnessSolver> stiffness;

  Eigen::Index size() const noexcept { return mass.size(); }
  /// A^{-1} g
  Vec solve_stiffness(const Vec& g) const { return stiffness->solve(g); }
};

/// Throws ConfigError for p outside (2, 6] or coefficients below the floor.
DiscreteForms assemble_forms(const MeridianGrid& grid, const MaterialField& materials,
                             double p);

double quad_A(const DiscreteForms& forms, const Vec& phi);
double quad_M(const DiscreteForms& forms, const Vec& phi);
double inner_M(const DiscreteForms& forms, const Vec& a, const Vec& b);
/// sum_i weights_i |phi_i|^q  (q defaults to the forms' exponent)
double power_sum(const DiscreteForms& forms, const Vec& phi);
double power_sum(const Vec& weights, const Vec& phi, double q);
/// (sum_i volume_i |phi_i|^q)^(1/q)
double lp_norm(const DiscreteForms& forms, const Vec& phi, double q);

/// Energy and its gradient; gradient is the exact derivative of the value.
/// Throws NumericError on non-finite input.
double evaluate_J(const DiscreteForms& forms, double lambda, const Vec& phi);
Vec evaluate_dJ(const DiscreteForms& forms, double lambda, const Vec& phi);
/// Second derivative applied to a direction.
Vec apply_d2J(const DiscreteForms& forms, double lambda, const Vec& phi, const Vec& dir);

/// Interior rows of the curl-energy operator applied to a nodal field that
/// may carry nonzero boundary values.
Vec apply_with_trace(const DiscreteForms& forms, const Vec& nodal);

}  // namespace nehari
