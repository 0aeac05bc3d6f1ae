#pragma once

// Meridian (r, z) half-plane discretization of a rotationally invariant
// domain, and the material coefficients sampled on it.

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace nehari {

/// Region selector in the meridian plane. An empty predicate means the whole
/// rectangle.
struct Shape {
  std::string name = "rectangle";
  std::function<bool(double r, double z)> inside;

  static Shape rectangle();
  /// Keeps r > r_inner (a hollow cylinder).
  static Shape annulus(double r_inner);
  /// Meridian of a ball centred on the axis at z_center.
  static Shape ball(double z_center, double radius);
  static Shape custom(std::string name, std::function<bool(double, double)> inside);
};

/// Uniform tensor grid on [0, r_max] x [z_min, z_max]. Node (i, j) sits at
/// r_i = i h_r, z_j = z_min + j h_z with i = 0..n_r, j = 0..n_z. The axis and
/// the outer boundary are always Dirichlet (masked out).
class MeridianGrid {
 public:
  int n_r() const noexcept { return n_r_; }
  int n_z() const noexcept { return n_z_; }
  double r_max() const noexcept { return r_max_; }
  double z_min() const noexcept { return z_min_; }
  double z_max() const noexcept { return z_max_; }
  double h_r() const noexcept { return r_max_ / n_r_; }
  double h_z() const noexcept { return (z_max_ - z_min_) / n_z_; }
  double r(int i) const noexcept { return i * h_r(); }
  double z(int j) const noexcept { return z_min_ + j * h_z(); }
  const Shape& shape() const noexcept { return shape_; }

  std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(n_r_ + 1) * static_cast<std::size_t>(n_z_ + 1);
  }
  /// Row-major node index in (i, j).
  std::size_t node(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_z_ + 1) +
           static_cast<std::size_t>(j);
  }
  bool interior(int i, int j) const noexcept { return unknown_[node(i, j)] >= 0; }
  /// Unknown index of a node, -1 for Dirichlet nodes.
  int unknown(int i, int j) const noexcept { return unknown_[node(i, j)]; }
  int unknown_of_node(std::size_t node) const noexcept { return unknown_[node]; }
  int unknown_count() const noexcept { return static_cast<int>(unknown_nodes_.size()); }
  /// Node index of each unknown, increasing.
  const std::vector<std::size_t>& unknown_nodes() const noexcept { return unknown_nodes_; }
  int node_i(std::size_t node) const noexcept { return static_cast<int>(node / (n_z_ + 1)); }
  int node_j(std::size_t node) const noexcept { return static_cast<int>(node % (n_z_ + 1)); }

  /// Same grid with every length multiplied by c (about r = 0, z = 0).
  MeridianGrid dilated(double c) const;

  /// Nodal values of an unknown vector; Dirichlet nodes get zero.
  Eigen::VectorXd to_nodal(const Eigen::VectorXd& unknowns) const;
  /// Interior entries of a nodal vector.
  Eigen::VectorXd to_unknowns(const Eigen::VectorXd& nodal) const;
  /// Samples f(r, z) at the unknowns.
  Eigen::VectorXd sample(const std::function<double(double, double)>& f) const;

  friend MeridianGrid build_grid(double r_max, double z_min, double z_max, int n_r, int n_z,
                                 const Shape& shape);

 private:
  MeridianGrid() = default;
  void index_unknowns();

  double r_max_ = 0.0;
  double z_min_ = 0.0;
  double z_max_ = 0.0;
  int n_r_ = 0;
  int n_z_ = 0;
  Shape shape_;
  std::vector<int> unknown_;
  std::vector<std::size_t> unknown_nodes_;
};

/// Throws ConfigError for n < 4, nonpositive extents, or an empty interior.
MeridianGrid build_grid(double r_max, double z_min, double z_max, int n_r, int n_z,
                        const Shape& shape = Shape::rectangle());

/// Coefficients of diag(a, a, b) permeability, scalar permittivity term and
/// nonlinearity strength, one sample per grid node.
struct MaterialField {
  static constexpr double kFloor = 1e-8;

  Eigen::VectorXd a_mu;
  Eigen::VectorXd b_mu;
  Eigen::VectorXd a_V;
  Eigen::VectorXd a_Gamma;

  static MaterialField constant(const MeridianGrid& grid, double a_mu, double b_mu, double a_V,
                                double a_Gamma);
  static MaterialField isotropic(const MeridianGrid& grid) {
    return constant(grid, 1.0, 1.0, 1.0, 1.0);
  }

  /// Throws ConfigError if sizes mismatch the grid or any sample is below kFloor.
  void validate(const MeridianGrid& grid) const;
  bool is_unit() const;

  double mu_inf() const;     ///< max(|a_mu|_inf, |b_mu|_inf)
  double V_inf() const;      ///< |a_V|_inf
  double Gamma_inf() const;  ///< |a_Gamma|_inf
  double Gamma_0() const;    ///< min a_Gamma
};

}  // namespace nehari
