#include "nehari/grid.hpp"

#include "nehari/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nehari {

Shape Shape::rectangle() { return Shape{}; }

Shape Shape::annulus(double r_inner) {
  std::ostringstream name;
  name << "annulus(r>" << r_inner << ")";
  return Shape{name.str(), [r_inner](double r, double) { return r > r_inner; }};
}

Shape Shape::ball(double z_center, double radius) {
  std::ostringstream name;
  name << "ball(z0=" << z_center << ",R=" << radius << ")";
  return Shape{name.str(), [z_center, radius](double r, double z) {
                 const double dz = z - z_center;
                 return r * r + dz * dz < radius * radius;
               }};
}

Shape Shape::custom(std::string name, std::function<bool(double, double)> inside) {
  return Shape{std::move(name), std::move(inside)};
}

MeridianGrid build_grid(double r_max, double z_min, double z_max, int n_r, int n_z,
                        const Shape& shape) {
  if (n_r < 4 || n_z < 4) throw ConfigError("grid needs n_r, n_z >= 4");
  if (!(r_max > 0.0) || !(z_max > z_min) || !std::isfinite(r_max) || !std::isfinite(z_min) ||
      !std::isfinite(z_max))
    throw ConfigError("grid extents must satisfy r_max > 0 and z_max > z_min");
  MeridianGrid g;
  g.r_max_ = r_max;
  g.z_min_ = z_min;
  g.z_max_ = z_max;
  g.n_r_ = n_r;
  g.n_z_ = n_z;
  g.shape_ = shape;
  g.index_unknowns();
  if (g.unknown_nodes_.empty())
    throw ConfigError("grid interior is empty for shape '" + shape.name + "'");
  return g;
}

void MeridianGrid::index_unknowns() {
  unknown_.assign(node_count(), -1);
  unknown_nodes_.clear();
  for (int i = 1; i < n_r_; ++i) {
    for (int j = 1; j < n_z_; ++j) {
      if (shape_.inside && !shape_.inside(r(i), z(j))) continue;
      const std::size_t k = node(i, j);
      unknown_[k] = static_cast<int>(unknown_nodes_.size());
      unknown_nodes_.push_back(k);
    }
  }
}

MeridianGrid MeridianGrid::dilated(double c) const {
  if (!(c > 0.0)) throw ConfigError("dilation factor must be positive");
  MeridianGrid g = *this;
  g.r_max_ = c * r_max_;
  g.z_min_ = c * z_min_;
  g.z_max_ = c * z_max_;
  if (shape_.inside) {
    auto inner = shape_.inside;
    g.shape_.inside = [inner, c](double r, double z) { return inner(r / c, z / c); };
    g.shape_.name = shape_.name + "*dilated";
  }
  // The mask is carried over unchanged so the unknown numbering stays identical.
  return g;
}

Eigen::VectorXd MeridianGrid::to_nodal(const Eigen::VectorXd& unknowns) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(node_count()));
  for (std::size_t k = 0; k < unknown_nodes_.size(); ++k)
    out[static_cast<Eigen::Index>(unknown_nodes_[k])] = unknowns[static_cast<Eigen::Index>(k)];
  return out;
}

Eigen::VectorXd MeridianGrid::to_unknowns(const Eigen::VectorXd& nodal) const {
  Eigen::VectorXd out(unknown_count());
  for (std::size_t k = 0; k < unknown_nodes_.size(); ++k)
    out[static_cast<Eigen::Index>(k)] = nodal[static_cast<Eigen::Index>(unknown_nodes_[k])];
  return out;
}

Eigen::VectorXd MeridianGrid::sample(const std::function<double(double, double)>& f) const {
  Eigen::VectorXd out(unknown_count());
  for (std::size_t k = 0; k < unknown_nodes_.size(); ++k) {
    const std::size_t n = unknown_nodes_[k];
    out[static_cast<Eigen::Index>(k)] = f(r(node_i(n)), z(node_j(n)));
  }
  return out;
}

MaterialField MaterialField::constant(const MeridianGrid& grid, double a_mu, double b_mu,
                                      double a_V, double a_Gamma) {
  const auto n = static_cast<Eigen::Index>(grid.node_count());
  MaterialField m{Eigen::VectorXd::Constant(n, a_mu), Eigen::VectorXd::Constant(n, b_mu),
                  Eigen::VectorXd::Constant(n, a_V), Eigen::VectorXd::Constant(n, a_Gamma)};
  m.validate(grid);
  return m;
}

void MaterialField::validate(const MeridianGrid& grid) const {
  const auto n = static_cast<Eigen::Index>(grid.node_count());
  const std::pair<const char*, const Eigen::VectorXd*> fields[] = {
      {"a_mu", &a_mu}, {"b_mu", &b_mu}, {"a_V", &a_V}, {"a_Gamma", &a_Gamma}};
  for (const auto& [name, v] : fields) {
    if (v->size() != n) {
      std::ostringstream msg;
      msg << "material '" << name << "' has " << v->size() << " samples, grid has " << n
          << " nodes";
      throw ConfigError(msg.str());
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!std::isfinite((*v)[k]) || (*v)[k] < kFloor) {
        std::ostringstream msg;
        msg << "material '" << name << "' sample " << (*v)[k] << " at node " << k
            << " is below the floor " << kFloor;
        throw ConfigError(msg.str());
      }
    }
  }
}

bool MaterialField::is_unit() const {
  auto unit = [](const Eigen::VectorXd& v) { return (v.array() == 1.0).all(); };
  return unit(a_mu) && unit(b_mu) && unit(a_V) && unit(a_Gamma);
}

double MaterialField::mu_inf() const { return std::max(a_mu.maxCoeff(), b_mu.maxCoeff()); }
double MaterialField::V_inf() const { return a_V.maxCoeff(); }
double MaterialField::Gamma_inf() const { return a_Gamma.maxCoeff(); }
double MaterialField::Gamma_0() const { return a_Gamma.minCoeff(); }

}  // namespace nehari
