#pragma once

// Run configuration (INI with sections), material tables and CSV/JSON output.

#include "nehari/forms.hpp"
#include "nehari/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nehari {

struct DomainConfig {
  double r_max = 1.0;
  double z_min = 0.0;
  double z_max = 1.0;
  int n_r = 32;
  int n_z = 32;
  std::string shape = "rectangle";  // rectangle | annulus | ball
  double r_inner = 0.5;
  double ball_z = 0.5;
  double ball_radius = 0.5;
};

struct MaterialsConfig {
  double a_mu = 1.0;
  double b_mu = 1.0;
  double a_V = 1.0;
  double a_Gamma = 1.0;
  // Optional per-node tables, one value per node in row-major (i, j) order.
  std::string a_mu_csv;
  std::string b_mu_csv;
  std::string a_V_csv;
  std::string a_Gamma_csv;
};

struct ProblemConfig {
  double p = 6.0;
  double lambda = 0.0;
  std::vector<double> lambdas;  // explicit sweep grid
  double lambda_min = 0.0;      // else lambda_count points in (lambda_min, lambda_max]
  double lambda_max = 0.0;
  int lambda_count = 0;
  std::string flavor = "full";  // full | cp
  int k = 6;
  int nu = 1;
  std::vector<double> eps = {1.0, 0.5, 0.25};
  double z0 = 0.5;
  std::string bubble_field = "profile";  // profile | ground
  std::vector<double> sequence;
};

struct SolverConfig {
  double tol = 1e-8;
  int max_iter = 5000;
  int starts = 3;
  int random_starts = 0;
  bool concentration_starts = true;  // axis bumps, see concentration_starts()
  std::uint64_t seed = 0;
  double eps_width = 1e-3;
  double dedup_tol = 1e-3;
};

struct OutputConfig {
  std::string dir = "out";
};

struct RunConfig {
  DomainConfig domain;
  MaterialsConfig materials;
  ProblemConfig problem;
  SolverConfig solver;
  OutputConfig output;
};

/// Throws ConfigError naming the offending key.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);
/// Canonical INI text of the resolved configuration (all defaults included).
std::string render_config(const RunConfig& cfg);

MeridianGrid make_grid(const DomainConfig& cfg);
MaterialField make_materials(const MeridianGrid& grid, const MaterialsConfig& cfg,
                             const std::filesystem::path& base_dir = {});
/// One value per node, optional header line.
Eigen::VectorXd read_node_table(const std::filesystem::path& path, std::size_t nodes);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// CSV with columns r, z, value for every unknown.
void write_field_csv(const std::filesystem::path& path, const MeridianGrid& grid, const Vec& phi);
/// CSV with columns i, j, r, z, interior for every node.
void write_grid_csv(const std::filesystem::path& path, const MeridianGrid& grid);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nehari
