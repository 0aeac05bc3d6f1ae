#include "nehari/io.hpp"

#include "nehari/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nehari {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"domain", {"r_max", "z_min", "z_max", "n_r", "n_z", "shape", "r_inner", "ball_z",
                  "ball_radius"}},
      {"materials", {"a_mu", "b_mu", "a_V", "a_Gamma", "a_mu_csv", "b_mu_csv", "a_V_csv",
                     "a_Gamma_csv"}},
      {"problem", {"p", "lambda", "lambdas", "lambda_min", "lambda_max", "lambda_count", "flavor",
                   "k", "nu", "eps", "z0", "bubble_field", "sequence"}},
      {"solver", {"tol", "max_iter", "starts", "random_starts", "concentration_starts", "seed",
                  "eps_width", "dedup_tol"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("config key '" + key + "': expected a number, got '" + raw + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("config key '" + key + "': expected an integer, got '" + raw + "'");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double(key, item));
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  void number(const char* path, double& out) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.')))
      out = to_double(path, *v);
  }
  void integer(const char* path, int& out) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.')))
      out = static_cast<int>(to_integer(path, *v));
  }
  void seed(const char* path, std::uint64_t& out) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'))) {
      const long long s = to_integer(path, *v);
      if (s < 0) throw ConfigError(std::string("config key '") + path + "' must be >= 0");
      out = static_cast<std::uint64_t>(s);
    }
  }
  void flag(const char* path, bool& out) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'))) {
      const std::string s = trim(*v);
      if (s == "true" || s == "1")
        out = true;
      else if (s == "false" || s == "0")
        out = false;
      else
        throw ConfigError(std::string("config key '") + path + "': expected true or false, got '" +
                          *v + "'");
    }
  }
  void text(const char* path, std::string& out) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'))) out = trim(*v);
  }
  void list(const char* path, std::vector<double>& out) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.')))
      out = to_list(path, *v);
  }

 private:
  const pt::ptree& tree_;
};

void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.domain.shape != "rectangle" && c.domain.shape != "annulus" && c.domain.shape != "ball")
    fail("domain.shape must be rectangle, annulus or ball");
  if (c.domain.n_r < 2 || c.domain.n_z < 2) fail("domain.n_r and domain.n_z must be >= 2");
  if (!(c.problem.p > 2.0 && c.problem.p <= 6.0)) fail("problem.p must lie in (2, 6]");
  if (c.problem.flavor != "full" && c.problem.flavor != "cp")
    fail("problem.flavor must be full or cp");
  if (c.problem.bubble_field != "profile" && c.problem.bubble_field != "ground")
    fail("problem.bubble_field must be profile or ground");
  if (c.problem.k < 1) fail("problem.k must be >= 1");
  if (c.problem.nu < 1) fail("problem.nu must be >= 1");
  if (c.problem.lambda_count < 0) fail("problem.lambda_count must be >= 0");
  if (!(c.solver.tol > 0.0)) fail("solver.tol must be positive");
  if (c.solver.max_iter < 1) fail("solver.max_iter must be >= 1");
  if (c.solver.starts < 0 || c.solver.random_starts < 0) fail("solver starts must be >= 0");
  if (c.solver.starts + c.solver.random_starts < 1 && !c.solver.concentration_starts)
    fail("solver needs at least one start");
  if (!(c.solver.eps_width > 0.0)) fail("solver.eps_width must be positive");
  if (!(c.solver.dedup_tol > 0.0)) fail("solver.dedup_tol must be positive");
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown config section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("config key '" + section + "' is outside a section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key))
        throw ConfigError("unknown config key '" + section + "." + key + "'");
  }

  RunConfig c;
  const Reader r(tree);
  r.number("domain.r_max", c.domain.r_max);
  r.number("domain.z_min", c.domain.z_min);
  r.number("domain.z_max", c.domain.z_max);
  r.integer("domain.n_r", c.domain.n_r);
  r.integer("domain.n_z", c.domain.n_z);
  r.text("domain.shape", c.domain.shape);
  r.number("domain.r_inner", c.domain.r_inner);
  r.number("domain.ball_z", c.domain.ball_z);
  r.number("domain.ball_radius", c.domain.ball_radius);

  r.number("materials.a_mu", c.materials.a_mu);
  r.number("materials.b_mu", c.materials.b_mu);
  r.number("materials.a_V", c.materials.a_V);
  r.number("materials.a_Gamma", c.materials.a_Gamma);
  r.text("materials.a_mu_csv", c.materials.a_mu_csv);
  r.text("materials.b_mu_csv", c.materials.b_mu_csv);
  r.text("materials.a_V_csv", c.materials.a_V_csv);
  r.text("materials.a_Gamma_csv", c.materials.a_Gamma_csv);

  r.number("problem.p", c.problem.p);
  r.number("problem.lambda", c.problem.lambda);
  r.list("problem.lambdas", c.problem.lambdas);
  r.number("problem.lambda_min", c.problem.lambda_min);
  r.number("problem.lambda_max", c.problem.lambda_max);
  r.integer("problem.lambda_count", c.problem.lambda_count);
  r.text("problem.flavor", c.problem.flavor);
  r.integer("problem.k", c.problem.k);
  r.integer("problem.nu", c.problem.nu);
  r.list("problem.eps", c.problem.eps);
  r.number("problem.z0", c.problem.z0);
  r.text("problem.bubble_field", c.problem.bubble_field);
  r.list("problem.sequence", c.problem.sequence);

  r.number("solver.tol", c.solver.tol);
  r.integer("solver.max_iter", c.solver.max_iter);
  r.integer("solver.starts", c.solver.starts);
  r.integer("solver.random_starts", c.solver.random_starts);
  r.flag("solver.concentration_starts", c.solver.concentration_starts);
  r.seed("solver.seed", c.solver.seed);
  r.number("solver.eps_width", c.solver.eps_width);
  r.number("solver.dedup_tol", c.solver.dedup_tol);

  r.text("output.dir", c.output.dir);
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const RunConfig& c) {
  std::ostringstream o;
  auto num = [&](const char* k, double v) { o << k << " = " << format_number(v) << '\n'; };
  auto str = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
  o << "[domain]\n";
  num("r_max", c.domain.r_max);
  num("z_min", c.domain.z_min);
  num("z_max", c.domain.z_max);
  o << "n_r = " << c.domain.n_r << "\nn_z = " << c.domain.n_z << '\n';
  str("shape", c.domain.shape);
  num("r_inner", c.domain.r_inner);
  num("ball_z", c.domain.ball_z);
  num("ball_radius", c.domain.ball_radius);
  o << "\n[materials]\n";
  num("a_mu", c.materials.a_mu);
  num("b_mu", c.materials.b_mu);
  num("a_V", c.materials.a_V);
  num("a_Gamma", c.materials.a_Gamma);
  str("a_mu_csv", c.materials.a_mu_csv);
  str("b_mu_csv", c.materials.b_mu_csv);
  str("a_V_csv", c.materials.a_V_csv);
  str("a_Gamma_csv", c.materials.a_Gamma_csv);
  o << "\n[problem]\n";
  num("p", c.problem.p);
  num("lambda", c.problem.lambda);
  str("lambdas", join(c.problem.lambdas));
  num("lambda_min", c.problem.lambda_min);
  num("lambda_max", c.problem.lambda_max);
  o << "lambda_count = " << c.problem.lambda_count << '\n';
  str("flavor", c.problem.flavor);
  o << "k = " << c.problem.k << "\nnu = " << c.problem.nu << '\n';
  str("eps", join(c.problem.eps));
  num("z0", c.problem.z0);
  str("bubble_field", c.problem.bubble_field);
  str("sequence", join(c.problem.sequence));
  o << "\n[solver]\n";
  num("tol", c.solver.tol);
  o << "max_iter = " << c.solver.max_iter << "\nstarts = " << c.solver.starts
    << "\nrandom_starts = " << c.solver.random_starts
    << "\nconcentration_starts = " << (c.solver.concentration_starts ? "true" : "false")
    << "\nseed = " << c.solver.seed << '\n';
  num("eps_width", c.solver.eps_width);
  num("dedup_tol", c.solver.dedup_tol);
  o << "\n[output]\n";
  str("dir", c.output.dir);
  return o.str();
}

MeridianGrid make_grid(const DomainConfig& d) {
  Shape shape = Shape::rectangle();
  if (d.shape == "annulus")
    shape = Shape::annulus(d.r_inner);
  else if (d.shape == "ball")
    shape = Shape::ball(d.ball_z, d.ball_radius);
  return build_grid(d.r_max, d.z_min, d.z_max, d.n_r, d.n_z, shape);
}

Eigen::VectorXd read_node_table(const std::filesystem::path& path, std::size_t nodes) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read material table '" + path.string() + "'");
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const std::string cell = trim(line.substr(0, line.find(',')));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw ConfigError("material table '" + path.string() + "': bad value '" + cell + "'");
    }
    first = false;
    values.push_back(v);
  }
  if (values.size() != nodes) {
    std::ostringstream msg;
    msg << "material table '" << path.string() << "' has " << values.size() << " values, the grid has "
        << nodes << " nodes";
    throw ConfigError(msg.str());
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

MaterialField make_materials(const MeridianGrid& grid, const MaterialsConfig& m,
                             const std::filesystem::path& base_dir) {
  MaterialField f = MaterialField::constant(grid, m.a_mu, m.b_mu, m.a_V, m.a_Gamma);
  auto load = [&](const std::string& file, Eigen::VectorXd& target) {
    if (file.empty()) return;
    std::filesystem::path p(file);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    target = read_node_table(p, grid.node_count());
  };
  load(m.a_mu_csv, f.a_mu);
  load(m.b_mu_csv, f.b_mu);
  load(m.a_V_csv, f.a_V);
  load(m.a_Gamma_csv, f.a_Gamma);
  f.validate(grid);
  return f;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

void write_field_csv(const std::filesystem::path& path, const MeridianGrid& grid, const Vec& phi) {
  std::ostringstream o;
  o << "r,z,value\n";
  for (int k = 0; k < grid.unknown_count(); ++k) {
    const std::size_t node = grid.unknown_nodes()[static_cast<std::size_t>(k)];
    o << format_number(grid.r(grid.node_i(node))) << ',' << format_number(grid.z(grid.node_j(node)))
      << ',' << format_number(phi[k]) << '\n';
  }
  write_text(path, o.str());
}

void write_grid_csv(const std::filesystem::path& path, const MeridianGrid& grid) {
  std::ostringstream o;
  o << "i,j,r,z,interior\n";
  for (int i = 0; i <= grid.n_r(); ++i)
    for (int j = 0; j <= grid.n_z(); ++j)
      o << i << ',' << j << ',' << format_number(grid.r(i)) << ',' << format_number(grid.z(j)) << ','
        << (grid.interior(i, j) ? 1 : 0) << '\n';
  write_text(path, o.str());
}

}  // namespace nehari
