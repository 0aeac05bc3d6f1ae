#include "nehari/cli.hpp"

#include "nehari/analysis.hpp"
#include "nehari/curlcurl.hpp"
#include "nehari/error.hpp"
#include "nehari/nehari.hpp"
#include "nehari/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace nehari {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json config_json(const RunConfig& c) {
  json j;
  j["domain"] = {{"r_max", c.domain.r_max},     {"z_min", c.domain.z_min},
                 {"z_max", c.domain.z_max},     {"n_r", c.domain.n_r},
                 {"n_z", c.domain.n_z},         {"shape", c.domain.shape},
                 {"r_inner", c.domain.r_inner}, {"ball_z", c.domain.ball_z},
                 {"ball_radius", c.domain.ball_radius}};
  j["materials"] = {{"a_mu", c.materials.a_mu},         {"b_mu", c.materials.b_mu},
                    {"a_V", c.materials.a_V},           {"a_Gamma", c.materials.a_Gamma},
                    {"a_mu_csv", c.materials.a_mu_csv}, {"b_mu_csv", c.materials.b_mu_csv},
                    {"a_V_csv", c.materials.a_V_csv},   {"a_Gamma_csv", c.materials.a_Gamma_csv}};
  j["problem"] = {{"p", c.problem.p},
                  {"lambda", c.problem.lambda},
                  {"lambdas", c.problem.lambdas},
                  {"lambda_min", c.problem.lambda_min},
                  {"lambda_max", c.problem.lambda_max},
                  {"lambda_count", c.problem.lambda_count},
                  {"flavor", c.problem.flavor},
                  {"k", c.problem.k},
                  {"nu", c.problem.nu},
                  {"eps", c.problem.eps},
                  {"z0", c.problem.z0},
                  {"bubble_field", c.problem.bubble_field},
                  {"sequence", c.problem.sequence}};
  j["solver"] = {{"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"starts", c.solver.starts},
                 {"random_starts", c.solver.random_starts},
                 {"concentration_starts", c.solver.concentration_starts},
                 {"seed", c.solver.seed},
                 {"eps_width", c.solver.eps_width},
                 {"dedup_tol", c.solver.dedup_tol}};
  j["output"] = {{"dir", c.output.dir}};
  return j;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
  return out;
}

std::string f(double v) { return format_number(v); }

struct Context {
  const RunConfig& cfg;
  const CliFlags& flags;
  fs::path out_dir;
  MeridianGrid grid;
  MaterialField materials;
  DiscreteForms forms;
  json summary;

  GroundStateOptions ground_options() const {
    GroundStateOptions g;
    g.tol = cfg.solver.tol;
    g.max_iter = cfg.solver.max_iter;
    g.eigen_starts = cfg.solver.starts;
    g.random_starts = cfg.solver.random_starts;
    g.concentration_starts = cfg.solver.concentration_starts;
    g.seed = cfg.solver.seed;
    g.flavor = parse_flavor(cfg.problem.flavor);
    return g;
  }
  SobolevOptions sobolev_options() const {
    SobolevOptions s;
    s.seed = cfg.solver.seed;
    s.random_starts = cfg.solver.random_starts;
    s.concentration_starts = cfg.solver.concentration_starts;
    return s;
  }
  void write(const std::string& name, const std::string& text) const {
    write_text(out_dir / name, text);
  }
};

fs::path base_dir(const CliFlags& flags) {
  return flags.config.empty() ? fs::path() : flags.config.parent_path();
}

json ground_json(const GroundStateResult& g) {
  json j;
  j["lambda"] = g.lambda;
  j["p"] = g.p;
  j["nu"] = g.nu;
  j["energy"] = g.energy;
  j["residual"] = g.residual;
  j["grad_norm"] = g.grad_norm;
  j["iterations"] = g.iterations;
  j["start_index"] = g.start_index;
  j["lp_norm"] = g.lp_norm;
  j["a_norm"] = g.a_norm;
  j["m_quad"] = g.m_quad;
  j["manifold_gap"] = g.manifold_gap();
  j["upper_bound"] = g.upper_bound ? num(*g.upper_bound) : json(nullptr);
  json starts = json::array();
  for (double e : g.start_energies) starts.push_back(num(e));
  j["start_energies"] = starts;
  return j;
}

void cmd_eigs(Context& ctx) {
  const SpectralSplit s = eigenpairs(ctx.forms, ctx.cfg.problem.k);
  std::string csv = "index,eigenvalue,cluster\n";
  json values = json::array();
  for (int k = 0; k < s.count(); ++k) {
    csv += csv_row({std::to_string(k + 1), f(s.eigenvalues[k]),
                    std::to_string(s.cluster[static_cast<std::size_t>(k)])});
    values.push_back(s.eigenvalues[k]);
  }
  ctx.write("eigs.csv", csv);
  ctx.summary["eigenvalues"] = values;
  ctx.summary["clusters"] = s.cluster;
}

void cmd_ground(Context& ctx, std::ostream& log) {
  const GroundStateResult g = ground_state(ctx.forms, ctx.cfg.problem.lambda, ctx.ground_options());
  write_field_csv(ctx.out_dir / "ground_field.csv", ctx.grid, g.field);
  ctx.summary["ground_state"] = ground_json(g);
  log << "c = " << f(g.energy) << "  residual = " << f(g.residual) << '\n';
}

std::vector<double> sweep_grid(const ProblemConfig& p) {
  if (!p.lambdas.empty()) return p.lambdas;
  if (p.lambda_count < 1)
    throw ConfigError("sweep needs problem.lambdas or problem.lambda_count >= 1");
  if (!(p.lambda_max > p.lambda_min))
    throw ConfigError("sweep needs problem.lambda_min < problem.lambda_max");
  std::vector<double> out;
  for (int i = 1; i <= p.lambda_count; ++i)
    out.push_back(p.lambda_min + (p.lambda_max - p.lambda_min) * i / p.lambda_count);
  return out;
}

void cmd_sweep(Context& ctx, std::ostream& log) {
  SweepOptions so;
  so.ground = ctx.ground_options();
  so.threads = ctx.flags.threads;
  const SweepResult r = lambda_sweep(ctx.forms, sweep_grid(ctx.cfg.problem), so);
  std::string csv = "lambda,nu,c,upper,lower,attained,residual\n";
  for (const auto& p : r.points)
    csv += csv_row({f(p.lambda), std::to_string(p.nu), f(p.energy), f(p.upper), f(p.lower),
                    p.attained ? "1" : "0", f(p.residual)});
  ctx.write("sweep.csv", csv);
  ctx.summary["S_h"] = r.S;
  ctx.summary["monotone"] = r.monotone;
  ctx.summary["strictly_increasing"] = r.strictly_increasing;
  ctx.summary["continuity"] = r.continuity;
  ctx.summary["lipschitz"] = r.lipschitz;
  ctx.summary["notes"] = r.notes;
  std::vector<double> spec(r.spectrum.data(), r.spectrum.data() + r.spectrum.size());
  ctx.summary["spectrum"] = spec;
  log << "sweep: " << r.points.size() << " points, monotone = " << (r.monotone ? "yes" : "no")
      << '\n';
}

void cmd_bounds(Context& ctx, std::ostream& log) {
  const double lambda = ctx.cfg.problem.lambda;
  if (lambda > 0.0) {
    std::ostringstream msg;
    msg << "lambda = " << f(lambda) << " is in no admissible window; admissible lambda lie in "
        << "(-lambda_K, 0]";
    throw ConfigError(msg.str());
  }
  const SpectralSplit s = eigenpairs_for(ctx.forms, lambda, ctx.cfg.problem.k);
  const SobolevResult S = compute_S(ctx.forms, ctx.forms.p, ctx.sobolev_options());
  const EnergyBounds b =
      energy_bounds(s, S.value, ctx.forms.p, ctx.forms.mu_omega, lambda, ctx.cfg.problem.nu);
  json j = {{"lambda", b.lambda}, {"p", b.p},           {"S_h", b.S},
            {"mu_omega", b.mu_omega}, {"nu", b.nu},     {"lambda_nu", b.lambda_nu},
            {"window_lo", b.window_lo}, {"window_hi", b.window_hi}, {"upper", b.upper},
            {"lower", b.lower},       {"beta0", b.beta0}, {"threshold", b.threshold},
            {"precondition", b.precondition}, {"sanity", b.sanity}};
  ctx.summary["bounds"] = j;
  std::string csv = "quantity,value\n";
  for (const auto& [k, v] : j.items()) csv += k + "," + (v.is_boolean() ? (v.get<bool>() ? "1" : "0") : f(v.get<double>())) + "\n";
  ctx.write("bounds.csv", csv);
  log << "upper = " << f(b.upper) << "  lower = " << f(b.lower) << '\n';
}

void cmd_eps_nu(Context& ctx, std::ostream& log) {
  EpsNuOptions o;
  o.ground = ctx.ground_options();
  o.width = ctx.cfg.solver.eps_width;
  const EpsNuResult r = estimate_eps_nu(ctx.forms, ctx.cfg.problem.nu, o);
  std::string csv = "eps,lambda,c,decision\n";
  for (const auto& p : r.probes) csv += csv_row({f(p.eps), f(p.lambda), f(p.energy), p.decision});
  ctx.write("eps_nu.csv", csv);
  ctx.summary["eps_nu"] = {{"nu", r.nu},
                           {"lambda_nu", r.lambda_nu},
                           {"c0", r.c0},
                           {"S_h", r.S},
                           {"lower_bound", r.lower_bound},
                           {"eps_hat", r.eps_hat},
                           {"eps_upper", r.eps_upper},
                           {"gap_tol", r.gap_tol},
                           {"warnings", r.warnings}};
  log << "eps_nu in [" << f(r.eps_hat) << ", " << f(r.eps_upper) << "]\n";
}

void cmd_multiplicity(Context& ctx, std::ostream& log) {
  const double lambda = ctx.cfg.problem.lambda;
  if (lambda > 0.0) throw ConfigError("multiplicity needs lambda <= 0");
  const SobolevResult S = compute_S(ctx.forms, ctx.forms.p, ctx.sobolev_options());
  const double T = S.value * std::pow(ctx.forms.mu_omega, (2.0 - ctx.forms.p) / ctx.forms.p);
  SpectralSplit s = eigenpairs_for(ctx.forms, lambda - T, ctx.cfg.problem.k);
  const int need = spectral_index(s.eigenvalues, lambda) - 1 + std::max(1, ctx.cfg.solver.starts);
  if (need > s.count()) s = eigenpairs(ctx.forms, std::min<int>(need, ctx.forms.size()));
  const BoundStateReport rep =
      bound_states(ctx.forms, s, S.value, lambda, ctx.ground_options(), ctx.cfg.solver.dedup_tol);
  std::string csv = "index,eigenvalue,multiplicity\n";
  for (std::size_t i = 0; i < rep.count.indices.size(); ++i)
    csv += csv_row({std::to_string(rep.count.indices[i]),
                    f(s.eigenvalues[rep.count.indices[i] - 1]),
                    std::to_string(rep.count.multiplicities[i])});
  ctx.write("multiplicity.csv", csv);
  json states = json::array();
  for (const auto& st : rep.states)
    states.push_back({{"energy", st.energy}, {"residual", st.residual}, {"start", st.start_index}});
  ctx.summary["m_tilde"] = rep.count.count;
  ctx.summary["window"] = {rep.count.lo, rep.count.hi};
  ctx.summary["S_h"] = S.value;
  ctx.summary["beta0"] = rep.beta0;
  ctx.summary["bound_states"] = states;
  log << "m~ = " << rep.count.count << "  pairs found = " << rep.states.size() << '\n';
}

Vec profile_field(const MeridianGrid& g) {
  const double L = g.z_max() - g.z_min();
  return g.sample([&](double r, double z) {
    return r * (g.r_max() - r) * std::sin(std::numbers::pi * (z - g.z_min()) / L);
  });
}

void cmd_bubble(Context& ctx, std::ostream& log) {
  Vec phi;
  if (ctx.cfg.problem.bubble_field == "ground")
    phi = ground_state(ctx.forms, ctx.cfg.problem.lambda, ctx.ground_options()).field;
  else
    phi = profile_field(ctx.grid);
  const Vec psi = ctx.grid.sample([&](double r, double) { return r * (ctx.grid.r_max() - r); });
  std::string csv = "eps,l6_norm,a_norm,j0,test_inner\n";
  json rows = json::array();
  for (double eps : ctx.cfg.problem.eps) {
    const BubbleResult b = bubble(ctx.forms, phi, eps, ctx.cfg.problem.z0, {psi});
    csv += csv_row({f(eps), f(b.l6_norm), f(b.a_norm), f(b.j0), f(b.test_inner[0])});
    rows.push_back({{"eps", eps}, {"l6_norm", b.l6_norm}, {"a_norm", b.a_norm}, {"j0", b.j0},
                    {"test_inner", b.test_inner[0]}});
  }
  ctx.write("bubble.csv", csv);
  ctx.summary["base_l6_norm"] = lp_norm(ctx.forms, phi, 6.0);
  ctx.summary["base_a_norm"] = std::sqrt(quad_A(ctx.forms, phi));
  ctx.summary["bubbles"] = rows;
  log << "bubble: " << ctx.cfg.problem.eps.size() << " scales\n";
}

void cmd_aniso(Context& ctx, std::ostream& log) {
  const DiscreteForms unit = assemble_forms(ctx.grid, MaterialField::isotropic(ctx.grid), ctx.forms.p);
  const SobolevResult S = compute_S(unit, ctx.forms.p, ctx.sobolev_options());
  const MaterialField& m = ctx.materials;
  const double kappa =
      m.V_inf() * m.mu_inf() * std::pow(m.Gamma_inf() / m.Gamma_0(), 2.0 / ctx.forms.p);
  const double T = S.value * std::pow(ctx.forms.mu_omega, (2.0 - ctx.forms.p) / ctx.forms.p);
  SpectralSplit s = eigenpairs_for(ctx.forms, -(1.0 + T / kappa), ctx.cfg.problem.k);
  const int need = spectral_index(s.eigenvalues, -1.0) - 1 + std::max(1, ctx.cfg.solver.starts);
  if (need > s.count()) s = eigenpairs(ctx.forms, std::min<int>(need, ctx.forms.size()));
  const AnisoReport r = count_m_tilde_aniso(s, m, S.value, ctx.forms.p, ctx.forms.mu_omega);

  std::string csv = "index,eigenvalue,in_window\n";
  for (int k = 0; k < s.count(); ++k) {
    const bool in = std::find(r.count.indices.begin(), r.count.indices.end(), k + 1) !=
                    r.count.indices.end();
    csv += csv_row({std::to_string(k + 1), f(s.eigenvalues[k]), in ? "1" : "0"});
  }
  ctx.write("aniso.csv", csv);

  json j = {{"mu_inf", r.constants.mu_inf}, {"V_inf", r.constants.V_inf},
            {"Gamma_inf", r.constants.Gamma_inf}, {"Gamma_0", r.constants.Gamma_0},
            {"kappa", r.kappa}, {"S_h", S.value}, {"threshold", r.threshold},
            {"m_tilde", r.count.count}, {"window", {r.count.lo, r.count.hi}},
            {"indices", r.count.indices}, {"d_lower", r.d_lower},
            {"d_lower_gamma_power", r.d_lower_gamma},
            {"c_upper", r.c_upper ? num(*r.c_upper) : json(nullptr)},
            {"c_upper_gamma_power", r.c_upper_gamma ? num(*r.c_upper_gamma) : json(nullptr)}};

  // Levels c of J and d of J_cp on the manifolds.
  const SpectralSplit spl = split(s, -1.0);
  SphereOptions so;
  so.tol = ctx.cfg.solver.tol;
  so.max_iter = ctx.cfg.solver.max_iter;
  so.seed = ctx.cfg.solver.seed;
  for (int k = 0; k < std::max(1, ctx.cfg.solver.starts) && spl.nu - 1 + k < spl.count(); ++k)
    so.starts.emplace_back(spl.eigenvectors.col(spl.nu - 1 + k));
  const SphereResult c = sphere_minimize(make_aniso_backend(ctx.forms, spl, Flavor::Full), so);
  so.starts.clear();
  for (int k = 0; k < std::max(1, ctx.cfg.solver.starts) && k < spl.count(); ++k)
    so.starts.emplace_back(spl.eigenvectors.col(k));
  const SphereResult d =
      sphere_minimize(make_aniso_backend(ctx.forms, spl, Flavor::CompactPerturbation), so);
  j["c"] = c.point.energy;
  j["c_residual"] = c.residual;
  j["d"] = d.point.energy;
  j["d_residual"] = d.residual;
  j["c_below_d"] = c.point.energy < d.point.energy;
  ctx.summary["aniso"] = j;
  log << "aniso m~ = " << r.count.count << "  c = " << f(c.point.energy)
      << "  d = " << f(d.point.energy) << '\n';
}

void cmd_continuity(Context& ctx, std::ostream& log) {
  if (ctx.cfg.problem.sequence.empty()) throw ConfigError("continuity needs problem.sequence");
  const ContinuityReport r = continuity_of_ground_states(ctx.forms, ctx.cfg.problem.lambda,
                                                         ctx.cfg.problem.sequence,
                                                         ctx.ground_options());
  std::string csv = "lambda,c,energy_gap,distance,bound,within\n";
  for (const auto& e : r.entries)
    csv += csv_row({f(e.lambda), f(e.energy), f(e.energy_gap), f(e.distance), f(e.bound),
                    e.within ? "1" : "0"});
  ctx.write("continuity.csv", csv);
  ctx.summary["lambda_ref"] = r.lambda_ref;
  ctx.summary["energy_ref"] = r.energy_ref;
  ctx.summary["energy_continuous"] = r.energy_continuous;
  log << "continuity: " << (r.energy_continuous ? "ok" : "violated") << '\n';
}

std::string summary_name(const std::string& command) {
  std::string s = command;
  std::replace(s.begin(), s.end(), '-', '_');
  return s + ".json";
}

}  // namespace

const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> cmds = {"eigs",         "ground", "sweep",
                                                "bounds",       "eps-nu", "multiplicity",
                                                "bubble",       "aniso-check", "continuity"};
  return cmds;
}

int run(const std::string& command, const RunConfig& cfg_in, const CliFlags& flags,
        std::ostream& log, std::ostream& err) {
  RunConfig cfg = cfg_in;
  if (flags.out) cfg.output.dir = *flags.out;
  const fs::path out_dir(cfg.output.dir);
  json summary;
  summary["command"] = command;
  summary["config"] = config_json(cfg);
  summary["seed"] = cfg.solver.seed;
  summary["tolerances"] = {{"tol", cfg.solver.tol},
                           {"eps_width", cfg.solver.eps_width},
                           {"dedup_tol", cfg.solver.dedup_tol}};
  auto write_summary = [&](json& s) {
    write_text(out_dir / summary_name(command), s.dump(2) + "\n");
  };

  try {
    if (std::find(cli_commands().begin(), cli_commands().end(), command) == cli_commands().end())
      throw ConfigError("unknown command '" + command + "'");
    const MeridianGrid grid = make_grid(cfg.domain);
    const MaterialField materials = make_materials(grid, cfg.materials, base_dir(flags));
    Context ctx{cfg, flags, out_dir, grid, materials,
                assemble_forms(grid, materials, cfg.problem.p), json::object()};
    if (flags.emit_grid) write_grid_csv(out_dir / "grid.csv", grid);
    ctx.summary["mu_omega"] = ctx.forms.mu_omega;
    ctx.summary["unknowns"] = ctx.forms.size();
    ctx.summary["grid"] = {{"h_r", grid.h_r()}, {"h_z", grid.h_z()}};

    if (command == "eigs") cmd_eigs(ctx);
    else if (command == "ground") cmd_ground(ctx, log);
    else if (command == "sweep") cmd_sweep(ctx, log);
    else if (command == "bounds") cmd_bounds(ctx, log);
    else if (command == "eps-nu") cmd_eps_nu(ctx, log);
    else if (command == "multiplicity") cmd_multiplicity(ctx, log);
    else if (command == "bubble") cmd_bubble(ctx, log);
    else if (command == "aniso-check") cmd_aniso(ctx, log);
    else if (command == "continuity") cmd_continuity(ctx, log);

    summary["status"] = "ok";
    summary["result"] = std::move(ctx.summary);
    write_summary(summary);
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConvergenceError& e) {
    err << "solver failure: " << e.what() << '\n';
    summary["status"] = "failed";
    summary["error"] = e.what();
    summary["best_energy"] = num(e.energy());
    summary["best_residual"] = num(e.residual());
    try {
      write_summary(summary);
    } catch (const std::exception&) {
    }
    return 1;
  } catch (const NumericError& e) {
    err << "solver failure: " << e.what() << '\n';
    summary["status"] = "failed";
    summary["error"] = e.what();
    try {
      write_summary(summary);
    } catch (const std::exception&) {
    }
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Ground states and spectra of the cylindrically symmetric curl-curl problem"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  CliFlags flags;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", flags.threads, "parallelism cap for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--emit-grid", flags.emit_grid, "also write grid.csv with the interior mask");
  app.fallthrough();
  const std::vector<std::pair<std::string, std::string>> help = {
      {"eigs", "lowest eigenpairs of the curl-energy form"},
      {"ground", "symmetric ground state at problem.lambda"},
      {"sweep", "ground-state levels over a lambda grid"},
      {"bounds", "upper/lower energy bounds and the threshold beta0"},
      {"eps-nu", "bisection estimate of eps_nu"},
      {"multiplicity", "count m~ and multi-start bound states"},
      {"bubble", "rescaled fields and their norms"},
      {"aniso-check", "anisotropic count, bounds and levels"},
      {"continuity", "ground states along a lambda sequence"}};
  for (const auto& [name, text] : help) app.add_subcommand(name, text);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      flags.config = config_path;
      cfg = load_config(config_path);
    }
    if (!out_dir.empty()) flags.out = out_dir;
    return run(command, cfg, flags, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace nehari
