// fblab: command-line laboratory for the singular-potential free boundary
// problem: minimizers, radial exterior solutions, the degenerate linearized
// equation, flatness certificates, and the gamma sweeps.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fbl/energy.hpp"
#include "fbl/experiments.hpp"
#include "fbl/exponents.hpp"
#include "fbl/free_boundary.hpp"
#include "fbl/grid.hpp"
#include "fbl/minimize.hpp"
#include "fbl/radial.hpp"
#include "fbl/weighted.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace fbl;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int line_of_offset(const std::string& text, std::size_t off) {
  int line = 1;
  for (std::size_t k = 0; k < off && k < text.size(); ++k)
    if (text[k] == '\n') ++line;
  return line;
}

int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return line_of_offset(text, pos);
}

// allowed keys per config section; unknown keys are rejected
const std::map<std::string, std::set<std::string>> kSchema = {
    {"", {"out", "seed", "jobs", "gamma", "gammas", "dim", "grid", "boundary",
          "solver", "radial", "linearized", "flatness", "monotonicity", "sweep",
          "subcommand"}},
    {"grid", {"cells", "extents"}},
    {"boundary", {"preset", "left", "right", "value", "interface", "tilt_deg"}},
    {"solver", {"max_iters", "energy_tol", "step", "ladder", "delta", "tau", "rescaled"}},
    {"radial", {"shoot_tol"}},
    {"linearized",
     {"s", "limit", "nx", "zrows", "data", "exact_test", "tol", "fit_radius",
      "ball_radius"}},
    {"flatness", {"field", "center", "radius", "mode", "trace"}},
    {"monotonicity", {"field", "zeroset", "center", "radii"}},
    {"sweep", {"geometry", "left", "right", "cells", "n", "shoot_tol", "flatness_ratios"}},
};

void check_keys(const json& j, const std::string& section, const std::string& raw) {
  const auto it = kSchema.find(section);
  if (it == kSchema.end() || !j.is_object()) return;
  for (const auto& [key, val] : j.items()) {
    if (!it->second.count(key)) {
      throw ConfigError("line " + std::to_string(line_of_key(raw, key)) +
                        ": unknown config key '" +
                        (section.empty() ? key : section + "." + key) + "'");
    }
    if (kSchema.count(key) && val.is_object()) check_keys(val, key, raw);
  }
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string raw = ss.str();
  json j;
  try {
    j = json::parse(raw);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("line " + std::to_string(line_of_offset(raw, e.byte)) +
                      ": config parse error: " + e.what());
  }
  check_keys(j, "", raw);
  return j;
}

template <typename T>
T cfg_get(const json& j, const std::string& section, const std::string& key, T fallback) {
  const json* node = &j;
  if (!section.empty()) {
    if (!j.contains(section)) return fallback;
    node = &j.at(section);
  }
  if (!node->contains(key)) return fallback;
  try {
    return node->at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key '" + (section.empty() ? key : section + "." + key) +
                      "': " + e.what());
  }
}

SolverConfig solver_from_config(const json& cfg) {
  SolverConfig sc;
  sc.max_iters = cfg_get(cfg, "solver", "max_iters", 300000);
  sc.energy_tol = cfg_get(cfg, "solver", "energy_tol", 1e-12);
  sc.delta = cfg_get(cfg, "solver", "delta", 0.0);
  sc.tau = cfg_get(cfg, "solver", "tau", 0.0);
  const std::string step = cfg_get<std::string>(cfg, "solver", "step", "backtracking");
  if (step == "fixed")
    sc.step = SolverConfig::Step::fixed;
  else if (step == "backtracking")
    sc.step = SolverConfig::Step::backtracking;
  else
    throw ConfigError("solver.step must be 'fixed' or 'backtracking'");
  if (cfg.contains("solver") && cfg.at("solver").contains("ladder"))
    sc.ladder = cfg.at("solver").at("ladder").get<std::vector<double>>();
  return sc;
}

json solver_echo(const SolverConfig& sc) {
  json j;
  j["max_iters"] = sc.max_iters;
  j["energy_tol"] = sc.energy_tol;
  j["delta"] = sc.delta;
  j["tau"] = sc.tau;
  j["step"] = sc.step == SolverConfig::Step::fixed ? "fixed" : "backtracking";
  j["ladder"] = sc.ladder;
  return j;
}

json energy_json(const EnergyReport& e) {
  json j;
  j["dirichlet"] = e.dirichlet;
  j["potential"] = e.potential;
  j["perimeter"] = e.perimeter;
  j["total"] = e.total;
  return j;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void write_energy_trace(const std::vector<TraceRow>& trace, const fs::path& path) {
  std::ofstream out(path);
  out << "# iter,stage,delta,dirichlet,potential,total\n";
  for (const auto& r : trace)
    out << r.iter << "," << r.stage << "," << fmt17(r.delta) << "," << fmt17(r.dirichlet)
        << "," << fmt17(r.potential) << "," << fmt17(r.total) << "\n";
}

fs::path out_dir(const json& cfg, const std::string& flag_out) {
  std::string dir = flag_out;
  if (dir.empty()) dir = cfg_get<std::string>(cfg, "", "out", "");
  if (dir.empty()) {
    const char* env = std::getenv("FBLAB_OUT");
    dir = env ? env : "out";
  }
  fs::create_directories(dir);
  return dir;
}

// boundary presets for the solve subcommand
BoundarySpec boundary_from_config(const json& cfg, int dim, double gamma) {
  const std::string preset = cfg_get<std::string>(cfg, "boundary", "preset", "ramp");
  const double left = cfg_get(cfg, "boundary", "left", 1.0);
  const double right = cfg_get(cfg, "boundary", "right", 0.0);
  const double value = cfg_get(cfg, "boundary", "value", 1.0);
  const double interface_at = cfg_get(cfg, "boundary", "interface", 0.0);
  const double tilt = cfg_get(cfg, "boundary", "tilt_deg", 0.0) * M_PI / 180.0;
  if (preset == "ramp") {
    if (dim == 1) return BoundarySpec::dirichlet_1d(left, right);
    return BoundarySpec::all_dirichlet(
        [left, right](double x, double) { return left + (right - left) * x; });
  }
  if (preset == "constant")
    return BoundarySpec::all_dirichlet([value](double, double) { return value; });
  if (preset == "profile") {
    const GammaParams p = derive_params(gamma);
    if (dim == 1)
      return BoundarySpec::dirichlet_1d(profile(p, interface_at - 0.0, 0),
                                        profile(p, interface_at - 1.0, 0));
    const double nx = std::sin(tilt), ny = std::cos(tilt);
    return BoundarySpec::all_dirichlet([p, nx, ny, interface_at](double x, double y) {
      return profile(p, x * nx + y * ny - interface_at, 0);
    });
  }
  if (preset == "radial_profile") {
    const GammaParams p = derive_params(gamma);
    return BoundarySpec::all_dirichlet([p, interface_at](double x, double y) {
      return profile(p, std::hypot(x, y) - interface_at, 0);
    });
  }
  throw ConfigError("boundary.preset must be one of ramp|constant|profile|radial_profile");
}

int cmd_solve(const json& cfg, const std::string& flag_out) {
  const fs::path dir = out_dir(cfg, flag_out);
  const int dim = cfg_get(cfg, "", "dim", 1);
  const double gamma = cfg_get(cfg, "", "gamma", 1.0);
  const int cells = cfg_get(cfg, "grid", "cells", dim == 1 ? 512 : 128);
  std::vector<std::vector<double>> ext;
  if (cfg.contains("grid") && cfg.at("grid").contains("extents"))
    ext = cfg.at("grid").at("extents").get<std::vector<std::vector<double>>>();
  Grid grid;
  if (dim == 1) {
    const double a = ext.empty() ? 0.0 : ext[0][0], b = ext.empty() ? 1.0 : ext[0][1];
    grid = make_grid_1d(a, b, cells);
  } else {
    const double ax = ext.empty() ? -1.0 : ext[0][0], bx = ext.empty() ? 1.0 : ext[0][1];
    const double ay = ext.size() > 1 ? ext[1][0] : ax, by = ext.size() > 1 ? ext[1][1] : bx;
    grid = make_grid_2d(ax, bx, ay, by, cells, cells);
  }
  const SolverConfig sc = solver_from_config(cfg);
  const bool rescaled = cfg_get(cfg, "solver", "rescaled", false);
  const GammaParams p = derive_params(gamma);
  const BoundarySpec bc = boundary_from_config(cfg, dim, gamma);

  json report;
  report["config"] = {{"subcommand", "solve"},
                      {"dim", dim},
                      {"gamma", gamma},
                      {"cells", cells},
                      {"rescaled", rescaled},
                      {"solver", solver_echo(sc)}};
  try {
    const MinimizeResult res = minimize(grid, bc, ObjectiveAP{p, rescaled}, sc);
    write_field_csv(res.field, (dir / "field.csv").string());
    write_field_csv(res.raw_field, (dir / "field_raw.csv").string());
    write_energy_trace(res.trace, dir / "energy_trace.csv");
    report["iterations"] = res.iterations;
    report["converged"] = res.converged;
    report["energy"] = energy_json(res.energy);
    write_json(report, dir / "report.json");
  } catch (const ConvergenceFailure& e) {
    write_field_csv(e.partial.field, (dir / "field.csv").string());
    write_energy_trace(e.partial.trace, dir / "energy_trace.csv");
    report["iterations"] = e.partial.iterations;
    report["converged"] = false;
    report["error"] = e.what();
    write_json(report, dir / "report.json");
    std::cerr << "solve failed: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << (dir / "report.json").string() << "\n";
  return 0;
}

int cmd_radial(const json& cfg, const std::string& flag_out) {
  const fs::path dir = out_dir(cfg, flag_out);
  const double gamma = cfg_get(cfg, "", "gamma", 1.0);
  const int n = cfg_get(cfg, "", "dim", 1);
  const double tol = cfg_get(cfg, "radial", "shoot_tol", 1e-9);
  const GammaParams p = derive_params(gamma);
  const RadialSolution sol = radial_exterior(p, n, tol);
  char line[64];
  std::snprintf(line, sizeof(line), "mu=%.6f", sol.mu);
  std::cout << line << "\n";
  std::ofstream prof(dir / "radial_profile.csv");
  prof << "# r,u  exterior solution, gamma=" << fmt17(gamma) << ", n=" << n << "\n";
  for (std::size_t k = 0; k < sol.r.size(); ++k)
    prof << fmt17(sol.r[k]) << "," << fmt17(sol.u[k]) << "\n";
  json report;
  report["config"] = {{"subcommand", "radial"}, {"gamma", gamma}, {"n", n},
                      {"shoot_tol", tol}};
  report["mu"] = sol.mu;
  write_json(report, dir / "report.json");
  return 0;
}

void write_weighted_csv(const WeightedField& v, const fs::path& path) {
  std::ofstream out(path);
  const HalfGrid& g = v.grid;
  out << "# x0" << (g.tdim == 2 ? ",x1" : "") << ",z,value  (staggered="
      << (g.staggered ? 1 : 0) << ", h=" << fmt17(g.h) << ")\n";
  const int n1 = g.tdim == 2 ? g.tn(1) : 1;
  for (int j = 0; j < g.zrows; ++j)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < g.tn(0); ++i0) {
        out << fmt17(g.tx(0, i0));
        if (g.tdim == 2) out << "," << fmt17(g.tx(1, i1));
        out << "," << fmt17(g.zrow(j)) << "," << fmt17(v.at(i0, i1, j)) << "\n";
      }
}

int cmd_linearized(const json& cfg, const std::string& flag_out) {
  const fs::path dir = out_dir(cfg, flag_out);
  const bool limit = cfg_get(cfg, "linearized", "limit", false);
  const double s = cfg_get(cfg, "linearized", "s", -0.5);
  const int nx = cfg_get(cfg, "linearized", "nx", 63);
  const double tol = cfg_get(cfg, "linearized", "tol", 1e-12);
  const bool exact_test = cfg_get(cfg, "linearized", "exact_test", false);
  const std::string data_name =
      cfg_get<std::string>(cfg, "linearized", "data", exact_test ? "vstar" : "smooth");

  WeightedProblem pb;
  const double h = 1.0 / nx;
  pb.grid = make_half_grid(1, {-0.5, 0.0}, {0.5, 0.0}, {nx, 0},
                           cfg_get(cfg, "linearized", "zrows", (nx + 1) / 2), h, true);
  pb.s = limit ? -1.0 : s;
  pb.limit = limit;
  const double seff = pb.s;
  std::function<double(double, double, double)> data;
  if (data_name == "vstar") {
    if (limit) throw ConfigError("linearized.data=vstar needs s in (-1,0)");
    data = [seff](double x, double, double z) { return x * x - z * z / (1.0 + seff); };
  } else if (data_name == "linear") {
    data = [](double x, double, double) { return x; };
  } else if (data_name == "smooth") {
    data = [](double x, double, double z) { return std::cos(2.0 * x) + 0.3 * z * z; };
  } else {
    throw ConfigError("linearized.data must be vstar|linear|smooth");
  }
  pb.data = data;

  SolveStats stats;
  const WeightedField v = limit ? solve_limit(pb, tol, &stats) : solve_weighted(pb, tol, &stats);
  write_weighted_csv(v, dir / "linearized_field.csv");

  const double fit_radius = cfg_get(cfg, "linearized", "fit_radius", 0.15);
  const double ball_radius = cfg_get(cfg, "linearized", "ball_radius", 0.4);
  const C1AlphaFit fit = c1alpha_fit(v, fit_radius, ball_radius);

  json report;
  report["config"] = {{"subcommand", "linearized"}, {"s", pb.s}, {"limit", limit},
                      {"nx", nx},   {"data", data_name},         {"tol", tol}};
  report["grid"] = {{"h", pb.grid.h}, {"zrows", pb.grid.zrows}};
  report["solve"] = {{"iterations", stats.iterations}, {"residual", stats.residual}};
  report["fit"] = {{"a_prime", fit.a_prime},
                   {"alpha", fit.alpha_fit},
                   {"C", fit.C_fit},
                   {"lsq_residual", fit.lsq_residual}};
  if (exact_test) {
    double err = 0.0;
    const HalfGrid& g = v.grid;
    for (int j = 0; j < g.zrows; ++j)
      for (int i0 = 0; i0 < g.tn(0); ++i0)
        err = std::max(err, std::abs(v.at(i0, 0, j) - data(g.tx(0, i0), 0.0, g.zrow(j))));
    report["exact_test_max_error"] = err;
    report["exact_test_bound"] = 5.0 * g.h * g.h / (1.0 + seff);
    std::cout << "max error vs v* = " << fmt17(err) << " (bound "
              << fmt17(5.0 * g.h * g.h / (1.0 + seff)) << ")\n";
  }
  write_json(report, dir / "linearized_report.json");
  return 0;
}

int cmd_flatness(const json& cfg, const std::string& flag_out) {
  const fs::path dir = out_dir(cfg, flag_out);
  const std::string field_path = cfg_get<std::string>(cfg, "flatness", "field", "");
  if (field_path.empty()) throw ConfigError("flatness.field (CSV path) is required");
  const double gamma = cfg_get(cfg, "", "gamma", 1.0);
  const GammaParams p = derive_params(gamma);
  const ScalarField u = read_field_csv(field_path);
  std::array<double, 2> center{0.0, 0.0};
  if (cfg.contains("flatness") && cfg.at("flatness").contains("center")) {
    const auto c = cfg.at("flatness").at("center").get<std::vector<double>>();
    center = {c[0], c.size() > 1 ? c[1] : 0.0};
  }
  const double radius = cfg_get(cfg, "flatness", "radius", 0.25);
  const std::string mode_name = cfg_get<std::string>(cfg, "flatness", "mode", "u");
  const auto mode = mode_name == "w" ? FlatnessCertificate::Mode::w_linear
                                     : FlatnessCertificate::Mode::u_profile;
  std::vector<double> radii{radius};
  if (cfg.contains("flatness") && cfg.at("flatness").contains("trace"))
    radii = cfg.at("flatness").at("trace").get<std::vector<double>>();

  const auto certs = dyadic_flatness_trace(u, center, radii, p, mode);
  write_flatness_csv(certs, (dir / "flatness.csv").string());
  const FreeBoundary fb = extract_interface(u, 1e-12, &p);
  write_interface_csv(fb, (dir / "interface.csv").string());
  for (const auto& c : certs)
    std::cout << "radius=" << fmt17(c.radius) << " epsilon=" << fmt17(c.epsilon)
              << " nu=(" << fmt17(c.nu[0]) << "," << fmt17(c.nu[1]) << ")\n";
  return 0;
}

int cmd_monotonicity(const json& cfg, const std::string& flag_out) {
  const fs::path dir = out_dir(cfg, flag_out);
  const std::string upath = cfg_get<std::string>(cfg, "monotonicity", "field", "");
  const std::string epath = cfg_get<std::string>(cfg, "monotonicity", "zeroset", "");
  if (upath.empty() || epath.empty())
    throw ConfigError("monotonicity.field and monotonicity.zeroset are required");
  const ScalarField u = read_field_csv(upath);
  const ScalarField ind = read_field_csv(epath);
  std::array<double, 2> center{0.0, 0.0};
  if (cfg.at("monotonicity").contains("center")) {
    const auto c = cfg.at("monotonicity").at("center").get<std::vector<double>>();
    center = {c[0], c.size() > 1 ? c[1] : 0.0};
  }
  std::vector<double> radii{0.2, 0.4, 0.6};
  if (cfg.at("monotonicity").contains("radii"))
    radii = cfg.at("monotonicity").at("radii").get<std::vector<double>>();
  MonotonicityTrace tr = monotonicity_trace(u, ind, center, radii);
  tr.description = "fields " + upath + " / " + epath;
  write_phi_trace_csv(tr, (dir / "phi_trace.csv").string());
  for (std::size_t k = 0; k < tr.radii.size(); ++k)
    std::cout << "r=" << fmt17(tr.radii[k]) << " phi=" << fmt17(tr.phi[k]) << "\n";
  return 0;
}

json sweep_json(const SweepReport& rep, const json& cfg_echo) {
  json j;
  j["config"] = cfg_echo;
  j["reference_value"] = rep.reference_value;
  j["reference_provenance"] = rep.reference_provenance;
  json rows = json::array();
  for (const auto& e : rep.entries) {
    json row;
    row["gamma"] = e.gamma;
    row["energy"] = energy_json(e.energy);
    row["gap"] = e.gap;
    row["l2_distance"] = e.l2_distance;
    row["hausdorff"] = e.hausdorff;
    row["mu"] = e.mu;
    if (!std::isnan(e.flatness_ratio)) row["flatness_ratio"] = e.flatness_ratio;
    rows.push_back(row);
  }
  j["entries"] = rows;
  return j;
}

int cmd_sweep(const json& cfg, const std::string& flag_out, bool to_two, int jobs) {
  const fs::path dir = out_dir(cfg, flag_out);
  const std::string geom = cfg_get<std::string>(cfg, "sweep", "geometry", "oneD");
  std::vector<double> gammas;
  if (cfg.contains("gammas")) gammas = cfg.at("gammas").get<std::vector<double>>();
  if (gammas.empty())
    gammas = to_two ? std::vector<double>{1.5, 1.8, 1.95}
                    : std::vector<double>{0.4, 0.2, 0.1, 0.05};
  SweepReport rep;
  json echo = {{"subcommand", to_two ? "sweep-gamma2" : "sweep-gamma0"},
               {"geometry", geom},
               {"gammas", gammas},
               {"jobs", jobs}};
  if (geom == "radial") {
    if (!to_two) throw ConfigError("sweep.geometry=radial is for sweep-gamma2");
    RadialGeometry rg{cfg_get(cfg, "sweep", "n", 2)};
    rep = gamma_to_2_sweep(rg, gammas, cfg_get(cfg, "sweep", "shoot_tol", 1e-9),
                           cfg_get(cfg, "sweep", "flatness_ratios", false), jobs);
  } else if (geom == "oneD") {
    OneDGeometry geo;
    geo.left = cfg_get(cfg, "sweep", "left", to_two ? 1.0 : 2.0);
    geo.right = cfg_get(cfg, "sweep", "right", 0.0);
    geo.cells = cfg_get(cfg, "sweep", "cells", 1024);
    const SolverConfig sc = solver_from_config(cfg);
    echo["left"] = geo.left;
    echo["right"] = geo.right;
    echo["cells"] = geo.cells;
    echo["solver"] = solver_echo(sc);
    rep = to_two ? gamma_to_2_sweep(geo, gammas, sc, jobs)
                 : gamma_to_0_sweep(geo, gammas, sc, jobs);
  } else {
    throw ConfigError("sweep.geometry must be oneD or radial");
  }
  write_json(sweep_json(rep, echo), dir / "sweep_report.json");
  write_sweep_csv(rep, (dir / "sweep_energies.csv").string());
  if (!rep.truncation_diagnostic.empty()) {
    std::ofstream out(dir / "truncation_diagnostic.csv");
    out << "# t,energy_AP((u_ref - t)^+)  reference=" << fmt17(rep.reference_value)
        << "\n";
    for (const auto& row : rep.truncation_diagnostic)
      out << fmt17(row[0]) << "," << fmt17(row[1]) << "\n";
  }
  std::cout << "sweep entries: " << rep.entries.size() << ", reference "
            << fmt17(rep.reference_value) << "\n";
  return 0;
}

struct ValidateRow {
  std::string name;
  double measured = 0.0, bound = 0.0;
  bool pass = false;
};

int cmd_validate(const json& cfg, const std::string& flag_out) {
  const fs::path dir = out_dir(cfg, flag_out);
  std::vector<ValidateRow> rows;
  auto add = [&](const std::string& name, double measured, double bound) {
    rows.push_back({name, measured, bound, measured <= bound});
  };

  // exponent identities across the admissible range
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double gm = 0.01 + (1.99 - 0.01) * k / 49.0;
    const GammaParams p = derive_params(gm);
    worst = std::max(worst, std::abs(p.alpha - 2.0 / (2.0 + gm)) / p.alpha);
    worst = std::max(worst,
                     std::abs(positive_pow(p.c_alpha, gm + 2.0) * p.alpha * (1.0 - p.alpha) -
                              gm / 2.0) /
                         (gm / 2.0));
    worst = std::max(worst, std::abs(p.c_alpha - positive_pow(p.alpha, -p.alpha)) / p.c_alpha);
  }
  add("exponent identities (rel)", worst, 1e-12);

  // equipartition and the 1D equation residual
  double eq = 0.0, ode = 0.0;
  for (double gm : {0.3, 1.0, 1.7}) {
    const GammaParams p = derive_params(gm);
    for (double t = 0.05; t <= 2.0; t += 0.05) {
      const double d1 = profile(p, t, 1);
      eq = std::max(eq, std::abs(d1 * d1 - positive_pow(profile(p, t, 0), -gm)));
      ode = std::max(ode, std::abs(profile(p, t, 2) +
                                   0.5 * gm * positive_pow(profile(p, t, 0), -gm - 1.0)));
    }
  }
  add("equipartition residual", eq, 1e-11);
  add("1D equation residual", ode, 1e-10);

  // profile energy closed form
  {
    const GammaParams p = derive_params(1.0);
    const Grid g = make_grid_1d(0.0, 1.0, 1024);
    const ScalarField u = field_from(g, [&](double x, double) { return profile(p, x, 0); });
    const double exact = 2.0 * p.c_alpha * p.c_alpha * p.alpha * p.alpha / (2.0 * p.alpha - 1.0);
    add("profile energy vs closed form (rel)",
        std::abs(energy_AP(u, p, false).total - exact) / exact, 0.02);
  }

  // Alt-Caffarelli ramp energies
  {
    const Grid g = make_grid_1d(0.0, 1.0, 256);
    const ScalarField r2 =
        field_from(g, [](double x, double) { return 2.0 * std::max(1.0 - x, 0.0); });
    add("AC ramp energy vs 5", std::abs(energy_AC(r2).total - 5.0), 1e-8);
  }

  // radial closed form mu = alpha in 1D
  for (double gm : {0.5, 1.0}) {
    const GammaParams p = derive_params(gm);
    add("radial mu(n=1) gamma=" + fmt17(gm), std::abs(radial_exterior(p, 1).mu - p.alpha),
        1e-5);
  }

  // weighted solver: exact quadratic and the flux-violating control
  {
    const double s = -0.5;
    WeightedProblem pb;
    pb.grid = make_half_grid(1, {-0.5, 0.0}, {0.5, 0.0}, {63, 0}, 32, 1.0 / 63, true);
    pb.s = s;
    auto vstar = [s](double x, double, double z) { return x * x - z * z / (1.0 + s); };
    pb.data = vstar;
    const WeightedField v = solve_weighted(pb, 1e-12);
    double err = 0.0;
    for (int j = 0; j < pb.grid.zrows; ++j)
      for (int i0 = 0; i0 < pb.grid.tn(0); ++i0)
        err = std::max(err,
                       std::abs(v.at(i0, 0, j) - vstar(pb.grid.tx(0, i0), 0.0, pb.grid.zrow(j))));
    add("weighted solver vs v*", err, 1e-9);

    auto bad = [s](double, double, double z) { return std::pow(z, 1.0 - s); };
    pb.data = bad;
    const WeightedField vb = solve_weighted(pb, 1e-10);
    double dev = 0.0;
    for (int j = 0; j < pb.grid.zrows; ++j)
      for (int i0 = 0; i0 < pb.grid.tn(0); ++i0)
        dev = std::max(dev,
                       std::abs(vb.at(i0, 0, j) - bad(pb.grid.tx(0, i0), 0.0, pb.grid.zrow(j))));
    add("negative control rejected (inverted)", 1e-9 / std::max(dev, 1e-300), 1e-6);
  }

  // barrier signs and the limit identity
  {
    std::vector<std::array<double, 3>> pts;
    for (int k = 1; k <= 200; ++k) pts.push_back({0.3 * (k % 7) / 7.0, 0.0, 0.1 * k / 200});
    double worst_res = 0.0;
    for (int which : {1, 2}) {
      const auto tb = barrier_residual_q(-0.9, which, 0.1, 10.0, 2, pts);
      for (const auto& r : tb) worst_res = std::max(worst_res, -r.residual);
    }
    add("barrier subsolution signs", worst_res, 1e-9);
    add("limit pair identity at s=-0.99", barrier_limit_pair_sup(-0.99), 0.02);
  }

  // 1D minimizer against the exact translated profile
  {
    const GammaParams p = derive_params(1.0);
    const Grid g = make_grid_1d(0.0, 1.0, 256);
    SolverConfig sc;
    sc.max_iters = 300000;
    const MinimizeResult res =
        minimize(g, BoundarySpec::dirichlet_1d(profile(p, 1.0, 0), 0.0),
                 ObjectiveAP{p, false}, sc);
    double err = 0.0;
    for (int i = 0; i <= 256; ++i)
      err = std::max(err, std::abs(res.field.at(i) - profile(p, 1.0 - g.x(i), 0)));
    add("1D minimizer vs profile (Linf)", err, 5e-3);

    const MinimizeResult ac =
        minimize(g, BoundarySpec::dirichlet_1d(2.0, 0.0), ObjectiveAC{}, sc);
    add("AC minimizer energy vs 5", std::abs(ac.energy.total - 5.0), 0.05);
  }

  bool all_pass = true;
  json report;
  json jrows = json::array();
  std::ofstream csv(dir / "validate_summary.csv");
  csv << "# check,measured,bound,pass\n";
  std::printf("%-42s %14s %12s  %s\n", "check", "measured", "bound", "status");
  for (const auto& r : rows) {
    all_pass = all_pass && r.pass;
    std::printf("%-42s %14.6g %12.4g  %s\n", r.name.c_str(), r.measured, r.bound,
                r.pass ? "pass" : "FAIL");
    csv << r.name << "," << fmt17(r.measured) << "," << fmt17(r.bound) << ","
        << (r.pass ? 1 : 0) << "\n";
    jrows.push_back({{"check", r.name},
                     {"measured", r.measured},
                     {"bound", r.bound},
                     {"pass", r.pass}});
  }
  report["config"] = {{"subcommand", "validate"}};
  report["checks"] = jrows;
  report["all_pass"] = all_pass;
  write_json(report, dir / "validate_report.json");
  std::printf("%s\n", all_pass ? "validate: all checks pass" : "validate: FAILURES present");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fblab: free boundary laboratory for singular-potential minimizers"};
  app.require_subcommand(1);

  std::string config_path, flag_out;
  int flag_seed = -1, flag_jobs = 0;
  app.add_option("--config", config_path, "JSON config file (flags win over it)");
  app.add_option("--out", flag_out, "output directory (default $FBLAB_OUT or ./out)");
  app.add_option("--seed", flag_seed, "seed for sampled searches");
  app.add_option("--jobs", flag_jobs, "parallel jobs for sweeps");

  auto* solve = app.add_subcommand("solve", "minimize the energy on a grid");
  double s_gamma = 0.0;
  int s_dim = 0, s_cells = 0;
  bool s_rescaled = false;
  std::string s_preset;
  double s_left = std::nan(""), s_right = std::nan("");
  solve->add_option("--gamma", s_gamma, "potential exponent in (0,2)");
  solve->add_option("--dim", s_dim, "grid dimension 1 or 2");
  solve->add_option("--cells", s_cells, "cells per axis");
  solve->add_flag("--rescaled", s_rescaled, "use the perimeter-normalized potential");
  solve->add_option("--preset", s_preset, "boundary preset ramp|constant|profile|radial_profile");
  solve->add_option("--left", s_left, "left Dirichlet value (1D ramp)");
  solve->add_option("--right", s_right, "right Dirichlet value (1D ramp)");

  auto* radial = app.add_subcommand("radial", "exterior free boundary by shooting");
  double r_gamma = 0.0, r_tol = 0.0;
  int r_dim = 0;
  radial->add_option("--gamma", r_gamma, "potential exponent");
  radial->add_option("--dim", r_dim, "space dimension n >= 1");
  radial->add_option("--shoot-tol", r_tol, "shooting tolerance on u(1)");

  auto* lin = app.add_subcommand("linearized", "degenerate linear half-space solve");
  double l_s = std::nan("");
  bool l_limit = false, l_exact = false;
  int l_nx = 0;
  lin->add_option("--s", l_s, "weight exponent in (-1, 0]");
  lin->add_flag("--limit", l_limit, "solve the s -> -1 limit problem");
  lin->add_flag("--exact-test", l_exact, "compare against the quadratic exact solution");
  lin->add_option("--nx", l_nx, "tangential cells (odd keeps the top row fixed)");

  auto* flat = app.add_subcommand("flatness", "flatness certificates for a field dump");
  std::string f_field;
  double f_gamma = 0.0, f_radius = 0.0;
  std::string f_mode;
  flat->add_option("--field", f_field, "field CSV (dump format)");
  flat->add_option("--gamma", f_gamma, "potential exponent");
  flat->add_option("--radius", f_radius, "certificate radius");
  flat->add_option("--mode", f_mode, "u|w");

  auto* mono = app.add_subcommand("monotonicity", "Weiss-type trace for a pair of dumps");
  std::string m_field, m_zeroset;
  mono->add_option("--field", m_field, "u field CSV");
  mono->add_option("--zeroset", m_zeroset, "zero-set indicator CSV");

  auto* sw2 = app.add_subcommand("sweep-gamma2", "compactness sweep toward gamma = 2");
  auto* sw0 = app.add_subcommand("sweep-gamma0", "compactness sweep toward gamma = 0");
  std::string sw_geometry;
  std::vector<double> sw_gammas;
  for (auto* sw : {sw2, sw0}) {
    sw->add_option("--geometry", sw_geometry, "oneD|radial");
    sw->add_option("--gammas", sw_gammas, "gamma list");
  }

  auto* val = app.add_subcommand("validate", "run the closed-form oracle suite");

  CLI11_PARSE(app, argc, argv);

  json cfg;
  try {
    cfg = load_config(config_path);
    // flags win over config values
    auto setif = [&](const char* sec, const char* key, const json& v, bool provided) {
      if (!provided) return;
      if (sec[0] == '\0')
        cfg[key] = v;
      else
        cfg[sec][key] = v;
    };
    setif("", "out", flag_out, !flag_out.empty());
    setif("", "seed", flag_seed, flag_seed >= 0);
    setif("", "jobs", flag_jobs, flag_jobs > 0);
    if (app.got_subcommand(solve)) {
      setif("", "gamma", s_gamma, solve->count("--gamma") > 0);
      setif("", "dim", s_dim, solve->count("--dim") > 0);
      setif("grid", "cells", s_cells, solve->count("--cells") > 0);
      setif("solver", "rescaled", s_rescaled, solve->count("--rescaled") > 0);
      setif("boundary", "preset", s_preset, solve->count("--preset") > 0);
      setif("boundary", "left", s_left, solve->count("--left") > 0);
      setif("boundary", "right", s_right, solve->count("--right") > 0);
    } else if (app.got_subcommand(radial)) {
      setif("", "gamma", r_gamma, radial->count("--gamma") > 0);
      setif("", "dim", r_dim, radial->count("--dim") > 0);
      setif("radial", "shoot_tol", r_tol, radial->count("--shoot-tol") > 0);
    } else if (app.got_subcommand(lin)) {
      setif("linearized", "s", l_s, lin->count("--s") > 0);
      setif("linearized", "limit", l_limit, lin->count("--limit") > 0);
      setif("linearized", "exact_test", l_exact, lin->count("--exact-test") > 0);
      setif("linearized", "nx", l_nx, lin->count("--nx") > 0);
    } else if (app.got_subcommand(flat)) {
      setif("flatness", "field", f_field, flat->count("--field") > 0);
      setif("", "gamma", f_gamma, flat->count("--gamma") > 0);
      setif("flatness", "radius", f_radius, flat->count("--radius") > 0);
      setif("flatness", "mode", f_mode, flat->count("--mode") > 0);
    } else if (app.got_subcommand(mono)) {
      setif("monotonicity", "field", m_field, mono->count("--field") > 0);
      setif("monotonicity", "zeroset", m_zeroset, mono->count("--zeroset") > 0);
    } else if (app.got_subcommand(sw2) || app.got_subcommand(sw0)) {
      auto* sw = app.got_subcommand(sw2) ? sw2 : sw0;
      setif("sweep", "geometry", sw_geometry, sw->count("--geometry") > 0);
      if (sw->count("--gammas") > 0) cfg["gammas"] = sw_gammas;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const int jobs = std::max(1, cfg_get(cfg, "", "jobs", 1));
  try {
    if (app.got_subcommand(solve)) return cmd_solve(cfg, flag_out);
    if (app.got_subcommand(radial)) return cmd_radial(cfg, flag_out);
    if (app.got_subcommand(lin)) return cmd_linearized(cfg, flag_out);
    if (app.got_subcommand(flat)) return cmd_flatness(cfg, flag_out);
    if (app.got_subcommand(mono)) return cmd_monotonicity(cfg, flag_out);
    if (app.got_subcommand(sw2)) return cmd_sweep(cfg, flag_out, true, jobs);
    if (app.got_subcommand(sw0)) return cmd_sweep(cfg, flag_out, false, jobs);
    if (app.got_subcommand(val)) return cmd_validate(cfg, flag_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    // compute failure: record it in report.json and exit 1
    try {
      const fs::path dir = out_dir(cfg, flag_out);
      json rep;
      rep["error"] = e.what();
      write_json(rep, dir / "report.json");
    } catch (...) {
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
