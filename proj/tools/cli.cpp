#include "cli.hpp"

#include "tf/analysis.hpp"
#include "tf/atom.hpp"
#include "tf/corrections.hpp"
#include "tf/error.hpp"
#include "tf/molecular.hpp"
#include "tf/units.hpp"
#include "tf/universal.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace tf::cli {

using json = nlohmann::ordered_json;

namespace {

double field_number(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
  return v.get<double>();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw ParseError("failed writing '" + path + "'");
}

json energy_json(const EnergyBreakdown& e) {
  return {{"kinetic", e.kinetic},       {"attraction", e.attraction}, {"repulsion", e.repulsion},
          {"nuclear", e.nuclear},       {"weizsacker", e.weizsacker}, {"dirac", e.dirac},
          {"total", e.total}};
}

json nuclei_json(const NuclearConfiguration& nuclei) {
  json arr = json::array();
  for (const auto& n : nuclei.nuclei())
    arr.push_back({{"Z", n.charge}, {"R", {n.position[0], n.position[1], n.position[2]}}});
  return arr;
}

json solver_json(const SolverConfig& c) {
  return {{"radial_node_count", c.radial_node_count},
          {"radial_xmin", c.radial_xmin},
          {"radial_xmax", c.radial_xmax},
          {"ode_tolerance", c.ode_tolerance},
          {"grid3d_extent", c.grid3d_extent},
          {"grid3d_spacing", c.grid3d_spacing},
          {"grid3d_padding", c.grid3d_padding},
          {"mixing_alpha", c.mixing_alpha},
          {"max_iterations", c.max_iterations},
          {"residual_tolerance", c.residual_tolerance},
          {"scf_residual_tolerance", c.scf_residual_tolerance},
          {"mu_bisection_tolerance", c.mu_bisection_tolerance},
          {"cW", c.cW},
          {"cD", c.cD}};
}

json header(const std::string& command) { return {{"format_version", kFormatVersion}, {"command", command}}; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void append_le(std::string& buf, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

struct Emitter {
  std::ostream& out;
  std::string path;
  void operator()(const std::string& content) const {
    if (path.empty())
      out << content;
    else
      write_file(path, content);
  }
};

void add_solver_options(CLI::App* app, SolverConfig& c) {
  app->add_option("--nodes", c.radial_node_count, "radial grid nodes")->check(CLI::PositiveNumber);
  app->add_option("--xmin", c.radial_xmin, "innermost radial node in units of a(Z)");
  app->add_option("--xmax", c.radial_xmax, "outermost radial node in units of a(Z)");
  app->add_option("--ode-tolerance", c.ode_tolerance, "relative tolerance of the ODE integrator");
  app->add_option("--grid", c.grid3d_extent, "Cartesian grid nodes per axis");
  app->add_option("--spacing", c.grid3d_spacing, "Cartesian spacing (0: from padding)");
  app->add_option("--padding", c.grid3d_padding, "box margin in units of a(Z)");
  app->add_option("--alpha", c.mixing_alpha, "SCF mixing parameter");
  app->add_option("--max-iterations", c.max_iterations, "iteration cap");
  app->add_option("--tolerance", c.residual_tolerance, "radial residual tolerance");
  app->add_option("--scf-tolerance", c.scf_residual_tolerance, "SCF residual tolerance");
}

} // namespace

MoleculeFile parse_molecule(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed molecule file: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("molecule file: top level must be an object");
  if (!j.contains("nuclei")) throw ParseError("molecule file: missing field 'nuclei'");
  const auto& arr = j.at("nuclei");
  if (!arr.is_array()) throw ParseError("nuclei: expected an array");
  std::vector<Nucleus> nuclei;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "nuclei[" + std::to_string(i) + "]";
    const auto& n = arr[i];
    if (!n.is_object()) throw ParseError(where + ": expected an object");
    const double Z = field_number(n, where, "Z");
    if (!n.contains("R")) throw ParseError(where + ": missing field 'R'");
    const auto& R = n.at("R");
    if (!R.is_array() || R.size() != 3) throw ParseError(where + ".R: expected [x, y, z]");
    Vec3 pos{};
    for (std::size_t k = 0; k < 3; ++k) {
      if (!R[k].is_number()) throw ParseError(where + ".R[" + std::to_string(k) + "]: expected a number");
      pos[k] = R[k].get<double>();
    }
    nuclei.push_back({Z, pos});
  }
  MoleculeFile m{NuclearConfiguration(std::move(nuclei)), std::nullopt};
  if (j.contains("N")) m.electrons = field_number(j, "molecule file", "N");
  return m;
}

MoleculeFile parse_molecule_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open molecule file '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return parse_molecule(os.str());
}

std::string molecule_to_json(const NuclearConfiguration& nuclei) { return dump(json{{"nuclei", nuclei_json(nuclei)}}); }

std::string result_json(const std::string& command, const TFSolution& sol, const SolverConfig& config) {
  json j = header(command);
  j["nuclei"] = nuclei_json(sol.config);
  j["representation"] = sol.is_radial() ? "radial" : "grid3d";
  j["electrons"] = sol.electron_count;
  j["clamped"] = sol.clamped;
  j["neutral"] = sol.neutral();
  j["mu"] = std::isfinite(sol.mu) ? json(sol.mu) : json(nullptr);
  j["energy"] = energy_json(sol.energy);
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["support_end"] = sol.support_end ? json(*sol.support_end) : json(nullptr);
  j["solver"] = solver_json(config);
  return dump(j);
}

std::string radial_profile_csv(const TFSolution& sol) {
  if (!sol.is_radial()) throw DomainError("radial profile requested for a Cartesian solution");
  const auto& f = sol.radial();
  std::ostringstream os;
  os << std::setprecision(17) << "r,rho,phi\n";
  for (std::size_t i = 0; i < f.density.grid.size(); ++i)
    os << f.density.grid[i] << ',' << f.density.values[i] << ',' << f.potential[i] << '\n';
  return os.str();
}

void write_grid_fields(const std::string& prefix, const TFSolution& sol) {
  if (sol.is_radial()) throw DomainError("grid fields requested for a radial solution");
  const auto& f = sol.grid();
  const auto& g = f.density.grid;
  auto base = [](const std::string& p) {
    const auto slash = p.find_last_of('/');
    return slash == std::string::npos ? p : p.substr(slash + 1);
  };
  const std::string names[2] = {prefix + "_density.bin", prefix + "_potential.bin"};
  const ScalarField3D* fields[2] = {&f.density, &f.potential};
  for (int k = 0; k < 2; ++k) {
    std::string buf;
    buf.reserve(8 * fields[k]->values.size());
    for (double v : fields[k]->values) append_le(buf, v);
    write_file(names[k], buf);
  }
  json j = header("grid_fields");
  j["shape"] = {g.extents[0], g.extents[1], g.extents[2]};
  j["spacing"] = {g.spacing[0], g.spacing[1], g.spacing[2]};
  j["origin"] = {g.origin[0], g.origin[1], g.origin[2]};
  j["dtype"] = "float64";
  j["byte_order"] = "little";
  j["element_order"] = "x fastest, then y, then z";
  j["fields"] = {{"density", base(names[0])}, {"potential", base(names[1])}};
  j["mu"] = sol.mu;
  write_file(prefix + ".json", dump(j));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thomas-Fermi solver suite", "tf"};
  app.require_subcommand(1);
  SolverConfig config;
  std::function<void()> action;

  // atom
  double Z = 1.0, N = -1.0, q = 0.0, cW = 0.0, cD = 0.0;
  std::string out_path, profile_path, field_prefix, config_path;
  auto* atom = app.add_subcommand("atom", "radial atom or ion");
  atom->add_option("--Z", Z, "nuclear charge")->required();
  atom->add_option("--N", N, "electron count (default: neutral)");
  atom->add_option("--cW", cW, "von Weizsaecker coefficient");
  atom->add_option("--cD", cD, "Dirac exchange coefficient");
  atom->add_option("--out", out_path, "result JSON (default: stdout)");
  atom->add_option("--profile", profile_path, "CSV profile r,rho,phi");
  add_solver_options(atom, config);
  atom->callback([&] {
    action = [&] {
      const double electrons = N < 0.0 ? Z : N;
      config.cW = cW;
      config.cD = cD;
      const auto sol = cW > 0.0 || cD > 0.0 ? minimize_corrected_atom(Z, electrons, cW, cD, config)
                                            : solve_atom(Z, electrons, config);
      Emitter{out, out_path}(result_json("atom", sol, config));
      if (!profile_path.empty()) write_file(profile_path, radial_profile_csv(sol));
    };
  });

  auto* molecule = app.add_subcommand("molecule", "3D self-consistent molecule");
  molecule->add_option("--config", config_path, "molecule JSON file")->required();
  molecule->add_option("--N", N, "electron count (overrides the file; default: neutral)");
  molecule->add_option("--out", out_path, "result JSON (default: stdout)");
  molecule->add_option("--fields", field_prefix, "write density/potential binaries with this prefix");
  add_solver_options(molecule, config);
  molecule->callback([&] {
    action = [&] {
      const auto m = parse_molecule_file(config_path);
      const double electrons = N >= 0.0 ? N : m.electrons.value_or(m.nuclei.total_charge());
      const auto sol = scf_solve(m.nuclei, electrons, config);
      Emitter{out, out_path}(result_json("molecule", sol, config));
      if (!field_prefix.empty()) write_grid_fields(field_prefix, sol);
    };
  });

  auto* universal = app.add_subcommand("universal", "dimensionless universal solution");
  universal->add_option("--q", q, "ionisation fraction 1 - N/Z in [0, 1)");
  universal->add_option("--out", out_path, "result JSON");
  add_solver_options(universal, config);
  universal->callback([&] {
    action = [&] {
      const auto u = solve_universal(q, universal_options(config));
      out << "initial_slope_B " << std::setprecision(10) << u.initial_slope << '\n';
      if (u.support_end) out << "support_end_x0 " << std::setprecision(10) << *u.support_end << '\n';
      if (!out_path.empty()) {
        json j = header("universal");
        j["q"] = q;
        j["initial_slope_B"] = u.initial_slope;
        j["support_end_x0"] = u.support_end ? json(*u.support_end) : json(nullptr);
        if (!u.support_end) j["asymptotic_coefficient"] = u.asymptotic_coefficient;
        j["solver"] = solver_json(config);
        write_file(out_path, dump(j));
      }
    };
  });

  auto* teller = app.add_subcommand("teller", "E(molecule) - sum of atomic energies");
  teller->add_option("--config", config_path, "molecule JSON file")->required();
  teller->add_option("--out", out_path, "result JSON");
  add_solver_options(teller, config);
  teller->callback([&] {
    action = [&] {
      const auto m = parse_molecule_file(config_path);
      const double gap = teller_gap(m.nuclei, m.nuclei.total_charge(), config);
      out << "teller_gap " << std::setprecision(10) << gap << '\n';
      if (!out_path.empty()) {
        json j = header("teller");
        j["nuclei"] = nuclei_json(m.nuclei);
        j["gap"] = gap;
        j["solver"] = solver_json(config);
        write_file(out_path, dump(j));
      }
    };
  });

  std::vector<double> scales{1.0, 1.25, 1.5, 2.0};
  auto* pressure = app.add_subcommand("pressure", "neutral energies under dilation");
  pressure->add_option("--config", config_path, "molecule JSON file")->required();
  pressure->add_option("--scales", scales, "dilation factors, starting at 1")->delimiter(',');
  pressure->add_option("--out", out_path, "result JSON");
  add_solver_options(pressure, config);
  pressure->callback([&] {
    action = [&] {
      const auto m = parse_molecule_file(config_path);
      const auto points = pressure_scan(m.nuclei, scales, config);
      json arr = json::array();
      bool decreasing = true;
      out << "scale,energy\n" << std::setprecision(17);
      for (std::size_t i = 0; i < points.size(); ++i) {
        out << points[i].scale << ',' << points[i].energy << '\n';
        arr.push_back({{"scale", points[i].scale}, {"energy", points[i].energy}});
        if (i > 0) decreasing = decreasing && points[i].energy < points[i - 1].energy;
      }
      if (!out_path.empty()) {
        json j = header("pressure");
        j["nuclei"] = nuclei_json(m.nuclei);
        j["points"] = arr;
        j["strictly_decreasing"] = decreasing;
        j["solver"] = solver_json(config);
        write_file(out_path, dump(j));
      }
    };
  });

  std::vector<double> samples;
  auto* mu_curve = app.add_subcommand("mu-curve", "chemical potential against electron count");
  mu_curve->add_option("--Z", Z, "nuclear charge")->required();
  mu_curve->add_option("--samples", samples, "electron counts in (0, Z], increasing")->delimiter(',');
  mu_curve->add_option("--out", out_path, "CSV file (default: stdout)");
  add_solver_options(mu_curve, config);
  mu_curve->callback([&] {
    action = [&] {
      if (samples.empty())
        for (int k = 1; k <= 4; ++k) samples.push_back(0.25 * k * Z);
      std::ostringstream os;
      os << std::setprecision(17) << "N,mu\n";
      for (const auto& s : chemical_potential_curve(Z, samples, config)) os << s.electrons << ',' << s.mu << '\n';
      Emitter{out, out_path}(os.str());
    };
  });

  bool checks_passed = true;
  auto* check = app.add_subcommand("check", "run the analysis suite");
  check->add_option("--out", out_path, "report JSON (default: stdout)");
  add_solver_options(check, config);
  check->callback([&] {
    action = [&] {
      json j = header("check");
      json arr = json::array();
      for (const auto& c : run_checks(config)) {
        arr.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}, {"detail", c.detail}});
        checks_passed = checks_passed && c.passed;
      }
      j["checks"] = arr;
      j["all_passed"] = checks_passed;
      j["solver"] = solver_json(config);
      Emitter{out, out_path}(dump(j));
    };
  });

  auto* tail = app.add_subcommand("tail", "Sommerfeld tail constant of the neutral atom");
  tail->add_option("--Z", Z, "nuclear charge")->required();
  tail->add_option("--out", out_path, "result JSON");
  add_solver_options(tail, config);
  tail->callback([&] {
    action = [&] {
      const double C = tail_constant(solve_atom(Z, Z, config));
      const double dev = std::abs(C - kSommerfeldConstant) / kSommerfeldConstant;
      out << std::setprecision(10) << "tail_constant " << C << "\nreference_243pi " << kSommerfeldConstant
          << "\nrelative_deviation " << dev << '\n';
      if (!out_path.empty()) {
        json j = header("tail");
        j["Z"] = Z;
        j["tail_constant"] = C;
        j["reference"] = kSommerfeldConstant;
        j["relative_deviation"] = dev;
        j["solver"] = solver_json(config);
        write_file(out_path, dump(j));
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    config.validate();
    action();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConvergenceError& e) {
    err << "solver failure: " << e.what() << " (" << e.history().size() << " iterations";
    if (!e.history().empty()) err << ", last residual " << e.history().back();
    err << ")\n";
    return 1;
  } catch (const Error& e) {
    err << "solver failure: " << e.what() << '\n';
    return 1;
  }
  return checks_passed ? 0 : 1;
}

} // namespace tf::cli
