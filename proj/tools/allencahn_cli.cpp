// Command-line front end: thin wrappers over the library operations.
//
// Exit codes: 0 success, 2 validation failure, 3 solver failure, 4 failed acceptance check
// (report), 1 anything else.

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "allencahn/energy.hpp"
#include "allencahn/entire2k.hpp"
#include "allencahn/error.hpp"
#include "allencahn/experiment.hpp"
#include "allencahn/heteroclinic.hpp"
#include "allencahn/io.hpp"
#include "allencahn/potential.hpp"
#include "allencahn/spectrum.hpp"
#include "allencahn/surface.hpp"
#include "allencahn/varifold.hpp"

namespace ac = allencahn;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitAcceptance = 4;

struct PotentialArgs {
  std::string name = "quartic";
  std::vector<double> coefficients;
  double alpha = 0.25;
  double kappa = 0.6875;

  void attach(CLI::App* cmd) {
    cmd->add_option("--potential", name, "built-in potential name")->capture_default_str();
    cmd->add_option("--coefficients", coefficients, "polynomial coefficients c0,c1,... of W(t)")->delimiter(',');
    cmd->add_option("--alpha", alpha, "convexity radius")->capture_default_str();
    cmd->add_option("--kappa", kappa, "convexity constant")->capture_default_str();
  }
  ac::Potential make() const { return ac::make_potential(name, coefficients, alpha, kappa); }
};

void emit(const nlohmann::json& doc, const std::string& out) {
  if (out.empty())
    std::cout << doc.dump(2) << "\n";
  else
    ac::write_json(out, doc);
}

struct LoadedField {
  ac::Field field;
  ac::SurfaceMesh mesh;
  ac::DiscreteOperators ops;
  std::map<std::string, std::string> metadata;
};

LoadedField load_field(const std::string& path) {
  auto file = ac::read_field_csv(path);
  LoadedField out;
  out.mesh = ac::build_surface(ac::SurfaceSpec::parse(file.field.mesh_id));
  if (out.mesh.id != file.field.mesh_id || out.mesh.size() != file.field.size())
    throw ac::ValidationError(path + ": field does not match its mesh descriptor '" + file.field.mesh_id + "'");
  out.ops = ac::assemble_operators(out.mesh);
  out.field = std::move(file.field);
  out.metadata = std::move(file.metadata);
  return out;
}

// Checks a run report against the sphere oracles (or the generic ones elsewhere) and prints one
// line per check. Returns whether all passed.
bool check_report(const nlohmann::json& report, double energy_tol, std::ostream& os) {
  bool all = true;
  auto line = [&](const std::string& what, bool ok, const std::string& detail) {
    os << (ok ? "PASS " : "FAIL ") << what << ": " << detail << "\n";
    all = all && ok;
  };
  line("complete", report.value("complete", false), report.value("error", std::string{}));
  const auto& records = report.at("records");
  if (records.empty()) {
    line("records", false, "no records");
    return false;
  }
  const double sigma = report.at("units").at("sigma").get<double>();
  double previous_xi = std::numeric_limits<double>::infinity();
  for (const auto& rec : records) {
    std::ostringstream tag;
    tag << "eps=" << rec.at("epsilon").get<double>();
    const double residual = rec.at("residual").get<double>();
    line(tag.str() + " residual <= 1e-8", residual <= 1e-8, std::to_string(residual));
    const int index = rec.at("index").get<int>();
    line(tag.str() + " index <= 1", index <= 1, std::to_string(index));
    const double xi = rec.at("xi_l1_over_energy").get<double>();
    line(tag.str() + " xi/E decreasing", xi < previous_xi, std::to_string(xi));
    previous_xi = xi;
  }
  const auto& last = records.back();
  const auto spec = ac::SurfaceSpec::parse(last.at("mesh").get<std::string>());
  if (spec.kind == ac::SurfaceKind::sphere) {
    const double target = sigma * 2.0 * std::numbers::pi * spec.radius;
    const double e = last.at("energy").get<double>();
    line("energy vs sigma * equator", std::abs(e - target) <= energy_tol * target,
         std::to_string(e) + " vs " + std::to_string(target));
    const double hd = last.at("great_circle_hausdorff").get<double>();
    const double h = last.at("h_max").get<double>();
    line("zero set near a great circle", hd >= 0.0 && hd <= 5.0 * h,
         std::to_string(hd) + " <= " + std::to_string(5.0 * h));
  }
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Allen-Cahn critical points, Morse indices and interface diagnostics"};
  app.require_subcommand(1);

  // potential-check
  auto* check_cmd = app.add_subcommand("potential-check", "validate a double-well potential");
  PotentialArgs check_pot;
  check_pot.attach(check_cmd);
  int grid = 256;
  std::string check_out;
  check_cmd->add_option("--grid", grid, "samples per unit length")->capture_default_str();
  check_cmd->add_option("--out", check_out, "JSON output file (default stdout)");

  // heteroclinic
  auto* het_cmd = app.add_subcommand("heteroclinic", "tabulate the heteroclinic profile");
  PotentialArgs het_pot;
  het_pot.attach(het_cmd);
  double half_width = 12.0, step = 0.005;
  std::string het_out;
  het_cmd->add_option("--half-width", half_width)->capture_default_str();
  het_cmd->add_option("--step", step)->capture_default_str();
  het_cmd->add_option("--out", het_out, "CSV output (s,H,Hprime)")->required();

  // minmax
  auto* mm_cmd = app.add_subcommand("minmax", "min-max and epsilon continuation from a config file");
  std::string config_path;
  mm_cmd->add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);

  // entire
  auto* ent_cmd = app.add_subcommand("entire", "build, refine and analyse a 2k-ended solution");
  int ends = 4;
  std::vector<double> angles, offsets;
  double box = 12.0, h = 0.25, gluing_r = 0.0, tol = 1e-8, jacobi_angle = 0.37;
  std::string ent_out = "entire";
  ent_cmd->add_option("--ends", ends, "number of ends 2k")->capture_default_str();
  ent_cmd->add_option("--angles", angles, "end angles in radians (default equally spaced)")->delimiter(',');
  ent_cmd->add_option("--offsets", offsets, "line offsets (default 0)")->delimiter(',');
  ent_cmd->add_option("--box", box, "box half-width L")->capture_default_str();
  ent_cmd->add_option("--spacing", h, "target grid spacing")->capture_default_str();
  ent_cmd->add_option("--R", gluing_r, "gluing radius (default: minimal)");
  ent_cmd->add_option("--tol", tol, "Newton residual tolerance")->capture_default_str();
  ent_cmd->add_option("--jacobi-angle", jacobi_angle, "direction of the Jacobi field, radians")->capture_default_str();
  ent_cmd->add_option("--out", ent_out, "output directory")->capture_default_str();

  // index
  auto* idx_cmd = app.add_subcommand("index", "Morse index of a saved critical point");
  std::string idx_field, idx_out;
  int idx_ends = 0;
  int idx_q = 6;
  idx_cmd->add_option("--field", idx_field)->required()->check(CLI::ExistingFile);
  idx_cmd->add_option("--ends", idx_ends, "2k for the lower-bound check on planar boxes");
  idx_cmd->add_option("--q", idx_q, "eigenpairs to report")->capture_default_str();
  idx_cmd->add_option("--out", idx_out, "JSON output file (default stdout)");

  // levelset
  auto* ls_cmd = app.add_subcommand("levelset", "extract level-set polylines of a saved field");
  std::string ls_field, ls_out;
  double level = 0.0;
  ls_cmd->add_option("--field", ls_field)->required()->check(CLI::ExistingFile);
  ls_cmd->add_option("--t", level, "level")->capture_default_str();
  ls_cmd->add_option("--out", ls_out, "CSV output (curve_id,x,y,z)")->required();

  // density
  auto* den_cmd = app.add_subcommand("density", "density ratios of a saved field");
  std::string den_field, den_out;
  std::vector<double> center, radii;
  double mono_m = 0.0;
  den_cmd->add_option("--field", den_field)->required()->check(CLI::ExistingFile);
  den_cmd->add_option("--center", center, "point x,y[,z]; the nearest vertex is used")->delimiter(',')->required();
  den_cmd->add_option("--radii", radii, "sorted radii")->delimiter(',')->required();
  den_cmd->add_option("--m", mono_m, "monotonicity constant")->capture_default_str();
  den_cmd->add_option("--out", den_out, "CSV output (r,mass,ratio,monotonicity_ratio)")->required();

  // report
  auto* rep_cmd = app.add_subcommand("report", "check a run report against the acceptance oracles");
  std::string rep_path;
  double energy_tol = 0.10;
  rep_cmd->add_option("--report", rep_path, "report.json from minmax")->required()->check(CLI::ExistingFile);
  rep_cmd->add_option("--energy-tol", energy_tol, "relative energy tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*check_cmd) {
      const auto report = ac::validate_potential(check_pot.make(), grid);
      emit(report.to_json(), check_out);
      return report.pass() ? 0 : kExitValidation;
    }
    if (*het_cmd) {
      const auto profile = ac::solve_heteroclinic(het_pot.make(), half_width, step);
      ac::write_profile_csv(het_out, profile);
      return 0;
    }
    if (*mm_cmd) {
      const auto config = ac::RunConfig::from_ini(config_path);
      const auto report = ac::run_experiment(config);
      std::cout << report.to_json().dump(2) << "\n";
      if (report.complete) return 0;
      return report.error_kind == "validation" ? kExitValidation : kExitSolver;
    }
    if (*ent_cmd) {
      if (angles.empty())
        for (int j = 0; j < ends; ++j) angles.push_back(2.0 * std::numbers::pi * j / ends);
      if (offsets.empty()) offsets.assign(angles.size(), 0.0);
      const auto cfg = ac::make_line_config(angles, offsets);
      const auto p = ac::quartic_potential();
      const auto profile = ac::solve_heteroclinic(p);
      ac::SurfaceSpec spec;
      spec.kind = ac::SurfaceKind::planar_box;
      spec.half_width = box;
      spec.resolution = static_cast<int>(std::ceil(2.0 * box / h));
      const auto mesh = ac::build_surface(spec);
      const auto ops = ac::assemble_operators(mesh);
      const auto u0 = ac::approximate_solution(cfg, profile, mesh, gluing_r);
      ac::NewtonReport newton;
      const auto u = ac::refine_entire(u0, mesh, ops, p, tol, &newton);
      const std::filesystem::path dir = ent_out;
      ac::write_field_csv(dir / "approximate.csv", u0);
      ac::write_field_csv(dir / "refined.csv", u);
      const auto verdict = ac::index_lower_bound_check(u, mesh, ops, p, cfg.k, {},
                                                       {std::cos(jacobi_angle), std::sin(jacobi_angle)});
      ac::write_json(dir / "nodal.json", verdict.nodal.to_json());
      ac::write_json(dir / "spectrum.json", verdict.spectrum.to_json());
      nlohmann::json summary = verdict.to_json();
      summary["config"] = cfg.to_json();
      summary["newton_iterations"] = newton.iterations;
      summary["residual"] = newton.residual;
      summary["energy"] = ac::energy(u, ops, p);
      ac::write_json(dir / "summary.json", summary);
      std::cout << summary.dump(2) << "\n";
      return 0;
    }
    if (*idx_cmd) {
      const auto loaded = load_field(idx_field);
      const auto p = ac::quartic_potential();
      ac::SpectrumOptions opts;
      opts.q = idx_q;
      if (loaded.mesh.kind == ac::SurfaceKind::planar_box && idx_ends > 0) {
        const auto verdict = ac::index_lower_bound_check(loaded.field, loaded.mesh, loaded.ops, p, idx_ends / 2, opts);
        emit(verdict.to_json(), idx_out);
      } else {
        const auto free = loaded.mesh.closed() ? std::vector<char>{} : ac::interior_mask(loaded.mesh);
        emit(ac::morse_index(loaded.field, loaded.ops, p, opts, free).to_json(), idx_out);
      }
      return 0;
    }
    if (*ls_cmd) {
      const auto loaded = load_field(ls_field);
      const auto curves = ac::extract_level_set(loaded.field.values, loaded.mesh, level);
      ac::write_curves_csv(ls_out, curves);
      std::cout << curves.polylines.size() << " curves, total length " << curves.total_length << "\n";
      return 0;
    }
    if (*den_cmd) {
      const auto loaded = load_field(den_field);
      const auto p = ac::quartic_potential();
      Eigen::Vector3d x = Eigen::Vector3d::Zero();
      if (center.size() < 2 || center.size() > 3) throw ac::ValidationError("--center needs 2 or 3 coordinates");
      for (std::size_t k = 0; k < center.size(); ++k) x[static_cast<Eigen::Index>(k)] = center[k];
      const auto constants = ac::interface_constants(p);
      const auto report = ac::density_ratio(loaded.field, loaded.mesh, loaded.ops, p, constants.sigma,
                                            ac::nearest_vertex(loaded.mesh, x), radii, mono_m);
      ac::write_density_csv(den_out, report);
      return 0;
    }
    if (*rep_cmd) {
      const auto report = ac::read_json(rep_path);
      return check_report(report, energy_tol, std::cout) ? 0 : kExitAcceptance;
    }
  } catch (const ac::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ac::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
