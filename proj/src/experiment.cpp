#include "allencahn/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "allencahn/error.hpp"
#include "allencahn/heteroclinic.hpp"
#include "allencahn/io.hpp"
#include "allencahn/varifold.hpp"

namespace allencahn {

namespace {

namespace pt = boost::property_tree;

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item.substr(first), &used));
      if (item.find_first_not_of(" \t", first + used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("config key '" + key + "': cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

template <typename T>
void read(const pt::ptree& tree, const std::string& key, T& value) {
  try {
    // The defaulted overload of get() swallows conversion errors.
    if (tree.get_optional<std::string>(key)) value = tree.get<T>(key);
  } catch (const pt::ptree_bad_data&) {
    throw ValidationError("config key '" + key + "' has a malformed value");
  }
}

void read_list(const pt::ptree& tree, const std::string& key, std::vector<double>& value) {
  if (auto text = tree.get_optional<std::string>(key)) value = parse_list(*text, key);
}

RunConfig from_tree(const pt::ptree& tree) {
  static const std::vector<std::string> sections{"run", "potential", "surface", "minmax", "spectrum", "varifold"};
  for (const auto& [name, child] : tree)
    if (std::find(sections.begin(), sections.end(), name) == sections.end())
      throw ValidationError("unknown config section [" + name + "]");

  RunConfig c;
  read_list(tree, "run.epsilons", c.epsilons);
  std::string output = c.output_dir.string();
  read(tree, "run.output_dir", output);
  c.output_dir = output;
  read(tree, "run.seed", c.seed);

  read(tree, "potential.name", c.potential_name);
  read_list(tree, "potential.coefficients", c.coefficients);
  read(tree, "potential.alpha", c.alpha);
  read(tree, "potential.kappa", c.kappa);

  std::string kind = to_string(c.surface.kind);
  read(tree, "surface.kind", kind);
  c.surface.kind = surface_kind_from_string(kind);
  read(tree, "surface.resolution", c.surface.resolution);
  read(tree, "surface.radius", c.surface.radius);
  std::vector<double> axes;
  read_list(tree, "surface.semi_axes", axes);
  if (!axes.empty()) {
    if (axes.size() != 3) throw ValidationError("surface.semi_axes needs three values");
    c.surface.semi_axes = {axes[0], axes[1], axes[2]};
  }
  read(tree, "surface.ring_radius", c.surface.ring_radius);
  read(tree, "surface.tube_radius", c.surface.tube_radius);
  read(tree, "surface.side", c.surface.side);
  read(tree, "surface.half_width", c.surface.half_width);
  read(tree, "surface.auto_resolution", c.auto_resolution);
  read(tree, "surface.h_ratio", c.h_ratio);

  read(tree, "minmax.path_nodes", c.path_nodes);
  read(tree, "minmax.max_iters", c.minmax.max_iters);
  read(tree, "minmax.step", c.minmax.step);
  read(tree, "minmax.reparam_every", c.minmax.reparam_every);
  read(tree, "minmax.stall_tol", c.minmax.stall_tol);
  read(tree, "minmax.residual_tol", c.minmax.residual_tol);
  read(tree, "minmax.newton_tol", c.minmax.newton.tol);
  read(tree, "minmax.newton_max_iters", c.minmax.newton.max_iters);

  read(tree, "spectrum.q", c.spectrum.q);
  read(tree, "spectrum.tol", c.spectrum.tol);
  read(tree, "spectrum.dense_threshold", c.spectrum.dense_threshold);
  read(tree, "spectrum.max_iters", c.spectrum.max_iters);
  read(tree, "spectrum.residual_tol", c.spectrum.residual_tol);

  read(tree, "varifold.level", c.level);
  read_list(tree, "varifold.radii", c.density_radii);
  read(tree, "varifold.monotonicity_m", c.monotonicity_m);
  c.validate();
  return c;
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

bool is_icosphere(const SurfaceSpec& s) { return s.kind == SurfaceKind::sphere || s.kind == SurfaceKind::ellipsoid; }

// Mesh resolution for a target h_max.
SurfaceSpec spec_for(const RunConfig& c, double eps) {
  SurfaceSpec spec = c.surface;
  if (!c.auto_resolution) return spec;
  const double target = c.h_ratio * eps;
  switch (spec.kind) {
    case SurfaceKind::sphere:
    case SurfaceKind::ellipsoid:
      for (spec.resolution = 1; spec.resolution < 8; ++spec.resolution)
        if (build_surface(spec).h_max <= target) break;
      break;
    case SurfaceKind::flat_torus:
      spec.resolution = static_cast<int>(std::ceil(std::sqrt(2.0) * spec.side / target));
      break;
    case SurfaceKind::planar_box:
      spec.resolution = static_cast<int>(std::ceil(std::sqrt(2.0) * 2.0 * spec.half_width / target));
      break;
    case SurfaceKind::torus_of_revolution:
      break;
  }
  return spec;
}

}  // namespace

RunConfig RunConfig::from_ini(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  return from_tree(tree);
}

RunConfig RunConfig::from_ini_string(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  return from_tree(tree);
}

void RunConfig::validate() const {
  if (epsilons.empty()) throw ValidationError("run.epsilons must list at least one epsilon");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw ValidationError("run.epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ValidationError("run.epsilons must be strictly decreasing");
  }
  if (path_nodes < 8) throw ValidationError("minmax.path_nodes must be at least 8");
  if (!(h_ratio > 0.0)) throw ValidationError("surface.h_ratio must be positive");
  if (!(std::abs(level) < 1.0)) throw ValidationError("varifold.level must satisfy |t| < 1");
  for (std::size_t i = 0; i < density_radii.size(); ++i)
    if (!(density_radii[i] > 0.0) || (i > 0 && density_radii[i] < density_radii[i - 1]))
      throw ValidationError("varifold.radii must be positive and sorted");
}

nlohmann::json RunConfig::to_json() const {
  return {{"run", {{"epsilons", epsilons}, {"output_dir", output_dir.string()}, {"seed", seed}}},
          {"potential", {{"name", potential_name}, {"coefficients", coefficients}, {"alpha", alpha}, {"kappa", kappa}}},
          {"surface",
           {{"descriptor", surface.descriptor()}, {"auto_resolution", auto_resolution}, {"h_ratio", h_ratio}}},
          {"minmax",
           {{"path_nodes", path_nodes},
            {"max_iters", minmax.max_iters},
            {"step", minmax.step},
            {"reparam_every", minmax.reparam_every},
            {"stall_tol", minmax.stall_tol},
            {"residual_tol", minmax.residual_tol},
            {"newton_tol", minmax.newton.tol},
            {"newton_max_iters", minmax.newton.max_iters}}},
          {"spectrum",
           {{"q", spectrum.q},
            {"tol", spectrum.tol},
            {"dense_threshold", spectrum.dense_threshold},
            {"max_iters", spectrum.max_iters},
            {"residual_tol", spectrum.residual_tol}}},
          {"varifold", {{"level", level}, {"radii", density_radii}, {"monotonicity_m", monotonicity_m}}}};
}

std::string RunConfig::hash() const {
  // The output location does not change the computation.
  auto doc = to_json();
  doc["run"].erase("output_dir");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return hex64(h);
}

nlohmann::json EpsilonRecord::to_json() const {
  return {{"epsilon", epsilon},
          {"mesh", mesh},
          {"vertices", vertices},
          {"h_max", h_max},
          {"energy", energy},
          {"residual", residual},
          {"index", index},
          {"nullity", nullity},
          {"lowest_eigenvalues", lowest_eigenvalues},
          {"level_set_length", level_set_length},
          {"level_set_curves", level_set_curves},
          {"xi_l1", xi_l1},
          {"xi_l1_over_energy", xi_l1_over_energy},
          {"great_circle_hausdorff", great_circle_hausdorff},
          {"density_ratio", density_ratio},
          {"method", method},
          {"field_path", field_path}};
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  return {{"schema_version", kSchemaVersion},
          {"provenance", {{"config_hash", config_hash}, {"software", "allencahn 0.1.0"}}},
          {"units", {{"normalization", "sigma"}, {"sigma", sigma}, {"h0", h0}}},
          {"complete", complete},
          {"error", error},
          {"error_kind", error_kind},
          {"records", recs}};
}

RunReport run_experiment(const RunConfig& config) {
  config.validate();
  RunReport report;
  report.config_hash = config.hash();
  const auto& out_dir = config.output_dir;
  std::filesystem::create_directories(out_dir);

  auto finish = [&]() {
    write_json(out_dir / "report.json", report.to_json());
    std::ofstream csv(out_dir / "records.csv");
    csv << std::setprecision(17)
        << "epsilon,vertices,h_max,energy,residual,index,nullity,level_set_length,xi_l1_over_energy\n";
    for (const auto& r : report.records)
      csv << r.epsilon << "," << r.vertices << "," << r.h_max << "," << r.energy << "," << r.residual << ","
          << r.index << "," << r.nullity << "," << r.level_set_length << "," << r.xi_l1_over_energy << "\n";
    return report;
  };

  try {
    const Potential p = make_potential(config.potential_name, config.coefficients, config.alpha, config.kappa);
    const auto check = validate_potential(p, 64);
    if (!check.pass()) throw ValidationError("potential '" + p.name + "' fails validation: " + check.to_json().dump());
    const auto constants = interface_constants(p);
    report.sigma = constants.sigma;
    report.h0 = constants.h0;
    const auto profile = solve_heteroclinic(p);
    const double m = config.monotonicity_m >= 0.0
                         ? config.monotonicity_m
                         : (config.surface.kind == SurfaceKind::sphere ? 1.0 / (config.surface.radius * config.surface.radius) : 0.0);

    // Icospheres get a level per epsilon; other surfaces use one mesh fine enough for the last.
    auto mesh_for = [&](double eps) {
      return build_surface(spec_for(config, is_icosphere(config.surface) ? eps : config.epsilons.back()));
    };
    SurfaceMesh mesh = mesh_for(config.epsilons.front());
    DiscreteOperators ops = assemble_operators(mesh);
    Field u;
    std::string method;

    auto fresh_minmax = [&](double eps) {
      const Path path = initial_path(mesh, profile, eps, config.path_nodes, config.seed);
      const auto result = mountain_pass(path, mesh, ops, p, config.minmax);
      u = result.critical_point;
      method = "minmax";
      std::ostringstream name;
      name << "minmax_history_eps_" << std::setprecision(6) << eps << ".csv";
      std::ofstream history(out_dir / name.str());
      history << std::setprecision(17) << "sweep,path_max\n";
      for (std::size_t k = 0; k < result.history.size(); ++k) history << k + 1 << "," << result.history[k] << "\n";
    };

    auto newton_opts = config.minmax.newton;
    newton_opts.tol = config.minmax.residual_tol;

    double current_eps = 0.0;
    for (double eps : config.epsilons) {
      if (current_eps == 0.0) {
        fresh_minmax(eps);
      } else {
        // Substeps of at most sqrt(2) in epsilon keep the sharpened guess in Newton's basin.
        const int steps = std::max(1, static_cast<int>(std::ceil(std::log(current_eps / eps) / std::log(std::sqrt(2.0)) - 1e-9)));
        bool ok = true;
        for (int s = 1; s <= steps && ok; ++s) {
          const double next = current_eps * std::pow(eps / current_eps, static_cast<double>(s) / steps);
          const double prev = u.epsilon;
          Eigen::VectorXd values = sharpen(u.values, prev, next, profile);
          SurfaceMesh target = mesh_for(next);
          while (target.size() > mesh.size()) {
            SurfaceSpec finer = mesh.spec;
            finer.resolution += 1;
            mesh = build_surface(finer);
            values = prolongate(mesh, values);
          }
          if (target.id != mesh.id) mesh = std::move(target);
          ops = assemble_operators(mesh);
          try {
            u = newton_refine(Field{values, next, mesh.id}, mesh, ops, p, newton_opts);
            method = "continuation";
          } catch (const SolverError& e) {
            std::cerr << "warning: continuation Newton failed at eps = " << next << " (" << e.what()
                      << "); restarting min-max\n";
            ok = false;
          }
        }
        if (!ok) {
          mesh = mesh_for(eps);
          ops = assemble_operators(mesh);
          fresh_minmax(eps);
        }
      }
      current_eps = eps;

      EpsilonRecord rec;
      rec.epsilon = eps;
      rec.mesh = mesh.id;
      rec.vertices = mesh.size();
      rec.h_max = mesh.h_max;
      rec.method = method;
      rec.energy = energy(u, ops, p);
      const std::vector<char> free = mesh.closed() ? std::vector<char>{} : interior_mask(mesh);
      rec.residual = residual_norm(gradient(u, ops, p), ops, free);
      auto spectral_opts = config.spectrum;
      spectral_opts.critical_tol = std::max(spectral_opts.critical_tol, 10.0 * rec.residual);
      const auto spectrum = morse_index(u, ops, p, spectral_opts, free);
      rec.index = spectrum.index;
      rec.nullity = spectrum.nullity;
      rec.lowest_eigenvalues = spectrum.lowest_eigenvalues;
      const auto xi = discrepancy_xi(u, mesh, ops, p);
      rec.xi_l1 = xi.l1_norm;
      rec.xi_l1_over_energy = xi.l1_norm / rec.energy;
      const auto curves = extract_level_set(u.values, mesh, config.level);
      rec.level_set_length = curves.total_length;
      rec.level_set_curves = static_cast<int>(curves.polylines.size());
      if (mesh.kind == SurfaceKind::sphere && !curves.polylines.empty())
        rec.great_circle_hausdorff = fit_great_circle(curves, config.surface.radius).hausdorff;
      if (!curves.polylines.empty() && !config.density_radii.empty()) {
        const int center = nearest_vertex(mesh, curves.polylines.front().points.front());
        rec.density_ratio = density_ratio(u, mesh, ops, p, constants.sigma, center, config.density_radii, m).ratio;
      }
      std::ostringstream name;
      name << "field_eps_" << std::setprecision(6) << eps << ".csv";
      rec.field_path = (out_dir / name.str()).string();
      write_field_csv(rec.field_path, u, {{"config_hash", report.config_hash}});
      report.records.push_back(std::move(rec));
    }
    report.complete = true;
  } catch (const ValidationError& e) {
    report.error = e.what();
    report.error_kind = "validation";
  } catch (const Error& e) {
    report.error = e.what();
    report.error_kind = "solver";
  }
  return finish();
}

}  // namespace allencahn
