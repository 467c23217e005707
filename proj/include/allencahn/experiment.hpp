#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "allencahn/minmax.hpp"
#include "allencahn/potential.hpp"
#include "allencahn/spectrum.hpp"
#include "allencahn/surface.hpp"

namespace allencahn {

/// Everything a run depends on. Parsed from an INI file with sections [run], [potential],
/// [surface], [minmax], [spectrum] and [varifold]; see README for the keys.
struct RunConfig {
  std::string potential_name = "quartic";
  std::vector<double> coefficients;  // only for potential_name = "polynomial"
  double alpha = 0.25;
  double kappa = 0.6875;

  SurfaceSpec surface;
  /// Mesh per epsilon with h_max <= h_ratio * eps (icosphere level, or cells per side on flat
  /// kinds). Torus of revolution meshes keep the configured resolution.
  bool auto_resolution = true;
  double h_ratio = 0.5;

  std::vector<double> epsilons;  // strictly positive, strictly decreasing
  int path_nodes = 16;
  MinMaxOptions minmax;
  SpectrumOptions spectrum;

  double level = 0.0;              // level set extracted for length and density probes
  std::vector<double> density_radii{0.1, 0.2, 0.4};
  double monotonicity_m = -1.0;    // < 0: 1/R^2 on spheres, 0 elsewhere

  std::filesystem::path output_dir = "run";
  std::uint64_t seed = 1;

  static RunConfig from_ini(const std::filesystem::path& path);
  static RunConfig from_ini_string(const std::string& text);
  /// Throws ValidationError naming the first violated constraint.
  void validate() const;
  nlohmann::json to_json() const;
  /// FNV-1a 64 of the canonical JSON without the output directory, as 16 hex digits.
  std::string hash() const;
};

/// Per-epsilon summary; field_path points at the saved critical point.
struct EpsilonRecord {
  double epsilon = 0.0;
  std::string mesh;
  int vertices = 0;
  double h_max = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  int index = 0;
  int nullity = 0;
  std::vector<double> lowest_eigenvalues;
  double level_set_length = 0.0;
  int level_set_curves = 0;
  double xi_l1 = 0.0;
  double xi_l1_over_energy = 0.0;
  double great_circle_hausdorff = -1.0;  // spheres only
  std::vector<double> density_ratio;
  std::string method;  // "minmax" or "continuation"
  std::string field_path;

  nlohmann::json to_json() const;
};

struct RunReport {
  std::string config_hash;
  double sigma = 0.0;
  double h0 = 0.0;
  std::vector<EpsilonRecord> records;
  bool complete = false;
  std::string error;
  std::string error_kind;  // "validation" or "solver" when incomplete

  nlohmann::json to_json() const;
};

/// Min-max at the first epsilon, then continuation through the schedule (sharpen, move to the
/// next mesh, Newton; a fresh min-max if Newton fails), with spectral and varifold diagnostics at
/// every scheduled epsilon. Writes report.json, records.csv, one field CSV per epsilon and the
/// sweep history of each min-max solve to the output directory. A module error stops the run
/// and returns the partial report with complete = false. An invalid config throws
/// ValidationError before anything is written.
RunReport run_experiment(const RunConfig& config);

}  // namespace allencahn
