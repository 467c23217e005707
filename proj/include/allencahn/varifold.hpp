#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "allencahn/energy.hpp"

namespace allencahn {

struct Polyline {
  std::vector<Eigen::Vector3d> points;
  bool closed = false;
  double length = 0.0;
};

struct LevelSetCurves {
  std::vector<Polyline> polylines;
  double total_length = 0.0;
  double level = 0.0;            // requested t
  double effective_level = 0.0;  // t after the vertex-collision perturbation
};

/// Marching triangles with linear interpolation along edges. When t coincides with a vertex value
/// it is shifted by 1e-12 (repeatedly, if needed) so every crossing lies strictly inside an edge.
/// Polylines are emitted in a deterministic order: open chains from their lowest-indexed end,
/// then closed loops.
LevelSetCurves extract_level_set(const Eigen::VectorXd& u, const SurfaceMesh& mesh, double t);

/// Diffuse mass sum_{d(i) <= r} M_i eps |grad u|_i^2, with d the edge-graph distance from
/// `center`. Radii beyond the farthest vertex log a warning and return the total mass.
double mass_in_ball(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops, int center,
                    double r);

struct DensityReport {
  int center = 0;
  double sigma = 0.0;
  double h0 = 0.0;
  double monotonicity_m = 0.0;
  std::vector<double> radii;
  std::vector<double> mass;                // ||V||(B_r)
  std::vector<double> ratio;               // mass / (2 r sigma)
  std::vector<double> monotonicity_ratio;  // e^{m r} r^{-1} E(B_r)

  nlohmann::json to_json() const;
};

/// Density ratios normalised so that one multiplicity-one interface gives 1.
DensityReport density_ratio(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                            const Potential& p, double sigma, int center, const std::vector<double>& radii,
                            double monotonicity_m = 0.0);

enum class JunctionKind { regular, transverse_crossing, other };

struct JunctionVerdict {
  JunctionKind kind = JunctionKind::other;
  int ray_count = 0;
  std::vector<Eigen::Vector3d> rays;          // unit directions from the probe centre
  std::vector<std::pair<int, int>> pairing;   // ray indices, transverse crossings only

  std::string describe() const;
};

/// Classifies the curve network near p from the rays where it leaves the sphere of radius
/// r_probe: two opposite rays are regular, four rays forming two opposite pairs (greedy matching
/// on ||v_i + v_j|| <= 0.15) a transverse crossing, anything else other(count).
/// Throws ValidationError when fewer than two rays are found.
JunctionVerdict classify_junction(const LevelSetCurves& curves, const Eigen::Vector3d& p, double r_probe,
                                  double pairing_threshold = 0.15);

struct CurvatureField {
  Eigen::VectorXd norm;        // |A| where defined, NaN elsewhere
  std::vector<char> defined;
};

/// Enhanced second fundamental form norm |A| = |D^2u tau| / |grad u| from a weighted least-squares
/// quadratic fit over the two-ring in the tangent plane. Undefined where |grad u| <= threshold
/// (default 1e-3 / eps).
CurvatureField enhanced_sff_norm(const Field& u, const SurfaceMesh& mesh, double threshold = -1.0);

struct GreatCircleFit {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double hausdorff = 0.0;  // symmetric, between the curves and the fitted great circle
};

/// Best-fit great circle (plane through the origin minimising squared point distances) of a
/// level set on a sphere of the given radius, with the Hausdorff distance between the two.
GreatCircleFit fit_great_circle(const LevelSetCurves& curves, double radius);

/// Vertex nearest to a point.
int nearest_vertex(const SurfaceMesh& mesh, const Eigen::Vector3d& x);

}  // namespace allencahn
