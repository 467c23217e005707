#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "allencahn/energy.hpp"
#include "allencahn/heteroclinic.hpp"
#include "allencahn/minmax.hpp"
#include "allencahn/spectrum.hpp"

namespace allencahn {

/// Ordered oriented lines {x : <x, J f_j> = r_j} with f_j = (cos theta_j, sin theta_j) and
/// J the rotation by +90 degrees.
struct LineConfig {
  std::vector<double> angles;
  std::vector<double> offsets;
  int k = 0;                  // half the number of ends
  double theta_lambda = 0.0;  // half the minimal cyclic gap between consecutive angles
  bool balanced = false;      // |sum_j f_j| <= 1e-8

  int ends() const { return 2 * k; }
  Eigen::Vector2d direction(int j) const;
  Eigen::Vector2d normal(int j) const;  // J f_j
  /// Signed distance to line j, positive on the J f_j side.
  double signed_distance(int j, const Eigen::Vector2d& x) const;
  nlohmann::json to_json() const;
};

/// Throws ValidationError on an odd or too small count, mismatched lengths, or angles that are
/// not strictly increasing within one period.
LineConfig make_line_config(std::vector<double> angles, std::vector<double> offsets);

/// Smallest pairwise distance between the half-lines {r_j J f_j + s f_j : s >= sqrt(R^2 - r_j^2)}.
double half_line_separation(const LineConfig& cfg, double R, int* pair_i = nullptr, int* pair_j = nullptr);

/// Smallest R (by bisection) whose half-lines are pairwise at least `separation` apart.
double minimal_gluing_radius(const LineConfig& cfg, double separation = 4.0);

/// Glued approximate solution sum_j (-1)^{j+1} chi_j H(signed distance to line j) on a planar
/// box mesh. chi_j = (1 - a) beta_j, where a is a smooth cutoff equal to 1 on B_{R-1} and 0
/// outside B_{R+1}, and beta_j is a smooth partition selecting the nearest half-line with a
/// transition of width 2 either side. R <= 0 picks minimal_gluing_radius.
///
/// Throws ValidationError when L <= R + 4 or the half-lines come closer than 4.
Field approximate_solution(const LineConfig& cfg, const HeteroclinicProfile& profile, const SurfaceMesh& grid,
                           double R = 0.0);

/// Newton refinement at epsilon = 1 with the box boundary frozen to u0's trace.
Field refine_entire(const Field& u0, const SurfaceMesh& mesh, const DiscreteOperators& ops, const Potential& p,
                    double tol, NewtonReport* report = nullptr);

struct JacobiField {
  Field v;
  double jacobi_residual = 0.0;  // M^-1 norm of the second variation applied to v, interior vertices
};

/// v = <grad u, e> from the recovered vertex gradients.
JacobiField directional_jacobi_field(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                                     const Potential& p, const Eigen::Vector2d& e);

struct NodalOptions {
  double zero_tol = 1e-12;    // |v| <= zero_tol counts as nodal
  int singular_valence = 4;   // strands leaving a junction cluster for it to count as singular
  double working_radius = std::numeric_limits<double>::infinity();
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
};

struct NodalAnalysis {
  int domain_count = 0;
  int positive_domains = 0;
  int negative_domains = 0;
  int component_count = 0;   // components of the nodal set with the singular points removed
  int singular_count = 0;
  int unbounded_domain_count = 0;
  bool euler_consistent = false;
  bool sign_changing = false;
  std::string sign_pattern;  // cyclic signs along the outer boundary, runs merged
  std::vector<Eigen::Vector3d> singular_points;

  nlohmann::json to_json() const;
};

/// Nodal domains by flood fill over same-sign vertices (not across saddle-cell diagonals inside a
/// singular cluster); nodal set as the piecewise-linear zero set; singular points as clusters of
/// vertex stars the nodal set leaves through at least `singular_valence` strands. The outer boundary of the working region plays the role of the
/// point at infinity. Throws ValidationError when |v| <= zero_tol everywhere.
NodalAnalysis nodal_analysis(const Field& v, const SurfaceMesh& mesh, const NodalOptions& opts = {});

struct IndexVerdict {
  int index_computed = 0;
  int bound = 0;
  bool pass = false;
  SpectralSummary spectrum;
  NodalAnalysis nodal;
  double jacobi_residual = 0.0;

  nlohmann::json to_json() const;
};

/// Dirichlet index on the box interior against the bound k - 1, with the nodal count of a
/// generic directional Jacobi field reported alongside.
IndexVerdict index_lower_bound_check(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                                     const Potential& p, int k, const SpectrumOptions& opts = {},
                                     const Eigen::Vector2d& e = {std::cos(0.37), std::sin(0.37)},
                                     const NodalOptions& nodal = {});

}  // namespace allencahn
