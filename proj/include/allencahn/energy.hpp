#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "allencahn/potential.hpp"
#include "allencahn/surface.hpp"

namespace allencahn {

/// Per-vertex state u at interface width epsilon, tied to the mesh it was built on.
struct Field {
  Eigen::VectorXd values;
  double epsilon = 1.0;
  std::string mesh_id;

  int size() const { return static_cast<int>(values.size()); }
};

struct DiscrepancyField {
  Eigen::VectorXd xi_values;  // (eps/2)|grad u|^2 - W(u)/eps per vertex
  double l1_norm = 0.0;       // sum_i M_i |xi_i|
  double integral = 0.0;      // sum_i M_i xi_i
};

/// E = (eps/2) u^T K u + eps^-1 sum_i M_i W(u_i). Throws ValidationError on a mesh mismatch.
double energy(const Field& u, const DiscreteOperators& ops, const Potential& p);

/// First variation: eps K u + eps^-1 M W'(u).
Eigen::VectorXd gradient(const Field& u, const DiscreteOperators& ops, const Potential& p);

/// Second variation: eps K + eps^-1 M diag(W''(u)).
Eigen::SparseMatrix<double> hessian(const Field& u, const DiscreteOperators& ops, const Potential& p);

/// Discrepancy per vertex, using the lumped gradient density below so that
/// sum_i M_i eps |grad u|_i^2 = E + integral holds exactly.
DiscrepancyField discrepancy_xi(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                                const Potential& p);

/// |grad u|^2 at vertex i as the area-weighted mean of the incident triangle values; the
/// lumped integral sum_i M_i |grad u|_i^2 equals u^T K u.
Eigen::VectorXd gradient_density(const SurfaceMesh& mesh, const DiscreteOperators& ops,
                                 const Eigen::VectorXd& u);

/// Vertex gradient vectors: area-weighted average of the incident triangle gradients.
std::vector<Eigen::Vector3d> recovered_gradient(const SurfaceMesh& mesh, const Eigen::VectorXd& u);

/// M^-1 norm of a covector, optionally restricted to free vertices (free[i] != 0).
double residual_norm(const Eigen::VectorXd& covector, const DiscreteOperators& ops,
                     const std::vector<char>& free = {});

void check_compatible(const Field& u, const DiscreteOperators& ops);

/// Constant field on a mesh.
Field constant_field(const SurfaceMesh& mesh, double value, double epsilon);

}  // namespace allencahn
