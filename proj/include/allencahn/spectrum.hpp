#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "allencahn/energy.hpp"

namespace allencahn {

struct SpectrumOptions {
  int q = 6;                     // eigenpairs requested (grown automatically if all are non-positive)
  double tol = -1.0;             // zero threshold; <= 0 selects 1e-8 * max_i |H_ii / M_ii|
  int dense_threshold = 1000;    // dense solve below this many unknowns
  int max_iters = 1000;
  double residual_tol = 1e-10;   // relative eigen-residual for convergence
  double critical_tol = 1e-6;    // precondition on the gradient residual
  unsigned seed = 12345;
};

struct SpectralSummary {
  int index = 0;
  int nullity = 0;
  std::vector<double> lowest_eigenvalues;    // ascending
  std::vector<Eigen::VectorXd> eigenfields;  // M-orthonormal, zero on constrained vertices
  std::vector<double> residuals;             // ||H v - lambda M v|| / ||v||
  double tol = 0.0;
  bool dense = false;
  int free_count = 0;

  nlohmann::json to_json() const;
};

/// Index and nullity of the second variation on the free vertices (all vertices when `free` is
/// empty), from the lowest eigenvalues of H v = lambda M v.
///
/// Small problems use a dense solve; larger ones use block subspace iteration on
/// (H - s M)^-1 M with a shift s below the spectrum, where H - s M is positive definite.
/// Throws ValidationError when u is not critical, SolverError when the iteration stalls.
SpectralSummary morse_index(const Field& u, const DiscreteOperators& ops, const Potential& p,
                            const SpectrumOptions& opts = {}, const std::vector<char>& free = {});

struct LowestModes {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // M-orthonormal columns
};

/// Lowest q eigenpairs of H v = lambda M v for an already restricted H and lumped M, with no
/// criticality precondition. `warm` columns seed the subspace iteration.
LowestModes lowest_modes(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXd& mass, int q,
                         const SpectrumOptions& opts = {}, const Eigen::MatrixXd& warm = {});

/// Dirichlet test space on meshes with boundary: every non-boundary vertex is free.
std::vector<char> interior_mask(const SurfaceMesh& mesh);

/// Vertices strictly inside the axis-aligned square [-half_width, half_width]^2.
std::vector<char> box_mask(const SurfaceMesh& mesh, double half_width);

}  // namespace allencahn
