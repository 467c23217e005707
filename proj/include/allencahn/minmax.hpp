#pragma once

#include <cstdint>
#include <vector>

#include "allencahn/energy.hpp"
#include "allencahn/error.hpp"
#include "allencahn/heteroclinic.hpp"

namespace allencahn {

struct NewtonOptions {
  double tol = 1e-10;        // on the M^-1 norm of the gradient over free vertices
  int max_iters = 50;
  double damping = 1.0;      // initial step fraction for the backtracking line search
  std::vector<char> free;    // empty: every vertex is free
};

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

/// Newton failure carrying the best iterate seen.
class NewtonError : public SolverError {
public:
  NewtonError(const std::string& what, Field best, double residual)
      : SolverError(what), best_(std::move(best)), residual_(residual) {}
  const Field& best() const { return best_; }
  double residual() const { return residual_; }

private:
  Field best_;
  double residual_;
};

/// Damped Newton on the first variation with a backtracking line search on the residual norm.
/// Constrained (non-free) vertices keep their initial values. Throws NewtonError on a singular
/// system, divergence (residual up 10x over 5 steps) or exhaustion of max_iters.
Field newton_refine(const Field& u0, const DiscreteOperators& ops, const Potential& p,
                    const NewtonOptions& opts, NewtonReport* report = nullptr);

/// As above, freezing the boundary vertices of meshes that have a boundary.
Field newton_refine(const Field& u0, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                    const Potential& p, NewtonOptions opts, NewtonReport* report = nullptr);

/// Discrete path from u = -1 to u = +1.
struct Path {
  std::vector<Field> nodes;

  int segments() const { return static_cast<int>(nodes.size()) - 1; }
};

struct MinMaxOptions {
  int max_iters = 400;        // relaxation sweeps
  double step = 0.0;          // gradient-descent step; <= 0 picks a stable step from the operators
  int reparam_every = 10;
  double stall_tol = 1e-7;    // stop when the path maximum drops by less than this (relative) per reparam cycle
  double residual_tol = 1e-8;
  NewtonOptions newton;
};

struct MinMaxResult {
  Field critical_point;
  double level = 0.0;                // energy of the critical point
  double path_max = 0.0;             // final maximum over path nodes
  double residual = 0.0;
  int iterations = 0;                // relaxation sweeps
  int newton_iterations = 0;
  int max_node = 0;
  std::vector<double> history;       // path maximum after each sweep (nonincreasing)
  Path path;                         // relaxed path
};

/// m + 1 nodes: the constants -1, +1 at the ends and, in between, heteroclinic fronts
/// H((r_k - d(x)) / eps) sweeping out from a seed-chosen vertex, with distance d geodesic on
/// spheres and along mesh edges elsewhere, plus a 1e-3 seeded perturbation.
Path initial_path(const SurfaceMesh& mesh, const HeteroclinicProfile& profile, double epsilon, int m,
                  std::uint64_t seed);

/// Relaxes the interior nodes by gradient descent with the path tangent projected out, pins the
/// maximal node while redistributing the others by M-arclength every `reparam_every` sweeps,
/// then refines the path maximum: a few steps that go uphill along the lowest Hessian mode and
/// downhill (shifted Newton with an energy line search) on its complement, then plain Newton.
/// The uphill/downhill split keeps Newton from stalling in the near-null rotational modes of
/// symmetric surfaces. Node energies never increase, so the history is
/// nonincreasing.
///
/// Throws NewtonError when the final refinement fails and SolverError when the result
/// collapses to a constant (|level| < 1e-8).
MinMaxResult mountain_pass(Path path, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                           const Potential& p, const MinMaxOptions& opts);

/// Re-initialises a critical point for a smaller epsilon by rescaling the signed distance
/// recovered through the profile: u_new = H(eps_old / eps_new * H^-1(u_old)).
Eigen::VectorXd sharpen(const Eigen::VectorXd& u, double eps_old, double eps_new,
                        const HeteroclinicProfile& profile);

}  // namespace allencahn
