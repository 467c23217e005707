#include "allencahn/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "allencahn/spectrum.hpp"

namespace allencahn {

namespace {

struct FreeIndex {
  std::vector<int> to_full;
  std::vector<int> to_local;
};

FreeIndex make_free_index(Eigen::Index n, const std::vector<char>& free) {
  FreeIndex idx;
  idx.to_local.assign(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i)
    if (free.empty() || free[static_cast<std::size_t>(i)]) {
      idx.to_local[static_cast<std::size_t>(i)] = static_cast<int>(idx.to_full.size());
      idx.to_full.push_back(static_cast<int>(i));
    }
  return idx;
}

Eigen::SparseMatrix<double> restrict_matrix(const Eigen::SparseMatrix<double>& h, const FreeIndex& idx) {
  const auto m = static_cast<Eigen::Index>(idx.to_full.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(h.nonZeros()));
  for (Eigen::Index col = 0; col < h.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(h, col); it; ++it) {
      const int r = idx.to_local[static_cast<std::size_t>(it.row())];
      const int c = idx.to_local[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  Eigen::SparseMatrix<double> out(m, m);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

// Solves h x = b, trying LDL^T first and falling back to LU when the symmetric factorization
// breaks down or is inaccurate on an indefinite system.
bool solve_symmetric(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXd& b, Eigen::VectorXd& x) {
  const double bnorm = std::max(b.norm(), 1e-300);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(h);
  if (ldlt.info() == Eigen::Success) {
    x = ldlt.solve(b);
    if (ldlt.info() == Eigen::Success && x.allFinite() && (h * x - b).norm() <= 1e-9 * bnorm) return true;
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(h);
  lu.factorize(h);
  if (lu.info() != Eigen::Success) return false;
  x = lu.solve(b);
  return lu.info() == Eigen::Success && x.allFinite() && (h * x - b).norm() <= 1e-6 * bnorm;
}

}  // namespace

Field newton_refine(const Field& u0, const DiscreteOperators& ops, const Potential& p,
                    const NewtonOptions& opts, NewtonReport* report) {
  check_compatible(u0, ops);
  if (!u0.values.allFinite()) throw ValidationError("newton_refine needs a finite initial field");
  if (!opts.free.empty() && opts.free.size() != static_cast<std::size_t>(u0.size()))
    throw ValidationError("free-vertex mask size does not match the field");
  const FreeIndex idx = make_free_index(u0.values.size(), opts.free);
  const double damping = std::clamp(opts.damping, 1e-3, 1.0);

  Field u = u0;
  Eigen::VectorXd g = gradient(u, ops, p);
  double residual = residual_norm(g, ops, opts.free);
  NewtonReport local;
  local.residual_history.push_back(residual);
  Field best = u;
  double best_residual = residual;

  auto finish = [&](int iterations) {
    local.iterations = iterations;
    local.residual = residual;
    if (report) *report = local;
    return u;
  };
  auto fail = [&](const std::string& what, const Field& field, double field_residual) {
    local.iterations = static_cast<int>(local.residual_history.size()) - 1;
    local.residual = field_residual;
    if (report) *report = local;
    throw NewtonError(what, field, field_residual);
  };
  if (residual <= opts.tol) return finish(0);

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const Eigen::SparseMatrix<double> h = restrict_matrix(hessian(u, ops, p), idx);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(idx.to_full.size()));
    for (std::size_t i = 0; i < idx.to_full.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = -g[idx.to_full[i]];
    Eigen::VectorXd step;
    if (!solve_symmetric(h, rhs, step)) {
      std::ostringstream os;
      os << "singular Newton system at iteration " << iter << " (residual " << residual
         << "); try damping < 1 or a regularized initial guess";
      fail(os.str(), best, best_residual);
    }

    double alpha = damping;
    Field trial = u;
    double trial_residual = residual;
    Eigen::VectorXd trial_g;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, alpha *= 0.5) {
      trial.values = u.values;
      for (std::size_t i = 0; i < idx.to_full.size(); ++i)
        trial.values[idx.to_full[i]] += alpha * step[static_cast<Eigen::Index>(i)];
      trial_g = gradient(trial, ops, p);
      trial_residual = residual_norm(trial_g, ops, opts.free);
      if (trial_residual <= (1.0 - 1e-4 * alpha) * residual) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (residual <= 1e2 * opts.tol) return finish(iter - 1);
      std::ostringstream os;
      os << "Newton line search stalled at iteration " << iter << " with residual " << residual;
      fail(os.str(), best, best_residual);
    }
    u = trial;
    g = trial_g;
    residual = trial_residual;
    local.residual_history.push_back(residual);
    if (residual < best_residual) {
      best = u;
      best_residual = residual;
    }
    if (residual <= opts.tol) return finish(iter);
    const auto& hist = local.residual_history;
    if (hist.size() > 5 && residual > 10.0 * hist[hist.size() - 6]) {
      std::ostringstream os;
      os << "Newton diverged: residual grew from " << hist[hist.size() - 6] << " to " << residual
         << " over 5 steps";
      fail(os.str(), u, residual);
    }
  }
  std::ostringstream os;
  os << "Newton did not reach tol " << opts.tol << " in " << opts.max_iters
     << " iterations (best residual " << best_residual << ")";
  fail(os.str(), best, best_residual);
  return u;
}

Field newton_refine(const Field& u0, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                    const Potential& p, NewtonOptions opts, NewtonReport* report) {
  if (opts.free.empty() && !mesh.closed()) opts.free = interior_mask(mesh);
  return newton_refine(u0, ops, p, opts, report);
}

Path initial_path(const SurfaceMesh& mesh, const HeteroclinicProfile& profile, double epsilon, int m,
                  std::uint64_t seed) {
  if (m < 8) throw ValidationError("a path needs m >= 8 segments");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  std::mt19937_64 gen(seed);
  const int pole = static_cast<int>(gen() % static_cast<std::uint64_t>(mesh.size()));

  std::vector<double> dist;
  if (mesh.kind == SurfaceKind::sphere) {
    const Eigen::Vector3d c = mesh.vertices[static_cast<std::size_t>(pole)].normalized();
    dist.reserve(mesh.vertices.size());
    for (const auto& x : mesh.vertices)
      dist.push_back(mesh.spec.radius * std::acos(std::clamp(x.normalized().dot(c), -1.0, 1.0)));
  } else {
    dist = edge_graph_distances(mesh, pole);
  }
  const double reach = *std::max_element(dist.begin(), dist.end());

  Path path;
  path.nodes.push_back(constant_field(mesh, -1.0, epsilon));
  for (int k = 1; k < m; ++k) {
    const double radius = reach * k / m;
    Field node = constant_field(mesh, 0.0, epsilon);
    for (Eigen::Index i = 0; i < node.values.size(); ++i) {
      const double noise = 1e-3 * (2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0);
      node.values[i] = std::clamp(profile.value((radius - dist[static_cast<std::size_t>(i)]) / epsilon) + noise, -1.0, 1.0);
    }
    path.nodes.push_back(std::move(node));
  }
  path.nodes.push_back(constant_field(mesh, 1.0, epsilon));
  return path;
}

namespace {

double m_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& mass) {
  return std::sqrt(v.dot(mass.cwiseProduct(v)));
}

// Redistributes nodes first..last (inclusive ends fixed) uniformly in M-arclength along the
// polyline through the current nodes.
void redistribute(std::vector<Field>& nodes, int first, int last, const Eigen::VectorXd& mass) {
  if (last - first < 2) return;
  std::vector<double> s{0.0};
  for (int k = first + 1; k <= last; ++k)
    s.push_back(s.back() + m_norm(nodes[static_cast<std::size_t>(k)].values - nodes[static_cast<std::size_t>(k - 1)].values, mass));
  const double total = s.back();
  if (!(total > 0.0)) return;
  std::vector<Eigen::VectorXd> fresh;
  for (int k = first + 1; k < last; ++k) {
    const double target = total * (k - first) / (last - first);
    auto seg = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), target) - s.begin()) - 1;
    seg = std::min(seg, s.size() - 2);
    const double len = s[seg + 1] - s[seg];
    const double t = len > 0.0 ? (target - s[seg]) / len : 0.0;
    const auto a = static_cast<std::size_t>(first) + seg;
    fresh.push_back((1.0 - t) * nodes[a].values + t * nodes[a + 1].values);
  }
  for (int k = first + 1; k < last; ++k)
    nodes[static_cast<std::size_t>(k)].values = fresh[static_cast<std::size_t>(k - first - 1)];
}

// Index-one saddle search by mode following: a Newton step along the lowest mode (uphill), then a
// shifted Newton step on its M-orthogonal complement with an Armijo line search on the energy.
// The shift makes the complement positive when it is not. With one negative mode and a positive
// complement both steps are plain Newton, so convergence is quadratic at nondegenerate
// index-one saddles, while flat complement directions (near-symmetries) still make progress
// because acceptance is judged on the energy rather than on the residual.
Field follow_lowest_mode(Field u, const DiscreteOperators& ops, const Potential& p, const std::vector<char>& free,
                         double tol, int max_iters) {
  const FreeIndex idx = make_free_index(u.values.size(), free);
  const auto n = static_cast<Eigen::Index>(idx.to_full.size());
  Eigen::VectorXd mass(n);
  for (Eigen::Index i = 0; i < n; ++i) mass[i] = ops.mass[idx.to_full[static_cast<std::size_t>(i)]];
  auto restricted_gradient = [&](const Field& f) {
    const Eigen::VectorXd full = gradient(f, ops, p);
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = full[idx.to_full[static_cast<std::size_t>(i)]];
    return g;
  };
  auto moved = [&](const Field& f, const Eigen::VectorXd& step) {
    Field out = f;
    for (Eigen::Index i = 0; i < n; ++i) out.values[idx.to_full[static_cast<std::size_t>(i)]] += step[i];
    return out;
  };
  auto m_length = [&](const Eigen::VectorXd& v) { return std::sqrt(v.dot(mass.cwiseProduct(v))); };

  SpectrumOptions modes_opts;
  modes_opts.residual_tol = 1e-6;
  modes_opts.max_iters = 300;
  const double max_parallel = 0.25 * std::sqrt(mass.sum());
  Eigen::MatrixXd warm;

  Eigen::VectorXd g = restricted_gradient(u);
  double residual = std::sqrt(g.dot(g.cwiseQuotient(mass)));
  for (int iter = 0; iter < max_iters && residual > tol; ++iter) {
    const Eigen::SparseMatrix<double> h = restrict_matrix(hessian(u, ops, p), idx);
    const LowestModes modes = lowest_modes(h, mass, std::min<int>(2, static_cast<int>(n)), modes_opts, warm);
    warm = modes.vectors;
    const double l1 = modes.values[0];
    const double l2 = modes.values.size() > 1 ? modes.values[1] : std::abs(l1);
    const Eigen::VectorXd v1 = modes.vectors.col(0);
    const double scale = std::max(std::abs(l1), 1e-12);

    const double g1 = v1.dot(g);
    Eigen::VectorXd parallel = (l1 < 0.0 ? -g1 / l1 : g1 / (std::abs(l1) + 0.1 * scale)) * v1;
    if (m_length(parallel) > max_parallel) parallel *= max_parallel / m_length(parallel);

    const double mu = l2 > 1e-10 * scale ? 0.0 : std::max(2.0 * std::abs(l2), 1e-3 * scale);
    Eigen::SparseMatrix<double> shifted = h;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += mu * mass[i];
    const Eigen::VectorXd g_perp = g - mass.cwiseProduct(v1) * g1;
    Eigen::VectorXd perp;
    if (!solve_symmetric(shifted, -g_perp, perp)) throw NewtonError("singular system in the saddle search", u, residual);
    perp -= v1 * v1.dot(mass.cwiseProduct(perp));

    const Field base = moved(u, parallel);
    const double base_energy = energy(base, ops, p);
    const double slope = g_perp.dot(perp);
    Field next = base;
    if (slope < 0.0) {
      for (double t = 1.0; t > 1e-6; t *= 0.5) {
        Field trial = moved(base, t * perp);
        if (energy(trial, ops, p) <= base_energy + 1e-4 * t * slope) {
          next = std::move(trial);
          break;
        }
      }
    }
    u = std::move(next);
    g = restricted_gradient(u);
    residual = std::sqrt(g.dot(g.cwiseQuotient(mass)));
  }
  return u;
}

int argmax_node(const std::vector<double>& energies) {
  const double top = *std::max_element(energies.begin(), energies.end());
  for (std::size_t k = 0; k < energies.size(); ++k)
    if (energies[k] >= top - 1e-12) return static_cast<int>(k);
  return 0;
}

}  // namespace

MinMaxResult mountain_pass(Path path, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                           const Potential& p, const MinMaxOptions& opts) {
  const int m = path.segments();
  if (m < 8) throw ValidationError("mountain_pass needs a path with at least 9 nodes");
  const double eps = path.nodes.front().epsilon;
  for (const auto& node : path.nodes) {
    check_compatible(node, ops);
    if (node.epsilon != eps) throw ValidationError("path nodes must share epsilon");
  }
  const auto& mass = ops.mass;
  if ((path.nodes.front().values.array() != -1.0).any() || (path.nodes.back().values.array() != 1.0).any())
    throw ValidationError("path endpoints must be the constants -1 and +1");

  double step = opts.step;
  if (!(step > 0.0)) {
    // Gershgorin bound on the spectrum of M^-1 H for |u| <= 1.
    double curvature = 0.0;
    for (int i = -110; i <= 110; ++i) curvature = std::max(curvature, std::abs(p.d2w(i / 100.0)));
    double bound = 0.0;
    for (Eigen::Index i = 0; i < ops.size(); ++i)
      bound = std::max(bound, (2.0 * eps * ops.stiffness.coeff(i, i) + mass[i] * curvature / eps) / mass[i]);
    step = 1.0 / bound;
  }

  std::vector<double> energies;
  for (const auto& node : path.nodes) energies.push_back(energy(node, ops, p));
  std::vector<double> node_step(path.nodes.size(), step);

  MinMaxResult result;
  double cycle_start = *std::max_element(energies.begin(), energies.end());
  for (int sweep = 1; sweep <= opts.max_iters; ++sweep) {
    for (int k = 1; k < m; ++k) {
      Field& node = path.nodes[static_cast<std::size_t>(k)];
      const Eigen::VectorXd descent = gradient(node, ops, p).cwiseQuotient(mass);
      Eigen::VectorXd tangent = path.nodes[static_cast<std::size_t>(k + 1)].values -
                                path.nodes[static_cast<std::size_t>(k - 1)].values;
      const double tn = m_norm(tangent, mass);
      Eigen::VectorXd direction = descent;
      if (tn > 0.0) {
        tangent /= tn;
        direction -= descent.dot(mass.cwiseProduct(tangent)) * tangent;
      }
      Field trial = node;
      double& tau = node_step[static_cast<std::size_t>(k)];
      for (int halving = 0; halving < 12; ++halving) {
        trial.values = node.values - tau * direction;
        const double e = energy(trial, ops, p);
        if (e <= energies[static_cast<std::size_t>(k)]) {
          node.values = trial.values;
          energies[static_cast<std::size_t>(k)] = e;
          break;
        }
        tau *= 0.5;
      }
    }
    double top = *std::max_element(energies.begin(), energies.end());

    if (sweep % opts.reparam_every == 0) {
      const int pinned = argmax_node(energies);
      std::vector<Field> candidate = path.nodes;
      redistribute(candidate, 0, pinned, mass);
      redistribute(candidate, pinned, m, mass);
      std::vector<double> cand_energy;
      for (const auto& node : candidate) cand_energy.push_back(energy(node, ops, p));
      const double cand_top = *std::max_element(cand_energy.begin(), cand_energy.end());
      if (cand_top <= top) {
        path.nodes = std::move(candidate);
        energies = std::move(cand_energy);
        top = cand_top;
      }
      std::fill(node_step.begin(), node_step.end(), step);
    }
    result.history.push_back(top);
    result.iterations = sweep;

    if (sweep % opts.reparam_every == 0) {
      if (cycle_start - top <= opts.stall_tol * std::abs(top)) break;
      cycle_start = top;
    }
  }

  // Maximise the energy along the two polyline segments adjacent to the top node.
  const int top_node = argmax_node(energies);
  result.max_node = top_node;
  result.path_max = energies[static_cast<std::size_t>(top_node)];
  auto along = [&](double x) {
    const int a = std::clamp(static_cast<int>(std::floor(x)), 0, m - 1);
    const double t = x - a;
    Field f = path.nodes[static_cast<std::size_t>(a)];
    f.values = (1.0 - t) * f.values + t * path.nodes[static_cast<std::size_t>(a + 1)].values;
    return f;
  };
  double lo = std::max(0, top_node - 1), hi = std::min(m, top_node + 1);
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
  double f1 = energy(along(x1), ops, p), f2 = energy(along(x2), ops, p);
  for (int iter = 0; iter < 40; ++iter) {
    if (f1 > f2) {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = energy(along(x1), ops, p);
    } else {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = energy(along(x2), ops, p);
    }
  }
  Field start = along(0.5 * (lo + hi));

  NewtonOptions newton = opts.newton;
  newton.tol = opts.residual_tol;
  if (newton.free.empty() && !mesh.closed()) newton.free = interior_mask(mesh);
  start = follow_lowest_mode(start, ops, p, newton.free, opts.residual_tol, newton.max_iters);
  NewtonReport report;
  result.critical_point = newton_refine(start, mesh, ops, p, newton, &report);
  result.newton_iterations = report.iterations;
  result.residual = report.residual;
  result.level = energy(result.critical_point, ops, p);
  result.path = std::move(path);
  if (std::abs(result.level) < 1e-8)
    throw SolverError("mountain pass collapsed to a constant state (level " + std::to_string(result.level) + ")");
  return result;
}

Eigen::VectorXd sharpen(const Eigen::VectorXd& u, double eps_old, double eps_new,
                        const HeteroclinicProfile& profile) {
  const double ratio = eps_old / eps_new;
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double clamped = std::clamp(u[i], -1.0 + 1e-14, 1.0 - 1e-14);
    out[i] = profile.value(ratio * profile.inverse(clamped));
  }
  return out;
}

}  // namespace allencahn
