#include "allencahn/entire2k.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

#include "allencahn/error.hpp"

namespace allencahn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

Eigen::Vector2d LineConfig::direction(int j) const { return {std::cos(angles[j]), std::sin(angles[j])}; }

Eigen::Vector2d LineConfig::normal(int j) const { return {-std::sin(angles[j]), std::cos(angles[j])}; }

double LineConfig::signed_distance(int j, const Eigen::Vector2d& x) const { return x.dot(normal(j)) - offsets[j]; }

nlohmann::json LineConfig::to_json() const {
  return {{"k", k}, {"angles", angles}, {"offsets", offsets}, {"theta_lambda", theta_lambda}, {"balanced", balanced}};
}

LineConfig make_line_config(std::vector<double> angles, std::vector<double> offsets) {
  const std::size_t n = angles.size();
  if (n < 2 || n % 2 != 0)
    throw ValidationError("a line configuration needs an even number (>= 2) of ends, got " + std::to_string(n));
  if (offsets.size() != n) throw ValidationError("angles and offsets differ in length");
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (!(angles[j + 1] > angles[j]))
      throw ValidationError("angles must be strictly increasing (angle " + std::to_string(j + 1) + ")");
  if (!(angles.back() < angles.front() + kTwoPi))
    throw ValidationError("angles must lie within one period of the first angle");

  LineConfig cfg;
  cfg.k = static_cast<int>(n / 2);
  double min_gap = angles.front() + kTwoPi - angles.back();
  for (std::size_t j = 0; j + 1 < n; ++j) min_gap = std::min(min_gap, angles[j + 1] - angles[j]);
  cfg.theta_lambda = 0.5 * min_gap;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (double a : angles) sum += Eigen::Vector2d(std::cos(a), std::sin(a));
  cfg.balanced = sum.norm() <= 1e-8;
  cfg.angles = std::move(angles);
  cfg.offsets = std::move(offsets);
  return cfg;
}

namespace {

double point_ray_distance(const Eigen::Vector2d& x, const Eigen::Vector2d& origin, const Eigen::Vector2d& dir) {
  const double s = std::max(0.0, (x - origin).dot(dir));
  return (x - origin - s * dir).norm();
}

double ray_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& f, const Eigen::Vector2d& q,
                    const Eigen::Vector2d& g) {
  const double det = f.x() * (-g.y()) - f.y() * (-g.x());
  if (std::abs(det) > 1e-14) {
    // p + s f = q + t g
    const Eigen::Vector2d d = q - p;
    const double s = (d.x() * (-g.y()) - d.y() * (-g.x())) / det;
    const double t = (f.x() * d.y() - f.y() * d.x()) / det;
    if (s >= 0.0 && t >= 0.0) return 0.0;
  }
  return std::min(point_ray_distance(p, q, g), point_ray_distance(q, p, f));
}

Eigen::Vector2d half_line_start(const LineConfig& cfg, int j, double R) {
  const double r = cfg.offsets[j];
  return r * cfg.normal(j) + std::sqrt(std::max(0.0, R * R - r * r)) * cfg.direction(j);
}

// Smooth step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace

double half_line_separation(const LineConfig& cfg, double R, int* pair_i, int* pair_j) {
  double best = std::numeric_limits<double>::infinity();
  const int n = cfg.ends();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = ray_distance(half_line_start(cfg, i, R), cfg.direction(i), half_line_start(cfg, j, R),
                                    cfg.direction(j));
      if (d < best) {
        best = d;
        if (pair_i) *pair_i = i;
        if (pair_j) *pair_j = j;
      }
    }
  return best;
}

double minimal_gluing_radius(const LineConfig& cfg, double separation) {
  double lo = 0.0;
  for (double r : cfg.offsets) lo = std::max(lo, std::abs(r));
  double hi = lo + 1.0;
  while (half_line_separation(cfg, hi) < separation) {
    hi *= 2.0;
    if (hi > 1e6) throw ValidationError("half-lines never separate; the configuration has parallel coincident ends");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (half_line_separation(cfg, mid) >= separation ? hi : lo) = mid;
  }
  return hi;
}

Field approximate_solution(const LineConfig& cfg, const HeteroclinicProfile& profile, const SurfaceMesh& grid,
                           double R) {
  if (grid.kind != SurfaceKind::planar_box) throw ValidationError("approximate_solution needs a planar_box mesh");
  const double min_r = minimal_gluing_radius(cfg);
  if (R <= 0.0) R = min_r;
  int bad_i = 0, bad_j = 0;
  const double sep = half_line_separation(cfg, R, &bad_i, &bad_j);
  if (sep < 4.0)
    throw ValidationError("half-lines " + std::to_string(bad_i + 1) + " and " + std::to_string(bad_j + 1) +
                          " are " + std::to_string(sep) + " apart at R = " + std::to_string(R) +
                          "; minimal R is " + std::to_string(min_r));
  const double L = grid.spec.half_width;
  if (!(L > R + 4.0))
    throw ValidationError("box half-width " + std::to_string(L) + " must exceed R + 4 = " + std::to_string(R + 4.0));

  const int n = cfg.ends();
  std::vector<Eigen::Vector2d> starts(n);
  for (int j = 0; j < n; ++j) starts[j] = half_line_start(cfg, j, R);

  Field u{Eigen::VectorXd::Zero(grid.size()), 1.0, grid.id};
  std::vector<double> dist(n), bump(n);
  for (int v = 0; v < grid.size(); ++v) {
    const Eigen::Vector2d x = grid.vertices[v].head<2>();
    const double outer = 1.0 - smooth_step((R + 1.0 - x.norm()) / 2.0);
    if (outer == 0.0) continue;
    for (int j = 0; j < n; ++j) dist[j] = point_ray_distance(x, starts[j], cfg.direction(j));
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      bump[j] = 1.0;
      for (int i = 0; i < n; ++i)
        if (i != j) bump[j] *= smooth_step((dist[i] - dist[j] + 2.0) / 4.0);
      total += bump[j];
    }
    double value = 0.0;
    for (int j = 0; j < n; ++j) {
      const double sign = j % 2 == 0 ? 1.0 : -1.0;
      value += sign * bump[j] / total * profile.value(cfg.signed_distance(j, x));
    }
    u.values[v] = outer * value;
  }
  return u;
}

Field refine_entire(const Field& u0, const SurfaceMesh& mesh, const DiscreteOperators& ops, const Potential& p,
                    double tol, NewtonReport* report) {
  if (mesh.kind != SurfaceKind::planar_box) throw ValidationError("refine_entire needs a planar_box mesh");
  if (u0.epsilon != 1.0) throw ValidationError("entire solutions are refined at epsilon = 1");
  NewtonOptions opts;
  opts.tol = tol;
  return newton_refine(u0, mesh, ops, p, opts, report);
}

JacobiField directional_jacobi_field(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                                     const Potential& p, const Eigen::Vector2d& e) {
  if (!mesh.planar()) throw ValidationError("directional Jacobi fields need a planar mesh");
  check_compatible(u, ops);
  const auto grad = recovered_gradient(mesh, u.values);
  JacobiField out;
  out.v = Field{Eigen::VectorXd(mesh.size()), u.epsilon, u.mesh_id};
  for (int i = 0; i < mesh.size(); ++i) out.v.values[i] = grad[i].head<2>().dot(e);
  out.jacobi_residual = residual_norm(hessian(u, ops, p) * out.v.values, ops, interior_mask(mesh));
  return out;
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

nlohmann::json NodalAnalysis::to_json() const {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& x : singular_points) points.push_back({x.x(), x.y()});
  return {{"domain_count", domain_count},
          {"positive_domains", positive_domains},
          {"negative_domains", negative_domains},
          {"component_count", component_count},
          {"singular_count", singular_count},
          {"unbounded_domain_count", unbounded_domain_count},
          {"euler_consistent", euler_consistent},
          {"sign_changing", sign_changing},
          {"sign_pattern", sign_pattern},
          {"singular_points", points}};
}

NodalAnalysis nodal_analysis(const Field& v, const SurfaceMesh& mesh, const NodalOptions& opts) {
  if (!mesh.planar()) throw ValidationError("nodal analysis needs a planar mesh");
  if (v.size() != mesh.size()) throw ValidationError("field size does not match the mesh");
  const int n = mesh.size();

  std::vector<char> working(n, 0);
  for (int i = 0; i < n; ++i)
    working[i] = (mesh.vertices[i].head<2>() - opts.center).norm() <= opts.working_radius;
  std::vector<int> sign(n, 0);
  bool any = false;
  for (int i = 0; i < n; ++i) {
    if (std::abs(v.values[i]) > opts.zero_tol) sign[i] = v.values[i] > 0.0 ? 1 : -1;
    any = any || (working[i] && sign[i] != 0);
  }
  if (!any) throw ValidationError("degenerate field: |v| <= zero_tol on the whole working region");

  std::vector<std::array<int, 3>> tris;
  for (const auto& t : mesh.triangles)
    if (working[t[0]] && working[t[1]] && working[t[2]]) tris.push_back(t);

  // Outer vertices stand in for the point at infinity.
  std::vector<char> outer(n, 0);
  for (int b : mesh.boundary_vertices)
    if (working[b]) outer[b] = 1;
  for (const auto& t : mesh.triangles) {
    const bool partial = !(working[t[0]] && working[t[1]] && working[t[2]]);
    if (partial)
      for (int k : t)
        if (working[k]) outer[k] = 1;
  }

  NodalAnalysis out;

  // Nodal graph: zero vertices keep their index, edge crossings are numbered after them.
  std::map<std::pair<int, int>, int> crossing_id;
  auto crossing = [&](int a, int b) {
    const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto [it, inserted] = crossing_id.emplace(key, n + static_cast<int>(crossing_id.size()));
    return it->second;
  };
  std::set<std::pair<int, int>> segments;
  auto link = [&](int a, int b) { segments.emplace(std::min(a, b), std::max(a, b)); };
  // Nodes of the nodal graph lying in each triangle, for the star computation below.
  std::vector<std::vector<int>> tri_nodes(tris.size());
  for (std::size_t ti = 0; ti < tris.size(); ++ti) {
    const auto& t = tris[ti];
    std::vector<int> zeros, crossings;
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (sign[a] == 0) zeros.push_back(a);
      if (sign[a] * sign[b] < 0) crossings.push_back(crossing(a, b));
    }
    if (zeros.empty() && crossings.size() == 2) {
      link(crossings[0], crossings[1]);
    } else if (zeros.size() == 1 && crossings.size() == 1) {
      link(zeros[0], crossings[0]);
    } else if (zeros.size() >= 2) {
      for (std::size_t a = 0; a < zeros.size(); ++a)
        for (std::size_t b = a + 1; b < zeros.size(); ++b) link(zeros[a], zeros[b]);
    }
    tri_nodes[ti] = zeros;
    tri_nodes[ti].insert(tri_nodes[ti].end(), crossings.begin(), crossings.end());
  }
  const int node_count = n + static_cast<int>(crossing_id.size());
  std::vector<std::vector<int>> graph(node_count);
  for (const auto& [a, b] : segments) {
    graph[a].push_back(b);
    graph[b].push_back(a);
  }

  std::vector<std::vector<int>> vertex_tris(n);
  for (std::size_t ti = 0; ti < tris.size(); ++ti)
    for (int a : tris[ti]) vertex_tris[a].push_back(static_cast<int>(ti));

  auto star_of = [&](int i) {
    std::vector<int> nodes;
    for (int ti : vertex_tris[i]) nodes.insert(nodes.end(), tri_nodes[ti].begin(), tri_nodes[ti].end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
  };
  auto exits = [&](const std::vector<int>& sorted_nodes) {
    int count = 0;
    for (int a : sorted_nodes)
      for (int b : graph[a])
        if (!std::binary_search(sorted_nodes.begin(), sorted_nodes.end(), b)) ++count;
    return count;
  };

  // Junction candidates: interior vertices whose star the nodal set leaves through many strands.
  std::vector<int> candidates;
  std::vector<std::vector<int>> stars;
  for (int i = 0; i < n; ++i) {
    if (!working[i] || outer[i] || vertex_tris[i].empty()) continue;
    auto nodes = star_of(i);
    if (nodes.empty()) continue;
    if (exits(nodes) >= opts.singular_valence) {
      candidates.push_back(i);
      stars.push_back(std::move(nodes));
    }
  }

  // Clusters of candidates whose stars share nodal-graph nodes.
  DisjointSets clusters(candidates.size());
  std::map<int, int> owner;
  for (std::size_t c = 0; c < candidates.size(); ++c)
    for (int node : stars[c]) {
      auto [it, inserted] = owner.emplace(node, static_cast<int>(c));
      if (!inserted) clusters.unite(static_cast<int>(c), it->second);
    }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t c = 0; c < candidates.size(); ++c) members[clusters.find(static_cast<int>(c))].push_back(c);

  std::vector<char> removed(node_count, 0);
  std::vector<int> patch(n, -1);  // singular cluster owning the vertex, if any
  for (const auto& [root, list] : members) {
    std::vector<int> nodes;
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (std::size_t c : list) {
      nodes.insert(nodes.end(), stars[c].begin(), stars[c].end());
      centroid += mesh.vertices[candidates[c]];
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (exits(nodes) < opts.singular_valence) continue;
    for (int node : nodes) removed[node] = 1;
    for (std::size_t c : list)
      for (int ti : vertex_tris[candidates[c]])
        for (int a : tris[ti]) patch[a] = static_cast<int>(out.singular_points.size());
    out.singular_points.push_back(centroid / static_cast<double>(list.size()));
  }
  out.singular_count = static_cast<int>(out.singular_points.size());

  // Nodal domains. Inside a singular patch the piecewise-linear interpolant may join two
  // opposite sectors across the diagonal of a saddle cell (both opposite vertices of the other
  // sign); those edges are cut so that the sectors meet at the singular point as at a crossing.
  std::map<std::pair<int, int>, std::vector<int>> opposite;
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      opposite[{std::min(a, b), std::max(a, b)}].push_back(t[(k + 2) % 3]);
    }
  auto saddle_diagonal = [&](int a, int b) {
    if (patch[a] < 0 || patch[a] != patch[b]) return false;
    const auto& opp = opposite[{std::min(a, b), std::max(a, b)}];
    return opp.size() == 2 && sign[opp[0]] == -sign[a] && sign[opp[1]] == -sign[a];
  };
  DisjointSets domains(n);
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (sign[a] == 0 || sign[a] != sign[b] || saddle_diagonal(a, b)) continue;
      domains.unite(a, b);
    }
  std::map<int, std::pair<int, bool>> roots;  // root -> (sign, touches outer)
  for (const auto& t : tris)
    for (int a : t) {
      if (sign[a] == 0) continue;
      auto& entry = roots[domains.find(a)];
      entry.first = sign[a];
      entry.second = entry.second || outer[a];
    }
  out.domain_count = static_cast<int>(roots.size());
  for (const auto& [root, entry] : roots) {
    (entry.first > 0 ? out.positive_domains : out.negative_domains)++;
    if (entry.second) out.unbounded_domain_count++;
  }
  out.sign_changing = out.positive_domains > 0 && out.negative_domains > 0;

  // Components of the nodal set with the singular clusters removed.
  DisjointSets components(node_count);
  for (const auto& [a, b] : segments)
    if (!removed[a] && !removed[b]) components.unite(a, b);
  std::set<int> component_roots;
  for (int node = 0; node < node_count; ++node)
    if (!removed[node] && !graph[node].empty()) component_roots.insert(components.find(node));
  out.component_count = static_cast<int>(component_roots.size());
  out.euler_consistent = out.domain_count == 1 + out.component_count - out.singular_count;

  // Signs met walking once around the outer boundary.
  std::vector<std::pair<double, int>> ring;
  for (int i = 0; i < n; ++i)
    if (outer[i] && sign[i] != 0) {
      const Eigen::Vector2d d = mesh.vertices[i].head<2>() - opts.center;
      ring.emplace_back(std::atan2(d.y(), d.x()), sign[i]);
    }
  std::sort(ring.begin(), ring.end());
  std::string pattern;
  for (const auto& [angle, s] : ring) {
    const char c = s > 0 ? '+' : '-';
    if (pattern.empty() || pattern.back() != c) pattern.push_back(c);
  }
  while (pattern.size() > 1 && pattern.front() == pattern.back()) pattern.pop_back();
  out.sign_pattern = pattern;
  return out;
}

nlohmann::json IndexVerdict::to_json() const {
  return {{"index_computed", index_computed},
          {"bound", bound},
          {"pass", pass},
          {"jacobi_residual", jacobi_residual},
          {"spectrum", spectrum.to_json()},
          {"nodal", nodal.to_json()}};
}

IndexVerdict index_lower_bound_check(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                                     const Potential& p, int k, const SpectrumOptions& opts,
                                     const Eigen::Vector2d& e, const NodalOptions& nodal) {
  if (k < 1) throw ValidationError("k must be at least 1");
  IndexVerdict verdict;
  verdict.bound = k - 1;
  verdict.spectrum = morse_index(u, ops, p, opts, interior_mask(mesh));
  verdict.index_computed = verdict.spectrum.index;
  verdict.pass = verdict.index_computed >= verdict.bound;
  const auto jacobi = directional_jacobi_field(u, mesh, ops, p, e.normalized());
  verdict.jacobi_residual = jacobi.jacobi_residual;
  verdict.nodal = nodal_analysis(jacobi.v, mesh, nodal);
  return verdict;
}

}  // namespace allencahn
