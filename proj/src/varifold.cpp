#include "allencahn/varifold.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "allencahn/error.hpp"

namespace allencahn {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

bool hits_vertex(const Eigen::VectorXd& u, double t) {
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (u[i] == t) return true;
  return false;
}

}  // namespace

LevelSetCurves extract_level_set(const Eigen::VectorXd& u, const SurfaceMesh& mesh, double t) {
  if (u.size() != mesh.size()) throw ValidationError("field size does not match the mesh");
  if (!(std::abs(t) < 1.0)) throw ValidationError("level must satisfy |t| < 1");

  LevelSetCurves out;
  out.level = t;
  double level = t;
  for (int attempt = 0; hits_vertex(u, level); ++attempt) {
    if (attempt > 100) throw ValidationError("could not move the level off the vertex values");
    level += 1e-12;
  }
  out.effective_level = level;

  // Crossing points are keyed by edge; each carries the (at most two) triangles' segments.
  std::map<EdgeKey, int> point_of_edge;
  std::vector<Eigen::Vector3d> points;
  std::vector<EdgeKey> point_edge;
  auto crossing = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = point_of_edge.find(key);
    if (it != point_of_edge.end()) return it->second;
    const double fa = u[key.first] - level;
    const double fb = u[key.second] - level;
    const double s = fa / (fa - fb);
    points.push_back(mesh.vertices[key.first] + s * mesh.edge(key.first, key.second));
    point_edge.push_back(key);
    const int id = static_cast<int>(points.size()) - 1;
    point_of_edge.emplace(key, id);
    return id;
  };

  std::vector<std::vector<int>> adjacency;
  for (const auto& tri : mesh.triangles) {
    int ends[2];
    int found = 0;
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      if ((u[a] > level) != (u[b] > level)) ends[found++] = crossing(a, b);
    }
    if (found != 2) continue;
    if (adjacency.size() < points.size()) adjacency.resize(points.size());
    adjacency[ends[0]].push_back(ends[1]);
    adjacency[ends[1]].push_back(ends[0]);
  }
  adjacency.resize(points.size());

  // Deterministic traversal order: by edge key, not by discovery order.
  std::vector<int> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return point_edge[a] < point_edge[b]; });

  // Consecutive points are joined through the minimal periodic image so lengths are correct on
  // the flat torus; stored coordinates follow the chain and may leave the fundamental domain.
  auto unwrap = [&](const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
    Eigen::Vector3d d = to - from;
    if (mesh.period)
      for (int k = 0; k < 2; ++k) d[k] -= (*mesh.period)[k] * std::round(d[k] / (*mesh.period)[k]);
    return d;
  };

  std::vector<char> used(points.size(), 0);
  auto walk = [&](int start) {
    Polyline line;
    int prev = -1;
    int cur = start;
    Eigen::Vector3d pos = points[start];
    line.points.push_back(pos);
    used[start] = 1;
    while (true) {
      int next = -1;
      for (int n : adjacency[cur])
        if (n != prev && !used[n]) {
          next = n;
          break;
        }
      if (next < 0) {
        // Closed if the walk returns to its start through an unused link.
        if (line.points.size() > 2)
          for (int n : adjacency[cur])
            if (n == start && n != prev) {
              line.closed = true;
              line.length += unwrap(points[cur], points[start]).norm();
            }
        break;
      }
      const Eigen::Vector3d d = unwrap(points[cur], points[next]);
      pos += d;
      line.length += d.norm();
      line.points.push_back(pos);
      used[next] = 1;
      prev = cur;
      cur = next;
    }
    out.total_length += line.length;
    out.polylines.push_back(std::move(line));
  };

  for (int id : order)
    if (!used[id] && adjacency[id].size() == 1) walk(id);
  for (int id : order)
    if (!used[id] && !adjacency[id].empty()) walk(id);
  return out;
}

int nearest_vertex(const SurfaceMesh& mesh, const Eigen::Vector3d& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.size(); ++i) {
    const double d = (mesh.vertices[i] - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

namespace {

std::vector<double> cumulative_masses(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                                      int center, const std::vector<double>& radii) {
  check_compatible(u, ops);
  if (u.mesh_id != mesh.id) throw ValidationError("field and mesh do not match");
  const Eigen::VectorXd density = gradient_density(mesh, ops, u.values);
  const auto dist = edge_graph_distances(mesh, center);
  const double diameter = *std::max_element(dist.begin(), dist.end());

  std::vector<int> by_distance(dist.size());
  for (std::size_t i = 0; i < by_distance.size(); ++i) by_distance[i] = static_cast<int>(i);
  std::sort(by_distance.begin(), by_distance.end(), [&](int a, int b) { return dist[a] < dist[b]; });

  std::vector<double> masses;
  double acc = 0.0;
  std::size_t next = 0;
  double last_r = 0.0;
  for (double r : radii) {
    if (!(r > 0.0)) throw ValidationError("ball radii must be positive");
    if (r < last_r) throw ValidationError("ball radii must be sorted");
    last_r = r;
    if (r > diameter)
      std::cerr << "warning: ball radius " << r << " exceeds the mesh diameter " << diameter
                << " from vertex " << center << "; using the total mass\n";
    while (next < by_distance.size() && dist[by_distance[next]] <= r) {
      const int i = by_distance[next++];
      acc += ops.mass[i] * u.epsilon * density[i];
    }
    masses.push_back(acc);
  }
  return masses;
}

double ball_energy(const Field& u, const DiscreteOperators& ops, const Potential& p, const Eigen::VectorXd& density,
                   const std::vector<double>& dist, double r) {
  double e = 0.0;
  for (int i = 0; i < u.size(); ++i)
    if (dist[i] <= r)
      e += ops.mass[i] * (0.5 * u.epsilon * density[i] + p.w(u.values[i]) / u.epsilon);
  return e;
}

}  // namespace

double mass_in_ball(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops, int center, double r) {
  return cumulative_masses(u, mesh, ops, center, {r}).front();
}

DensityReport density_ratio(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                            const Potential& p, double sigma, int center, const std::vector<double>& radii,
                            double monotonicity_m) {
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  DensityReport report;
  report.center = center;
  report.sigma = sigma;
  report.h0 = sigma / 2.0;
  report.monotonicity_m = monotonicity_m;
  report.radii = radii;
  report.mass = cumulative_masses(u, mesh, ops, center, radii);
  const Eigen::VectorXd density = gradient_density(mesh, ops, u.values);
  const auto dist = edge_graph_distances(mesh, center);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    report.ratio.push_back(report.mass[k] / (2.0 * r * sigma));
    report.monotonicity_ratio.push_back(std::exp(monotonicity_m * r) / r *
                                        ball_energy(u, ops, p, density, dist, r));
  }
  return report;
}

nlohmann::json DensityReport::to_json() const {
  return {{"center", center},
          {"normalization", "sigma"},
          {"sigma", sigma},
          {"h0", h0},
          {"monotonicity_m", monotonicity_m},
          {"radii", radii},
          {"mass", mass},
          {"ratio", ratio},
          {"monotonicity_ratio", monotonicity_ratio}};
}

std::string JunctionVerdict::describe() const {
  switch (kind) {
    case JunctionKind::regular:
      return "regular";
    case JunctionKind::transverse_crossing: {
      std::ostringstream os;
      os << "transverse_crossing";
      for (const auto& [a, b] : pairing) os << " (" << a << "," << b << ")";
      return os.str();
    }
    case JunctionKind::other:
      break;
  }
  return "other(" + std::to_string(ray_count) + ")";
}

JunctionVerdict classify_junction(const LevelSetCurves& curves, const Eigen::Vector3d& p, double r_probe,
                                  double pairing_threshold) {
  if (!(r_probe > 0.0)) throw ValidationError("probe radius must be positive");
  JunctionVerdict verdict;
  auto add_crossings = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double fa = (a - p).norm() - r_probe;
    const double fb = (b - p).norm() - r_probe;
    if ((fa > 0.0) == (fb > 0.0)) return;
    // Solve |a + s (b - a) - p| = r_probe for the root inside the segment.
    const Eigen::Vector3d d = b - a;
    const Eigen::Vector3d w = a - p;
    const double qa = d.squaredNorm();
    const double qb = 2.0 * w.dot(d);
    const double qc = w.squaredNorm() - r_probe * r_probe;
    const double disc = std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc));
    double s = (-qb + disc) / (2.0 * qa);
    if (s < 0.0 || s > 1.0) s = (-qb - disc) / (2.0 * qa);
    s = std::clamp(s, 0.0, 1.0);
    verdict.rays.push_back((a + s * d - p).normalized());
  };
  for (const auto& line : curves.polylines) {
    const auto& pts = line.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) add_crossings(pts[i], pts[i + 1]);
    if (line.closed && pts.size() > 2) add_crossings(pts.back(), pts.front());
  }
  verdict.ray_count = static_cast<int>(verdict.rays.size());
  if (verdict.ray_count < 2)
    throw ValidationError("insufficient data: " + std::to_string(verdict.ray_count) +
                          " rays cross the probe circle");

  const auto& v = verdict.rays;
  if (verdict.ray_count == 2 && (v[0] + v[1]).norm() <= pairing_threshold) {
    verdict.kind = JunctionKind::regular;
  } else if (verdict.ray_count == 4) {
    // Greedy: take the most opposite pair, then the remaining two must also pair.
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> first;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if ((v[i] + v[j]).norm() < best) {
          best = (v[i] + v[j]).norm();
          first = {i, j};
        }
    std::vector<int> rest;
    for (int i = 0; i < 4; ++i)
      if (i != first.first && i != first.second) rest.push_back(i);
    if (best <= pairing_threshold && (v[rest[0]] + v[rest[1]]).norm() <= pairing_threshold) {
      verdict.kind = JunctionKind::transverse_crossing;
      verdict.pairing = {first, {rest[0], rest[1]}};
    }
  }
  return verdict;
}

CurvatureField enhanced_sff_norm(const Field& u, const SurfaceMesh& mesh, double threshold) {
  if (u.size() != mesh.size()) throw ValidationError("field size does not match the mesh");
  if (threshold <= 0.0) threshold = 1e-3 / u.epsilon;
  const int n = mesh.size();
  CurvatureField out;
  out.norm = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  out.defined.assign(n, 0);

  const auto nbrs = vertex_neighbors(mesh);
  const auto tris = vertex_triangles(mesh);
  const auto geometry = triangle_geometry(mesh);

  for (int i = 0; i < n; ++i) {
    // Stencil: the one-ring, widened to the two-ring when it cannot determine a quadratic.
    std::vector<int> stencil = nbrs[i];
    if (stencil.size() < 6) {
      for (int a : nbrs[i])
        for (int b : nbrs[a])
          if (b != i) stencil.push_back(b);
      std::sort(stencil.begin(), stencil.end());
      stencil.erase(std::unique(stencil.begin(), stencil.end()), stencil.end());
    }
    if (stencil.size() < 5) continue;

    Eigen::Vector3d normal = Eigen::Vector3d::Zero();
    for (int t : tris[i]) normal += geometry[t].area * geometry[t].normal;
    if (normal.norm() == 0.0) continue;
    normal.normalize();
    Eigen::Vector3d e1 = normal.unitOrthogonal();
    Eigen::Vector3d e2 = normal.cross(e1);

    const int rows = static_cast<int>(stencil.size());
    Eigen::MatrixXd a(rows, 5);
    Eigen::VectorXd rhs(rows);
    for (int r = 0; r < rows; ++r) {
      const Eigen::Vector3d d = mesh.edge(i, stencil[r]);
      const double x = d.dot(e1);
      const double y = d.dot(e2);
      const double w = 1.0 / std::max(d.norm(), 1e-300);
      a.row(r) << w * x, w * y, w * 0.5 * x * x, w * x * y, w * 0.5 * y * y;
      rhs[r] = w * (u.values[stencil[r]] - u.values[i]);
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
    const Eigen::Vector2d g(c[0], c[1]);
    if (!(g.norm() > threshold)) continue;
    Eigen::Matrix2d hess;
    hess << c[2], c[3], c[3], c[4];
    const Eigen::Vector2d tangent(-g.y() / g.norm(), g.x() / g.norm());
    out.norm[i] = (hess * tangent).norm() / g.norm();
    out.defined[i] = 1;
  }
  return out;
}

GreatCircleFit fit_great_circle(const LevelSetCurves& curves, double radius) {
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> segments;
  for (const auto& line : curves.polylines) {
    const auto& pts = line.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      scatter += pts[i] * pts[i].transpose();
      if (i + 1 < pts.size()) segments.emplace_back(pts[i], pts[i + 1]);
    }
    if (line.closed && pts.size() > 2) segments.emplace_back(pts.back(), pts.front());
  }
  if (segments.empty()) throw ValidationError("no level-set segments to fit");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
  GreatCircleFit fit;
  fit.normal = solver.eigenvectors().col(0).normalized();

  // Curve to circle: distance of each point to its projection on the circle.
  double forward = 0.0;
  for (const auto& line : curves.polylines)
    for (const auto& x : line.points) {
      Eigen::Vector3d in_plane = x - x.dot(fit.normal) * fit.normal;
      const Eigen::Vector3d nearest = in_plane.norm() > 0 ? Eigen::Vector3d(radius * in_plane.normalized())
                                                          : Eigen::Vector3d(radius * fit.normal.unitOrthogonal());
      forward = std::max(forward, (x - nearest).norm());
    }
  // Circle to curve: sampled circle points against every segment.
  const Eigen::Vector3d e1 = fit.normal.unitOrthogonal();
  const Eigen::Vector3d e2 = fit.normal.cross(e1);
  double backward = 0.0;
  const int samples = 720;
  for (int k = 0; k < samples; ++k) {
    const double a = 2.0 * std::numbers::pi * k / samples;
    const Eigen::Vector3d c = radius * (std::cos(a) * e1 + std::sin(a) * e2);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [p, q] : segments) {
      const Eigen::Vector3d d = q - p;
      const double s = std::clamp((c - p).dot(d) / std::max(d.squaredNorm(), 1e-300), 0.0, 1.0);
      best = std::min(best, (p + s * d - c).norm());
    }
    backward = std::max(backward, best);
  }
  fit.hausdorff = std::max(forward, backward);
  return fit;
}

}  // namespace allencahn
