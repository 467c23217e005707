#include "allencahn/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <sstream>

#include <Eigen/Geometry>

#include "allencahn/error.hpp"

namespace allencahn {

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::sphere:
      return "sphere";
    case SurfaceKind::ellipsoid:
      return "ellipsoid";
    case SurfaceKind::torus_of_revolution:
      return "torus_of_revolution";
    case SurfaceKind::flat_torus:
      return "flat_torus";
    case SurfaceKind::planar_box:
      return "planar_box";
  }
  return "unknown";
}

SurfaceKind surface_kind_from_string(const std::string& name) {
  for (auto kind : {SurfaceKind::sphere, SurfaceKind::ellipsoid, SurfaceKind::torus_of_revolution,
                    SurfaceKind::flat_torus, SurfaceKind::planar_box})
    if (to_string(kind) == name) return kind;
  throw ValidationError("unknown surface kind '" + name + "'");
}

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string SurfaceSpec::descriptor() const {
  std::ostringstream os;
  os << to_string(kind) << ":resolution=" << resolution;
  switch (kind) {
    case SurfaceKind::sphere:
      os << ":radius=" << fmt_double(radius);
      break;
    case SurfaceKind::ellipsoid:
      os << ":a=" << fmt_double(semi_axes.x()) << ":b=" << fmt_double(semi_axes.y())
         << ":c=" << fmt_double(semi_axes.z());
      break;
    case SurfaceKind::torus_of_revolution:
      os << ":ring_radius=" << fmt_double(ring_radius) << ":tube_radius=" << fmt_double(tube_radius);
      break;
    case SurfaceKind::flat_torus:
      os << ":side=" << fmt_double(side);
      break;
    case SurfaceKind::planar_box:
      os << ":half_width=" << fmt_double(half_width);
      break;
  }
  return os.str();
}

SurfaceSpec SurfaceSpec::parse(const std::string& descriptor) {
  std::vector<std::string> parts;
  std::stringstream ss(descriptor);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.empty()) throw ValidationError("empty surface descriptor");
  SurfaceSpec spec;
  spec.kind = surface_kind_from_string(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw ValidationError("malformed surface descriptor field '" + parts[i] + "'");
    const std::string key = parts[i].substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(parts[i].substr(eq + 1));
    } catch (const std::exception&) {
      throw ValidationError("non-numeric surface descriptor field '" + parts[i] + "'");
    }
    if (key == "resolution") spec.resolution = static_cast<int>(value);
    else if (key == "radius") spec.radius = value;
    else if (key == "a") spec.semi_axes.x() = value;
    else if (key == "b") spec.semi_axes.y() = value;
    else if (key == "c") spec.semi_axes.z() = value;
    else if (key == "ring_radius") spec.ring_radius = value;
    else if (key == "tube_radius") spec.tube_radius = value;
    else if (key == "side") spec.side = value;
    else if (key == "half_width") spec.half_width = value;
    else throw ValidationError("unknown surface descriptor key '" + key + "'");
  }
  return spec;
}

Eigen::Vector3d SurfaceMesh::edge(int a, int b) const {
  Eigen::Vector3d d = vertices[static_cast<std::size_t>(b)] - vertices[static_cast<std::size_t>(a)];
  if (period) {
    for (int k = 0; k < 2; ++k) {
      const double p = (*period)[k];
      d[k] -= p * std::round(d[k] / p);
    }
  }
  return d;
}

namespace {

struct RawMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> parents;
};

RawMesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  RawMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.vertices) v.normalize();
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return m;
}

// One level of midpoint subdivision with projection back to the unit sphere.
RawMesh subdivide(const RawMesh& coarse) {
  RawMesh fine;
  fine.vertices = coarse.vertices;
  fine.parents.reserve(coarse.vertices.size() * 4);
  for (int i = 0; i < static_cast<int>(coarse.vertices.size()); ++i) fine.parents.push_back({i, i});
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    const auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back((coarse.vertices[static_cast<std::size_t>(a)] +
                             coarse.vertices[static_cast<std::size_t>(b)])
                                .normalized());
    fine.parents.push_back({key.first, key.second});
    midpoint.emplace(key, id);
    return id;
  };
  for (const auto& t : coarse.triangles) {
    const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
    fine.triangles.push_back({t[0], ab, ca});
    fine.triangles.push_back({t[1], bc, ab});
    fine.triangles.push_back({t[2], ca, bc});
    fine.triangles.push_back({ab, bc, ca});
  }
  return fine;
}

RawMesh icosphere(int level) {
  RawMesh m = icosahedron();
  for (int l = 0; l < level; ++l) m = subdivide(m);
  return m;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ValidationError(std::string("surface parameter ") + what + " must be positive");
}

}  // namespace

SurfaceMesh build_surface(const SurfaceSpec& spec) {
  if (spec.resolution < 1) throw ValidationError("surface resolution must be >= 1");
  SurfaceMesh mesh;
  mesh.kind = spec.kind;
  mesh.spec = spec;
  mesh.id = spec.descriptor();

  switch (spec.kind) {
    case SurfaceKind::sphere:
    case SurfaceKind::ellipsoid: {
      if (spec.resolution > 8) throw ValidationError("icosphere level above 8 is not supported");
      Eigen::Vector3d axes = Eigen::Vector3d::Constant(spec.radius);
      if (spec.kind == SurfaceKind::ellipsoid) axes = spec.semi_axes;
      for (int k = 0; k < 3; ++k) require_positive(axes[k], "radius/semi-axis");
      RawMesh raw = icosphere(spec.resolution);
      for (auto& v : raw.vertices) v = v.cwiseProduct(axes);
      mesh.vertices = std::move(raw.vertices);
      mesh.triangles = std::move(raw.triangles);
      mesh.parents = std::move(raw.parents);
      break;
    }
    case SurfaceKind::torus_of_revolution: {
      require_positive(spec.ring_radius, "ring_radius");
      require_positive(spec.tube_radius, "tube_radius");
      if (spec.tube_radius >= spec.ring_radius)
        throw ValidationError("torus tube radius must be smaller than the ring radius");
      const int nv = std::max(3, spec.resolution);
      const int nu = std::max(3, static_cast<int>(std::lround(nv * spec.ring_radius / spec.tube_radius)));
      for (int i = 0; i < nu; ++i) {
        const double u = 2.0 * std::numbers::pi * i / nu;
        for (int j = 0; j < nv; ++j) {
          const double v = 2.0 * std::numbers::pi * j / nv;
          const double rho = spec.ring_radius + spec.tube_radius * std::cos(v);
          mesh.vertices.emplace_back(rho * std::cos(u), rho * std::sin(u), spec.tube_radius * std::sin(v));
        }
      }
      auto id = [nu, nv](int i, int j) { return ((i + nu) % nu) * nv + (j + nv) % nv; };
      for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
          mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
          mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
      break;
    }
    case SurfaceKind::flat_torus: {
      require_positive(spec.side, "side");
      const int n = spec.resolution;
      if (n < 3) throw ValidationError("flat torus needs at least 3 cells per side");
      const double h = spec.side / n;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) mesh.vertices.emplace_back(i * h, j * h, 0.0);
      auto id = [n](int i, int j) { return ((j + n) % n) * n + (i + n) % n; };
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
          mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
      mesh.period = Eigen::Vector2d(spec.side, spec.side);
      break;
    }
    case SurfaceKind::planar_box: {
      require_positive(spec.half_width, "half_width");
      const int n = spec.resolution;
      const double L = spec.half_width;
      const double h = 2.0 * L / n;
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) mesh.vertices.emplace_back(-L + i * h, -L + j * h, 0.0);
      auto id = [n](int i, int j) { return j * (n + 1) + i; };
      // Diagonals point away from the box centre, which keeps the triangulation invariant under
      // the symmetries of the square.
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double cx = -L + (i + 0.5) * h, cy = -L + (j + 0.5) * h;
          if (cx * cy > 0.0) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
          } else {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
            mesh.triangles.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
          }
        }
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
          if (i == 0 || j == 0 || i == n || j == n) mesh.boundary_vertices.push_back(id(i, j));
      break;
    }
  }

  mesh.is_boundary.assign(mesh.vertices.size(), 0);
  for (int v : mesh.boundary_vertices) mesh.is_boundary[static_cast<std::size_t>(v)] = 1;
  for (const auto& e : mesh_edges(mesh)) mesh.h_max = std::max(mesh.h_max, mesh.edge(e[0], e[1]).norm());
  return mesh;
}

std::vector<TriangleGeometry> triangle_geometry(const SurfaceMesh& mesh) {
  std::vector<TriangleGeometry> out(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    // e[i] is the edge opposite vertex i, oriented counterclockwise.
    const std::array<Eigen::Vector3d, 3> e = {mesh.edge(tri[1], tri[2]), mesh.edge(tri[2], tri[0]),
                                              mesh.edge(tri[0], tri[1])};
    const Eigen::Vector3d cross = e[2].cross(-e[1]);
    const double twice_area = cross.norm();
    TriangleGeometry& g = out[t];
    g.area = 0.5 * twice_area;
    g.normal = twice_area > 0.0 ? Eigen::Vector3d(cross / twice_area) : Eigen::Vector3d::Zero();
    for (int i = 0; i < 3; ++i) g.basis_gradient[static_cast<std::size_t>(i)] = g.normal.cross(e[static_cast<std::size_t>(i)]) / twice_area;
  }
  return out;
}

DiscreteOperators assemble_operators(const SurfaceMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  DiscreteOperators ops;
  ops.mesh_id = mesh.id;
  ops.mass = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.triangles.size() * 9);

  constexpr double kMinAngle = 1e-6;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const std::array<Eigen::Vector3d, 3> e = {mesh.edge(tri[1], tri[2]), mesh.edge(tri[2], tri[0]),
                                              mesh.edge(tri[0], tri[1])};
    const double area = 0.5 * e[2].cross(-e[1]).norm();
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector3d& a = e[static_cast<std::size_t>((i + 1) % 3)];
      const Eigen::Vector3d& b = e[static_cast<std::size_t>((i + 2) % 3)];
      const double angle = std::atan2(a.cross(b).norm(), -a.dot(b));
      if (!(angle >= kMinAngle)) {
        std::ostringstream os;
        os << "triangle " << t << " (" << tri[0] << ", " << tri[1] << ", " << tri[2]
           << ") is degenerate: interior angle " << angle << " rad";
        throw ValidationError(os.str());
      }
    }
    for (int i = 0; i < 3; ++i) {
      ops.mass[tri[static_cast<std::size_t>(i)]] += area / 3.0;
      for (int j = 0; j < 3; ++j)
        triplets.emplace_back(tri[static_cast<std::size_t>(i)], tri[static_cast<std::size_t>(j)],
                              e[static_cast<std::size_t>(i)].dot(e[static_cast<std::size_t>(j)]) / (4.0 * area));
    }
  }
  ops.stiffness.resize(n, n);
  ops.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  ops.stiffness.makeCompressed();
  ops.total_area = ops.mass.sum();
  return ops;
}

std::vector<ReferenceGeodesic> geodesic_reference(const SurfaceMesh& mesh) {
  std::vector<ReferenceGeodesic> out;
  constexpr int kSamples = 512;
  if (mesh.kind == SurfaceKind::sphere) {
    const double r = mesh.spec.radius;
    const char* names[] = {"great_circle_xy", "great_circle_yz", "great_circle_zx"};
    for (int k = 0; k < 3; ++k) {
      ReferenceGeodesic g;
      g.name = names[k];
      g.length = 2.0 * std::numbers::pi * r;
      for (int s = 0; s < kSamples; ++s) {
        const double phi = 2.0 * std::numbers::pi * s / kSamples;
        Eigen::Vector3d p = Eigen::Vector3d::Zero();
        p[k] = r * std::cos(phi);
        p[(k + 1) % 3] = r * std::sin(phi);
        g.polyline.push_back(p);
      }
      out.push_back(std::move(g));
    }
    return out;
  }
  if (mesh.kind == SurfaceKind::flat_torus) {
    const double side = mesh.spec.side;
    for (int k = 0; k < 2; ++k) {
      ReferenceGeodesic g;
      g.name = k == 0 ? "horizontal_loop" : "vertical_loop";
      g.length = side;
      for (int s = 0; s < kSamples; ++s) {
        Eigen::Vector3d p = Eigen::Vector3d::Zero();
        p[k] = side * s / kSamples;
        g.polyline.push_back(p);
      }
      out.push_back(std::move(g));
    }
    return out;
  }
  throw ValidationError("no analytic reference geodesics for surface kind " + to_string(mesh.kind));
}

std::vector<std::array<int, 2>> mesh_edges(const SurfaceMesh& mesh) {
  std::vector<std::array<int, 2>> edges;
  edges.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      const auto [a, b] = std::minmax(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % 3)]);
      edges.push_back({a, b});
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::vector<int>> vertex_neighbors(const SurfaceMesh& mesh) {
  std::vector<std::vector<int>> nbrs(mesh.vertices.size());
  for (const auto& e : mesh_edges(mesh)) {
    nbrs[static_cast<std::size_t>(e[0])].push_back(e[1]);
    nbrs[static_cast<std::size_t>(e[1])].push_back(e[0]);
  }
  for (auto& list : nbrs) std::sort(list.begin(), list.end());
  return nbrs;
}

std::vector<std::vector<int>> vertex_triangles(const SurfaceMesh& mesh) {
  std::vector<std::vector<int>> out(mesh.vertices.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int v : mesh.triangles[t]) out[static_cast<std::size_t>(v)].push_back(static_cast<int>(t));
  return out;
}

std::vector<double> edge_graph_distances(const SurfaceMesh& mesh, int source) {
  if (source < 0 || source >= mesh.size()) throw ValidationError("distance source vertex out of range");
  const auto nbrs = vertex_neighbors(mesh);
  std::vector<double> dist(mesh.vertices.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<std::size_t>(source)] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    for (int w : nbrs[static_cast<std::size_t>(v)]) {
      const double nd = d + mesh.edge(v, w).norm();
      if (nd < dist[static_cast<std::size_t>(w)]) {
        dist[static_cast<std::size_t>(w)] = nd;
        queue.emplace(nd, w);
      }
    }
  }
  return dist;
}

Eigen::VectorXd prolongate(const SurfaceMesh& fine, const Eigen::VectorXd& coarse) {
  if (fine.parents.size() != fine.vertices.size())
    throw ValidationError("prolongation needs an icosphere mesh with parent data");
  Eigen::VectorXd out(fine.size());
  for (std::size_t v = 0; v < fine.parents.size(); ++v) {
    const auto [a, b] = fine.parents[v];
    if (a >= coarse.size() || b >= coarse.size())
      throw ValidationError("coarse field does not match the parent mesh level");
    out[static_cast<Eigen::Index>(v)] = 0.5 * (coarse[a] + coarse[b]);
  }
  return out;
}

int sphere_level_for(double radius, double target_h_max) {
  SurfaceSpec spec;
  spec.kind = SurfaceKind::sphere;
  spec.radius = radius;
  for (int level = 1; level <= 8; ++level) {
    spec.resolution = level;
    if (build_surface(spec).h_max <= target_h_max) return level;
  }
  throw ValidationError("no icosphere level up to 8 reaches the requested h_max");
}

}  // namespace allencahn
