#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace allencahn {

enum class SurfaceKind { sphere, ellipsoid, torus_of_revolution, flat_torus, planar_box };

std::string to_string(SurfaceKind kind);
SurfaceKind surface_kind_from_string(const std::string& name);

/// Geometry request for build_surface.
///
/// `resolution` is the icosahedral subdivision level for sphere/ellipsoid, the tube segment
/// count for torus_of_revolution, and the cell count per side for flat_torus/planar_box.
struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::sphere;
  int resolution = 3;
  double radius = 1.0;                    // sphere
  Eigen::Vector3d semi_axes{1, 1, 1};     // ellipsoid
  double ring_radius = 2.0;               // torus_of_revolution
  double tube_radius = 0.5;               // torus_of_revolution
  double side = 1.0;                      // flat_torus
  double half_width = 1.0;                // planar_box [-L, L]^2

  /// Canonical "kind:key=value:..." string; doubles as the mesh identifier.
  std::string descriptor() const;
  static SurfaceSpec parse(const std::string& descriptor);
};

struct SurfaceMesh {
  SurfaceKind kind = SurfaceKind::sphere;
  SurfaceSpec spec;
  std::string id;
  std::vector<Eigen::Vector3d> vertices;  // planar kinds use z = 0
  std::vector<std::array<int, 3>> triangles;
  /// Flat torus: periods in x and y. Opposite box edges are identified at build time, so
  /// triangles that straddle the seam index the wrapped vertices directly.
  std::optional<Eigen::Vector2d> period;
  std::vector<int> boundary_vertices;
  std::vector<char> is_boundary;
  double h_max = 0.0;
  /// Icosphere levels >= 1: the two coarse-level vertices each vertex was created between
  /// (a vertex inherited from the coarse level lists itself twice).
  std::vector<std::array<int, 2>> parents;

  int size() const { return static_cast<int>(vertices.size()); }
  bool closed() const { return boundary_vertices.empty(); }
  bool planar() const { return kind == SurfaceKind::flat_torus || kind == SurfaceKind::planar_box; }
  /// Vector from vertex a to vertex b, using the minimal periodic image on the flat torus.
  Eigen::Vector3d edge(int a, int b) const;
};

struct DiscreteOperators {
  std::string mesh_id;
  Eigen::VectorXd mass;                  // lumped vertex areas
  Eigen::SparseMatrix<double> stiffness;  // cotangent Laplacian
  double total_area = 0.0;

  int size() const { return static_cast<int>(mass.size()); }
};

/// Per-triangle data shared by the assembly and the diagnostics.
struct TriangleGeometry {
  double area = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  /// Gradients of the three hat functions restricted to the triangle.
  std::array<Eigen::Vector3d, 3> basis_gradient;
};

struct ReferenceGeodesic {
  std::string name;
  std::vector<Eigen::Vector3d> polyline;  // closed; last point != first point
  double length = 0.0;
};

/// Throws ValidationError on an unknown kind or degenerate geometry parameters.
SurfaceMesh build_surface(const SurfaceSpec& spec);

/// Lumped mass and cotangent stiffness. Throws ValidationError naming the triangle when an
/// interior angle is below 1e-6 rad.
DiscreteOperators assemble_operators(const SurfaceMesh& mesh);

/// Analytic closed geodesics for sphere and flat_torus meshes.
std::vector<ReferenceGeodesic> geodesic_reference(const SurfaceMesh& mesh);

std::vector<TriangleGeometry> triangle_geometry(const SurfaceMesh& mesh);

/// Sorted unique vertex pairs (a < b).
std::vector<std::array<int, 2>> mesh_edges(const SurfaceMesh& mesh);

/// Adjacent vertices of each vertex, ascending.
std::vector<std::vector<int>> vertex_neighbors(const SurfaceMesh& mesh);

/// Incident triangle indices of each vertex.
std::vector<std::vector<int>> vertex_triangles(const SurfaceMesh& mesh);

/// Dijkstra distances along mesh edges from `source`.
std::vector<double> edge_graph_distances(const SurfaceMesh& mesh, int source);

/// Linear interpolation of a coarse icosphere field to the next subdivision level.
Eigen::VectorXd prolongate(const SurfaceMesh& fine, const Eigen::VectorXd& coarse);

/// Smallest icosahedral level whose sphere mesh has h_max <= target (levels capped at 8).
int sphere_level_for(double radius, double target_h_max);

}  // namespace allencahn
