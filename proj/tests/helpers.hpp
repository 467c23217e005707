#pragma once

#include <cmath>
#include <random>

#include "allencahn/energy.hpp"
#include "allencahn/heteroclinic.hpp"
#include "allencahn/potential.hpp"
#include "allencahn/surface.hpp"

namespace testing {

namespace ac = allencahn;

inline ac::SurfaceMesh sphere(int level, double radius = 1.0) {
  ac::SurfaceSpec s;
  s.kind = ac::SurfaceKind::sphere;
  s.resolution = level;
  s.radius = radius;
  return ac::build_surface(s);
}

inline ac::SurfaceMesh flat_torus(int n, double side = 1.0) {
  ac::SurfaceSpec s;
  s.kind = ac::SurfaceKind::flat_torus;
  s.resolution = n;
  s.side = side;
  return ac::build_surface(s);
}

inline ac::SurfaceMesh box(double half_width, int cells) {
  ac::SurfaceSpec s;
  s.kind = ac::SurfaceKind::planar_box;
  s.half_width = half_width;
  s.resolution = cells;
  return ac::build_surface(s);
}

template <class F>
ac::Field sample(const ac::SurfaceMesh& mesh, double eps, F&& f) {
  ac::Field u;
  u.epsilon = eps;
  u.mesh_id = mesh.id;
  u.values.resize(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) u.values[i] = f(mesh.vertices[static_cast<std::size_t>(i)]);
  return u;
}

// Periodic two-interface band on the unit flat torus: positive on (1/4, 3/4) in x.
inline ac::Field torus_band(const ac::SurfaceMesh& mesh, const ac::HeteroclinicProfile& h, double eps,
                            double scale = 1.0) {
  return sample(mesh, eps, [&](const Eigen::Vector3d& x) {
    return scale * h.value((0.25 - std::abs(x.x() - 0.5)) / eps);
  });
}

inline Eigen::VectorXd random_direction(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = g(rng);
  return d / d.norm();
}

}  // namespace testing
