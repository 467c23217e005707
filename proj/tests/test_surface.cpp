#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "allencahn/error.hpp"
#include "helpers.hpp"

using namespace allencahn;
using testing::box;
using testing::flat_torus;
using testing::sphere;

TEST_CASE("icosphere level 4 is closed and fine enough") {
  const auto mesh = sphere(4);
  CHECK(mesh.closed());
  CHECK(mesh.size() == 2562);
  CHECK(mesh.h_max <= 0.1);
  for (const auto& v : mesh.vertices) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("flat torus vertex count and boundary") {
  const auto mesh = flat_torus(12);
  CHECK(mesh.size() == 144);
  CHECK(mesh.closed());
  CHECK(mesh.period.has_value());
}

TEST_CASE("planar box has a boundary") {
  const auto mesh = box(3.0, 6);
  CHECK_FALSE(mesh.closed());
  CHECK(mesh.boundary_vertices.size() == 24);
  CHECK(mesh.size() == 49);
}

TEST_CASE("sphere area within one percent and converging") {
  double previous = std::numeric_limits<double>::infinity();
  for (int level = 2; level <= 5; ++level) {
    const auto ops = assemble_operators(sphere(level));
    const double err = std::abs(ops.total_area - 4 * std::numbers::pi);
    CHECK(err < previous);
    previous = err;
    if (level >= 4) CHECK(err <= 0.01 * 4 * std::numbers::pi);
  }
}

TEST_CASE("flat torus area is exact") {
  const auto ops = assemble_operators(flat_torus(10));
  CHECK(std::abs(ops.total_area - 1.0) <= 1e-12);
  CHECK(std::abs(ops.mass.sum() - 1.0) <= 1e-12);
}

TEST_CASE("stiffness annihilates constants and is symmetric") {
  for (const auto& mesh : {sphere(3), flat_torus(9), box(2.0, 8)}) {
    const auto ops = assemble_operators(mesh);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(mesh.size());
    CHECK((ops.stiffness * one).cwiseAbs().maxCoeff() <= 1e-10);
    const Eigen::SparseMatrix<double> diff = ops.stiffness - Eigen::SparseMatrix<double>(ops.stiffness.transpose());
    CHECK(diff.norm() <= 1e-12 * ops.stiffness.norm());
  }
}

TEST_CASE("Dirichlet energy is nonnegative") {
  std::mt19937_64 rng(7);
  for (const auto& mesh : {sphere(3), flat_torus(9)}) {
    const auto ops = assemble_operators(mesh);
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd u = testing::random_direction(mesh.size(), rng);
      CHECK(u.dot(ops.stiffness * u) >= -1e-14);
    }
  }
}

TEST_CASE("reference geodesic lengths") {
  const auto eq = geodesic_reference(sphere(3));
  REQUIRE_FALSE(eq.empty());
  CHECK(eq.front().length == doctest::Approx(2 * std::numbers::pi).epsilon(1e-12));
  const auto big = geodesic_reference(sphere(3, 2.0));
  CHECK(big.front().length == doctest::Approx(4 * std::numbers::pi).epsilon(1e-12));
  const auto loop = geodesic_reference(flat_torus(8));
  REQUIRE_FALSE(loop.empty());
  CHECK(loop.front().length == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("descriptor round trip") {
  const auto mesh = flat_torus(16, 2.0);
  const auto spec = SurfaceSpec::parse(mesh.id);
  CHECK(spec.kind == SurfaceKind::flat_torus);
  CHECK(spec.resolution == 16);
  CHECK(spec.side == 2.0);
  CHECK(build_surface(spec).id == mesh.id);
}

TEST_CASE("sphere level selection") {
  CHECK(sphere_level_for(1.0, 0.1) == 4);
  CHECK(sphere_level_for(1.0, 0.05) == 5);
  CHECK(sphere_level_for(1.0, 0.025) == 6);
}

TEST_CASE("prolongation reproduces linear fields at inherited vertices") {
  const auto coarse = sphere(2);
  const auto fine = sphere(3);
  Eigen::VectorXd u(coarse.size());
  for (int i = 0; i < coarse.size(); ++i) u[i] = coarse.vertices[static_cast<std::size_t>(i)].z();
  const Eigen::VectorXd v = prolongate(fine, u);
  for (int i = 0; i < coarse.size(); ++i) CHECK(v[i] == u[i]);
  CHECK(v.size() == fine.size());
}

TEST_CASE("graph distances on a box") {
  const auto mesh = box(2.0, 4);
  const auto d = edge_graph_distances(mesh, 0);
  CHECK(d[0] == 0.0);
  CHECK(d[4] == doctest::Approx(4.0));
}

TEST_CASE("invalid geometry is rejected") {
  SurfaceSpec s;
  s.kind = SurfaceKind::torus_of_revolution;
  s.ring_radius = 1.0;
  s.tube_radius = 2.0;
  CHECK_THROWS_AS(build_surface(s), ValidationError);
  CHECK_THROWS_AS(surface_kind_from_string("klein_bottle"), ValidationError);
  CHECK_THROWS_AS(SurfaceSpec::parse("sphere:resolution=x"), ValidationError);
}
