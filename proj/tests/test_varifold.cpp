#include <doctest.h>

#include <cmath>
#include <numbers>

#include "allencahn/error.hpp"
#include "allencahn/varifold.hpp"
#include "helpers.hpp"

using namespace allencahn;

namespace {

LevelSetCurves rays(const std::vector<double>& degrees, double length = 1.0) {
  LevelSetCurves c;
  for (double d : degrees) {
    const double a = d * std::numbers::pi / 180.0;
    Polyline line;
    line.points = {Eigen::Vector3d::Zero(), Eigen::Vector3d(length * std::cos(a), length * std::sin(a), 0.0)};
    line.length = length;
    c.polylines.push_back(line);
    c.total_length += length;
  }
  return c;
}

double heading(const Eigen::Vector3d& v) {
  double a = std::atan2(v.y(), v.x()) * 180.0 / std::numbers::pi;
  return a < -1e-9 ? a + 360.0 : a;
}

}  // namespace

TEST_CASE("single triangle crossing") {
  SurfaceMesh mesh;
  mesh.kind = SurfaceKind::planar_box;
  mesh.vertices = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)};
  mesh.triangles = {{0, 1, 2}};
  Eigen::VectorXd u(3);
  u << -1.0, -1.0, 1.0;
  const auto c = extract_level_set(u, mesh, 0.0);
  REQUIRE(c.polylines.size() == 1);
  const auto& pts = c.polylines[0].points;
  REQUIRE(pts.size() == 2);
  CHECK_FALSE(c.polylines[0].closed);
  // Midpoints of the edges 0-2 and 1-2.
  const Eigen::Vector3d a(0.0, 0.5, 0.0), b(0.5, 0.5, 0.0);
  CHECK(std::min((pts[0] - a).norm(), (pts[0] - b).norm()) <= 1e-14);
  CHECK(std::min((pts[1] - a).norm(), (pts[1] - b).norm()) <= 1e-14);
  CHECK(c.total_length == doctest::Approx(0.5));
}

TEST_CASE("no crossings above the level") {
  const auto mesh = testing::sphere(2);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(mesh.size(), 0.5);
  const auto c = extract_level_set(u, mesh, 0.0);
  CHECK(c.polylines.empty());
  CHECK(c.total_length == 0.0);
}

TEST_CASE("levels at vertex values are nudged") {
  const auto mesh = testing::sphere(3);
  Eigen::VectorXd u(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) u[i] = mesh.vertices[static_cast<std::size_t>(i)].z();
  const auto c = extract_level_set(u, mesh, 0.0);
  CHECK(c.effective_level != c.level);
  CHECK(std::abs(c.effective_level) < 1e-10);
  REQUIRE(c.polylines.size() == 1);
  CHECK(c.polylines[0].closed);
  CHECK(c.total_length == doctest::Approx(2 * std::numbers::pi).epsilon(0.02));
  CHECK_THROWS_AS(extract_level_set(u, mesh, 1.0), ValidationError);
}

TEST_CASE("band on the flat torus gives two unit loops") {
  const double eps = 0.05;
  const auto mesh = testing::flat_torus(60);
  const auto h = solve_heteroclinic(quartic_potential());
  const auto u = testing::torus_band(mesh, h, eps);
  const auto c = extract_level_set(u.values, mesh, 0.0);
  REQUIRE(c.polylines.size() == 2);
  for (const auto& line : c.polylines) {
    CHECK(line.closed);
    CHECK(line.length == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("great circle fit of the equator") {
  const auto mesh = testing::sphere(4);
  const auto u = testing::sample(mesh, 0.1, [](const Eigen::Vector3d& x) { return std::tanh((x.z() + 1e-3) / 0.1); });
  const auto c = extract_level_set(u.values, mesh, 0.0);
  const auto fit = fit_great_circle(c, 1.0);
  CHECK(std::abs(fit.normal.z()) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(fit.hausdorff <= 5 * mesh.h_max);
}

TEST_CASE("ball masses") {
  const auto mesh = testing::box(4.0, 64);
  const auto ops = assemble_operators(mesh);
  const auto h = solve_heteroclinic(quartic_potential());
  const double sigma = interface_constants(quartic_potential()).sigma;
  const int centre = nearest_vertex(mesh, Eigen::Vector3d::Zero());
  CHECK(mesh.vertices[static_cast<std::size_t>(centre)].norm() <= 1e-12);

  const auto flat = constant_field(mesh, 1.0, 1.0);
  for (double r : {1.0, 3.0}) CHECK(mass_in_ball(flat, mesh, ops, centre, r) == 0.0);

  // Interface width 0.25 against radii up to 3, so the chord shortening across the layer is small.
  const double eps = 0.25;
  const auto line = testing::sample(mesh, eps, [&](const Eigen::Vector3d& x) { return h.value(x.y() / eps); });
  double previous = 0.0;
  for (double r : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    const double m = mass_in_ball(line, mesh, ops, centre, r);
    CHECK(m >= previous);
    previous = m;
  }
  CHECK(mass_in_ball(line, mesh, ops, centre, 3.0) == doctest::Approx(2 * 3.0 * sigma).epsilon(0.05));
}

TEST_CASE("density ratio of a straight interface tends to one") {
  const auto mesh = testing::box(12.0, 96);
  const auto ops = assemble_operators(mesh);
  const auto p = quartic_potential();
  const auto h = solve_heteroclinic(p);
  const double sigma = interface_constants(p).sigma;
  const int centre = nearest_vertex(mesh, Eigen::Vector3d::Zero());
  const auto line = testing::sample(mesh, 1.0, [&](const Eigen::Vector3d& x) { return h.value(x.y()); });
  const auto report = density_ratio(line, mesh, ops, p, sigma, centre, {2.0, 4.0, 8.0});
  CHECK(report.ratio.back() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(report.ratio[2] - 1.0) <= std::abs(report.ratio[0] - 1.0));
  CHECK(report.h0 == doctest::Approx(sigma / 2));
  const auto flat = density_ratio(constant_field(mesh, -1.0, 1.0), mesh, ops, p, sigma, centre, {1.0, 2.0});
  for (double r : flat.ratio) CHECK(r == 0.0);
  CHECK_THROWS_AS(density_ratio(line, mesh, ops, p, sigma, centre, {2.0, 1.0}), ValidationError);
}

TEST_CASE("junction classification") {
  const Eigen::Vector3d o = Eigen::Vector3d::Zero();
  const auto cross = classify_junction(rays({0, 90, 180, 270}), o, 0.5);
  CHECK(cross.kind == JunctionKind::transverse_crossing);
  REQUIRE(cross.pairing.size() == 2);
  for (auto [i, j] : cross.pairing) {
    const double d = std::abs(heading(cross.rays[static_cast<std::size_t>(i)]) -
                              heading(cross.rays[static_cast<std::size_t>(j)]));
    CHECK(d == doctest::Approx(180.0));
  }
  CHECK(classify_junction(rays({0, 180}), o, 0.5).kind == JunctionKind::regular);
  const auto odd = classify_junction(rays({0, 90, 200}), o, 0.5);
  CHECK(odd.kind == JunctionKind::other);
  CHECK(odd.describe() == "other(3)");
  CHECK(classify_junction(rays({90, 210, 330}), o, 0.5).describe() == "other(3)");
  CHECK_THROWS_AS(classify_junction(rays({0}), o, 0.5), ValidationError);
}

TEST_CASE("junction classification is rotation equivariant") {
  const Eigen::Vector3d o = Eigen::Vector3d::Zero();
  for (double shift : {17.0, 45.0, 133.0}) {
    const auto v = classify_junction(rays({shift, shift + 90, shift + 180, shift + 270}), o, 0.5);
    CHECK(v.kind == JunctionKind::transverse_crossing);
    std::vector<double> headings;
    for (const auto& r : v.rays) headings.push_back(heading(r));
    std::sort(headings.begin(), headings.end());
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(std::fmod(headings[k] - shift + 720.0, 90.0) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("enhanced second fundamental form") {
  const double eps = 0.5;
  const auto mesh = testing::box(4.0, 128);
  SUBCASE("flat profile") {
    const auto h = solve_heteroclinic(quartic_potential());
    const auto u = testing::sample(mesh, eps, [&](const Eigen::Vector3d& x) { return h.value(x.y() / eps); });
    const auto a = enhanced_sff_norm(u, mesh);
    double worst = 0.0;
    int counted = 0;
    for (int i = 0; i < mesh.size(); ++i)
      if (std::abs(u.values[i]) <= 0.9 && !mesh.is_boundary[static_cast<std::size_t>(i)]) {
        REQUIRE(a.defined[static_cast<std::size_t>(i)]);
        worst = std::max(worst, a.norm[i]);
        ++counted;
      }
    CHECK(counted > 0);
    CHECK(worst <= 0.05);
  }
  SUBCASE("circle") {
    const double R = 2.0;
    const auto h = solve_heteroclinic(quartic_potential());
    const auto u = testing::sample(mesh, eps, [&](const Eigen::Vector3d& x) {
      return h.value((std::hypot(x.x(), x.y()) - R) / eps);
    });
    const auto a = enhanced_sff_norm(u, mesh);
    double sum = 0.0;
    int counted = 0;
    for (int i = 0; i < mesh.size(); ++i)
      if (std::abs(std::hypot(mesh.vertices[static_cast<std::size_t>(i)].x(), mesh.vertices[static_cast<std::size_t>(i)].y()) - R) <= 0.05) {
        CHECK(a.norm[i] == doctest::Approx(1.0 / R).epsilon(0.10));
        sum += a.norm[i];
        ++counted;
      }
    REQUIRE(counted > 0);
    CHECK(sum / counted == doctest::Approx(1.0 / R).epsilon(0.05));
  }
  SUBCASE("constant") {
    const auto a = enhanced_sff_norm(constant_field(mesh, 0.3, eps), mesh);
    for (int i = 0; i < mesh.size(); ++i) {
      CHECK_FALSE(a.defined[static_cast<std::size_t>(i)]);
      CHECK(std::isnan(a.norm[i]));
    }
  }
}
