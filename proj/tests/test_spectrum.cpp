#include <doctest.h>

#include <cmath>

#include "allencahn/error.hpp"
#include "allencahn/spectrum.hpp"
#include "helpers.hpp"

using namespace allencahn;

TEST_CASE("wells are stable") {
  for (const auto& mesh : {testing::sphere(2), testing::flat_torus(10)}) {
    const auto ops = assemble_operators(mesh);
    const auto s = morse_index(constant_field(mesh, 1.0, 0.5), ops, quartic_potential());
    CHECK(s.index == 0);
    CHECK(s.nullity == 0);
  }
}

TEST_CASE("u = 0 on the unit sphere matches the spherical harmonic spectrum") {
  const auto mesh = testing::sphere(4);
  const auto ops = assemble_operators(mesh);
  SpectrumOptions opts;
  opts.q = 6;
  const auto s = morse_index(constant_field(mesh, 0.0, 1.0), ops, quartic_potential(), opts);
  CHECK(s.index == 1);
  CHECK(s.nullity == 0);
  REQUIRE(s.lowest_eigenvalues.size() >= 5);
  CHECK(s.lowest_eigenvalues[0] == doctest::Approx(-1.0).epsilon(0.05));
  for (int k = 1; k <= 3; ++k) CHECK(s.lowest_eigenvalues[k] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(s.lowest_eigenvalues[4] == doctest::Approx(5.0).epsilon(0.05));
  for (double r : s.residuals) CHECK(r <= 1e-6);
}

TEST_CASE("dense and iterative solves agree") {
  const auto mesh = testing::sphere(3);
  const auto ops = assemble_operators(mesh);
  const auto u = constant_field(mesh, 0.0, 0.5);
  SpectrumOptions dense, iterative;
  dense.q = iterative.q = 6;
  iterative.dense_threshold = 10;
  const auto a = morse_index(u, ops, quartic_potential(), dense);
  const auto b = morse_index(u, ops, quartic_potential(), iterative);
  CHECK(a.dense);
  CHECK_FALSE(b.dense);
  CHECK(a.index == b.index);
  for (std::size_t k = 0; k < 6; ++k)
    CHECK(b.lowest_eigenvalues[k] == doctest::Approx(a.lowest_eigenvalues[k]).epsilon(1e-8));
  for (double r : b.residuals) CHECK(r <= 1e-6);
}

TEST_CASE("eigenfields are mass orthonormal") {
  const auto mesh = testing::sphere(3);
  const auto ops = assemble_operators(mesh);
  SpectrumOptions opts;
  opts.dense_threshold = 10;
  const auto s = morse_index(constant_field(mesh, 0.0, 1.0), ops, quartic_potential(), opts);
  for (std::size_t i = 0; i < s.eigenfields.size(); ++i)
    for (std::size_t j = 0; j < s.eigenfields.size(); ++j) {
      const double g = s.eigenfields[i].dot(ops.mass.asDiagonal() * s.eigenfields[j]);
      CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
    }
}

TEST_CASE("index is stable across one refinement") {
  int previous = -1;
  for (int level : {3, 4}) {
    const auto mesh = testing::sphere(level);
    const auto ops = assemble_operators(mesh);
    const auto s = morse_index(constant_field(mesh, 0.0, 1.0), ops, quartic_potential());
    if (previous >= 0) CHECK(s.index == previous);
    previous = s.index;
  }
}

TEST_CASE("box index of u = 0 counts Dirichlet modes below 1") {
  // Continuum oracle: pi^2 (m^2 + n^2) / (2L)^2 < 1 for m, n >= 1.
  const auto mesh = testing::box(6.0, 48);
  const auto ops = assemble_operators(mesh);
  const auto u = constant_field(mesh, 0.0, 1.0);
  int previous = 0;
  for (auto [L, expected] : {std::pair{2.0, 0}, std::pair{4.0, 3}, std::pair{5.25, 6}}) {
    SpectrumOptions opts;
    opts.q = 10;
    const auto s = morse_index(u, ops, quartic_potential(), opts, box_mask(mesh, L));
    CHECK(s.index == expected);
    CHECK(s.index >= previous);
    previous = s.index;
  }
}

TEST_CASE("non-critical states are rejected") {
  const auto mesh = testing::sphere(2);
  const auto ops = assemble_operators(mesh);
  const auto u = testing::sample(mesh, 0.5, [](const Eigen::Vector3d& x) { return 0.5 * x.z(); });
  CHECK_THROWS_AS(morse_index(u, ops, quartic_potential()), ValidationError);
}

TEST_CASE("lowest modes of a diagonal pencil") {
  const int n = 50;
  Eigen::SparseMatrix<double> h(n, n);
  for (int i = 0; i < n; ++i) h.insert(i, i) = static_cast<double>(i) - 2.5;
  const Eigen::VectorXd mass = Eigen::VectorXd::Constant(n, 2.0);
  const auto modes = lowest_modes(h, mass, 3);
  CHECK(modes.values[0] == doctest::Approx(-1.25));
  CHECK(modes.values[1] == doctest::Approx(-0.75));
  CHECK(modes.values[2] == doctest::Approx(-0.25));
}

TEST_CASE("JSON summary") {
  const auto mesh = testing::sphere(2);
  const auto ops = assemble_operators(mesh);
  const auto doc = morse_index(constant_field(mesh, 1.0, 1.0), ops, quartic_potential()).to_json();
  CHECK(doc.at("index") == 0);
  CHECK(doc.contains("eigenvalues"));
}
