#include <doctest.h>

#include <cmath>

#include "allencahn/error.hpp"
#include "allencahn/heteroclinic.hpp"
#include "allencahn/potential.hpp"

using namespace allencahn;

TEST_CASE("quartic profile is tanh(s / sqrt 2)") {
  const auto h = solve_heteroclinic(quartic_potential());
  double worst = 0.0;
  for (double s = -10.0; s <= 10.0; s += 0.0137) worst = std::max(worst, std::abs(h.value(s) - std::tanh(s / std::sqrt(2.0))));
  CHECK(worst <= 1e-8);
}

TEST_CASE("centre values") {
  const auto h = solve_heteroclinic(quartic_potential());
  CHECK(h.value(0.0) == 0.0);
  CHECK(h.slope(0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("far tail is within 1e-10 of the wells") {
  const auto h = solve_heteroclinic(quartic_potential());
  CHECK(std::abs(h.value(50.0) - 1.0) <= 1e-10);
  CHECK(std::abs(h.value(-50.0) + 1.0) <= 1e-10);
}

TEST_CASE("equipartition and monotonicity on the grid") {
  const auto p = quartic_potential();
  const auto h = solve_heteroclinic(p);
  const auto& v = h.values();
  const auto& d = h.derivative();
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(d[i] > 0.0);
    worst = std::max(worst, std::abs(0.5 * d[i] * d[i] - p.eval(v[i], 0)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("gradient energy matches sigma") {
  const auto p = quartic_potential();
  const auto h = solve_heteroclinic(p);
  CHECK(std::abs(h.gradient_energy() - interface_constants(p).sigma) <= 1e-6);
}

TEST_CASE("inverse undoes value") {
  const auto h = solve_heteroclinic(quartic_potential());
  for (double s : {-6.0, -1.3, 0.0, 0.4, 3.0}) CHECK(h.inverse(h.value(s)) == doctest::Approx(s).epsilon(1e-8));
  CHECK(std::isinf(h.inverse(1.0)));
}

TEST_CASE("odd profile for an even potential") {
  const auto p = polynomial_potential("doubled", {0.5, 0.0, -1.0, 0.0, 0.5}, 0.25, 1.375);
  const auto h = solve_heteroclinic(p);
  for (double s : {0.3, 1.0, 2.5, 7.0}) CHECK(h.value(-s) == doctest::Approx(-h.value(s)).epsilon(1e-12));
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_AS(solve_heteroclinic(quartic_potential(), 2.0), ValidationError);
  CHECK_THROWS_AS(solve_heteroclinic(quartic_potential(), 12.0, 0.1), ValidationError);
}
