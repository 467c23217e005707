#pragma once

#include <vector>

#include "allencahn/potential.hpp"

namespace allencahn {

/// Tabulated solution of H' = sqrt(2 W(H)), H(0) = 0 on a uniform grid over [-S, S].
///
/// Between nodes the profile is a cubic Hermite interpolant of (H, H'); beyond the grid it
/// continues as +-1 -+ c exp(-tail_rate |s|), matched to the end values.
class HeteroclinicProfile {
public:
  HeteroclinicProfile() = default;
  HeteroclinicProfile(std::vector<double> grid, std::vector<double> values,
                      std::vector<double> derivative, double tail_rate);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& derivative() const { return derivative_; }
  double tail_rate() const { return tail_rate_; }
  double half_width() const { return grid_.empty() ? 0.0 : grid_.back(); }

  double value(double s) const;
  double slope(double s) const;
  /// The s with H(s) = h, for |h| < 1. Values at or beyond +-1 map to +-infinity.
  double inverse(double h) const;
  /// Integral of H'(s)^2 over the real line: trapezoid on the grid plus the exponential tails.
  double gradient_energy() const;

private:
  void locate(double s, std::size_t& i, double& t) const;

  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<double> derivative_;
  double step_ = 0.0;
  double tail_rate_ = 0.0;
  double tail_plus_ = 0.0;   // 1 - H(S)
  double tail_minus_ = 0.0;  // 1 + H(-S)
};

/// Integrates the first-order heteroclinic ODE outward from s = 0 with classical RK4.
/// Once 1 - |H| drops below 1e-6 the solution continues along the linearization at the well,
/// 1 - |H| ~ exp(-sqrt(W''(+-1)) s).
///
/// Requires half_width >= 5 and step <= 0.01. Throws ValidationError if W vanishes inside (-1, 1).
HeteroclinicProfile solve_heteroclinic(const Potential& p, double half_width = 12.0,
                                       double step = 0.005);

inline double eval_profile(const HeteroclinicProfile& h, double s) { return h.value(s); }

}  // namespace allencahn
