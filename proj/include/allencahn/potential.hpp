#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace allencahn {

/// Double-well potential W with its first two derivatives.
///
/// `alpha` and `kappa` are the convexity radius and constant: W'' >= kappa
/// whenever |t| > 1 - alpha.
struct Potential {
  std::string name;
  std::function<double(double)> w;
  std::function<double(double)> dw;
  std::function<double(double)> d2w;
  double alpha = 0.25;
  double kappa = 0.6875;

  /// W, W' or W'' at t for order 0, 1, 2.
  double eval(double t, int order) const;
};

/// W(t) = (1 - t^2)^2 / 4, evaluated in factored form so that W is accurate near the wells.
Potential quartic_potential();

/// W(t) = sum_k coefficients[k] t^k.
Potential polynomial_potential(std::string name, std::vector<double> coefficients, double alpha,
                               double kappa);

/// Built-in by name ("quartic"), or a polynomial when coefficients are given.
Potential make_potential(const std::string& name, const std::vector<double>& coefficients,
                         double alpha, double kappa);

struct HypothesisCheck {
  bool pass = true;
  double worst_violation = 0.0;  // 0 when pass
  double worst_t = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::string potential;
  int grid_resolution = 0;
  HypothesisCheck h1;  // nonnegative, zero exactly at +-1
  HypothesisCheck h2;  // t W'(t) < 0 on (-1,1) minus 0, W''(0) != 0
  HypothesisCheck h3;  // W'' >= kappa for |t| > 1 - alpha
  HypothesisCheck h4;  // evenness

  bool pass() const { return h1.pass && h2.pass && h3.pass && h4.pass; }
  nlohmann::json to_json() const;
};

/// Samples (H1)-(H4) on a grid of spacing 1/grid_resolution over [-2, 2] plus t in {-1, 0, 1}.
/// Throws ValidationError on a non-finite W value or grid_resolution < 16.
ValidationReport validate_potential(const Potential& p, int grid_resolution);

struct InterfaceConstants {
  double h0 = 0.0;     // sigma / 2
  double sigma = 0.0;  // integral of sqrt(2 W) over [-1, 1]
  double quadrature_error = 0.0;
};

/// Adaptive Gauss-Kronrod quadrature of sqrt(2W) to absolute error `tol`.
/// Throws SolverError when the error estimate stays above tol.
InterfaceConstants interface_constants(const Potential& p, double tol = 1e-12);

}  // namespace allencahn
