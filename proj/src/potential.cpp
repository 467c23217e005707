#include "allencahn/potential.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "allencahn/error.hpp"

namespace allencahn {

double Potential::eval(double t, int order) const {
  switch (order) {
    case 0:
      return w(t);
    case 1:
      return dw(t);
    case 2:
      return d2w(t);
    default:
      throw ValidationError("potential derivative order must be 0, 1 or 2, got " +
                            std::to_string(order));
  }
}

Potential quartic_potential() {
  Potential p;
  p.name = "quartic";
  p.w = [](double t) {
    const double s = (1.0 - t) * (1.0 + t);
    return 0.25 * s * s;
  };
  p.dw = [](double t) { return t * (t - 1.0) * (t + 1.0); };
  p.d2w = [](double t) { return 3.0 * t * t - 1.0; };
  p.alpha = 0.25;
  p.kappa = 0.6875;  // W''(0.75)
  return p;
}

Potential polynomial_potential(std::string name, std::vector<double> coefficients, double alpha,
                               double kappa) {
  if (coefficients.empty()) throw ValidationError("polynomial potential needs coefficients");
  std::vector<double> c1, c2;
  for (std::size_t k = 1; k < coefficients.size(); ++k) c1.push_back(k * coefficients[k]);
  for (std::size_t k = 1; k < c1.size(); ++k) c2.push_back(k * c1[k]);
  auto horner = [](std::vector<double> c) {
    return [c = std::move(c)](double t) {
      double acc = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
      return acc;
    };
  };
  Potential p;
  p.name = std::move(name);
  p.w = horner(std::move(coefficients));
  p.dw = horner(std::move(c1));
  p.d2w = horner(std::move(c2));
  p.alpha = alpha;
  p.kappa = kappa;
  return p;
}

Potential make_potential(const std::string& name, const std::vector<double>& coefficients,
                         double alpha, double kappa) {
  if (!coefficients.empty()) return polynomial_potential(name, coefficients, alpha, kappa);
  if (name == "quartic") {
    Potential p = quartic_potential();
    if (alpha > 0.0) p.alpha = alpha;
    if (kappa > 0.0) p.kappa = kappa;
    return p;
  }
  throw ValidationError("unknown potential '" + name + "' and no coefficients given");
}

namespace {

constexpr double kTol = 1e-12;

void record(HypothesisCheck& check, double violation, double t, const std::string& what) {
  if (violation <= 0.0) return;
  check.pass = false;
  if (violation > check.worst_violation) {
    check.worst_violation = violation;
    check.worst_t = t;
    check.detail = what;
  }
}

double finite_eval(const Potential& p, double t, int order) {
  const double v = p.eval(t, order);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "potential '" << p.name << "' returned non-finite W";
    if (order > 0) os << std::string(order, '\'');
    os << " at t = " << t;
    throw ValidationError(os.str());
  }
  return v;
}

nlohmann::json check_json(const HypothesisCheck& c) {
  return {{"pass", c.pass},
          {"worst_violation", c.worst_violation},
          {"worst_t", c.worst_t},
          {"detail", c.detail}};
}

}  // namespace

nlohmann::json ValidationReport::to_json() const {
  return {{"schema_version", 1},
          {"potential", potential},
          {"grid_resolution", grid_resolution},
          {"pass", pass()},
          {"H1", check_json(h1)},
          {"H2", check_json(h2)},
          {"H3", check_json(h3)},
          {"H4", check_json(h4)}};
}

ValidationReport validate_potential(const Potential& p, int grid_resolution) {
  if (grid_resolution < 16) throw ValidationError("grid_resolution must be >= 16");
  ValidationReport report;
  report.potential = p.name;
  report.grid_resolution = grid_resolution;

  const double step = 1.0 / grid_resolution;
  std::vector<double> samples;
  for (int i = -2 * grid_resolution; i <= 2 * grid_resolution; ++i) samples.push_back(i * step);
  samples.push_back(-1.0);
  samples.push_back(0.0);
  samples.push_back(1.0);

  // H1
  for (double t : {-1.0, 1.0}) record(report.h1, std::abs(finite_eval(p, t, 0)) - kTol, t, "W(+-1) != 0");
  for (double t : samples) {
    const double w = finite_eval(p, t, 0);
    record(report.h1, -w - kTol, t, "W < 0");
    const bool at_well = std::abs(std::abs(t) - 1.0) < 0.5 * step;
    if (!at_well && w <= 0.0) record(report.h1, kTol - w, t, "W vanishes away from +-1");
  }

  // H2
  for (double t : samples) {
    if (t == 0.0 || std::abs(t) >= 1.0) continue;
    record(report.h2, t * finite_eval(p, t, 1) + kTol, t, "t W'(t) >= 0 inside (-1, 1)");
  }
  const double curvature0 = std::abs(finite_eval(p, 0.0, 2));
  if (curvature0 <= kTol) record(report.h2, kTol, 0.0, "W''(0) = 0");

  // H3
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) record(report.h3, 1.0, 0.0, "alpha outside (0, 1)");
  if (!(p.kappa > 0.0)) record(report.h3, 1.0, 0.0, "kappa not positive");
  for (double t : samples) {
    if (std::abs(t) <= 1.0 - p.alpha) continue;
    record(report.h3, p.kappa - finite_eval(p, t, 2) - kTol, t, "W'' < kappa near the wells");
  }

  // H4
  for (double t : samples) {
    const double a = finite_eval(p, t, 0);
    const double b = finite_eval(p, -t, 0);
    record(report.h4, std::abs(a - b) - kTol * std::max(1.0, std::abs(a)), t, "W(t) != W(-t)");
  }
  return report;
}

InterfaceConstants interface_constants(const Potential& p, double tol) {
  if (!(tol > 0.0)) throw ValidationError("quadrature tolerance must be positive");
  auto integrand = [&p](double t) { return std::sqrt(2.0 * std::max(p.w(t), 0.0)); };
  using boost::math::quadrature::gauss_kronrod;

  double error = 0.0;
  double l1 = 0.0;
  double sigma = gauss_kronrod<double, 31>::integrate(integrand, -1.0, 1.0, 15, 1e-6, &error, &l1);
  // The library terminates on a relative criterion; tighten it until the absolute error meets tol.
  double rel = tol / std::max(l1, 1e-300);
  for (int attempt = 0; attempt < 4 && !(error <= tol); ++attempt) {
    sigma = gauss_kronrod<double, 61>::integrate(integrand, -1.0, 1.0, 20 + 5 * attempt, rel, &error, &l1);
    rel *= 0.1;
  }
  if (!(error <= tol)) {
    std::ostringstream os;
    os << "interface-constant quadrature did not reach tol " << tol << " (achieved " << error << ")";
    throw SolverError(os.str());
  }
  return {0.5 * sigma, sigma, error};
}

}  // namespace allencahn
