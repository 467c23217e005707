// Acceptance run: one PASS/FAIL line per criterion, with the measured values alongside.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "allencahn/entire2k.hpp"
#include "allencahn/error.hpp"
#include "allencahn/experiment.hpp"
#include "allencahn/minmax.hpp"
#include "allencahn/spectrum.hpp"
#include "allencahn/varifold.hpp"
#include "helpers.hpp"

using namespace allencahn;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double pi = std::numbers::pi;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the sub-checks of one criterion.
struct Criterion {
  bool ok = true;
  std::ostringstream detail;

  void check(bool cond, const std::string& what) {
    if (!detail.str().empty()) detail << "; ";
    detail << what << (cond ? "" : " [x]");
    ok = ok && cond;
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Criterion heteroclinic_accuracy() {
  Criterion c;
  const auto t0 = Clock::now();
  const auto p = quartic_potential();
  const auto h = solve_heteroclinic(p);
  const double runtime = seconds_since(t0);
  double sup = 0.0;
  for (double s = -10.0; s <= 10.0; s += 0.001) sup = std::max(sup, std::abs(h.value(s) - std::tanh(s / std::sqrt(2.0))));
  double equi = 0.0;
  for (std::size_t i = 0; i < h.values().size(); ++i)
    equi = std::max(equi, std::abs(0.5 * h.derivative()[i] * h.derivative()[i] - p.eval(h.values()[i], 0)));
  c.check(sup <= 1e-8, "sup error " + fmt(sup));
  c.check(equi <= 1e-10, "equipartition " + fmt(equi));
  c.check(runtime < 1.0, "runtime " + fmt(runtime) + " s");
  return c;
}

Criterion interface_constant() {
  Criterion c;
  const auto p = quartic_potential();
  const auto k = interface_constants(p);
  const double err = std::abs(k.sigma - 2.0 * std::sqrt(2.0) / 3.0);
  const double grad = std::abs(solve_heteroclinic(p).gradient_energy() - k.sigma);
  c.check(err <= 1e-8, "sigma error " + fmt(err));
  c.check(grad <= 1e-6, "|int H'^2 - sigma| " + fmt(grad));
  return c;
}

Criterion discrete_calculus() {
  Criterion c;
  const auto p = quartic_potential();
  std::mt19937_64 rng(31);
  double worst_g = 0.0, worst_h = 0.0;
  int directions = 0;
  for (const auto& mesh : {testing::sphere(3), testing::flat_torus(24)}) {
    const auto ops = assemble_operators(mesh);
    const auto u = testing::sample(mesh, 0.15, [](const Eigen::Vector3d& x) {
      return 0.8 * std::sin(3.0 * x.x() + 1.0) * std::cos(2.0 * x.y()) + 0.3 * x.z();
    });
    const Eigen::VectorXd g = gradient(u, ops, p);
    const auto hess = hessian(u, ops, p);
    for (int k = 0; k < 12; ++k, ++directions) {
      const Eigen::VectorXd d = testing::random_direction(mesh.size(), rng);
      auto at = [&](double t) {
        Field v = u;
        v.values += t * d;
        return energy(v, ops, p);
      };
      const double t1 = 1e-5, t2 = 1e-3;
      const double fd = (at(t1) - at(-t1)) / (2 * t1);
      worst_g = std::max(worst_g, std::abs(fd - g.dot(d)) / std::max(1.0, std::abs(g.dot(d))));
      const double sd = (at(t2) - 2 * at(0.0) + at(-t2)) / (t2 * t2);
      const double form = d.dot(hess * d);
      worst_h = std::max(worst_h, std::abs(sd - form) / std::max(1.0, std::abs(form)));
    }
  }
  c.check(worst_g <= 1e-6, "gradient rel. error " + fmt(worst_g));
  c.check(worst_h <= 1e-5, "Hessian rel. error " + fmt(worst_h));
  c.check(directions >= 20, std::to_string(directions) + " directions on sphere and flat torus");
  return c;
}

Criterion spectral_oracle() {
  Criterion c;
  const auto t0 = Clock::now();
  const auto mesh = testing::sphere(4);
  const auto ops = assemble_operators(mesh);
  const auto s = morse_index(constant_field(mesh, 0.0, 1.0), ops, quartic_potential());
  const double runtime = seconds_since(t0);
  c.check(s.index == 1 && s.nullity == 0,
          "index " + std::to_string(s.index) + ", nullity " + std::to_string(s.nullity));
  const double expected[] = {-1.0, 1.0, 1.0, 1.0};
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(s.lowest_eigenvalues[k] - expected[k]));
  c.check(worst <= 0.05, "max eigenvalue deviation " + fmt(worst));
  c.check(runtime < 30.0, "runtime " + fmt(runtime) + " s");
  return c;
}

Criterion sphere_minmax() {
  Criterion c;
  const auto t0 = Clock::now();
  const auto dir = std::filesystem::temp_directory_path() / "allencahn_acceptance_sphere";
  RunConfig config;
  config.epsilons = {0.2, 0.1, 0.05};
  config.h_ratio = 0.5;
  config.output_dir = dir;
  const auto report = run_experiment(config);
  c.check(report.complete, "complete");
  if (report.records.size() != 3) {
    c.check(false, "records " + std::to_string(report.records.size()) + " " + report.error);
    return c;
  }
  const auto& last = report.records.back();
  const double target = report.sigma * 2 * pi;
  c.check(last.h_max <= 0.025 + 1e-12, "h_max " + fmt(last.h_max));
  c.check(last.residual <= 1e-8, "residual " + fmt(last.residual));
  c.check(last.index == 0 || last.index == 1, "index " + std::to_string(last.index));
  c.check(std::abs(last.energy - target) <= 0.10 * target, "energy " + fmt(last.energy) + " vs " + fmt(target));
  c.check(last.great_circle_hausdorff >= 0 && last.great_circle_hausdorff <= 5 * last.h_max,
          "Hausdorff " + fmt(last.great_circle_hausdorff));
  std::string xi = "xi/E";
  bool decreasing = true;
  for (std::size_t k = 0; k < 3; ++k) {
    xi += " " + fmt(report.records[k].xi_l1_over_energy);
    if (k > 0) decreasing = decreasing && report.records[k].xi_l1_over_energy < report.records[k - 1].xi_l1_over_energy;
  }
  c.check(decreasing, xi);
  c.check(true, "runtime " + fmt(seconds_since(t0)) + " s");
  return c;
}

Criterion flat_torus() {
  Criterion c;
  const double eps = 0.05;
  const auto mesh = testing::flat_torus(60);
  const auto ops = assemble_operators(mesh);
  const auto p = quartic_potential();
  NewtonReport report;
  NewtonOptions opts;
  opts.tol = 1e-10;
  const auto u = newton_refine(testing::torus_band(mesh, solve_heteroclinic(p), eps), ops, p, opts, &report);
  const double res = residual_norm(gradient(u, ops, p), ops);
  const double e = energy(u, ops, p);
  const double target = 2 * interface_constants(p).sigma;
  c.check(res <= 1e-8, "residual " + fmt(res));
  c.check(std::abs(e - target) <= 0.03 * target, "energy " + fmt(e) + " vs 2 sigma " + fmt(target));
  return c;
}

struct Saddle {
  SurfaceMesh mesh;
  DiscreteOperators ops;
  Field u;
  double residual = 0.0;
};

Saddle saddle(double L) {
  const auto p = quartic_potential();
  Saddle s;
  s.mesh = testing::box(L, static_cast<int>(std::lround(2 * L / 0.25)));
  s.ops = assemble_operators(s.mesh);
  const auto cfg = make_line_config({0, pi / 2, pi, 3 * pi / 2}, {0, 0, 0, 0});
  NewtonReport report;
  s.u = refine_entire(approximate_solution(cfg, solve_heteroclinic(p), s.mesh), s.mesh, s.ops, p, 1e-10, &report);
  s.residual = report.residual;
  return s;
}

Criterion saddle_index(const Saddle& s12) {
  Criterion c;
  const auto p = quartic_potential();
  const auto verdict = index_lower_bound_check(s12.u, s12.mesh, s12.ops, p, 2);
  c.check(s12.residual <= 1e-8, "residual " + fmt(s12.residual));
  c.check(verdict.index_computed >= 1, "index on [-12,12]^2 " + std::to_string(verdict.index_computed));
  std::string nested = "nested";
  bool monotone = true;
  int previous = 0;
  for (double L : {8.0, 12.0, 16.0}) {
    const auto s = L == 12.0 ? s12 : saddle(L);
    const int index = morse_index(s.u, s.ops, p, {}, interior_mask(s.mesh)).index;
    nested += " " + std::to_string(index);
    monotone = monotone && index >= previous;
    previous = index;
  }
  c.check(monotone, nested);
  const auto& n = verdict.nodal;
  c.check(n.sign_changing, "sign changing");
  c.check(n.euler_consistent, "q=" + std::to_string(n.domain_count) + " C=" + std::to_string(n.component_count) +
                                  " S=" + std::to_string(n.singular_count));
  c.check(n.domain_count >= 2, "q >= 2");
  return c;
}

Criterion density_junction(const Saddle& s16) {
  Criterion c;
  const auto p = quartic_potential();
  const double sigma = interface_constants(p).sigma;
  const int origin = nearest_vertex(s16.mesh, Eigen::Vector3d::Zero());
  const auto d = density_ratio(s16.u, s16.mesh, s16.ops, p, sigma, origin, {8.0, 10.0, 12.0});
  c.check(d.ratio[1] >= 1.85 && d.ratio[1] <= 2.15, "ratio at r=10 " + fmt(d.ratio[1]));
  // The ratio approaches 2 like 2 - c/r; the slope of the mass between r=8 and r=12 isolates the
  // four half-lines from the deficit at the crossing.
  const double slope = (d.mass[2] - d.mass[0]) / (2.0 * 4.0 * sigma);
  c.check(true, "mass slope / (2 sigma) between r=8 and 12: " + fmt(slope));

  const auto curves = extract_level_set(s16.u.values, s16.mesh, 0.0);
  const auto junction = classify_junction(curves, Eigen::Vector3d::Zero(), 2.0);
  bool opposite = junction.kind == JunctionKind::transverse_crossing;
  for (auto [i, j] : junction.pairing)
    opposite = opposite && (junction.rays[static_cast<std::size_t>(i)] + junction.rays[static_cast<std::size_t>(j)]).norm() <= 0.15;
  c.check(opposite, "saddle zero set " + junction.describe());

  LevelSetCurves triple;
  for (double deg : {90.0, 210.0, 330.0}) {
    Polyline line;
    const double a = deg * pi / 180;
    line.points = {Eigen::Vector3d::Zero(), Eigen::Vector3d(std::cos(a), std::sin(a), 0)};
    line.length = 1.0;
    triple.polylines.push_back(line);
  }
  const auto t = classify_junction(triple, Eigen::Vector3d::Zero(), 0.5);
  c.check(t.describe() == "other(3)", "triple junction " + t.describe());
  return c;
}

Criterion property_suite(const Saddle& s12) {
  Criterion c;
  const auto p = quartic_potential();

  bool even = true;
  for (double t = -2.0; t <= 2.0; t += 1.0 / 128)
    for (int k = 0; k < 3; ++k) even = even && std::abs(p.eval(t, k) - std::pow(-1.0, k) * p.eval(-t, k)) <= 1e-14;
  c.check(even, "potential evenness");

  bool operators = true;
  for (const auto& mesh : {testing::sphere(3), testing::flat_torus(20), testing::box(3.0, 24), s12.mesh}) {
    const auto ops = assemble_operators(mesh);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(mesh.size());
    const Eigen::SparseMatrix<double> asym = ops.stiffness - Eigen::SparseMatrix<double>(ops.stiffness.transpose());
    operators = operators && (ops.stiffness * one).cwiseAbs().maxCoeff() <= 1e-10 && asym.norm() <= 1e-12 * ops.stiffness.norm();
  }
  c.check(operators, "operator kernel and symmetry");

  const auto mesh = testing::sphere(3);
  const auto ops = assemble_operators(mesh);
  const auto h = solve_heteroclinic(p);
  MinMaxOptions opts;
  opts.max_iters = 60;
  const auto path = initial_path(mesh, h, 0.3, 8, 4);
  const auto a = mountain_pass(path, mesh, ops, p, opts);
  const auto b = mountain_pass(initial_path(mesh, h, 0.3, 8, 4), mesh, ops, p, opts);
  c.check(a.path.nodes.front().values == path.nodes.front().values &&
              a.path.nodes.back().values == path.nodes.back().values,
          "endpoint invariance");
  c.check(a.history == b.history && a.critical_point.values == b.critical_point.values, "determinism");

  const int origin = nearest_vertex(s12.mesh, Eigen::Vector3d::Zero());
  bool monotone = true;
  double previous = 0.0;
  for (double r = 0.5; r <= 11.0; r += 0.5) {
    const double m = mass_in_ball(s12.u, s12.mesh, s12.ops, origin, r);
    monotone = monotone && m >= previous;
    previous = m;
  }
  c.check(monotone, "monotone ball masses");

  bool euler = true;
  const auto box = testing::box(2.0, 40);
  const std::vector<std::function<double(const Eigen::Vector3d&)>> fields{
      [](const Eigen::Vector3d& x) { return x.x(); },
      [](const Eigen::Vector3d& x) { return x.x() * x.y(); },
      [](const Eigen::Vector3d& x) { return (x.x() - 0.013) * (x.y() + 0.021); },
      [](const Eigen::Vector3d& x) { return x.x() * x.x() - x.y() * x.y(); }};
  for (const auto& f : fields) euler = euler && nodal_analysis(testing::sample(box, 1.0, f), box).euler_consistent;
  for (double angle : {0.37, 1.1, 2.3}) {
    const auto v = directional_jacobi_field(s12.u, s12.mesh, s12.ops, p, {std::cos(angle), std::sin(angle)});
    euler = euler && nodal_analysis(v.v, s12.mesh).euler_consistent;
  }
  c.check(euler, "Euler consistency");
  return c;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Criterion()>& run) {
    Criterion c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok ? "PASS" : "FAIL") << " " << id << " " << name << ": " << c.detail.str() << std::endl;
    failures += c.ok ? 0 : 1;
  };

  report(1, "heteroclinic accuracy", heteroclinic_accuracy);
  report(2, "interface constant", interface_constant);
  report(3, "discrete calculus", discrete_calculus);
  report(4, "spectral oracle", spectral_oracle);
  report(5, "sphere min-max", sphere_minmax);
  report(6, "flat torus", flat_torus);
  const auto s12 = saddle(12.0);
  const auto s16 = saddle(16.0);
  report(7, "saddle index", [&] { return saddle_index(s12); });
  report(8, "density and junctions", [&] { return density_junction(s16); });
  report(9, "property suite", [&] {
    auto c = property_suite(s12);
    const double total = seconds_since(t0);
    c.check(total <= 600.0, "acceptance runtime " + fmt(total) + " s");
    return c;
  });
  return failures;
}
