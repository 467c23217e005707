#include "allencahn/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "allencahn/error.hpp"

namespace allencahn {

nlohmann::json SpectralSummary::to_json() const {
  return {{"schema_version", 1},  {"index", index},       {"nullity", nullity},
          {"eigenvalues", lowest_eigenvalues}, {"residuals", residuals},
          {"tol", tol},           {"dense", dense},       {"free_vertices", free_count}};
}

std::vector<char> interior_mask(const SurfaceMesh& mesh) {
  std::vector<char> mask(mesh.vertices.size(), 1);
  for (int v : mesh.boundary_vertices) mask[static_cast<std::size_t>(v)] = 0;
  return mask;
}

std::vector<char> box_mask(const SurfaceMesh& mesh, double half_width) {
  std::vector<char> mask(mesh.vertices.size(), 0);
  const double limit = half_width - 1e-9 * std::max(1.0, half_width);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const auto& x = mesh.vertices[v];
    mask[v] = (std::abs(x.x()) < limit && std::abs(x.y()) < limit && !mesh.is_boundary[v]) ? 1 : 0;
  }
  return mask;
}

namespace {

struct Restricted {
  Eigen::SparseMatrix<double> h;
  Eigen::VectorXd mass;
  std::vector<int> to_full;
};

Restricted restrict_to(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXd& mass,
                       const std::vector<char>& free) {
  const auto n = h.rows();
  std::vector<int> to_local(static_cast<std::size_t>(n), -1);
  Restricted out;
  for (Eigen::Index i = 0; i < n; ++i)
    if (free.empty() || free[static_cast<std::size_t>(i)]) {
      to_local[static_cast<std::size_t>(i)] = static_cast<int>(out.to_full.size());
      out.to_full.push_back(static_cast<int>(i));
    }
  const auto m = static_cast<Eigen::Index>(out.to_full.size());
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index col = 0; col < h.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(h, col); it; ++it) {
      const int r = to_local[static_cast<std::size_t>(it.row())];
      const int c = to_local[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  out.h.resize(m, m);
  out.h.setFromTriplets(triplets.begin(), triplets.end());
  out.mass.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out.mass[i] = mass[out.to_full[static_cast<std::size_t>(i)]];
  return out;
}

struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns, M-orthonormal
};

Eigenpairs dense_pairs(const Restricted& r, int q) {
  const Eigen::VectorXd inv_sqrt = r.mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd a = Eigen::MatrixXd(r.h);
  a = inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw SolverError("dense symmetric eigensolver failed");
  const auto k = std::min<Eigen::Index>(q, a.rows());
  return {solver.eigenvalues().head(k), inv_sqrt.asDiagonal() * solver.eigenvectors().leftCols(k)};
}

// Gram-Schmidt in the M inner product, applied twice for stability.
void m_orthonormalize(Eigen::MatrixXd& x, const Eigen::VectorXd& mass) {
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const double c = x.col(i).dot(mass.cwiseProduct(x.col(j)));
        x.col(j) -= c * x.col(i);
      }
      const double norm = std::sqrt(x.col(j).dot(mass.cwiseProduct(x.col(j))));
      if (!(norm > 0.0)) throw SolverError("subspace iteration lost rank");
      x.col(j) /= norm;
    }
}

Eigenpairs subspace_pairs(const Restricted& r, int q, double shift, const SpectrumOptions& opts,
                          const Eigen::MatrixXd& warm = {}) {
  const Eigen::Index n = r.h.rows();
  const Eigen::Index block = std::min<Eigen::Index>(n, q + std::max(8, q));

  auto factorize = [&](double s, Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>& factor) {
    Eigen::SparseMatrix<double> shifted = r.h;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= s * r.mass[i];
    factor.compute(shifted);
    return factor.info() == Eigen::Success;
  };
  using Factor = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>;
  auto factor = std::make_unique<Factor>();
  if (!factorize(shift, *factor))
    throw SolverError("shifted second variation is not positive definite; shift-invert factorization failed");

  std::mt19937_64 gen(opts.seed);
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
  if (warm.rows() == n) x.leftCols(std::min(block, warm.cols())) = warm.leftCols(std::min(block, warm.cols()));
  m_orthonormalize(x, r.mass);

  Eigen::VectorXd theta;
  std::vector<double> rel(static_cast<std::size_t>(q), 1.0);
  std::vector<double> abs_res(static_cast<std::size_t>(q), 0.0);
  bool reshifted = false;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    Eigen::MatrixXd y = factor->solve(r.mass.asDiagonal() * x);
    m_orthonormalize(y, r.mass);
    const Eigen::MatrixXd hy = r.h * y;
    const Eigen::MatrixXd t = y.transpose() * hy;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(0.5 * (t + t.transpose()));
    theta = small.eigenvalues();
    x = y * small.eigenvectors();
    const Eigen::MatrixXd hx = hy * small.eigenvectors();

    bool converged = true;
    double worst = 0.0;
    for (int k = 0; k < q; ++k) {
      const Eigen::VectorXd res = hx.col(k) - theta[k] * r.mass.cwiseProduct(x.col(k));
      abs_res[static_cast<std::size_t>(k)] = std::sqrt(res.dot(r.mass.cwiseInverse().cwiseProduct(res)));
      rel[static_cast<std::size_t>(k)] =
          abs_res[static_cast<std::size_t>(k)] / std::max({std::abs(theta[k]), std::abs(shift), 1e-300});
      converged = converged && rel[static_cast<std::size_t>(k)] <= opts.residual_tol;
      worst = std::max(worst, rel[static_cast<std::size_t>(k)]);
    }
    if (converged) return {theta.head(q), x.leftCols(q)};

    // Once the Ritz values settle, move the shift up to just below the lowest one: some
    // eigenvalue lies within the residual of theta_0, and the Cholesky factorization fails if the
    // new shift is not below the whole spectrum, in which case the safe shift is kept.
    if (!reshifted && worst <= 1e-3) {
      reshifted = true;
      const double margin = abs_res[0] + 0.05 * (theta[q - 1] - theta[0]) + 1e-8 * std::abs(shift);
      const double candidate = theta[0] - margin;
      auto closer = std::make_unique<Factor>();
      if (candidate > shift && factorize(candidate, *closer)) {
        factor = std::move(closer);
        shift = candidate;
      }
    }
  }
  std::ostringstream os;
  os << "subspace iteration did not converge in " << opts.max_iters << " iterations; relative residuals:";
  for (double v : rel) os << ' ' << v;
  throw SolverError(os.str());
}

}  // namespace

LowestModes lowest_modes(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXd& mass, int q,
                         const SpectrumOptions& opts, const Eigen::MatrixXd& warm) {
  const auto n = static_cast<int>(mass.size());
  if (h.rows() != n || h.cols() != n) throw ValidationError("matrix and mass sizes differ");
  if (q < 1 || q > n) throw ValidationError("requested mode count out of range");
  Restricted r{h, mass, {}};
  Eigenpairs pairs;
  if (n < opts.dense_threshold) {
    pairs = dense_pairs(r, q);
  } else {
    // Gershgorin lower bound for the spectrum of M^-1/2 H M^-1/2.
    double lower = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
      double center = 0.0, radius = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(h, i); it; ++it) {
        const double scaled = it.value() / std::sqrt(mass[it.row()] * mass[i]);
        if (it.row() == i) center = scaled;
        else radius += std::abs(scaled);
      }
      lower = std::min(lower, center - radius);
      scale = std::max(scale, std::abs(center));
    }
    pairs = subspace_pairs(r, q, lower - 1e-3 * scale - 1e-12, opts, warm);
  }
  return {pairs.values, pairs.vectors};
}

SpectralSummary morse_index(const Field& u, const DiscreteOperators& ops, const Potential& p,
                            const SpectrumOptions& opts, const std::vector<char>& free) {
  if (opts.q < 3) throw ValidationError("morse_index needs q >= 3");
  if (!free.empty() && free.size() != static_cast<std::size_t>(u.size()))
    throw ValidationError("free-vertex mask size does not match the field");
  const Eigen::VectorXd g = gradient(u, ops, p);
  const double residual = residual_norm(g, ops, free);
  if (!(residual <= opts.critical_tol)) {
    std::ostringstream os;
    os << "morse_index requires a critical point; gradient residual " << residual << " exceeds "
       << opts.critical_tol;
    throw ValidationError(os.str());
  }

  const Eigen::SparseMatrix<double> h = hessian(u, ops, p);
  const Restricted r = restrict_to(h, ops.mass, free);
  const auto n = static_cast<int>(r.mass.size());
  if (n == 0) throw ValidationError("no free vertices for the eigenproblem");

  double scale = 0.0;
  double min_curvature = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    scale = std::max(scale, std::abs(r.h.coeff(i, i) / r.mass[i]));
    min_curvature = std::min(min_curvature, p.d2w(u.values[r.to_full[static_cast<std::size_t>(i)]]) / u.epsilon);
  }

  SpectralSummary out;
  out.tol = opts.tol > 0.0 ? opts.tol : 1e-8 * scale;
  out.free_count = n;
  out.dense = n < opts.dense_threshold;
  // lambda_min >= min_i W''(u_i)/eps because K is positive semidefinite.
  const double shift = min_curvature - std::max(0.05 * std::abs(min_curvature), 1e-6 * scale + 1e-12);

  int q = std::min(opts.q, n);
  Eigenpairs pairs;
  while (true) {
    pairs = out.dense ? dense_pairs(r, q) : subspace_pairs(r, q, shift, opts);
    int non_positive = 0;
    for (Eigen::Index k = 0; k < pairs.values.size(); ++k) non_positive += pairs.values[k] <= out.tol;
    if (non_positive < q || q >= n) break;
    q = std::min(2 * q, n);
  }

  for (Eigen::Index k = 0; k < pairs.values.size(); ++k) {
    const double lambda = pairs.values[k];
    out.lowest_eigenvalues.push_back(lambda);
    if (lambda < -out.tol) ++out.index;
    else if (lambda <= out.tol) ++out.nullity;
    const Eigen::VectorXd v = pairs.vectors.col(k);
    const Eigen::VectorXd res = r.h * v - lambda * r.mass.cwiseProduct(v);
    out.residuals.push_back(res.norm() / v.norm());
    Eigen::VectorXd full = Eigen::VectorXd::Zero(u.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) full[r.to_full[static_cast<std::size_t>(i)]] = v[i];
    out.eigenfields.push_back(std::move(full));
  }
  return out;
}

}  // namespace allencahn
