#include "allencahn/energy.hpp"

#include <cmath>

#include "allencahn/error.hpp"

namespace allencahn {

void check_compatible(const Field& u, const DiscreteOperators& ops) {
  if (u.mesh_id != ops.mesh_id || u.size() != ops.size())
    throw ValidationError("field on mesh '" + u.mesh_id + "' (" + std::to_string(u.size()) +
                          " values) does not match operators of mesh '" + ops.mesh_id + "' (" +
                          std::to_string(ops.size()) + " vertices)");
  if (!(u.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
}

Field constant_field(const SurfaceMesh& mesh, double value, double epsilon) {
  return {Eigen::VectorXd::Constant(mesh.size(), value), epsilon, mesh.id};
}

double energy(const Field& u, const DiscreteOperators& ops, const Potential& p) {
  check_compatible(u, ops);
  const double eps = u.epsilon;
  const double dirichlet = u.values.dot(ops.stiffness * u.values);
  double potential = 0.0;
  for (Eigen::Index i = 0; i < u.values.size(); ++i) potential += ops.mass[i] * p.w(u.values[i]);
  return 0.5 * eps * dirichlet + potential / eps;
}

Eigen::VectorXd gradient(const Field& u, const DiscreteOperators& ops, const Potential& p) {
  check_compatible(u, ops);
  const double eps = u.epsilon;
  Eigen::VectorXd g = eps * (ops.stiffness * u.values);
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += ops.mass[i] * p.dw(u.values[i]) / eps;
  return g;
}

Eigen::SparseMatrix<double> hessian(const Field& u, const DiscreteOperators& ops, const Potential& p) {
  check_compatible(u, ops);
  const double eps = u.epsilon;
  Eigen::SparseMatrix<double> h = eps * ops.stiffness;
  Eigen::SparseMatrix<double> diag(h.rows(), h.cols());
  diag.reserve(Eigen::VectorXi::Constant(h.cols(), 1));
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    diag.insert(i, i) = ops.mass[i] * p.d2w(u.values[i]) / eps;
  h += diag;
  h.makeCompressed();
  return h;
}

Eigen::VectorXd gradient_density(const SurfaceMesh& mesh, const DiscreteOperators& ops,
                                 const Eigen::VectorXd& u) {
  const auto geometry = triangle_geometry(mesh);
  Eigen::VectorXd density = Eigen::VectorXd::Zero(mesh.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < 3; ++k) g += u[tri[k]] * geometry[t].basis_gradient[k];
    const double share = geometry[t].area / 3.0 * g.squaredNorm();
    for (int v : tri) density[v] += share;
  }
  return density.cwiseQuotient(ops.mass);
}

std::vector<Eigen::Vector3d> recovered_gradient(const SurfaceMesh& mesh, const Eigen::VectorXd& u) {
  const auto geometry = triangle_geometry(mesh);
  std::vector<Eigen::Vector3d> grad(mesh.vertices.size(), Eigen::Vector3d::Zero());
  std::vector<double> weight(mesh.vertices.size(), 0.0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < 3; ++k) g += u[tri[k]] * geometry[t].basis_gradient[k];
    for (int v : tri) {
      grad[static_cast<std::size_t>(v)] += geometry[t].area * g;
      weight[static_cast<std::size_t>(v)] += geometry[t].area;
    }
  }
  for (std::size_t v = 0; v < grad.size(); ++v)
    if (weight[v] > 0.0) grad[v] /= weight[v];
  return grad;
}

double residual_norm(const Eigen::VectorXd& covector, const DiscreteOperators& ops,
                     const std::vector<char>& free) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < covector.size(); ++i) {
    if (!free.empty() && !free[static_cast<std::size_t>(i)]) continue;
    sum += covector[i] * covector[i] / ops.mass[i];
  }
  return std::sqrt(sum);
}

DiscrepancyField discrepancy_xi(const Field& u, const SurfaceMesh& mesh, const DiscreteOperators& ops,
                                const Potential& p) {
  check_compatible(u, ops);
  if (mesh.id != ops.mesh_id) throw ValidationError("mesh '" + mesh.id + "' does not match operators");
  const double eps = u.epsilon;
  const Eigen::VectorXd density = gradient_density(mesh, ops, u.values);
  DiscrepancyField out;
  out.xi_values.resize(u.size());
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    const double xi = 0.5 * eps * density[i] - p.w(u.values[i]) / eps;
    out.xi_values[i] = xi;
    out.l1_norm += ops.mass[i] * std::abs(xi);
    out.integral += ops.mass[i] * xi;
  }
  return out;
}

}  // namespace allencahn
