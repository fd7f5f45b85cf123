#include "mmc/femcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmc/errors.hpp"
#include "mmc/simd/kernels.hpp"

namespace mmc {

LumpedMass::LumpedMass(const PeriodicMesh& mesh)
    : weights_(mesh.lumped_weights().begin(), mesh.lumped_weights().end()) {
  for (double w : weights_) total_ += w;
}

double lumped_inner_product(const NodalField& psi, const NodalField& eta) {
  require_same_mesh(psi, eta);
  return simd::weighted_dot(psi.mesh().lumped_weights(), psi.values(), eta.values());
}

double lumped_mass(const NodalField& f) {
  return simd::weighted_sum(f.mesh().lumped_weights(), f.values());
}

double lumped_norm(const NodalField& f) {
  return std::sqrt(simd::weighted_dot(f.mesh().lumped_weights(), f.values(), f.values()));
}

SparseMatrix assemble_stiffness(const PeriodicMesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const double area = mesh.element_area(e);
    for (int a = 0; a < 3; ++a) {
      const Vec2 ga = mesh.basis_gradient(e, a);
      for (int b = 0; b < 3; ++b) {
        const Vec2 gb = mesh.basis_gradient(e, b);
        triplets.emplace_back(nodes[a], nodes[b], area * (ga.x * gb.x + ga.y * gb.y));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  SparseMatrix k(n, n);
  k.setFromTriplets(triplets.begin(), triplets.end());
  k.makeCompressed();
  return k;
}

double element_average(const NodalField& f, std::size_t e) {
  const auto nodes = f.mesh().element_nodes(e);
  return (f[nodes[0]] + f[nodes[1]] + f[nodes[2]]) / 3.0;
}

std::shared_ptr<const Discretization> Discretization::build(MeshPtr mesh) {
  return std::shared_ptr<const Discretization>(new Discretization(std::move(mesh)));
}

Discretization::Discretization(MeshPtr mesh)
    : mesh_(std::move(mesh)), mass_(*mesh_), stiffness_(assemble_stiffness(*mesh_)) {
  for (Eigen::Index r = 0; r < stiffness_.outerSize(); ++r) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(stiffness_, r); it; ++it) row += std::abs(it.value());
    stiffness_norm_inf_ = std::max(stiffness_norm_inf_, row);
  }
  const Eigen::Index n = stiffness_.rows();
  const SparseMatrix grounded = stiffness_.topLeftCorner(n - 1, n - 1);
  grounded_.compute(grounded);
  if (grounded_.info() != Eigen::Success) {
    throw SolverFailure("factorization of the grounded stiffness matrix failed");
  }
}

std::vector<double> Discretization::apply_stiffness(std::span<const double> v) const {
  std::vector<double> out(v.size());
  Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
  Eigen::Map<Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(out.size()));
  y.noalias() = stiffness_ * x;
  return out;
}

MeanZeroField Discretization::discrete_laplacian(const NodalField& v) const {
  if (v.mesh_ptr() != mesh_) throw MeshMismatch("discrete_laplacian: field on a different mesh");
  std::vector<double> kv = apply_stiffness(v.values());
  for (std::size_t j = 0; j < kv.size(); ++j) kv[j] = -kv[j] / mass_[j];
  return MeanZeroField::project(NodalField(mesh_, std::move(kv)));
}

MeanZeroField Discretization::inverse_discrete_laplacian(const MeanZeroField& w) const {
  if (w.field().mesh_ptr() != mesh_) {
    throw MeshMismatch("inverse_discrete_laplacian: field on a different mesh");
  }
  MeanZeroField::checked(w.field());

  const auto n = static_cast<Eigen::Index>(mesh_->num_nodes());
  // Right-hand side M w, deflated so that it is exactly orthogonal to constants.
  Eigen::VectorXd rhs(n);
  for (Eigen::Index j = 0; j < n; ++j) rhs[j] = mass_[j] * w[j];
  // Compensated sum: grounding moves the incompatibility sum(rhs) onto one node.
  rhs.array() -= lumped_mass(w.field()) / static_cast<double>(n);

  // With a compatible right-hand side, grounding the last node and dropping
  // its equation yields a member of the solution affine line; the mean-zero
  // re-projection below then selects the unique deflated solution.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u.head(n - 1) = grounded_.solve(rhs.head(n - 1));

  auto backward_error = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd r = stiffness_ * x - rhs;
    const double scale = stiffness_norm_inf_ * x.lpNorm<Eigen::Infinity>() +
                         rhs.lpNorm<Eigen::Infinity>();
    return scale > 0.0 ? r.lpNorm<Eigen::Infinity>() / scale : 0.0;
  };
  double err = backward_error(u);
  for (int refine = 0; refine < 2 && err > kSolveTolerance; ++refine) {
    const Eigen::VectorXd r = rhs - stiffness_ * u;
    u.head(n - 1) += grounded_.solve(r.head(n - 1));
    err = backward_error(u);
  }
  if (!(err <= kSolveTolerance)) {
    std::ostringstream os;
    os << "inverse Laplacian: backward error " << err << " exceeds " << kSolveTolerance;
    throw SolverFailure(os.str());
  }
  return MeanZeroField::project(
      NodalField(mesh_, std::vector<double>(u.data(), u.data() + u.size())));
}

double Discretization::h_minus1_norm_squared(const MeanZeroField& w,
                                             const MeanZeroField& inverse) const {
  return std::max(0.0, lumped_inner_product(w.field(), inverse.field()));
}

double Discretization::h_minus1_norm(const MeanZeroField& w) const {
  return std::sqrt(h_minus1_norm_squared(w, inverse_discrete_laplacian(w)));
}

}  // namespace mmc
