#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <memory>
#include <span>
#include <vector>

#include "mmc/field.hpp"
#include "mmc/mesh.hpp"

namespace mmc {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Diagonal of the lumped mass matrix, m_j = area(D_j) / 3.
class LumpedMass {
 public:
  explicit LumpedMass(const PeriodicMesh& mesh);
  std::span<const double> weights() const noexcept { return weights_; }
  double operator[](std::size_t j) const noexcept { return weights_[j]; }
  double total() const noexcept { return total_; }

 private:
  std::vector<double> weights_;
  double total_ = 0.0;
};

/// (psi, eta)_Q = sum_j m_j psi_j eta_j. Throws MeshMismatch.
double lumped_inner_product(const NodalField& psi, const NodalField& eta);
/// (f, 1)_Q
double lumped_mass(const NodalField& f);
double lumped_norm(const NodalField& f);

/// K_jk = (grad chi_j, grad chi_k)
SparseMatrix assemble_stiffness(const PeriodicMesh& mesh);

/// A(f)|_e: mean of the three vertex values.
double element_average(const NodalField& f, std::size_t e);

/// Operators on the P1 periodic space that need the assembled stiffness and a
/// factorized Laplacian. Immutable once built, so it can be shared read-only.
class Discretization {
 public:
  static std::shared_ptr<const Discretization> build(MeshPtr mesh);

  const PeriodicMesh& mesh() const noexcept { return *mesh_; }
  const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
  const LumpedMass& mass() const noexcept { return mass_; }
  const SparseMatrix& stiffness() const noexcept { return stiffness_; }

  /// K v
  std::vector<double> apply_stiffness(std::span<const double> v) const;

  /// Delta_h v, nodal values -(K v)_j / m_j.
  MeanZeroField discrete_laplacian(const NodalField& v) const;

  /// The mean-zero u with -Delta_h u = w. Throws NonZeroMean if w is not
  /// mean-zero and SolverFailure if the backward error exceeds 1e-12.
  MeanZeroField inverse_discrete_laplacian(const MeanZeroField& w) const;

  /// ||w||_{-1,Q} = sqrt((w, (-Delta_h)^{-1} w)_Q)
  double h_minus1_norm(const MeanZeroField& w) const;
  /// Squared norm, reusing an already computed (-Delta_h)^{-1} w.
  double h_minus1_norm_squared(const MeanZeroField& w, const MeanZeroField& inverse) const;

  static constexpr double kSolveTolerance = 1e-12;

 private:
  explicit Discretization(MeshPtr mesh);

  MeshPtr mesh_;
  LumpedMass mass_;
  SparseMatrix stiffness_;
  double stiffness_norm_inf_ = 0.0;
  // Stiffness with the last node grounded; SPD.
  Eigen::SimplicialLDLT<SparseMatrix> grounded_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

}  // namespace mmc
