#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <memory>

#include "mmc/femcore.hpp"

namespace mmc {

enum class LinearMethod { automatic, direct, iterative };

struct LinearSolveStats {
  LinearMethod method_used = LinearMethod::direct;
  int iterations = 0;
  double relative_residual = 0.0;
  bool preconditioner_rebuilt = false;
};

/// Solves the (nonsymmetric) Newton systems of the stepper.
///
/// The direct path is a sparse LU whose symbolic analysis is reused while the
/// sparsity pattern stays the same. The iterative path is BiCGSTAB with an
/// ILUT preconditioner. The preconditioner is kept across calls because
/// consecutive Newton matrices differ little. A stale preconditioner gets
/// kRebuildIterations iterations; if that fails it is rebuilt and gets
/// kMaxIterations. A failure with a fresh preconditioner falls back to the
/// direct path. `automatic` picks direct up to `direct_limit` unknowns.
class NewtonLinearSolver {
 public:
  explicit NewtonLinearSolver(LinearMethod method = LinearMethod::automatic,
                              double tolerance = 1e-12, Eigen::Index direct_limit = 512);

  /// Throws SolverFailure if the direct factorization fails or yields non-finite values.
  Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b);
  const LinearSolveStats& last_stats() const noexcept { return stats_; }

  static constexpr int kRebuildIterations = 40;
  static constexpr int kMaxIterations = 500;

 private:
  bool try_iterative(const SparseMatrix& a, const Eigen::VectorXd& b, bool fresh,
                     Eigen::VectorXd& x);
  Eigen::VectorXd solve_direct(const SparseMatrix& a, const Eigen::VectorXd& b);

  LinearMethod method_;
  double tolerance_;
  Eigen::Index direct_limit_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::Index analyzed_nnz_ = -1;
  Eigen::Index analyzed_rows_ = -1;
  std::unique_ptr<Eigen::IncompleteLUT<double>> ilu_;
  Eigen::Index ilu_rows_ = -1;
  LinearSolveStats stats_;
};

}  // namespace mmc
