#include "mmc/linear_solver.hpp"

#include <cmath>

#include "mmc/errors.hpp"

namespace mmc {

namespace {

// Adapter that lets BiCGSTAB use an ILUT factorization owned elsewhere; its
// compute() is a no-op so the factorization survives across matrices.
class SharedPreconditioner {
 public:
  SharedPreconditioner() = default;
  template <typename M>
  explicit SharedPreconditioner(const M&) {}
  template <typename M>
  SharedPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  SharedPreconditioner& factorize(const M&) { return *this; }
  template <typename M>
  SharedPreconditioner& compute(const M&) { return *this; }
  template <typename Rhs>
  Eigen::VectorXd solve(const Rhs& b) const { return ilu->solve(b); }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

  const Eigen::IncompleteLUT<double>* ilu = nullptr;
};

}  // namespace

NewtonLinearSolver::NewtonLinearSolver(LinearMethod method, double tolerance,
                                       Eigen::Index direct_limit)
    : method_(method), tolerance_(tolerance), direct_limit_(direct_limit) {}

Eigen::VectorXd NewtonLinearSolver::solve(const SparseMatrix& a, const Eigen::VectorXd& b) {
  const bool iterative = method_ == LinearMethod::iterative ||
                         (method_ == LinearMethod::automatic && a.rows() > direct_limit_);
  if (iterative) {
    Eigen::VectorXd x;
    const bool stale = ilu_ && ilu_rows_ == a.rows();
    if (stale && try_iterative(a, b, false, x)) return x;
    if (try_iterative(a, b, true, x)) return x;
  }
  return solve_direct(a, b);
}

bool NewtonLinearSolver::try_iterative(const SparseMatrix& a, const Eigen::VectorXd& b,
                                       bool fresh, Eigen::VectorXd& x) {
  if (fresh) {
    ilu_ = std::make_unique<Eigen::IncompleteLUT<double>>();
    ilu_->setDroptol(1e-4);
    ilu_->setFillfactor(4);
    ilu_->compute(a);
    ilu_rows_ = a.rows();
    if (ilu_->info() != Eigen::Success) {
      ilu_.reset();
      return false;
    }
  }
  Eigen::BiCGSTAB<SparseMatrix, SharedPreconditioner> krylov;
  krylov.preconditioner().ilu = ilu_.get();
  krylov.setTolerance(tolerance_);
  krylov.setMaxIterations(fresh ? kMaxIterations : kRebuildIterations);
  krylov.compute(a);
  x = krylov.solve(b);
  if (krylov.info() != Eigen::Success || !x.allFinite()) return false;
  stats_ = {LinearMethod::iterative, static_cast<int>(krylov.iterations()), krylov.error(),
            fresh};
  return true;
}

Eigen::VectorXd NewtonLinearSolver::solve_direct(const SparseMatrix& a, const Eigen::VectorXd& b) {
  if (a.nonZeros() != analyzed_nnz_ || a.rows() != analyzed_rows_) {
    lu_.analyzePattern(a);
    analyzed_nnz_ = a.nonZeros();
    analyzed_rows_ = a.rows();
  }
  lu_.factorize(a);
  if (lu_.info() != Eigen::Success) {
    throw SolverFailure("sparse LU factorization failed: " + lu_.lastErrorMessage());
  }
  Eigen::VectorXd x = lu_.solve(b);
  const double bnorm = b.norm();
  double rel = bnorm > 0.0 ? (a * x - b).norm() / bnorm : 0.0;
  // One step of iterative refinement is usually enough to recover the last digits.
  if (rel > tolerance_) {
    x += lu_.solve(b - a * x);
    rel = bnorm > 0.0 ? (a * x - b).norm() / bnorm : 0.0;
  }
  stats_ = {LinearMethod::direct, 1, rel, false};
  if (!std::isfinite(rel)) throw SolverFailure("sparse LU produced a non-finite solution");
  return x;
}

}  // namespace mmc
