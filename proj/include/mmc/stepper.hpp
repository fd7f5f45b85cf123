#pragma once

#include <array>
#include <optional>

#include "mmc/energy.hpp"
#include "mmc/femcore.hpp"
#include "mmc/linear_solver.hpp"

namespace mmc {

struct StepConfig {
  double tau = 0.01;
  double newton_tol = 1e-10;
  int max_newton_iters = 100;
  double boundary_fraction = 0.05;
  double linear_tol = 1e-12;
  LinearMethod linear_method = LinearMethod::automatic;

  /// Throws ConfigError.
  void validate() const;
};

struct StepReport {
  std::array<double, 3> mass{};  // (phi_i, 1)_Q for phi1, phi2, phi3
  std::array<double, 3> min{};
  std::array<double, 3> max{};
  EnergyBreakdown energy;
  int newton_iters = 0;
  double final_residual = 0.0;
  double tau_used = 0.0;
};

/// Diagnostics of a state; newton fields left at zero.
StepReport describe_state(const State& state, const Parameters& p);

struct StepResult {
  State state;
  StepReport report;
};

/// J(trial) = sum_i ||phi_i - phi_i^n||_{-1,Q}^2 / (2 D_i tau) + (S, 1)_Q + (K~, 1)
///          + sum_i (dH/dphi_i(old), phi_i)_Q.
/// Throws NonZeroMean if the trial masses differ from the previous ones.
double objective(const Discretization& disc, const State& trial, const State& prev,
                 const Parameters& p, double tau);

/// Mean-zero gradient of the objective in the lumped metric:
/// (-Delta_h)^{-1}(phi_i - phi_i^n) / (D_i tau) + mu_i, projected to mean zero.
/// It vanishes exactly at the solution of the mass-lumped convex-splitting scheme.
std::array<MeanZeroField, 2> scheme_residual(const Discretization& disc, const State& trial,
                                             const State& prev, const Parameters& p,
                                             double tau);

/// Nodal chemical potentials mu_i = dS/dphi_i(new) + (delta K~)_j / m_j + dH/dphi_i(old).
std::array<NodalField, 2> recover_chemical_potentials(const State& next, const State& prev,
                                                      const Parameters& p);

/// Advances a state by one step of the mass-lumped convex-splitting scheme.
///
/// The step is the unique minimizer of the objective over the mass-preserving
/// interior of the Gibbs triangle. It is computed by damped Newton iteration
/// on the stacked unknowns with a fraction-to-boundary rule and Armijo
/// backtracking on the objective.
class Stepper {
 public:
  Stepper(DiscretizationPtr disc, Parameters params, StepConfig config);

  /// Throws InvalidPreviousState or NonConvergence.
  StepResult step(const State& prev);
  /// Same, starting Newton from `guess` (must be interior and mass-matched).
  StepResult step(const State& prev, const State& guess);

  const StepConfig& config() const noexcept { return config_; }
  void set_tau(double tau);
  const Parameters& parameters() const noexcept { return params_; }
  const Discretization& discretization() const noexcept { return *disc_; }

 private:
  DiscretizationPtr disc_;
  Parameters params_;
  StepConfig config_;
  ConvexHessian hessian_;
  NewtonLinearSolver linear_;
  // Refills system_ = M / tau + coupling_ * b in place.
  const SparseMatrix& assemble_system(const SparseMatrix& b, double tau);

  SparseMatrix coupling_;  // D K M^{-1} on the stacked unknowns
  SparseMatrix system_;    // pattern of M / tau + coupling_ * B, fixed per mesh
  std::vector<int> slot_;  // row -> value index within the current column, -1 elsewhere
};

}  // namespace mmc
