#include "mmc/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmc/errors.hpp"

namespace mmc {

void StepConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("step config: " + what); };
  if (!(tau > 0.0) || !std::isfinite(tau)) fail("tau must be positive");
  if (!(newton_tol > 0.0)) fail("newton_tol must be positive");
  if (!(linear_tol > 0.0)) fail("linear_tol must be positive");
  if (max_newton_iters < 1) fail("max_newton_iters must be at least 1");
  if (!(boundary_fraction > 0.0 && boundary_fraction < 1.0)) {
    fail("boundary_fraction must lie in (0, 1)");
  }
}

StepReport describe_state(const State& state, const Parameters& p) {
  StepReport r;
  const NodalField phi3 = state.phi3();
  const NodalField* fields[3] = {&state.phi1, &state.phi2, &phi3};
  for (int i = 0; i < 3; ++i) {
    r.mass[i] = lumped_mass(*fields[i]);
    r.min[i] = fields[i]->min();
    r.max[i] = fields[i]->max();
  }
  r.energy = discrete_energy(state, p);
  return r;
}

namespace {

// Maximum relative mass mismatch accepted between a trial and the previous state.
constexpr double kMassTolerance = 1e-11;

std::array<NodalField, 2> explicit_enthalpy_drift(const State& prev, const Parameters& p) {
  std::array<NodalField, 2> out{NodalField(prev.phi1.mesh_ptr()),
                                NodalField(prev.phi1.mesh_ptr())};
  for (std::size_t j = 0; j < prev.phi1.size(); ++j) {
    out[0][j] = dH_dphi(1, prev.phi1[j], prev.phi2[j], p);
    out[1][j] = dH_dphi(2, prev.phi1[j], prev.phi2[j], p);
  }
  return out;
}

std::array<NodalField, 2> chemical_potentials(const NodalField& phi1, const NodalField& phi2,
                                              const std::array<NodalField, 2>& drift,
                                              const Parameters& p) {
  auto mu = assemble_dK_residuals(phi1, phi2, p);
  const auto w = phi1.mesh().lumped_weights();
  for (std::size_t j = 0; j < w.size(); ++j) {
    for (int i = 0; i < 2; ++i) {
      mu[i][j] = dS_dphi(i + 1, phi1[j], phi2[j], p) + mu[i][j] / w[j] + drift[i][j];
    }
  }
  return mu;
}

MeanZeroField increment(const NodalField& trial, const NodalField& prev, int component) {
  require_same_mesh(trial, prev);
  const double m_trial = lumped_mass(trial);
  const double m_prev = lumped_mass(prev);
  if (std::abs(m_trial - m_prev) > kMassTolerance * std::max(std::abs(m_prev), 1e-300)) {
    std::ostringstream os;
    os.precision(17);
    os << "mass of phi" << component << " changed from " << m_prev << " to " << m_trial;
    throw NonZeroMean(os.str());
  }
  return MeanZeroField::project(trial - prev);
}

// Objective value and residual of the scheme at one iterate.
struct Evaluation {
  double objective = 0.0;
  std::array<MeanZeroField, 2> residual;
  double residual_norm = 0.0;
};

Evaluation evaluate(const Discretization& disc, const NodalField& phi1, const NodalField& phi2,
                    const State& prev, const std::array<NodalField, 2>& drift,
                    const Parameters& p, double tau, bool with_residual) {
  if (phi1.mesh_ptr() != disc.mesh_ptr()) throw MeshMismatch("stepper: state on another mesh");
  const NodalField* phi[2] = {&phi1, &phi2};
  const NodalField* old[2] = {&prev.phi1, &prev.phi2};

  Evaluation ev;
  const auto w = disc.mesh().lumped_weights();
  double entropy = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) entropy += w[j] * entropy_density(phi1[j], phi2[j], p);
  ev.objective = entropy + gradient_energy(phi1, phi2, p);

  std::array<MeanZeroField, 2> inverse;
  for (int i = 0; i < 2; ++i) {
    const MeanZeroField delta = increment(*phi[i], *old[i], i + 1);
    inverse[i] = disc.inverse_discrete_laplacian(delta);
    const double scale = 1.0 / (p.D(i + 1) * tau);
    ev.objective += 0.5 * scale * disc.h_minus1_norm_squared(delta, inverse[i]);
    ev.objective += lumped_inner_product(drift[i], *phi[i]);
  }
  if (!with_residual) return ev;

  auto mu = chemical_potentials(phi1, phi2, drift, p);
  for (int i = 0; i < 2; ++i) {
    mu[i].add_scaled(1.0 / (p.D(i + 1) * tau), inverse[i].field());
    ev.residual[i] = MeanZeroField::project(std::move(mu[i]));
    ev.residual_norm = std::max(ev.residual_norm, lumped_norm(ev.residual[i].field()));
  }
  return ev;
}

void require_interior_state(const State& s, const char* what) {
  require_same_mesh(s.phi1, s.phi2);
  if (!s.is_interior()) {
    throw InvalidPreviousState(std::string(what) + " is not strictly inside the Gibbs triangle");
  }
}

}  // namespace

double objective(const Discretization& disc, const State& trial, const State& prev,
                 const Parameters& p, double tau) {
  const auto drift = explicit_enthalpy_drift(prev, p);
  return evaluate(disc, trial.phi1, trial.phi2, prev, drift, p, tau, false).objective;
}

std::array<MeanZeroField, 2> scheme_residual(const Discretization& disc, const State& trial,
                                             const State& prev, const Parameters& p,
                                             double tau) {
  const auto drift = explicit_enthalpy_drift(prev, p);
  return std::move(evaluate(disc, trial.phi1, trial.phi2, prev, drift, p, tau, true).residual);
}

std::array<NodalField, 2> recover_chemical_potentials(const State& next, const State& prev,
                                                      const Parameters& p) {
  require_same_mesh(next.phi1, prev.phi1);
  return chemical_potentials(next.phi1, next.phi2, explicit_enthalpy_drift(prev, p), p);
}

Stepper::Stepper(DiscretizationPtr disc, Parameters params, StepConfig config)
    : disc_(std::move(disc)),
      params_(params),
      config_(config),
      hessian_(disc_->mesh_ptr()),
      linear_(config.linear_method, config.linear_tol) {
  config_.validate();
  const SparseMatrix& k = disc_->stiffness();
  const auto w = disc_->mesh().lumped_weights();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * k.nonZeros());
  for (Eigen::Index col = 0; col < k.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(k, col); it; ++it) {
      for (int c = 0; c < 2; ++c) {
        triplets.emplace_back(2 * it.row() + c, 2 * col + c,
                              params_.D(c + 1) * it.value() / w[col]);
      }
    }
  }
  coupling_.resize(2 * k.rows(), 2 * k.cols());
  coupling_.setFromTriplets(triplets.begin(), triplets.end());
  coupling_.makeCompressed();

  // Symbolic product: column j of coupling_ * B touches the rows of coupling_
  // columns k for every structural entry B_kj; the diagonal is always present.
  const SparseMatrix& b = hessian_.matrix();
  const Eigen::Index n = coupling_.rows();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Triplet<double>> pattern;
  for (Eigen::Index j = 0; j < n; ++j) {
    rows.assign(1, j);
    seen[j] = 1;
    for (SparseMatrix::InnerIterator bk(b, j); bk; ++bk) {
      for (SparseMatrix::InnerIterator ci(coupling_, bk.row()); ci; ++ci) {
        if (!seen[ci.row()]) {
          seen[ci.row()] = 1;
          rows.push_back(ci.row());
        }
      }
    }
    for (Eigen::Index r : rows) {
      seen[r] = 0;
      pattern.emplace_back(r, j, 0.0);
    }
  }
  system_.resize(n, n);
  system_.setFromTriplets(pattern.begin(), pattern.end());
  system_.makeCompressed();
  slot_.assign(static_cast<std::size_t>(n), -1);
}

const SparseMatrix& Stepper::assemble_system(const SparseMatrix& b, double tau) {
  const auto w = disc_->mesh().lumped_weights();
  const int* outer = system_.outerIndexPtr();
  const int* inner = system_.innerIndexPtr();
  double* values = system_.valuePtr();
  for (Eigen::Index j = 0; j < system_.outerSize(); ++j) {
    for (int s = outer[j]; s < outer[j + 1]; ++s) {
      slot_[inner[s]] = s;
      values[s] = 0.0;
    }
    values[slot_[j]] += w[j / 2] / tau;
    for (SparseMatrix::InnerIterator bk(b, j); bk; ++bk) {
      const double bkj = bk.value();
      for (SparseMatrix::InnerIterator ci(coupling_, bk.row()); ci; ++ci) {
        values[slot_[ci.row()]] += ci.value() * bkj;
      }
    }
    for (int s = outer[j]; s < outer[j + 1]; ++s) slot_[inner[s]] = -1;
  }
  return system_;
}

void Stepper::set_tau(double tau) {
  StepConfig c = config_;
  c.tau = tau;
  c.validate();
  config_ = c;
}

StepResult Stepper::step(const State& prev) { return step(prev, prev); }

StepResult Stepper::step(const State& prev, const State& guess) {
  require_interior_state(prev, "previous state");
  require_interior_state(guess, "initial guess");
  if (prev.phi1.mesh_ptr() != disc_->mesh_ptr() || guess.phi1.mesh_ptr() != disc_->mesh_ptr()) {
    throw MeshMismatch("stepper: state on a different mesh");
  }
  const double tau = config_.tau;
  const double theta = config_.boundary_fraction;
  const auto drift = explicit_enthalpy_drift(prev, params_);
  const auto w = disc_->mesh().lumped_weights();
  const std::size_t nn = w.size();

  NodalField phi1 = guess.phi1;
  NodalField phi2 = guess.phi2;
  Evaluation cur = evaluate(*disc_, phi1, phi2, prev, drift, params_, tau, true);

  int iter = 0;
  while (cur.residual_norm > config_.newton_tol) {
    if (iter == config_.max_newton_iters) {
      std::ostringstream os;
      os << "Newton did not converge in " << iter << " iterations (residual "
         << cur.residual_norm << ", tolerance " << config_.newton_tol << ")";
      throw NonConvergence(os.str(), prev.step + 1);
    }
    ++iter;

    // Newton system (M / tau + D K M^{-1} B) delta = -D K r, where B is the
    // Hessian of the convex energy part.
    const SparseMatrix& a = assemble_system(hessian_.assemble(phi1, phi2, params_), tau);
    Eigen::VectorXd rhs(2 * static_cast<Eigen::Index>(nn));
    for (int c = 0; c < 2; ++c) {
      const auto kr = disc_->apply_stiffness(cur.residual[c].values());
      for (std::size_t j = 0; j < nn; ++j) rhs[2 * j + c] = -params_.D(c + 1) * kr[j];
    }
    const Eigen::VectorXd x = linear_.solve(a, rhs);

    std::vector<double> d1(nn), d2(nn);
    for (std::size_t j = 0; j < nn; ++j) {
      d1[j] = x[2 * j];
      d2[j] = x[2 * j + 1];
    }
    const MeanZeroField delta1 = MeanZeroField::project(NodalField(disc_->mesh_ptr(), d1));
    const MeanZeroField delta2 = MeanZeroField::project(NodalField(disc_->mesh_ptr(), d2));

    // Fraction-to-boundary: every barrier distance keeps at least theta of its value.
    double step_max = 1.0;
    for (std::size_t j = 0; j < nn; ++j) {
      const double v[3] = {phi1[j], phi2[j], 1.0 - phi1[j] - phi2[j]};
      const double dv[3] = {delta1[j], delta2[j], -delta1[j] - delta2[j]};
      for (int l = 0; l < 3; ++l) {
        if (dv[l] < 0.0) step_max = std::min(step_max, (1.0 - theta) * v[l] / -dv[l]);
      }
    }

    const double slope = lumped_inner_product(cur.residual[0].field(), delta1.field()) +
                         lumped_inner_product(cur.residual[1].field(), delta2.field());
    const double noise = 1e-13 * (1.0 + std::abs(cur.objective));
    double s = step_max;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving, s *= 0.5) {
      NodalField t1 = phi1;
      NodalField t2 = phi2;
      t1.add_scaled(s, delta1.field());
      t2.add_scaled(s, delta2.field());
      const State trial{t1, t2, prev.time, prev.step};
      if (!trial.is_interior()) continue;
      Evaluation next = evaluate(*disc_, t1, t2, prev, drift, params_, tau, true);
      if (next.objective <= cur.objective + 1e-4 * s * slope + noise) {
        phi1 = std::move(t1);
        phi2 = std::move(t2);
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "Newton line search stagnated at iteration " << iter << " (residual "
         << cur.residual_norm << ")";
      throw NonConvergence(os.str(), prev.step + 1);
    }
  }

  StepResult out{State{std::move(phi1), std::move(phi2), prev.time + tau, prev.step + 1}, {}};
  out.report = describe_state(out.state, params_);
  out.report.newton_iters = iter;
  out.report.final_residual = cur.residual_norm;
  out.report.tau_used = tau;
  return out;
}

}  // namespace mmc
