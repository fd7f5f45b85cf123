#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "mmc/harness/config.hpp"
#include "mmc/stepper.hpp"

namespace mmc::harness {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitConfigError = 2,
  kExitNonConvergence = 3,
  kExitInvariantViolation = 4,
};

struct SeriesRow {
  long step = 0;
  double t = 0.0;
  StepReport report;
};

/// Re-checks every state of a run independently of the stepper: masses within
/// kMassTolerance (relative) of the initial ones, all three phases strictly
/// inside (0, 1), and energy non-increasing up to kEnergySlack * |E|.
class InvariantMonitor {
 public:
  static constexpr double kMassTolerance = 1e-10;
  static constexpr double kEnergySlack = 1e-12;

  InvariantMonitor(const State& initial, double initial_energy);
  /// Empty if all invariants hold, otherwise a description of the first violation.
  std::string check(const State& s, double energy);

  const std::array<double, 3>& initial_mass() const noexcept { return mass0_; }
  double max_relative_mass_drift() const noexcept { return max_drift_; }

 private:
  std::array<double, 3> mass0_{};
  double last_energy_;
  double max_drift_ = 0.0;
};

struct RunHooks {
  /// Called for every diagnostic row, after the invariant check.
  std::function<void(const SeriesRow&)> on_row;
  bool keep_rows = true;
};

struct RunOutcome {
  int exit_code = kExitSuccess;
  std::string message;
  long steps_taken = 0;
  State final_state;
  std::vector<SeriesRow> rows;
  double max_relative_mass_drift = 0.0;
  std::vector<std::string> files;
};

/// Runs a configuration to its final time. Writes series.csv and snapshot
/// files into cfg.out_dir unless it is empty. Config errors, NonConvergence,
/// solver failures and invariant violations are reported through exit_code;
/// other errors propagate.
RunOutcome run(const RunConfig& cfg, const RunHooks& hooks = {});

/// Step index whose time is closest to t.
long step_for_time(double t, double tau);

}  // namespace mmc::harness
