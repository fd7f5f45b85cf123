#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "mmc/harness/config.hpp"
#include "mmc/stepper.hpp"

namespace mmc::harness {

enum class StudyMode { temporal, spatial };

/// Throws ConfigError for an unknown name.
StudyMode parse_study_mode(const std::string& name);
std::string study_mode_name(StudyMode m);

/// Ladder used when the config does not give one.
std::vector<long> default_ladder(StudyMode m);

/// Cauchy difference between rungs k and k + 1, per component phi1, phi2, phi3.
struct RungError {
  long resolution = 0;  // the coarser rung
  std::array<double, 3> linf{};
  std::array<double, 3> l2{};  // lumped norm on the coarser mesh
};

/// Least-squares line through (ln resolution, ln error).
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Fewer than two points, or an error that is not strictly positive.
  bool degenerate = false;
};

SlopeFit fit_log_slope(std::span<const double> resolution, std::span<const double> error);

struct ConvergenceReport {
  StudyMode mode = StudyMode::temporal;
  std::vector<long> ladder;
  double fixed = 0.0;  // n for temporal studies, tau for spatial studies
  double final_time = 0.0;
  std::vector<RungError> errors;
  std::array<SlopeFit, 3> slope_linf{};
  std::array<SlopeFit, 3> slope_l2{};
};

/// Throws ConfigError unless each n divides the next and the ladder increases.
void require_nested_ladder(std::span<const long> ladder);

/// Values of `fine` at the nodes of `coarse`; exact for nested uniform meshes.
/// Throws ConfigError if the meshes are not nested.
NodalField restrict_to(const NodalField& fine, MeshPtr coarse);

/// Norms of the three component differences a - b on a common mesh.
RungError cauchy_difference(const State& a, const State& b);

/// Runs every rung of the ladder and fits slopes.
///
/// Temporal: n = base.n, T = base.final_time(), rung N_T uses tau = T / N_T.
/// Spatial: tau and n_steps from base, rung n uses an n x n mesh.
/// Throws ConfigError for an invalid ladder and NonConvergence if a rung fails.
ConvergenceReport convergence_study(const RunConfig& base, StudyMode mode);

std::string format_report(const ConvergenceReport& r);
void write_report(const std::string& path, const ConvergenceReport& r);

}  // namespace mmc::harness
