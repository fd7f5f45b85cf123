#include "mmc/harness/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "mmc/errors.hpp"
#include "mmc/harness/io.hpp"
#include "mmc/harness/presets.hpp"

namespace mmc::harness {

namespace {

std::array<double, 3> masses(const State& s) {
  return {lumped_mass(s.phi1), lumped_mass(s.phi2), lumped_mass(s.phi3())};
}

std::vector<std::string> series_comments(const RunConfig& c) {
  std::vector<std::string> out;
  std::string ic = "preset=" + std::string(preset_name(c.initial.preset));
  if (c.initial.preset == Preset::ex63) {
    ic += " rng=" + std::string(kRandomAlgorithm) + " seed=" + std::to_string(*c.initial.seed);
  }
  out.push_back(ic);
  out.push_back("L=" + format_real(c.L) + " n=" + std::to_string(c.n) +
                " tau=" + format_real(c.tau) + " n_steps=" + std::to_string(c.n_steps));
  const auto& k = c.constants;
  out.push_back("D1=" + format_real(k.D1) + " D2=" + format_real(k.D2) +
                " chi12=" + format_real(k.chi12) + " chi13=" + format_real(k.chi13) +
                " chi23=" + format_real(k.chi23) + " gamma=" + format_real(k.gamma) +
                " Ncoef=" + format_real(k.N) + " a1=" + format_real(k.a1) +
                " a2=" + format_real(k.a2) + " a3=" + format_real(k.a3));
  return out;
}

// Linear extrapolation of the last two states, used only as a Newton start.
std::optional<State> extrapolate(const State& cur, const State& prev) {
  State guess{2.0 * cur.phi1 - prev.phi1, 2.0 * cur.phi2 - prev.phi2, cur.time, cur.step};
  if (!guess.is_interior()) return std::nullopt;
  return guess;
}

}  // namespace

long step_for_time(double t, double tau) { return std::lround(t / tau); }

InvariantMonitor::InvariantMonitor(const State& initial, double initial_energy)
    : mass0_(masses(initial)), last_energy_(initial_energy) {}

std::string InvariantMonitor::check(const State& s, double energy) {
  std::ostringstream os;
  os.precision(17);
  const auto m = masses(s);
  const NodalField phi3 = s.phi3();
  const NodalField* fields[3] = {&s.phi1, &s.phi2, &phi3};
  for (int i = 0; i < 3; ++i) {
    const double drift = std::abs(m[i] - mass0_[i]) / std::abs(mass0_[i]);
    max_drift_ = std::max(max_drift_, drift);
    if (!(drift <= kMassTolerance)) {
      os << "mass of phi" << i + 1 << " drifted by " << drift << " (relative)";
      return os.str();
    }
    if (!(fields[i]->min() > 0.0) || !(fields[i]->max() < 1.0)) {
      os << "phi" << i + 1 << " left (0, 1): min " << fields[i]->min() << ", max "
         << fields[i]->max();
      return os.str();
    }
  }
  if (!(energy <= last_energy_ + kEnergySlack * std::abs(last_energy_))) {
    os << "energy increased from " << last_energy_ << " to " << energy;
    return os.str();
  }
  last_energy_ = energy;
  return {};
}

RunOutcome run(const RunConfig& cfg, const RunHooks& hooks) {
  RunOutcome out;
  std::optional<Parameters> params;
  std::optional<State> state;
  try {
    cfg.validate();
    params.emplace(cfg.constants);
    state.emplace(initial_state(cfg.initial, PeriodicMesh::build_uniform(cfg.L, cfg.n)));
  } catch (const ConfigError& e) {
    out.exit_code = kExitConfigError;
    out.message = e.what();
    return out;
  }

  const auto disc = Discretization::build(state->phi1.mesh_ptr());
  StepConfig sc;
  sc.tau = cfg.tau;
  sc.newton_tol = cfg.newton_tol;
  sc.max_newton_iters = cfg.max_newton_iters;
  Stepper stepper(disc, *params, sc);

  std::set<long> snapshot_steps;
  for (double t : cfg.snapshot_times) snapshot_steps.insert(step_for_time(t, cfg.tau));

  std::unique_ptr<SeriesWriter> series;
  const bool write = !cfg.out_dir.empty();
  if (write) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = (std::filesystem::path(cfg.out_dir) / "series.csv").string();
    series = std::make_unique<SeriesWriter>(path, series_comments(cfg));
    out.files.push_back(path);
  }

  auto emit = [&](const State& s, const StepReport& r) {
    const SeriesRow row{s.step, s.time, r};
    if (series) series->write(row.step, row.t, row.report);
    if (hooks.on_row) hooks.on_row(row);
    if (hooks.keep_rows) out.rows.push_back(row);
  };
  auto snapshot = [&](const State& s) {
    if (!write || !snapshot_steps.count(s.step)) return;
    for (const char* name : {"phi1", "phi2"}) {
      const NodalField& f = std::string_view(name) == "phi1" ? s.phi1 : s.phi2;
      const std::string path =
          (std::filesystem::path(cfg.out_dir) /
           ("snapshot_" + std::to_string(s.step) + "_" + name + ".csv"))
              .string();
      write_snapshot(path, make_snapshot(f, s.time, name));
      out.files.push_back(path);
    }
  };

  const StepReport initial = describe_state(*state, *params);
  InvariantMonitor monitor(*state, initial.energy.total);
  emit(*state, initial);
  snapshot(*state);

  std::optional<State> previous;
  for (long k = 1; k <= cfg.n_steps; ++k) {
    StepResult result;
    try {
      std::optional<State> guess;
      if (previous) guess = extrapolate(*state, *previous);
      if (guess) {
        try {
          result = stepper.step(*state, *guess);
        } catch (const NonConvergence&) {
          result = stepper.step(*state);
        }
      } else {
        result = stepper.step(*state);
      }
    } catch (const NonConvergence& e) {
      out.exit_code = kExitNonConvergence;
      out.message = "step " + std::to_string(e.step_index()) + ": " + e.what();
      break;
    } catch (const SolverFailure& e) {
      out.exit_code = kExitNonConvergence;
      out.message = "step " + std::to_string(k) + ": " + e.what();
      break;
    }
    result.state.step = k;
    result.state.time = static_cast<double>(k) * cfg.tau;
    previous = std::move(*state);
    state = std::move(result.state);
    out.steps_taken = k;

    const std::string violation = monitor.check(*state, result.report.energy.total);
    if (!violation.empty() || k % cfg.diag_every == 0 || k == cfg.n_steps) emit(*state, result.report);
    snapshot(*state);
    if (!violation.empty()) {
      out.exit_code = kExitInvariantViolation;
      out.message = "step " + std::to_string(k) + ": " + violation;
      break;
    }
  }
  if (series) series->flush();
  out.max_relative_mass_drift = monitor.max_relative_mass_drift();
  out.final_state = std::move(*state);
  return out;
}

}  // namespace mmc::harness
