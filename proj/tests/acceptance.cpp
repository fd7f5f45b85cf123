// Acceptance checks: one [PASS]/[FAIL] line per criterion, exit status 1 if any fails.
//
//   acceptance [--only 1,4] [--full] [--out DIR]
//
// --full runs the temporal study at n=256 and the large pattern runs to their
// complete horizons (hours). --out keeps series and snapshots of the pattern runs.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mmc/errors.hpp"
#include "mmc/harness/convergence.hpp"
#include "mmc/harness/io.hpp"
#include "mmc/harness/presets.hpp"
#include "mmc/harness/run.hpp"
#include "mmc/stepper.hpp"
#include "support/oracles.hpp"

namespace {

using namespace mmc;
using namespace mmc::harness;

// Pinned tolerances.
constexpr double kTemporalSlope = -1.0, kTemporalSlopeTol = 0.15;
constexpr double kSpatialSlope = -2.0, kSpatialSlopeTol = 0.2;
constexpr double kSpatialTau = 7.8125e-6;
constexpr long kSpatialSteps = 256;
constexpr double kEnergySlack = 1e-12;
constexpr double kMassDrift = 1e-10;
constexpr double kFiniteDifferenceTol = 1e-5;
constexpr double kInnerProductTol = 1e-13;
constexpr double kConcavityMargin = 6.24;
constexpr double kUniquenessTol = 1e-9;
constexpr std::uint64_t kPositivitySeed = 20240607;
constexpr std::uint64_t kPatternSeed = 1;
constexpr double kReducedPatternHorizon = 10.0;

struct Options {
  bool full = false;
  std::string out;
};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Verdict slopes_within(const ConvergenceReport& rep, double target, double tol) {
  Verdict v{true, "L2 slopes"};
  for (const SlopeFit& f : rep.slope_l2) {
    v.detail += " " + (f.degenerate ? std::string("degenerate") : fmt(f.slope));
    if (f.degenerate || std::abs(f.slope - target) > tol) v.pass = false;
  }
  v.detail += " (target " + fmt(target) + " +/- " + fmt(tol) + ")";
  return v;
}

Verdict temporal_convergence(const Options& o) {
  RunConfig c = preset_config(Preset::ex61);
  c.n = o.full ? 256 : 64;
  c.ladder = {16, 32, 64, 128, 256};
  Verdict v = slopes_within(convergence_study(c, StudyMode::temporal), kTemporalSlope,
                            kTemporalSlopeTol);
  v.detail += ", n=" + std::to_string(c.n);
  return v;
}

Verdict spatial_convergence(const Options&) {
  RunConfig c = preset_config(Preset::ex61);
  c.tau = kSpatialTau;
  c.n_steps = kSpatialSteps;
  c.snapshot_times.clear();
  c.ladder = {16, 32, 64, 128};
  Verdict v = slopes_within(convergence_study(c, StudyMode::spatial), kSpatialSlope,
                            kSpatialSlopeTol);
  v.detail += ", tau=" + fmt(c.tau) + " x " + std::to_string(c.n_steps) + " steps";
  return v;
}

Verdict energy_stability(const Options&) {
  RunConfig c = preset_config(Preset::ex61);
  c.n = 32;
  const MeshPtr mesh = PeriodicMesh::build_uniform(c.L, c.n);
  const DiscretizationPtr disc = Discretization::build(mesh);
  const Parameters p(c.constants);
  const State s0 = initial_state(c.initial, mesh);
  const double e0 = discrete_energy(s0, p).total;
  Verdict v{true, "E0=" + fmt(e0) + ";"};
  for (double tau : {1e-4, 1e-2, 1.0, 1e2, 1e4}) {
    StepConfig sc;
    sc.tau = tau;
    Stepper stepper(disc, p, sc);
    try {
      const StepResult r = stepper.step(s0);
      const double e1 = r.report.energy.total;
      const bool ok = r.state.is_interior() && e1 <= e0 + kEnergySlack * std::abs(e0);
      v.pass = v.pass && ok;
      v.detail += " tau=" + fmt(tau) + ": E=" + fmt(e1) + (ok ? "" : " VIOLATION");
    } catch (const std::exception& ex) {
      v.pass = false;
      v.detail += " tau=" + fmt(tau) + ": " + ex.what();
    }
  }
  return v;
}

// Criteria 4 and 5 share one run.
struct RandomRunSummary {
  int exit_code = -1;
  std::string message;
  long rows = 0;
  std::array<double, 3> min_seen{1.0, 1.0, 1.0};
  double max_drift = 0.0;
};

const RandomRunSummary& random_run() {
  static const RandomRunSummary summary = [] {
    RunConfig c = preset_config(Preset::ex63);
    c.L = 25.0;
    c.n = 100;
    c.tau = 0.01;
    c.n_steps = 2000;
    c.diag_every = 1;
    c.snapshot_times.clear();
    c.initial.seed = kPositivitySeed;
    RandomRunSummary s;
    std::array<double, 3> mass0{};
    RunHooks hooks;
    hooks.keep_rows = false;
    hooks.on_row = [&](const SeriesRow& row) {
      if (s.rows++ == 0) mass0 = row.report.mass;
      for (int i = 0; i < 3; ++i) {
        s.min_seen[i] = std::min(s.min_seen[i], row.report.min[i]);
        s.max_drift = std::max(s.max_drift, std::abs(row.report.mass[i] - mass0[i]) / std::abs(mass0[i]));
      }
    };
    const RunOutcome out = run(c, hooks);
    s.exit_code = out.exit_code;
    s.message = out.message;
    return s;
  }();
  return summary;
}

Verdict positivity(const Options&) {
  const RandomRunSummary& s = random_run();
  Verdict v{s.exit_code == kExitSuccess && s.rows == 2001, ""};
  v.detail = "min phi1, phi2, phi3 over " + std::to_string(s.rows) + " rows:";
  for (double m : s.min_seen) {
    v.detail += " " + fmt(m);
    if (!(m > 0.0)) v.pass = false;
  }
  if (s.exit_code != kExitSuccess) v.detail += "; run failed: " + s.message;
  return v;
}

Verdict mass_conservation(const Options&) {
  const RandomRunSummary& s = random_run();
  Verdict v{s.exit_code == kExitSuccess && s.rows == 2001 && s.max_drift <= kMassDrift, ""};
  v.detail = "max relative drift " + fmt(s.max_drift) + " (limit " + fmt(kMassDrift) + ")";
  if (s.exit_code != kExitSuccess) v.detail += "; run failed: " + s.message;
  return v;
}

Verdict energy_dissipation(const Options&) {
  RunConfig c = preset_config(Preset::ex62);
  c.L = 32.0;
  c.n = 128;
  c.tau = 0.01;
  c.n_steps = 2000;
  c.diag_every = 1;
  c.snapshot_times.clear();
  std::vector<double> energy;
  long increases = 0;
  RunHooks hooks;
  hooks.keep_rows = false;
  hooks.on_row = [&](const SeriesRow& row) {
    const double e = row.report.energy.total;
    if (!energy.empty() && e > energy.back() + kEnergySlack * std::abs(energy.back())) ++increases;
    energy.push_back(e);
  };
  const RunOutcome out = run(c, hooks);
  Verdict v{out.exit_code == kExitSuccess && increases == 0 && energy.size() == 2001, ""};
  v.detail = std::to_string(energy.size()) + " rows, " + std::to_string(increases) + " increases";
  if (energy.size() > 200) {
    // Informational: share of the total drop spent in the first tenth of the run.
    const double total = energy.front() - energy.back();
    const double early = energy.front() - energy[energy.size() / 10];
    v.detail += ", E " + fmt(energy.front()) + " -> " + fmt(energy.back()) +
                ", first 10% of time carries " + fmt(total > 0 ? 100.0 * early / total : 0.0) +
                "% of the drop";
  }
  if (out.exit_code != kExitSuccess) v.detail += "; run failed: " + out.message;
  return v;
}

State random_state(std::mt19937_64& gen, const MeshPtr& mesh, double lo, double hi) {
  const auto r = testing::random_interior(gen, mesh->num_nodes(), lo, hi);
  return State{NodalField(mesh, r.phi1), NodalField(mesh, r.phi2), 0.0, 0};
}

double relative_gap(double got, double want, double floor) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

Verdict oracle_suites(const Options&) {
  const Parameters p = Parameters::defaults();
  const auto mesh4 = PeriodicMesh::build_uniform(1.0, 4);
  const auto disc4 = Discretization::build(mesh4);
  const auto w4 = mesh4->lumped_weights();
  const double h = 1e-6;
  std::mt19937_64 gen(7);

  // a. Objective gradient: residual against central differences along chi_j - chi_k.
  double worst_a = 0.0;
  for (int k = 0; k < 100; ++k) {
    const State prev = random_state(gen, mesh4, 0.1, 0.4);
    State trial = prev;
    trial.phi1 += NodalField(mesh4, testing::mean_free(testing::random_values(gen, w4.size(), -0.03, 0.03), w4));
    trial.phi2 += NodalField(mesh4, testing::mean_free(testing::random_values(gen, w4.size(), -0.03, 0.03), w4));
    const double tau = 0.05;
    const auto r = scheme_residual(*disc4, trial, prev, p, tau);
    const std::size_t a = k % w4.size(), b = (k * 7 + 3) % w4.size();
    if (a == b) continue;
    NodalField dir(mesh4, 0.0);
    dir[a] = 1.0;
    dir[b] = -1.0;
    for (int comp = 0; comp < 2; ++comp) {
      auto at = [&](double s) {
        State t = trial;
        (comp == 0 ? t.phi1 : t.phi2).add_scaled(s, dir);
        return objective(*disc4, t, prev, p, tau);
      };
      const double fd = (at(h) - at(-h)) / (2 * h);
      worst_a = std::max(worst_a, relative_gap(lumped_inner_product(r[comp].field(), dir), fd, 1e-6));
    }
  }

  // b. Gradient-energy residual against central differences along mean-zero directions.
  double worst_b = 0.0;
  for (int k = 0; k < 100; ++k) {
    const State s = random_state(gen, mesh4, 0.05, 0.45);
    const auto res = assemble_dK_residuals(s.phi1, s.phi2, p);
    for (int comp = 0; comp < 2; ++comp) {
      const auto psi = testing::mean_free(testing::random_values(gen, w4.size(), -0.01, 0.01), w4);
      const NodalField dir(mesh4, psi);
      auto at = [&](double t) {
        NodalField a = s.phi1, b = s.phi2;
        (comp == 0 ? a : b).add_scaled(t, dir);
        return gradient_energy(a, b, p);
      };
      const double fd = (at(h) - at(-h)) / (2 * h);
      const NodalField single = assemble_dK_residual(comp + 1, s.phi1, s.phi2, p);
      double pairing = 0.0;
      for (std::size_t j = 0; j < psi.size(); ++j) pairing += single[j] * psi[j];
      worst_b = std::max(worst_b, relative_gap(pairing, fd, 1e-8));
    }
  }

  // c. Lumped inner product against the element loop.
  double worst_c = 0.0;
  for (int n : {4, 7, 16}) {
    const auto mesh = PeriodicMesh::build_uniform(1.0, n);
    for (int k = 0; k < 50; ++k) {
      const auto psi = testing::random_values(gen, mesh->num_nodes());
      const auto eta = testing::random_values(gen, mesh->num_nodes());
      const double got = lumped_inner_product(NodalField(mesh, psi), NodalField(mesh, eta));
      worst_c = std::max(worst_c, std::abs(got - testing::element_loop_inner_product(*mesh, psi, eta)));
    }
  }

  // d. |grad phi| / A(phi) bound on random positive fields.
  long violations_d = 0;
  {
    const auto mesh = PeriodicMesh::build_uniform(5.0, 4);
    for (int k = 0; k < 10000; ++k) {
      const auto v = testing::random_values(gen, mesh->num_nodes(), 1e-12, 1.0);
      const std::size_t e = k % mesh->num_elements();
      const Vec2 g = testing::element_gradient(*mesh, v, e);
      const auto nodes = mesh->element_nodes(e);
      const double avg = (v[nodes[0]] + v[nodes[1]] + v[nodes[2]]) / 3.0;
      const double bound = 3.0 * std::sqrt(2.0) * mesh->element_diameter(e) / (2.0 * mesh->element_area(e));
      if (std::hypot(g.x, g.y) / avg > bound * (1.0 + 1e-12)) ++violations_d;
    }
  }

  // e. Concavity precondition.
  const double margin = p.concavity_margin();
  bool rejects_nonconcave = false;
  try {
    PhysicalConstants c = p.constants();
    c.chi13 = 0.0;
    Parameters bad(c);
  } catch (const ConfigError&) {
    rejects_nonconcave = true;
  }

  // f. Two Newton starts reach the same step.
  double worst_f = 0.0;
  for (int k = 0; k < 20; ++k) {
    StepConfig sc;
    sc.tau = std::pow(10.0, -3.0 + k % 5);
    Stepper stepper(disc4, p, sc);
    const State prev = random_state(gen, mesh4, 0.1, 0.4);
    const State flat{NodalField(mesh4, lumped_mass(prev.phi1) / mesh4->domain_area()),
                     NodalField(mesh4, lumped_mass(prev.phi2) / mesh4->domain_area()), 0.0, 0};
    const State blended{0.5 * (prev.phi1 + flat.phi1), 0.5 * (prev.phi2 + flat.phi2), 0.0, 0};
    const StepResult x = stepper.step(prev);
    const StepResult y = stepper.step(prev, blended);
    for (const NodalField& d : {x.state.phi1 - y.state.phi1, x.state.phi2 - y.state.phi2}) {
      worst_f = std::max({worst_f, std::abs(d.min()), std::abs(d.max())});
    }
  }

  const bool pa = worst_a <= kFiniteDifferenceTol, pb = worst_b <= kFiniteDifferenceTol;
  const bool pc = worst_c <= kInnerProductTol, pd = violations_d == 0;
  const bool pe = std::abs(margin - kConcavityMargin) <= 1e-12 && rejects_nonconcave;
  const bool pf = worst_f <= kUniquenessTol;
  auto mark = [](bool ok) { return ok ? std::string("ok") : std::string("FAIL"); };
  return {pa && pb && pc && pd && pe && pf,
          "a " + mark(pa) + " (" + fmt(worst_a) + "), b " + mark(pb) + " (" + fmt(worst_b) +
              "), c " + mark(pc) + " (" + fmt(worst_c) + "), d " + mark(pd) + " (" +
              std::to_string(violations_d) + " violations), e " + mark(pe) + " (" + fmt(margin) +
              "), f " + mark(pf) + " (" + fmt(worst_f) + ")"};
}

Verdict pattern_runs(const Options& o) {
  Verdict v{true, ""};
  for (Preset preset : {Preset::ex62, Preset::ex63}) {
    RunConfig c = preset_config(preset);
    c.initial.seed = kPatternSeed;
    if (!o.full) {
      c.n_steps = std::lround(kReducedPatternHorizon / c.tau);
      c.snapshot_times = {0.0, kReducedPatternHorizon};
    }
    if (!o.out.empty()) c.out_dir = (std::filesystem::path(o.out) / preset_name(preset)).string();
    RunHooks hooks;
    hooks.keep_rows = false;
    const RunOutcome out = run(c, hooks);
    const bool ok = out.exit_code == kExitSuccess && out.steps_taken == c.n_steps;
    v.pass = v.pass && ok;
    v.detail += std::string(v.detail.empty() ? "" : "; ") + std::string(preset_name(preset)) +
                " L=" + fmt(c.L) + " n=" + std::to_string(c.n) + " T=" + fmt(c.final_time()) +
                ": " + (ok ? "invariants held" : "exit " + std::to_string(out.exit_code) + " " + out.message);
  }
  if (!o.full) v.detail += " (reduced horizon; --full runs to the complete final times)";
  return v;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict(const Options&)> check;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  Options opts;
  std::vector<int> only;
  app.add_option("--only", only, "Criterion ids to run")->delimiter(',');
  app.add_flag("--full", opts.full, "Full-scale temporal study and pattern runs");
  app.add_option("--out", opts.out, "Directory for pattern-run output");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "temporal convergence", temporal_convergence},
      {2, "spatial convergence", spatial_convergence},
      {3, "unconditional energy stability", energy_stability},
      {4, "positivity preservation", positivity},
      {5, "mass conservation", mass_conservation},
      {6, "energy dissipation long run", energy_dissipation},
      {7, "oracle suites", oracle_suites},
      {8, "large-scale pattern runs", pattern_runs},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check(opts);
    } catch (const std::exception& ex) {
      v = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d %s: %s [%.0fs]\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
