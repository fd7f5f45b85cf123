#include "mmc/harness/convergence.hpp"

#include <cmath>
#include <fstream>

#include "mmc/errors.hpp"
#include "mmc/harness/io.hpp"
#include "mmc/harness/run.hpp"

namespace mmc::harness {

StudyMode parse_study_mode(const std::string& name) {
  if (name == "temporal") return StudyMode::temporal;
  if (name == "spatial") return StudyMode::spatial;
  throw ConfigError("unknown convergence mode '" + name + "' (expected temporal or spatial)");
}

std::string study_mode_name(StudyMode m) { return m == StudyMode::temporal ? "temporal" : "spatial"; }

std::vector<long> default_ladder(StudyMode m) {
  if (m == StudyMode::temporal) return {16, 32, 64, 128, 256};
  return {16, 32, 64, 128};
}

SlopeFit fit_log_slope(std::span<const double> resolution, std::span<const double> error) {
  SlopeFit fit;
  const std::size_t m = std::min(resolution.size(), error.size());
  if (m < 2 || resolution.size() != error.size()) {
    fit.degenerate = true;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (!(error[k] > 0.0) || !std::isfinite(error[k]) || !(resolution[k] > 0.0)) {
      fit.degenerate = true;
      return fit;
    }
    const double x = std::log(resolution[k]);
    const double y = std::log(error[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (!(denom > 0.0)) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

void require_nested_ladder(std::span<const long> ladder) {
  if (ladder.size() < 2) throw ConfigError("convergence ladder needs at least two rungs");
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (ladder[k] < 2) throw ConfigError("spatial ladder entries must be at least 2");
    if (k > 0 && (ladder[k] <= ladder[k - 1] || ladder[k] % ladder[k - 1] != 0)) {
      throw ConfigError("spatial ladder is not nested: " + std::to_string(ladder[k]) +
                        " is not a multiple of " + std::to_string(ladder[k - 1]));
    }
  }
}

NodalField restrict_to(const NodalField& fine, MeshPtr coarse) {
  const int nf = fine.mesh().nodes_per_side();
  const int nc = coarse->nodes_per_side();
  if (fine.mesh().length() != coarse->length() || nf < nc || nf % nc != 0) {
    throw ConfigError("restriction needs nested meshes of the same domain");
  }
  const int ratio = nf / nc;
  std::vector<double> v(coarse->num_nodes());
  for (int j = 0; j < nc; ++j) {
    for (int i = 0; i < nc; ++i) {
      v[static_cast<std::size_t>(j) * nc + i] =
          fine[static_cast<std::size_t>(j) * ratio * nf + static_cast<std::size_t>(i) * ratio];
    }
  }
  return NodalField(std::move(coarse), std::move(v));
}

RungError cauchy_difference(const State& a, const State& b) {
  require_same_mesh(a.phi1, b.phi1);
  RungError e;
  e.resolution = a.mesh().nodes_per_side();
  const NodalField diff[3] = {a.phi1 - b.phi1, a.phi2 - b.phi2, a.phi3() - b.phi3()};
  for (int i = 0; i < 3; ++i) {
    e.linf[i] = std::max(std::abs(diff[i].min()), std::abs(diff[i].max()));
    e.l2[i] = lumped_norm(diff[i]);
  }
  return e;
}

namespace {

State run_rung(RunConfig cfg) {
  cfg.out_dir.clear();
  cfg.snapshot_times.clear();
  cfg.diag_every = cfg.n_steps;
  RunHooks hooks;
  hooks.keep_rows = false;
  RunOutcome out = run(cfg, hooks);
  if (out.exit_code == kExitConfigError) throw ConfigError(out.message);
  if (out.exit_code != kExitSuccess) {
    throw NonConvergence("convergence rung (n=" + std::to_string(cfg.n) +
                             ", tau=" + format_real(cfg.tau) + ") failed: " + out.message,
                         out.steps_taken + 1);
  }
  return std::move(out.final_state);
}

}  // namespace

ConvergenceReport convergence_study(const RunConfig& base, StudyMode mode) {
  base.validate();
  ConvergenceReport rep;
  rep.mode = mode;
  rep.ladder = base.ladder.empty() ? default_ladder(mode) : base.ladder;
  rep.final_time = base.final_time();
  if (rep.ladder.size() < 2) throw ConfigError("convergence ladder needs at least two rungs");
  if (mode == StudyMode::spatial) require_nested_ladder(rep.ladder);

  std::vector<State> finals;
  for (long rung : rep.ladder) {
    RunConfig c = base;
    if (mode == StudyMode::temporal) {
      if (rung < 1) throw ConfigError("temporal ladder entries must be positive");
      c.n_steps = rung;
      c.tau = rep.final_time / static_cast<double>(rung);
    } else {
      c.n = static_cast<int>(rung);
    }
    finals.push_back(run_rung(c));
  }
  rep.fixed = mode == StudyMode::temporal ? base.n : base.tau;

  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    // Each rung owns its mesh; compare on the coarser one (same mesh size in temporal mode).
    const MeshPtr coarse = finals[k].phi1.mesh_ptr();
    const State fine{restrict_to(finals[k + 1].phi1, coarse),
                     restrict_to(finals[k + 1].phi2, coarse), finals[k + 1].time,
                     finals[k + 1].step};
    RungError e = cauchy_difference(finals[k], fine);
    e.resolution = rep.ladder[k];
    rep.errors.push_back(e);
  }

  std::vector<double> res;
  for (const auto& e : rep.errors) res.push_back(static_cast<double>(e.resolution));
  for (int i = 0; i < 3; ++i) {
    std::vector<double> linf, l2;
    for (const auto& e : rep.errors) {
      linf.push_back(e.linf[i]);
      l2.push_back(e.l2[i]);
    }
    rep.slope_linf[i] = fit_log_slope(res, linf);
    rep.slope_l2[i] = fit_log_slope(res, l2);
  }
  return rep;
}

std::string format_report(const ConvergenceReport& r) {
  std::string out = "# mode=" + study_mode_name(r.mode) + " T=" + format_real(r.final_time) +
                    (r.mode == StudyMode::temporal ? " n=" : " tau=") + format_real(r.fixed) + "\n";
  out += "resolution,linf1,linf2,linf3,l2_1,l2_2,l2_3\n";
  for (const auto& e : r.errors) {
    out += std::to_string(e.resolution);
    for (double v : e.linf) out += "," + format_real(v);
    for (double v : e.l2) out += "," + format_real(v);
    out += "\n";
  }
  auto slope = [](const SlopeFit& f) { return f.degenerate ? std::string("degenerate") : format_real(f.slope); };
  out += "slope";
  for (const auto& f : r.slope_linf) out += "," + slope(f);
  for (const auto& f : r.slope_l2) out += "," + slope(f);
  out += "\n";
  return out;
}

void write_report(const std::string& path, const ConvergenceReport& r) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open report file '" + path + "'");
  out << format_report(r);
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace mmc::harness
