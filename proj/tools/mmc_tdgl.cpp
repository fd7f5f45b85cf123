// Command-line driver: single runs and convergence studies.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mmc/errors.hpp"
#include "mmc/harness/config.hpp"
#include "mmc/harness/convergence.hpp"
#include "mmc/harness/io.hpp"
#include "mmc/harness/run.hpp"
#include "mmc/simd/kernels.hpp"

namespace {

using namespace mmc::harness;

struct CommonOptions {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "flat key = value configuration file");
  cmd->add_option("--preset", o.preset, "ex61, ex62, ex63, uniform or expression");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "seed of the random initial condition");
}

RunConfig resolve(const CommonOptions& o) {
  KeyValues kv;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw mmc::ConfigError("cannot open config file '" + o.config + "'");
    kv = parse_key_values(in, o.config);
  } else if (o.preset.empty()) {
    throw mmc::ConfigError("either --config or --preset is required");
  }
  if (!o.preset.empty()) kv["preset"] = o.preset;
  if (o.seed) kv["seed"] = std::to_string(*o.seed);
  if (!o.out.empty()) kv["out"] = o.out;
  return config_from_key_values(kv);
}

int cmd_run(const CommonOptions& o) {
  RunConfig cfg = resolve(o);
  if (cfg.out_dir.empty()) cfg.out_dir = "out";
  std::cerr << "run: L=" << cfg.L << " n=" << cfg.n << " tau=" << cfg.tau
            << " steps=" << cfg.n_steps << " kernels=" << mmc::simd::backend_name(mmc::simd::active_backend())
            << " -> " << cfg.out_dir << "\n";
  RunHooks hooks;
  hooks.keep_rows = false;
  hooks.on_row = [](const SeriesRow& r) {
    std::fprintf(stderr, "step %ld t=%.6g E=%.12g newton=%d\n", r.step, r.t, r.report.energy.total,
                 r.report.newton_iters);
  };
  const RunOutcome out = run(cfg, hooks);
  if (out.exit_code != kExitSuccess) {
    std::cerr << "error: " << out.message << "\n";
    return out.exit_code;
  }
  std::cerr << "done: " << out.steps_taken << " steps, max relative mass drift "
            << out.max_relative_mass_drift << "\n";
  return kExitSuccess;
}

int cmd_converge(const CommonOptions& o, const std::string& mode_name) {
  const StudyMode mode = parse_study_mode(mode_name);
  const RunConfig cfg = resolve(o);
  const ConvergenceReport rep = convergence_study(cfg, mode);
  const std::string text = format_report(rep);
  std::cout << text;
  const std::string dir = cfg.out_dir.empty() ? "out" : cfg.out_dir;
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / ("convergence_" + mode_name + ".csv");
  write_report(path.string(), rep);
  std::cerr << "report written to " << path.string() << "\n";
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ternary Cahn-Hilliard (MMC-TDGL) finite element solver"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "run one configuration to its final time");
  add_common(run_cmd, run_opts);

  CommonOptions conv_opts;
  std::string mode;
  auto* conv_cmd = app.add_subcommand("converge", "temporal or spatial convergence study");
  add_common(conv_cmd, conv_opts);
  conv_cmd->add_option("--mode", mode, "temporal or spatial")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts);
    return cmd_converge(conv_opts, mode);
  } catch (const mmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const mmc::NonConvergence& e) {
    std::cerr << "error: step " << e.step_index() << ": " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
