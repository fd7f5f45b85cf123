#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmc/energy.hpp"

namespace mmc::harness {

enum class Preset { ex61, ex62, ex63, uniform, expression };

/// Throws ConfigError for an unknown name.
Preset parse_preset(std::string_view name);
std::string_view preset_name(Preset p) noexcept;

/// Initial data phi_i = base_i + amp_i cos(2 pi modes_x x / L) cos(2 pi modes_y y / L),
/// or base_i + r_j with r_j uniform in [-amp_1, amp_1] for the random preset.
struct InitialConditionSpec {
  Preset preset = Preset::ex61;
  double base1 = 0.1;
  double base2 = 0.5;
  double amp1 = 0.01;
  double amp2 = 0.01;
  int modes_x = 1;
  int modes_y = 1;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  double L = 1.0;
  int n = 64;
  double tau = 0.01;
  long n_steps = 1;
  PhysicalConstants constants;
  InitialConditionSpec initial;
  std::string out_dir;  // empty: nothing is written
  std::vector<double> snapshot_times;
  long diag_every = 1;
  double newton_tol = 1e-10;
  int max_newton_iters = 100;
  std::vector<long> ladder;  // N_T values (temporal) or n values (spatial)

  double final_time() const noexcept { return static_cast<double>(n_steps) * tau; }
  /// Throws ConfigError.
  void validate() const;
};

/// Defaults of a named experiment; the convergence presets carry their ladder.
RunConfig preset_config(Preset p);

using KeyValues = std::map<std::string, std::string>;

/// Flat `key = value` text; `#` starts a comment. Throws ConfigError on
/// malformed or duplicate lines.
KeyValues parse_key_values(std::istream& in, const std::string& source = "<config>");

/// Starts from preset_config(preset) when a preset key is given and applies the
/// remaining keys on top. T and n_steps must agree when both are given.
/// Throws ConfigError for unknown keys and invalid values.
RunConfig config_from_key_values(const KeyValues& kv);

RunConfig load_config(const std::string& path);

std::vector<std::string> known_keys();

}  // namespace mmc::harness
