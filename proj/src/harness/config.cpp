#include "mmc/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mmc/errors.hpp"

namespace mmc::harness {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw ConfigError("config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

template <class T>
T parse_number(const std::string& key, const std::string& value, const char* expected) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, expected);
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  const double v = parse_number<double>(key, value, "a real number");
  if (!std::isfinite(v)) bad_value(key, value, "a finite real number");
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  return parse_number<long>(key, value, "an integer");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

const std::vector<std::string>& keys() {
  static const std::vector<std::string> k = {
      "L",       "n",        "tau",      "T",          "n_steps",        "D1",
      "D2",      "chi12",    "chi13",    "chi23",      "gamma",          "Ncoef",
      "a1",      "a2",       "a3",       "preset",     "seed",           "snapshot_times",
      "diag_every", "out",   "newton_tol", "max_newton_iters", "ladder", "base1",
      "base2",   "amp1",     "amp2",     "modes_x",    "modes_y"};
  return k;
}

}  // namespace

Preset parse_preset(std::string_view name) {
  if (name == "ex61") return Preset::ex61;
  if (name == "ex62") return Preset::ex62;
  if (name == "ex63") return Preset::ex63;
  if (name == "uniform") return Preset::uniform;
  if (name == "expression") return Preset::expression;
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (expected ex61, ex62, ex63, uniform or expression)");
}

std::string_view preset_name(Preset p) noexcept {
  switch (p) {
    case Preset::ex61: return "ex61";
    case Preset::ex62: return "ex62";
    case Preset::ex63: return "ex63";
    case Preset::uniform: return "uniform";
    case Preset::expression: return "expression";
  }
  return "?";
}

std::vector<std::string> known_keys() { return keys(); }

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("run config: " + what); };
  if (!(L > 0.0)) fail("L must be positive");
  if (n < 2) fail("n must be at least 2");
  if (!(tau > 0.0)) fail("tau must be positive");
  if (n_steps < 1) fail("n_steps must be at least 1");
  if (diag_every < 1) fail("diag_every must be at least 1");
  if (!(newton_tol > 0.0)) fail("newton_tol must be positive");
  if (max_newton_iters < 1) fail("max_newton_iters must be at least 1");
  for (double t : snapshot_times) {
    if (t < 0.0 || t > final_time() + 0.5 * tau) fail("snapshot time outside [0, T]");
  }
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (ladder[k] < 1) fail("ladder entries must be positive");
    if (k > 0 && ladder[k] <= ladder[k - 1]) fail("ladder must be strictly increasing");
  }
  if (initial.preset == Preset::ex63 && !initial.seed) {
    fail("the random initial condition (ex63) needs a seed");
  }
  if (initial.modes_x < 0 || initial.modes_y < 0) fail("modes must be non-negative");
  Parameters check(constants);  // throws ConfigError
  (void)check;
}

RunConfig preset_config(Preset p) {
  RunConfig c;
  c.initial.preset = p;
  switch (p) {
    case Preset::ex61:
    case Preset::expression:
      c.L = 1.0;
      c.n = 64;
      c.tau = 0.02 / 64;
      c.n_steps = 64;
      c.constants.a1 = c.constants.a2 = c.constants.a3 = 0.3;
      break;
    case Preset::ex62:
      c.L = 64.0;
      c.n = 256;
      c.tau = 0.01;
      c.n_steps = 20000;
      c.initial.modes_x = c.initial.modes_y = 3;
      c.snapshot_times = {0, 5, 8, 10, 15, 20, 25, 80, 200};
      c.diag_every = 10;
      break;
    case Preset::ex63:
      c.L = 50.0;
      c.n = 200;
      c.tau = 0.01;
      c.n_steps = 50000;
      c.initial.modes_x = c.initial.modes_y = 0;
      c.snapshot_times = {0, 3.6, 6.52, 8, 10, 26, 85, 278, 500};
      c.diag_every = 10;
      break;
    case Preset::uniform:
      c.L = 1.0;
      c.n = 32;
      c.tau = 0.01;
      c.n_steps = 1;
      c.initial.amp1 = c.initial.amp2 = 0.0;
      c.initial.modes_x = c.initial.modes_y = 0;
      break;
  }
  return c;
}

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (!kv.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  return kv;
}

RunConfig config_from_key_values(const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (std::find(keys().begin(), keys().end(), key) == keys().end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  RunConfig c = get("preset") ? preset_config(parse_preset(*get("preset")))
                              : preset_config(Preset::expression);
  const double preset_T = c.final_time();

  auto set_double = [&](const char* key, double& target) {
    if (const auto* v = get(key)) target = parse_double(key, *v);
  };
  auto set_int = [&](const char* key, auto& target) {
    if (const auto* v = get(key)) {
      const long x = parse_long(key, *v);
      target = static_cast<std::remove_reference_t<decltype(target)>>(x);
      if (static_cast<long>(target) != x) bad_value(key, *v, "an integer in range");
    }
  };

  set_double("L", c.L);
  set_int("n", c.n);
  set_double("tau", c.tau);
  set_double("D1", c.constants.D1);
  set_double("D2", c.constants.D2);
  set_double("chi12", c.constants.chi12);
  set_double("chi13", c.constants.chi13);
  set_double("chi23", c.constants.chi23);
  set_double("gamma", c.constants.gamma);
  set_double("Ncoef", c.constants.N);
  set_double("a1", c.constants.a1);
  set_double("a2", c.constants.a2);
  set_double("a3", c.constants.a3);
  set_double("base1", c.initial.base1);
  set_double("base2", c.initial.base2);
  set_double("amp1", c.initial.amp1);
  set_double("amp2", c.initial.amp2);
  set_int("modes_x", c.initial.modes_x);
  set_int("modes_y", c.initial.modes_y);
  set_int("diag_every", c.diag_every);
  set_double("newton_tol", c.newton_tol);
  set_int("max_newton_iters", c.max_newton_iters);
  if (const auto* v = get("out")) c.out_dir = *v;
  if (const auto* v = get("seed")) {
    c.initial.seed = parse_number<std::uint64_t>("seed", *v, "an unsigned 64-bit integer");
  }
  if (const auto* v = get("snapshot_times")) {
    c.snapshot_times.clear();
    for (const auto& item : split_list(*v)) {
      c.snapshot_times.push_back(parse_double("snapshot_times", item));
    }
  }
  if (const auto* v = get("ladder")) {
    c.ladder.clear();
    for (const auto& item : split_list(*v)) c.ladder.push_back(parse_long("ladder", item));
  }

  // Run length: n_steps wins over T only when they agree; a bare tau keeps the preset T.
  const auto* t_text = get("T");
  const auto* steps_text = get("n_steps");
  auto steps_for = [&](double T) {
    const double exact = T / c.tau;
    const long steps = std::lround(exact);
    if (steps < 1 || std::abs(steps * c.tau - T) > 1e-9 * std::max(1.0, T)) {
      throw ConfigError("run config: T is not a positive integer multiple of tau");
    }
    return steps;
  };
  if (steps_text) {
    set_int("n_steps", c.n_steps);
    if (t_text) {
      const double T = parse_double("T", *t_text);
      if (!(c.tau > 0.0) || std::abs(c.n_steps * c.tau - T) > 1e-9 * std::max(1.0, std::abs(T))) {
        throw ConfigError("run config: T and n_steps * tau disagree");
      }
    }
  } else if (c.tau > 0.0) {
    c.n_steps = steps_for(t_text ? parse_double("T", *t_text) : preset_T);
  }
  if (!get("snapshot_times")) {
    // Preset schedules are trimmed to a shortened run; explicit ones are validated.
    std::erase_if(c.snapshot_times, [&](double t) { return t > c.final_time() + 0.5 * c.tau; });
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return config_from_key_values(parse_key_values(in, path));
}

}  // namespace mmc::harness
