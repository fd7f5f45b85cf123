#include "mmc/harness/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mmc/errors.hpp"

namespace mmc::harness {

std::vector<double> uniform_stream(std::uint64_t seed, std::size_t count, double lo, double hi) {
  std::mt19937_64 gen(seed);
  std::vector<double> out(count);
  for (auto& v : out) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = lo + (hi - lo) * u;
  }
  return out;
}

State initial_state(const InitialConditionSpec& spec, MeshPtr mesh) {
  const std::size_t nn = mesh->num_nodes();
  std::vector<double> phi1(nn), phi2(nn);
  if (spec.preset == Preset::ex63) {
    if (!spec.seed) throw ConfigError("the random initial condition needs a seed");
    const auto r = uniform_stream(*spec.seed, nn, -spec.amp1, spec.amp1);
    for (std::size_t j = 0; j < nn; ++j) {
      phi1[j] = spec.base1 + r[j];
      phi2[j] = spec.base2 + r[j];
    }
  } else {
    const double kx = 2.0 * std::numbers::pi * spec.modes_x / mesh->length();
    const double ky = 2.0 * std::numbers::pi * spec.modes_y / mesh->length();
    for (std::size_t j = 0; j < nn; ++j) {
      const Vec2 p = mesh->node_position(j);
      const double wave = std::cos(kx * p.x) * std::cos(ky * p.y);
      phi1[j] = spec.base1 + spec.amp1 * wave;
      phi2[j] = spec.base2 + spec.amp2 * wave;
    }
  }
  for (std::size_t j = 0; j < nn; ++j) {
    if (!(phi1[j] > 0.0 && phi2[j] > 0.0 && phi1[j] + phi2[j] < 1.0)) {
      std::ostringstream os;
      os.precision(17);
      os << "initial condition leaves the Gibbs triangle at node " << j << ": (" << phi1[j]
         << ", " << phi2[j] << ")";
      throw ConfigError(os.str());
    }
  }
  State s{NodalField(mesh, std::move(phi1)), NodalField(mesh, std::move(phi2)), 0.0, 0};
  return s;
}

}  // namespace mmc::harness
