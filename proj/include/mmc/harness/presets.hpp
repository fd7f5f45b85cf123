#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mmc/energy.hpp"
#include "mmc/harness/config.hpp"

namespace mmc::harness {

/// Identifier of the random stream used by the random preset; written to series headers.
inline constexpr std::string_view kRandomAlgorithm = "mt19937_64+u53";

/// `count` values uniform in [lo, hi): each is lo + (hi - lo) * (x >> 11) * 2^-53
/// for successive outputs x of mt19937_64(seed). Platform independent.
std::vector<double> uniform_stream(std::uint64_t seed, std::size_t count, double lo, double hi);

/// Nodal initial state at t = 0.
///
/// The random preset adds the same r_j to phi1 and phi2 at node j (nodes in
/// row-major order). Throws ConfigError when the seed is missing or any node
/// lies outside the open Gibbs triangle.
State initial_state(const InitialConditionSpec& spec, MeshPtr mesh);

}  // namespace mmc::harness
