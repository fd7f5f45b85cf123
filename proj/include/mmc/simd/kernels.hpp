#pragma once

// Data-parallel inner loops shared by the FEM operators.
//
// Each kernel has a portable scalar reference and, on x86-64, an AVX2 variant.
// The variant used by the library is chosen once at startup from the CPU
// features (override with the environment variable MMC_SIMD=scalar|avx2).
// element_gradients is bit-identical across backends; the reductions differ
// only by summation order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace mmc {
class PeriodicMesh;
}

namespace mmc::simd {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b) noexcept;
bool backend_available(Backend b) noexcept;
Backend active_backend() noexcept;
/// Throws std::invalid_argument if the backend is not available on this CPU.
void set_active_backend(Backend b);

struct ElementGeometry {
  const std::int32_t* vertex[3];
  const double* grad_x[3];
  const double* grad_y[3];
  std::size_t count;

  static ElementGeometry of(const PeriodicMesh& mesh) noexcept;
};

struct KernelTable {
  // sum_j w_j x_j y_j
  double (*weighted_dot)(const double* w, const double* x, const double* y, std::size_t n);
  // sum_j w_j x_j with compensated (Neumaier) accumulation
  double (*weighted_sum)(const double* w, const double* x, std::size_t n);
  // Per element: P1 gradient (gx, gy) and vertex average of `values`.
  void (*element_gradients)(const ElementGeometry& geom, const double* values, double* gx,
                            double* gy, double* avg);
  // sum_e area_e (gx_e^2 + gy_e^2) / avg_e
  double (*gradient_energy_sum)(const double* area, const double* gx, const double* gy,
                                const double* avg, std::size_t n);
};

const KernelTable& table(Backend b);
inline const KernelTable& active() { return table(active_backend()); }

namespace detail {
extern const KernelTable scalar_table;
#if MMC_HAVE_AVX2
extern const KernelTable avx2_table;
#endif
}  // namespace detail

// Span front-ends routed through the active backend.

double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y);
double weighted_sum(std::span<const double> w, std::span<const double> x);

}  // namespace mmc::simd
