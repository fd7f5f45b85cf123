#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mmc/mesh.hpp"
#include "mmc/simd/kernels.hpp"

namespace mmc::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if MMC_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend detect() noexcept {
  if (const char* env = std::getenv("MMC_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && cpu_has_avx2()) return Backend::avx2;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& active_slot() {
  static std::atomic<Backend> slot{detect()};
  return slot;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

bool backend_available(Backend b) noexcept {
  return b == Backend::scalar || cpu_has_avx2();
}

Backend active_backend() noexcept { return active_slot().load(std::memory_order_relaxed); }

void set_active_backend(Backend b) {
  if (!backend_available(b)) {
    throw std::invalid_argument("simd backend not available: " + std::string(backend_name(b)));
  }
  active_slot().store(b, std::memory_order_relaxed);
}

const KernelTable& table(Backend b) {
#if MMC_HAVE_AVX2
  if (b == Backend::avx2) {
    if (!cpu_has_avx2()) throw std::invalid_argument("simd backend not available: avx2");
    return detail::avx2_table;
  }
#else
  if (b == Backend::avx2) throw std::invalid_argument("simd backend not available: avx2");
#endif
  return detail::scalar_table;
}

ElementGeometry ElementGeometry::of(const PeriodicMesh& mesh) noexcept {
  ElementGeometry g{};
  for (int k = 0; k < 3; ++k) {
    g.vertex[k] = mesh.vertex_column(k).data();
    g.grad_x[k] = mesh.grad_x_column(k).data();
    g.grad_y[k] = mesh.grad_y_column(k).data();
  }
  g.count = mesh.num_elements();
  return g;
}

double weighted_dot(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y) {
  return active().weighted_dot(w.data(), x.data(), y.data(), w.size());
}

double weighted_sum(std::span<const double> w, std::span<const double> x) {
  return active().weighted_sum(w.data(), x.data(), w.size());
}

}  // namespace mmc::simd
