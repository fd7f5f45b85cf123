#include <cmath>

#include "mmc/simd/kernels.hpp"

namespace mmc::simd::detail {

namespace {

double weighted_dot(const double* w, const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += w[j] * x[j] * y[j];
  return s;
}

double weighted_sum(const double* w, const double* x, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = w[j] * x[j];
    const double u = s + t;
    c += std::abs(s) >= std::abs(t) ? (s - u) + t : (t - u) + s;
    s = u;
  }
  return s + c;
}

void element_gradients(const ElementGeometry& g, const double* values, double* gx, double* gy,
                       double* avg) {
  for (std::size_t e = 0; e < g.count; ++e) {
    const double u0 = values[g.vertex[0][e]];
    const double u1 = values[g.vertex[1][e]];
    const double u2 = values[g.vertex[2][e]];
    gx[e] = u0 * g.grad_x[0][e] + u1 * g.grad_x[1][e] + u2 * g.grad_x[2][e];
    gy[e] = u0 * g.grad_y[0][e] + u1 * g.grad_y[1][e] + u2 * g.grad_y[2][e];
    avg[e] = (u0 + u1 + u2) / 3.0;
  }
}

double gradient_energy_sum(const double* area, const double* gx, const double* gy,
                           const double* avg, std::size_t n) {
  double s = 0.0;
  for (std::size_t e = 0; e < n; ++e) s += area[e] * (gx[e] * gx[e] + gy[e] * gy[e]) / avg[e];
  return s;
}

}  // namespace

const KernelTable scalar_table{&weighted_dot, &weighted_sum, &element_gradients,
                               &gradient_energy_sum};

}  // namespace mmc::simd::detail
