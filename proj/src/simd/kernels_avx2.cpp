// Compiled with -mavx2 (no FMA) so that element_gradients rounds exactly like
// the scalar reference.

#include <immintrin.h>

#include <cmath>

#include "mmc/simd/kernels.hpp"

namespace mmc::simd::detail {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double weighted_dot(const double* w, const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w + j),
                                                           _mm256_loadu_pd(x + j)),
                                             _mm256_loadu_pd(y + j)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w + j + 4),
                                                           _mm256_loadu_pd(x + j + 4)),
                                             _mm256_loadu_pd(y + j + 4)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < n; ++j) s += w[j] * x[j] * y[j];
  return s;
}

double weighted_sum(const double* w, const double* x, std::size_t n) {
  // Neumaier compensation per lane; lanes are then merged the same way.
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d s = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d t = _mm256_mul_pd(_mm256_loadu_pd(w + j), _mm256_loadu_pd(x + j));
    const __m256d u = _mm256_add_pd(s, t);
    const __m256d s_big = _mm256_cmp_pd(_mm256_andnot_pd(sign, s), _mm256_andnot_pd(sign, t),
                                        _CMP_GE_OQ);
    const __m256d big = _mm256_blendv_pd(t, s, s_big);
    const __m256d small = _mm256_blendv_pd(s, t, s_big);
    c = _mm256_add_pd(c, _mm256_add_pd(_mm256_sub_pd(big, u), small));
    s = u;
  }
  alignas(32) double lane_s[4];
  alignas(32) double lane_c[4];
  _mm256_store_pd(lane_s, s);
  _mm256_store_pd(lane_c, c);
  double total = 0.0, comp = lane_c[0] + lane_c[1] + lane_c[2] + lane_c[3];
  auto add = [&](double t) {
    const double u = total + t;
    comp += std::abs(total) >= std::abs(t) ? (total - u) + t : (t - u) + total;
    total = u;
  };
  for (double v : lane_s) add(v);
  for (; j < n; ++j) add(w[j] * x[j]);
  return total + comp;
}

void element_gradients(const ElementGeometry& g, const double* values, double* gx, double* gy,
                       double* avg) {
  const __m256d third = _mm256_set1_pd(3.0);
  std::size_t e = 0;
  for (; e + 4 <= g.count; e += 4) {
    __m256d u[3];
    for (int k = 0; k < 3; ++k) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(g.vertex[k] + e));
      u[k] = _mm256_i32gather_pd(values, idx, 8);
    }
    __m256d sx = _mm256_mul_pd(u[0], _mm256_loadu_pd(g.grad_x[0] + e));
    sx = _mm256_add_pd(sx, _mm256_mul_pd(u[1], _mm256_loadu_pd(g.grad_x[1] + e)));
    sx = _mm256_add_pd(sx, _mm256_mul_pd(u[2], _mm256_loadu_pd(g.grad_x[2] + e)));
    __m256d sy = _mm256_mul_pd(u[0], _mm256_loadu_pd(g.grad_y[0] + e));
    sy = _mm256_add_pd(sy, _mm256_mul_pd(u[1], _mm256_loadu_pd(g.grad_y[1] + e)));
    sy = _mm256_add_pd(sy, _mm256_mul_pd(u[2], _mm256_loadu_pd(g.grad_y[2] + e)));
    const __m256d sa = _mm256_div_pd(_mm256_add_pd(_mm256_add_pd(u[0], u[1]), u[2]), third);
    _mm256_storeu_pd(gx + e, sx);
    _mm256_storeu_pd(gy + e, sy);
    _mm256_storeu_pd(avg + e, sa);
  }
  for (; e < g.count; ++e) {
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
  __m256d acc = _mm256_setzero_pd();
  std::size_t e = 0;
  for (; e + 4 <= n; e += 4) {
    const __m256d x = _mm256_loadu_pd(gx + e);
    const __m256d y = _mm256_loadu_pd(gy + e);
    const __m256d sq = _mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y));
    acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_mul_pd(_mm256_loadu_pd(area + e), sq),
                                           _mm256_loadu_pd(avg + e)));
  }
  double s = hsum(acc);
  for (; e < n; ++e) s += area[e] * (gx[e] * gx[e] + gy[e] * gy[e]) / avg[e];
  return s;
}

}  // namespace

const KernelTable avx2_table{&weighted_dot, &weighted_sum, &element_gradients,
                             &gradient_energy_sum};

}  // namespace mmc::simd::detail
