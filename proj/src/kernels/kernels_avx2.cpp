// Compiled with -mavx2 -mfma. Only reached through the dispatch table after
// a CPU feature check.

#include <immintrin.h>

#include <cmath>

#include "railcal/kernels.hpp"

namespace railcal::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double sum_sq_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void weighted_sq_dist_avx2(const double* cols, std::size_t n, std::size_t stride, std::size_t dim, const double* x,
                           const double* w, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t d = 0; d < dim; ++d) {
      __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(cols + d * stride + i), _mm256_set1_pd(x[d]));
      acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_set1_pd(w[d]), diff), diff, acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = cols[d * stride + i] - x[d];
      acc += w[d] * diff * diff;
    }
    out[i] = acc;
  }
}

double cubic_sum_avx2(const double* dist2, const double* coef, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_sqrt_pd(_mm256_loadu_pd(dist2 + i));
    __m256d r3 = _mm256_mul_pd(_mm256_mul_pd(r, r), r);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(coef + i), r3, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double r = std::sqrt(dist2[i]);
    s += coef[i] * r * r * r;
  }
  return s;
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{Isa::Avx2, sum_sq_diff_avx2, weighted_sq_dist_avx2, cubic_sum_avx2};
  return table;
}

}  // namespace railcal::kernels
