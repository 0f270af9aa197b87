#include <cmath>

#include "railcal/kernels.hpp"

namespace railcal::kernels {

namespace {

double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void weighted_sq_dist_scalar(const double* cols, std::size_t n, std::size_t stride, std::size_t dim, const double* x,
                             const double* w, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double* col = cols + d * stride;
    const double xd = x[d];
    const double wd = w[d];
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = col[i] - xd;
      out[i] += wd * diff * diff;
    }
  }
}

double cubic_sum_scalar(const double* dist2, const double* coef, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::sqrt(dist2[i]);
    s += coef[i] * r * r * r;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::Scalar, sum_sq_diff_scalar, weighted_sq_dist_scalar, cubic_sum_scalar};
  return table;
}

}  // namespace railcal::kernels
