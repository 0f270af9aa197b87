#pragma once

// Data-parallel inner loops shared by the metrics and the surrogate models.
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is chosen once at startup from the CPU feature bits;
// RAILCAL_ISA=scalar in the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace railcal::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  /// sum_i (a[i] - b[i])^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  /// out[i] = sum_d w[d] * (cols[d * stride + i] - x[d])^2 for i < n
  void (*weighted_sq_dist)(const double* cols, std::size_t n, std::size_t stride, std::size_t dim, const double* x,
                           const double* w, double* out);
  /// sum_i coef[i] * sqrt(dist2[i])^3
  double (*cubic_sum)(const double* dist2, const double* coef, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// Table in use by the free functions below.
const KernelTable& active();
Isa active_isa();
std::string_view isa_name(Isa isa);
/// Overrides the startup choice (tests, benchmarks). Falls back to scalar
/// when the requested ISA is unavailable; returns the ISA actually set.
Isa select(Isa isa);

double sum_sq_diff(std::span<const double> a, std::span<const double> b);
double cubic_sum(std::span<const double> dist2, std::span<const double> coef);

/// Points stored dimension-major (structure of arrays) so distance kernels
/// stream one coordinate across many points.
class PointSet {
 public:
  explicit PointSet(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return size_; }
  void add(std::span<const double> x);
  double at(std::size_t i, std::size_t d) const { return data_[d * capacity_ + i]; }
  std::vector<double> point(std::size_t i) const;

  /// out[i] = sum_d w[d] (p_i[d] - x[d])^2; empty `w` means unit weights.
  void weighted_sq_dist(std::span<const double> x, std::span<const double> w, std::span<double> out) const;
  void sq_dist(std::span<const double> x, std::span<double> out) const { weighted_sq_dist(x, {}, out); }

 private:
  void grow();

  std::size_t dim_;
  std::size_t size_ = 0;
  std::size_t capacity_ = 0;
  std::vector<double> data_;
};

}  // namespace railcal::kernels
