#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "railcal/kernels.hpp"

namespace railcal::kernels {

#if RAILCAL_HAVE_AVX2
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if RAILCAL_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* startup_choice() {
  const char* env = std::getenv("RAILCAL_ISA");
  if (env && std::strcmp(env, "scalar") == 0) return &scalar_table();
  if (const auto* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{startup_choice()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

Isa select(Isa isa) {
  const KernelTable* t = &scalar_table();
  if (isa == Isa::Avx2 && avx2_table()) t = avx2_table();
  current().store(t, std::memory_order_relaxed);
  return t->isa;
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("sum_sq_diff: length mismatch");
  return active().sum_sq_diff(a.data(), b.data(), a.size());
}

double cubic_sum(std::span<const double> dist2, std::span<const double> coef) {
  if (dist2.size() != coef.size()) throw std::invalid_argument("cubic_sum: length mismatch");
  return active().cubic_sum(dist2.data(), coef.data(), dist2.size());
}

void PointSet::grow() {
  const std::size_t cap = capacity_ == 0 ? 16 : capacity_ * 2;
  std::vector<double> data(dim_ * cap, 0.0);
  for (std::size_t d = 0; d < dim_; ++d) {
    for (std::size_t i = 0; i < size_; ++i) data[d * cap + i] = data_[d * capacity_ + i];
  }
  data_.swap(data);
  capacity_ = cap;
}

void PointSet::add(std::span<const double> x) {
  if (x.size() != dim_) throw std::invalid_argument("PointSet::add: dimension mismatch");
  if (size_ == capacity_) grow();
  for (std::size_t d = 0; d < dim_; ++d) data_[d * capacity_ + size_] = x[d];
  ++size_;
}

std::vector<double> PointSet::point(std::size_t i) const {
  std::vector<double> p(dim_);
  for (std::size_t d = 0; d < dim_; ++d) p[d] = at(i, d);
  return p;
}

void PointSet::weighted_sq_dist(std::span<const double> x, std::span<const double> w, std::span<double> out) const {
  if (x.size() != dim_ || out.size() < size_ || (!w.empty() && w.size() != dim_)) {
    throw std::invalid_argument("PointSet::weighted_sq_dist: size mismatch");
  }
  if (size_ == 0) return;
  std::vector<double> ones;
  const double* wp = w.data();
  if (w.empty()) {
    ones.assign(dim_, 1.0);
    wp = ones.data();
  }
  active().weighted_sq_dist(data_.data(), size_, capacity_, dim_, x.data(), wp, out.data());
}

}  // namespace railcal::kernels
