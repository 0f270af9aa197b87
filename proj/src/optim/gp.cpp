#include <algorithm>
#include <cmath>
#include <numbers>

#include "railcal/optim.hpp"

namespace railcal::optim {

namespace {

constexpr double kLogLengthMin = -4.605170185988091;  // ln 0.01
constexpr double kLogLengthMax = 2.302585092994046;   // ln 10
constexpr double kLogSignalMin = -4.605170185988091;
constexpr double kLogSignalMax = 4.605170185988091;

}  // namespace

GaussianProcess::GaussianProcess(std::size_t dim, double jitter)
    : dim_(dim), jitter_(jitter), length_(dim, 0.3), x_(dim) {}

void GaussianProcess::fit(const std::vector<Point>& x, std::span<const double> y) {
  x_ = kernels::PointSet(dim_);
  for (const auto& p : x) x_.add(p);
  const auto n = static_cast<Eigen::Index>(y.size());
  y_mean_ = 0.0;
  for (double v : y) y_mean_ += v;
  y_mean_ /= static_cast<double>(n);
  double var = 0.0;
  for (double v : y) var += (v - y_mean_) * (v - y_mean_);
  y_scale_ = n > 1 ? std::sqrt(var / static_cast<double>(n)) : 0.0;
  if (!(y_scale_ > 0.0)) y_scale_ = 1.0;
  y_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) y_[i] = (y[static_cast<std::size_t>(i)] - y_mean_) / y_scale_;
  factorize();
}

void GaussianProcess::factorize() {
  const auto n = static_cast<Eigen::Index>(x_.size());
  std::vector<double> w(dim_);
  for (std::size_t d = 0; d < dim_; ++d) w[d] = 1.0 / (length_[d] * length_[d]);
  Eigen::MatrixXd k(n, n);
  std::vector<double> d2(x_.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    x_.weighted_sq_dist(x_.point(static_cast<std::size_t>(j)), w, d2);
    for (Eigen::Index i = 0; i < n; ++i) k(i, j) = signal_ * std::exp(-0.5 * d2[static_cast<std::size_t>(i)]);
  }
  double jitter = jitter_;
  for (;;) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(kj);
    if (llt.info() == Eigen::Success) {
      chol_ = llt.matrixL();
      break;
    }
    jitter *= 10.0;
  }
  alpha_ = chol_.triangularView<Eigen::Lower>().solve(y_);
  alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(alpha_);
  lml_ = -0.5 * y_.dot(alpha_) - chol_.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

double GaussianProcess::log_marginal_likelihood() const { return lml_; }

void GaussianProcess::optimize_hyperparameters(int iterations) {
  const auto n = static_cast<Eigen::Index>(x_.size());
  if (n < 2) return;
  const std::size_t np = dim_ + 1;
  auto params = [&] {
    std::vector<double> p(np);
    for (std::size_t d = 0; d < dim_; ++d) p[d] = std::log(length_[d]);
    p[dim_] = std::log(signal_);
    return p;
  };
  auto apply = [&](const std::vector<double>& p) {
    for (std::size_t d = 0; d < dim_; ++d) length_[d] = std::exp(std::clamp(p[d], kLogLengthMin, kLogLengthMax));
    signal_ = std::exp(std::clamp(p[dim_], kLogSignalMin, kLogSignalMax));
    factorize();
  };

  double eta = 0.5;
  for (int it = 0; it < iterations && eta > 1e-4; ++it) {
    // gradient of the log marginal likelihood in log-parameters
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd kinv = chol_.triangularView<Eigen::Lower>().solve(eye);
    kinv = chol_.transpose().triangularView<Eigen::Upper>().solve(kinv);
    const Eigen::MatrixXd wm = alpha_ * alpha_.transpose() - kinv;
    std::vector<double> grad(np, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        double r2 = 0.0;
        double kf = 0.0;
        std::vector<double> comp(dim_);
        for (std::size_t d = 0; d < dim_; ++d) {
          const double diff = x_.at(static_cast<std::size_t>(i), d) - x_.at(static_cast<std::size_t>(j), d);
          comp[d] = diff * diff / (length_[d] * length_[d]);
          r2 += comp[d];
        }
        kf = signal_ * std::exp(-0.5 * r2);
        const double wk = 0.5 * wm(i, j) * kf;
        for (std::size_t d = 0; d < dim_; ++d) grad[d] += wk * comp[d];
        grad[dim_] += wk;
      }
    }
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm < 1e-10) break;

    const auto p0 = params();
    const double l0 = lml_;
    auto p1 = p0;
    for (std::size_t k = 0; k < np; ++k) p1[k] += eta * grad[k] / gnorm;
    apply(p1);
    if (lml_ > l0) {
      eta *= 1.5;
    } else {
      apply(p0);
      eta *= 0.5;
    }
  }
}

std::pair<double, double> GaussianProcess::predict(const Point& x) const {
  const auto n = static_cast<Eigen::Index>(x_.size());
  std::vector<double> w(dim_);
  for (std::size_t d = 0; d < dim_; ++d) w[d] = 1.0 / (length_[d] * length_[d]);
  std::vector<double> d2(x_.size());
  x_.weighted_sq_dist(x, w, d2);
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k[i] = signal_ * std::exp(-0.5 * d2[static_cast<std::size_t>(i)]);
  const double mean = k.dot(alpha_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
  const double var = std::max(0.0, signal_ - v.squaredNorm());
  return {mean * y_scale_ + y_mean_, std::sqrt(var) * y_scale_};
}

double expected_improvement(double mean, double sd, double best, double xi) {
  const double gain = best - mean - xi;
  if (!(sd > 1e-12)) return std::max(gain, 0.0);
  const double z = gain / sd;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(0.0, gain * cdf + sd * pdf);
}

}  // namespace railcal::optim
