#include <cmath>

#include "railcal/error.hpp"
#include "railcal/optim.hpp"

namespace railcal::optim {

void CubicRbf::fit(const std::vector<Point>& x, std::span<const double> y) {
  if (x.empty() || x.size() != y.size()) throw DomainError("RBF fit needs matching, nonempty data");
  dim_ = x.front().size();
  const auto m = static_cast<Eigen::Index>(x.size());
  const auto t = static_cast<Eigen::Index>(dim_ + 1);
  centers_ = kernels::PointSet(dim_);
  for (const auto& p : x) centers_.add(p);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + t, m + t);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + t);
  std::vector<double> d2(x.size());
  for (Eigen::Index j = 0; j < m; ++j) {
    centers_.sq_dist(x[static_cast<std::size_t>(j)], d2);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double r = std::sqrt(d2[static_cast<std::size_t>(i)]);
      a(i, j) = r * r * r;
    }
    a(j, m) = a(m, j) = 1.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const auto c = m + 1 + static_cast<Eigen::Index>(d);
      a(j, c) = a(c, j) = x[static_cast<std::size_t>(j)][d];
    }
    rhs[j] = y[static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXd sol = a.fullPivLu().solve(rhs);
  weights_.assign(sol.data(), sol.data() + m);
  tail_.assign(sol.data() + m, sol.data() + m + t);
}

double CubicRbf::operator()(const Point& x) const {
  std::vector<double> d2(centers_.size());
  centers_.sq_dist(x, d2);
  double s = kernels::cubic_sum(d2, weights_) + tail_[0];
  for (std::size_t d = 0; d < dim_; ++d) s += tail_[d + 1] * x[d];
  return s;
}

}  // namespace railcal::optim
