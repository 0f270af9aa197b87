#include <algorithm>
#include <cmath>
#include <numbers>

#include "problem.hpp"

namespace railcal::optim {

namespace {

constexpr double kTailLimit = 1e8;
constexpr double kMinVisitBound = 1e-10;

double wrap_unit(double v) {
  const double b = std::fmod(v, 1.0) + 1.0;
  double w = std::fmod(b, 1.0);
  if (std::fabs(w) < kMinVisitBound) w += kMinVisitBound;
  return w;
}

}  // namespace

double sa_temperature(double initial, double qv, int iteration) {
  const double t1 = std::exp((qv - 1.0) * std::log(2.0)) - 1.0;
  const double t2 = std::exp((qv - 1.0) * std::log(static_cast<double>(iteration) + 2.0)) - 1.0;
  return initial * t1 / t2;
}

double sa_acceptance_probability(double delta, double temperature_step, double qa) {
  if (delta <= 0.0) return 1.0;
  const double base = 1.0 - (1.0 - qa) * delta / temperature_step;
  if (base <= 0.0) return 0.0;
  return std::exp(std::log(base) / (1.0 - qa));
}

SaVisiting::SaVisiting(double qv) : qv_(qv) {
  const double f2 = std::exp((4.0 - qv) * std::log(qv - 1.0));
  const double f3 = std::exp((2.0 - qv) * std::log(2.0) / (qv - 1.0));
  factor4_p_ = std::sqrt(std::numbers::pi) * f2 / (f3 * (3.0 - qv));
  const double f5 = 1.0 / (qv - 1.0) - 0.5;
  const double d1 = 2.0 - f5;
  factor6_ = std::numbers::pi * (1.0 - f5) / std::sin(std::numbers::pi * (1.0 - f5)) / std::exp(std::lgamma(d1));
}

std::vector<double> SaVisiting::sample(double temperature, std::size_t dim, Rng& rng) const {
  std::vector<double> x(dim), y(dim);
  for (auto& v : x) v = normal01(rng);
  for (auto& v : y) v = normal01(rng);
  const double factor1 = std::exp(std::log(temperature) / (qv_ - 1.0));
  const double factor4 = factor4_p_ * factor1;
  const double scale = std::exp(-(qv_ - 1.0) * std::log(factor6_ / factor4) / (3.0 - qv_));
  std::vector<double> out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double den = std::exp((qv_ - 1.0) * std::log(std::fabs(y[i])) / (3.0 - qv_));
    out[i] = x[i] * scale / den;
  }
  return out;
}

Point SaVisiting::propose(const Point& x, std::size_t step, double temperature, Rng& rng) const {
  const std::size_t dim = x.size();
  Point v = x;
  if (step < dim) {
    auto visits = sample(temperature, dim, rng);
    const double up = uniform01(rng);
    const double lo = uniform01(rng);
    for (std::size_t i = 0; i < dim; ++i) {
      double s = visits[i];
      if (s > kTailLimit) s = kTailLimit * up;
      else if (s < -kTailLimit) s = -kTailLimit * lo;
      v[i] = wrap_unit(x[i] + s);
    }
  } else {
    double s = sample(temperature, 1, rng)[0];
    if (s > kTailLimit) s = kTailLimit * uniform01(rng);
    else if (s < -kTailLimit) s = -kTailLimit * uniform01(rng);
    const std::size_t i = step - dim;
    v[i] = wrap_unit(x[i] + s);
  }
  return v;
}

namespace detail {

void run_sa(Problem& p, const SaSettings& s, const Point& start, Rng& rng) {
  const std::size_t dim = p.dim();
  const SaVisiting visit(s.visiting);
  const double restart_temp = s.initial_temp * s.restart_temp_ratio;
  const int ls_iter = static_cast<int>(std::min<std::size_t>(std::max<std::size_t>(dim * 6, 100), 1000));
  auto f = [&](const Point& u) { return p(u); };

  Point current = start;
  double current_z = p(current);
  Point best = current;
  double best_z = current_z;
  while (p.remaining() > 0) {
    for (int i = 0; p.remaining() > 0; ++i) {
      const double temp = sa_temperature(s.initial_temp, s.visiting, i);
      if (temp < restart_temp) {
        for (auto& v : current) v = uniform01(rng);
        current_z = p(current);
        break;
      }
      const double temp_step = temp / static_cast<double>(i + 1);
      bool improved = i == 0;
      for (std::size_t j = 0; j < 2 * dim; ++j) {
        Point cand = visit.propose(current, j, temp, rng);
        const double z = p(cand);
        if (z < current_z) {
          current = std::move(cand);
          current_z = z;
          if (current_z < best_z) {
            best = current;
            best_z = current_z;
            improved = true;
          }
        } else if (uniform01(rng) <= sa_acceptance_probability(z - current_z, temp_step, s.acceptance)) {
          current = std::move(cand);
          current_z = z;
        }
      }
      if (improved) {
        auto [x, z] = bounded_bfgs(f, best, best_z, ls_iter);
        if (z < best_z) {
          best = x;
          best_z = z;
          current = std::move(x);
          current_z = z;
        }
      }
    }
  }
}

}  // namespace detail

}  // namespace railcal::optim
