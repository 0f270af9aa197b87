#pragma once

#include <chrono>
#include <cstdint>

#include "railcal/optim.hpp"

namespace railcal::optim::detail {

/// Thrown by Problem when an algorithm asks for more calls than the budget.
struct BudgetExhausted {};

/// Budget-tallying view of the objective in unit-cube coordinates.
class Problem {
 public:
  Problem(const Objective& f, const Bounds& bounds, int budget, EvalTrace& trace)
      : f_(f), bounds_(bounds), budget_(budget), trace_(trace) {}

  std::size_t dim() const { return bounds_.size(); }
  int used() const { return static_cast<int>(trace_.evaluations.size()); }
  int remaining() const { return budget_ - used(); }
  int budget() const { return budget_; }

  /// u must lie in the unit cube.
  double operator()(const Point& u) {
    auto theta = bounds_.from_unit(u);
    const auto t0 = std::chrono::steady_clock::now();
    check();
    const double z = f_(theta);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    record(std::move(theta), z, dt);
    return z;
  }

  /// Points outside the cube are not simulated; they are charged one call and
  /// scored penalty + squared violation in parameter units.
  double penalized(const Point& u, double penalty) {
    bool inside = true;
    for (double v : u) inside = inside && v >= 0.0 && v <= 1.0;
    if (inside) return (*this)(u);
    check();
    Point theta(u.size());
    double violation = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      theta[i] = bounds_.lower[i] + (bounds_.upper[i] - bounds_.lower[i]) * u[i];
      const double d = theta[i] < bounds_.lower[i]   ? bounds_.lower[i] - theta[i]
                       : theta[i] > bounds_.upper[i] ? theta[i] - bounds_.upper[i]
                                                     : 0.0;
      violation += d * d;
    }
    const double z = penalty + violation;
    record(std::move(theta), z, 0.0);
    return z;
  }

 private:
  void check() const {
    if (used() >= budget_) throw BudgetExhausted{};
  }

  void record(Point theta, double z, double seconds) {
    Evaluation e;
    e.index = trace_.evaluations.size() + 1;
    e.theta = std::move(theta);
    e.value = z;
    e.best_so_far = trace_.evaluations.empty() ? z : std::min(z, trace_.evaluations.back().best_so_far);
    e.wall_seconds = seconds;
    trace_.evaluations.push_back(std::move(e));
  }

  const Objective& f_;
  const Bounds& bounds_;
  int budget_;
  EvalTrace& trace_;
};

void run_ga(Problem& p, const GaSettings& s, const Point& start, Rng& rng);
void run_sa(Problem& p, const SaSettings& s, const Point& start, Rng& rng);
void run_nmsa(Problem& p, const NmsaSettings& s, const Point& start);
void run_mads(Problem& p, const MadsSettings& s, const Point& start, std::uint64_t seed);
void run_spsa(Problem& p, const SpsaSettings& s, const Point& start, Rng& rng);
void run_byo(Problem& p, const ByoSettings& s, const Point& start, Rng& rng);
void run_cors(Problem& p, const CorsSettings& s, const Point& start, Rng& rng);

double sq_dist(const Point& a, const Point& b);

/// Projected quasi-Newton descent in the unit cube with forward-difference
/// gradients. Returns the final point and value.
std::pair<Point, double> bounded_bfgs(const std::function<double(const Point&)>& f, Point x, double fx,
                                      int max_iter);

}  // namespace railcal::optim::detail
