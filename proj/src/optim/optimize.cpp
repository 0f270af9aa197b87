#include "problem.hpp"
#include "railcal/error.hpp"

namespace railcal::optim {

OptimizeResult optimize(const OptimizerConfig& config, const Objective& f, const Bounds& bounds,
                        std::span<const double> start) {
  bounds.validate();
  if (config.budget < 1) throw ConfigError("budget must be at least 1");
  if (!bounds.contains(start)) throw BoundsError("starting point outside the bounds");

  OptimizeResult res;
  res.trace.algorithm = config.algorithm;
  res.trace.seed = config.seed;
  res.trace.settings = describe(config);

  detail::Problem problem(f, bounds, config.budget, res.trace);
  const Point u0 = bounds.to_unit(start);
  Rng rng = make_stream(config.seed, static_cast<std::uint64_t>(config.algorithm) + 1);
  try {
    switch (config.algorithm) {
      case Algorithm::GA: detail::run_ga(problem, config.ga, u0, rng); break;
      case Algorithm::SA: detail::run_sa(problem, config.sa, u0, rng); break;
      case Algorithm::NMSA: detail::run_nmsa(problem, config.nmsa, u0); break;
      case Algorithm::MADS: detail::run_mads(problem, config.mads, u0, config.seed); break;
      case Algorithm::SPSA: detail::run_spsa(problem, config.spsa, u0, rng); break;
      case Algorithm::BYO: detail::run_byo(problem, config.byo, u0, rng); break;
      case Algorithm::CORS: detail::run_cors(problem, config.cors, u0, rng); break;
    }
  } catch (const detail::BudgetExhausted&) {
  }

  const auto& ev = res.trace.evaluations;
  std::size_t best = 0;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    if (ev[i].value < ev[best].value) best = i;
  }
  res.best = bounds.project(ev[best].theta);
  res.best_value = ev[best].value;
  return res;
}

}  // namespace railcal::optim
