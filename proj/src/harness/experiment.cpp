#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "railcal/error.hpp"
#include "railcal/harness.hpp"

namespace railcal::harness {

Setup make_setup(const RunConfig& config) {
  validate(config);
  Setup s;
  s.fixture = config.data.empty() ? synth::build_desk_fixture() : synth::load_fixture(config.data);
  auto events = build_event_list(s.fixture.network, s.fixture.timetable);
  if (config.dataset.empty()) {
    s.dataset = synth::generate(s.fixture, events, synth::resolve_scenario(config.scenario), config.sim_seed,
                                config.metrics, config.gamma_cf);
  } else {
    s.dataset = synth::load_dataset(config.dataset, s.fixture);
  }
  auto ctx = std::make_shared<CalibrationContext>();
  ctx->network = s.fixture.network;
  ctx->events = std::move(events);
  ctx->demand = s.fixture.demand;
  ctx->observed = s.dataset.observed;
  ctx->period = s.fixture.period;
  ctx->metrics = config.metrics;
  // evaluations reuse the seed the observations were simulated with unless eval_seed says otherwise
  ctx->sim_seed = config.eval_seed.value_or(s.dataset.seed);
  ctx->gamma_cf = s.dataset.gamma_cf;
  ctx->bounds = s.dataset.scenario.bounds;
  s.context = std::move(ctx);
  return s;
}

std::vector<Cell> plan_cells(const RunConfig& config) {
  std::vector<Cell> cells;
  for (auto a : config.algorithms) {
    const bool det = optim::is_deterministic(a);
    const int reps = det ? 1 : config.replications;
    for (int r = 0; r < reps; ++r) {
      cells.push_back({a, r, config.seed + static_cast<std::uint64_t>(r), det});
    }
  }
  return cells;
}

ResultBundle run_cells(const RunConfig& config, const optim::Objective& objective, const Bounds& bounds,
                       std::vector<double> start, const Progress& progress) {
  validate(config);
  bounds.validate();
  if (!bounds.contains(start)) throw BoundsError("experiment start point outside bounds");

  ResultBundle bundle;
  bundle.config = config;
  bundle.start = start;
  bundle.start_value = objective(start);

  const auto cells = plan_cells(config);
  bundle.cells.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        optim::OptimizerConfig oc = config.optimizer;
        oc.algorithm = cells[i].algorithm;
        oc.budget = config.budget;
        oc.seed = cells[i].seed;
        std::atomic<std::size_t> calls{0};
        const optim::Objective counted = [&](std::span<const double> x) {
          calls.fetch_add(1, std::memory_order_relaxed);
          return objective(x);
        };
        CellResult r;
        r.cell = cells[i];
        r.result = optim::optimize(oc, counted, bounds, start);
        r.objective_calls = calls.load();
        bundle.cells[i] = std::move(r);
        if (progress) {
          std::lock_guard lock(mu);
          progress(bundle.cells[i]);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const auto n = std::min<std::size_t>(static_cast<std::size_t>(config.workers), cells.size());
  if (n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return bundle;
}

ResultBundle run_experiment(const RunConfig& config, const Setup& setup, const Progress& progress) {
  const CalibrationObjective objective(setup.context);
  const auto& bounds = setup.context->bounds;
  auto bundle = run_cells(
      config, [&](std::span<const double> x) { return objective(x); }, bounds, bounds.midpoint(), progress);
  bundle.scenario = setup.dataset.scenario.name;
  bundle.param_names.assign(param_names().begin(), param_names().end());
  const auto& t = setup.dataset.scenario.theta;
  bundle.theta_true = std::vector<double>(t.begin(), t.end());
  bundle.true_value = objective(t);
  return bundle;
}

}  // namespace railcal::harness
