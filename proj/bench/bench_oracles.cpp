// Serial reference against the OpenMP kernels: brute-force worst case over
// the budget polytope and rare-event Monte Carlo on the desk case.

#include <benchmark/benchmark.h>

#include <memory>

#include "rruc/app/config.hpp"
#include "rruc/formulations/master.hpp"
#include "rruc/grid/case_io.hpp"
#include "rruc/oracles/oracles.hpp"

using namespace rruc;

namespace {

struct Desk {
  std::unique_ptr<app::Session> session;
  formulations::Matrix u;
  formulations::Band band;

  Desk() {
    auto system = grid::load_case_file(RRUC_DATA_DIR "/desk/case.json");
    auto config = app::load_config_file(RRUC_DATA_DIR "/desk/a1.json", system.horizon());
    session = std::make_unique<app::Session>(std::move(system), std::move(config));
    const auto& s = session->system;
    u.assign(s.num_generators(), std::vector<double>(static_cast<std::size_t>(s.horizon()), 1.0));
    band = formulations::build_ruc_bounds(s, session->errors.sigma, 0.95);
  }
};

const Desk& desk() {
  static const Desk d;
  return d;
}

oracles::Execution mode(const benchmark::State& state) {
  return state.range(0) ? oracles::Execution::parallel : oracles::Execution::serial;
}

void BM_BruteForce(benchmark::State& state) {
  const auto& d = desk();
  const formulations::Budget budget{static_cast<int>(state.range(1)), 1};
  std::size_t evaluated = 0;
  for (auto _ : state) {
    const auto wc = oracles::brute_force_worst_case(d.session->system, d.u, d.band.upper, d.band.lower, budget,
                                                    mode(state));
    evaluated = wc.evaluated;
    benchmark::DoNotOptimize(wc.residual);
  }
  state.counters["vertices"] = static_cast<double>(evaluated);
}
BENCHMARK(BM_BruteForce)->ArgsProduct({{0, 1}, {1, 2}})->ArgNames({"parallel", "gamma_t"})
    ->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const auto& d = desk();
  oracles::MonteCarloSettings mc;
  mc.samples = static_cast<std::size_t>(state.range(1));
  mc.seed = 3;
  for (auto _ : state) {
    const auto rep = oracles::monte_carlo_rare_event_loss(d.session->system, d.u, d.band.upper, d.band.lower,
                                                          d.session->errors, d.session->config.prices, mc,
                                                          mode(state));
    benchmark::DoNotOptimize(rep.average_loss);
  }
}
BENCHMARK(BM_MonteCarlo)->ArgsProduct({{0, 1}, {500}})->ArgNames({"parallel", "samples"})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
