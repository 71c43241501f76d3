// Microbenchmarks for the two hot paths: pairwise proximity detection and
// the full simulation loop. Run via build/benchmarks/storesim_benchmarks.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "storesim/collision.hpp"
#include "storesim/rng.hpp"
#include "storesim/sim_config.hpp"
#include "storesim/sim_engine.hpp"
#include "storesim/store_layout.hpp"

namespace {

constexpr const char* kGridLayout = STORESIM_FIXTURE_DIR "/grid_3x3.layout.json";
constexpr const char* kDefaultConfig =
    STORESIM_FIXTURE_DIR "/default.config.json";

// Constant-density crowd: the occupied square grows with the agent count, so
// reported pair counts (and detect's expected cost) scale linearly.
std::vector<storesim::collision::AgentPoint> crowd(std::size_t n) {
  storesim::Rng rng(42);
  const double side = 5.0 * std::sqrt(static_cast<double>(n));
  std::vector<storesim::collision::AgentPoint> agents;
  agents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    agents.push_back({static_cast<storesim::collision::AgentId>(i),
                      {rng.uniform_range(0.0, side),
                       rng.uniform_range(0.0, side)}});
  }
  return agents;
}

void BM_Detect(benchmark::State& state) {
  const auto agents = crowd(static_cast<std::size_t>(state.range(0)));
  std::size_t pairs = 0;
  for (auto _ : state) {
    const auto found = storesim::collision::detect(agents, 2.0);
    pairs = found.size();
    benchmark::DoNotOptimize(found);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(agents.size()));
  state.counters["pairs"] = static_cast<double>(pairs);
}
BENCHMARK(BM_Detect)->Range(64, 4096);

void BM_TrackerUpdate(benchmark::State& state) {
  // One long-lived contact plus churn: a fresh pair every tick.
  const auto agents = crowd(256);
  const auto pairs = storesim::collision::detect(agents, 4.0);
  long long tick = 0;
  storesim::collision::CollisionTracker tracker(2);
  for (auto _ : state) {
    auto closed = tracker.update(tick++, pairs);
    benchmark::DoNotOptimize(closed);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(pairs.size()));
}
BENCHMARK(BM_TrackerUpdate);

void BM_EngineRun(benchmark::State& state) {
  const storesim::store::StoreLayout layout =
      storesim::store::load_layout(kGridLayout);
  storesim::SimConfig config = storesim::load_config(kDefaultConfig);
  std::int64_t ticks = 0;
  for (auto _ : state) {
    config.seed += 1;  // avoid measuring a warm branch predictor on one seed
    const storesim::engine::SimResult result =
        storesim::engine::run(layout, config);
    ticks += result.ticks_run;
    benchmark::DoNotOptimize(result);
  }
  state.counters["ticks_per_s"] = benchmark::Counter(
      static_cast<double>(ticks), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_EngineRun)->Unit(benchmark::kMillisecond);

void BM_Route(benchmark::State& state) {
  const storesim::store::StoreLayout layout =
      storesim::store::load_layout(kGridLayout);
  for (auto _ : state) {
    const auto path = storesim::store::route(layout, layout.spawn,
                                             layout.despawn);
    benchmark::DoNotOptimize(path);
  }
}
BENCHMARK(BM_Route);

}  // namespace

BENCHMARK_MAIN();
