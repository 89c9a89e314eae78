// Serial reference vs parallel contact detection on the default grid.
#include "oppsim/scenario.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace oppsim;

namespace {

struct Fixture
{
  std::vector<Trajectory> trajectories;
  ContactDetectParams params;
};

const Fixture& fixture(std::size_t group_size, double pause_s)
{
  static std::map<std::pair<std::size_t, double>, Fixture> cache;
  auto [it, fresh] = cache.try_emplace({group_size, pause_s});
  if (fresh)
  {
    auto p = SyntheticParams::defaults(group_size);
    p.pause_time_s = pause_s;
    p.duration = kDay / 4;
    it->second.trajectories = simulate_mobility(p, 1);
    it->second.params = {p.radio_range_m, p.tick, p.duration};
  }
  return it->second;
}

void run_detect(benchmark::State& state, Execution exec)
{
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)), 100.0);
  std::size_t contacts = 0;
  for (auto _ : state)
  {
    auto c = detect_contacts(f.trajectories, f.params, exec);
    contacts = c.size();
    benchmark::DoNotOptimize(c.data());
  }
  state.counters["nodes"] = static_cast<double>(f.trajectories.size());
  state.counters["contacts"] = static_cast<double>(contacts);
}

void BM_DetectSerial(benchmark::State& state) { run_detect(state, Execution::kSerial); }
void BM_DetectParallel(benchmark::State& state) { run_detect(state, Execution::kParallel); }

} // namespace

BENCHMARK(BM_DetectSerial)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetectParallel)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
