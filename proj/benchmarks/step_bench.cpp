#include <benchmark/benchmark.h>

#include <string>

#include "decarb/runner.hpp"

namespace {

decarb::RunConfig config(const char* name) {
  return decarb::load_config(std::string(DECARB_BENCH_DATA_DIR) + "/" + name);
}

// One quarter of the fixture economy (2,000 households, 100 firms).
void BM_StepFixture(benchmark::State& st) {
  const auto cfg = config("fixture_config.json");
  auto economy = decarb::build_economy(cfg, static_cast<int>(st.range(0)));
  for (int q = 0; q < 8; ++q) decarb::step(economy);  // past the first-quarter transient
  for (auto _ : st) {
    st.PauseTiming();
    auto s = economy;
    st.ResumeTiming();
    decarb::step(s);
    benchmark::DoNotOptimize(s.t);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(economy.households.size()));
}
BENCHMARK(BM_StepFixture)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

// One quarter at desk scale (100,000 households, 5,000 firms).
void BM_StepDesk(benchmark::State& st) {
  const auto cfg = config("desk_config.json");
  auto economy = decarb::build_economy(cfg, static_cast<int>(st.range(0)));
  decarb::step(economy);
  for (auto _ : st) decarb::step(economy);
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(economy.households.size()));
}
BENCHMARK(BM_StepDesk)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond)->Iterations(20);

void BM_BuildDesk(benchmark::State& st) {
  const auto cfg = config("desk_config.json");
  for (auto _ : st) benchmark::DoNotOptimize(decarb::build_economy(cfg).households.size());
}
BENCHMARK(BM_BuildDesk)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
