#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "decarb/metrics.hpp"
#include "decarb/rng.hpp"
#include "decarb/techlearn.hpp"

namespace {

std::vector<double> lognormal(std::size_t n) {
  decarb::CounterRng rng(1, decarb::Stream::Shuffle);
  std::vector<double> v(n);
  for (auto& x : v) x = std::exp(rng.normal());
  return v;
}

void BM_Gini(benchmark::State& st) {
  const auto v = lognormal(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(decarb::gini(v));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Gini)->RangeMultiplier(10)->Range(100, 1'000'000)->Complexity(benchmark::oNLogN);

void BM_Deciles(benchmark::State& st) {
  const auto v = lognormal(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(decarb::decile_shares(v));
}
BENCHMARK(BM_Deciles)->Arg(100'000);

void BM_CalibrateExponent(benchmark::State& st) {
  const decarb::TechCurve wind{"wind", 70.0, 35.0, 0.0, 1.0};
  for (auto _ : st) benchmark::DoNotOptimize(decarb::calibrate_exponent(wind, 4.0, 43.0));
}
BENCHMARK(BM_CalibrateExponent);

}  // namespace
