#include <benchmark/benchmark.h>

// the packaged benchmark_main archive carries stale LTO bytecode
BENCHMARK_MAIN();
