#include <benchmark/benchmark.h>

// The packaged benchmark_main archive carries LTO bytecode from another
// compiler build, so the entry point is provided here.
BENCHMARK_MAIN();
