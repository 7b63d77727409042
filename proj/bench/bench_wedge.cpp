// Compares the OpenMP minor-batch wedge kernel against the serial
// Laplace-expansion reference on frames with big integer entries.

#include <benchmark/benchmark.h>

#include "dioph/exterior.hpp"

using namespace dioph;

namespace {

ExactInt random_bigint(SplitMix64& rng, int bits) {
  ExactInt z(0);
  for (int have = 0; have < bits; have += 64) {
    z <<= 64;
    const std::uint64_t word = rng.next();
    ExactInt w;
    mpz_import(w.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
    z += w;
  }
  if (rng.below(2)) z = -z;
  return z;
}

IMat frame(std::size_t n, std::size_t g, int bits, std::uint64_t seed) {
  SplitMix64 rng(seed);
  IMat m(n, g);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < g; ++j) m(i, j) = random_bigint(rng, bits);
  return m;
}

}  // namespace

static void BM_wedge_serial(benchmark::State& state) {
  const auto m = frame(static_cast<std::size_t>(state.range(0)),
                       static_cast<std::size_t>(state.range(1)),
                       static_cast<int>(state.range(2)), 99);
  for (auto _ : state) benchmark::DoNotOptimize(exterior::wedge_serial(m));
}

static void BM_wedge_parallel(benchmark::State& state) {
  const auto m = frame(static_cast<std::size_t>(state.range(0)),
                       static_cast<std::size_t>(state.range(1)),
                       static_cast<int>(state.range(2)), 99);
  for (auto _ : state) benchmark::DoNotOptimize(exterior::wedge(m));
}

BENCHMARK(BM_wedge_serial)
    ->Args({14, 4, 256})
    ->Args({12, 5, 512})
    ->Args({10, 5, 4096})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_wedge_parallel)
    ->Args({14, 4, 256})
    ->Args({12, 5, 512})
    ->Args({10, 5, 4096})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
