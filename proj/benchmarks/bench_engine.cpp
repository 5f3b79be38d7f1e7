#include <benchmark/benchmark.h>

#include "taeblp/coupling.hpp"
#include "taeblp/lattice.hpp"
#include "taeblp/rate_index.hpp"

using namespace taeblp;

namespace {

VolumeSpec window(int half, double theta) {
  VolumeSpec s;
  s.ell = -half;
  s.r = half;
  s.boundary = Boundary::theta;
  s.theta_left = s.theta_right = theta;
  return s;
}

}  // namespace

// Bricks per second of a single stationary process.
static void BM_SingleProcess(benchmark::State& state) {
  const RateParams params(1.0);
  const VolumeSpec spec = window(static_cast<int>(state.range(0)), 0.0);
  Rng rng = make_stream(1, 0);
  SingleProcess proc(spec, params, init_stationary(0.0, spec, params, rng));
  double t = 0.0;
  std::uint64_t bricks = 0;
  for (auto _ : state) {
    t += 1.0;
    bricks += proc.run_until(t, rng);
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(bricks), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SingleProcess)->Arg(30)->Arg(100)->Arg(1000);

// Coupled events per second of a layered system.
static void BM_LayeredSystem(benchmark::State& state) {
  const RateParams params(1.0);
  const int layers = static_cast<int>(state.range(1));
  const VolumeSpec spec = window(static_cast<int>(state.range(0)), 0.0);
  Rng rng = make_stream(2, 0);
  std::vector<IncrementField> fields{init_stationary(0.0, spec, params, rng)};
  for (int k = 1; k < layers; ++k) {
    IncrementField f = fields.back();
    f.set_omega(0, f.omega(0) + 1);
    f.reset_heights();
    fields.push_back(f);
  }
  LayeredSystem sys(spec, params, fields);
  double t = 0.0;
  std::uint64_t events = 0;
  for (auto _ : state) {
    t += 1.0;
    while (sys.step(t, rng)) ++events;
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_LayeredSystem)->Args({60, 2})->Args({60, 4})->Args({300, 2});

static void BM_RateIndexUpdateFind(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RateIndex idx(n);
  Rng rng = make_stream(3, 0);
  for (std::size_t i = 0; i < n; ++i) idx.set(i, uniform01(rng));
  idx.rebuild();
  std::size_t acc = 0;
  for (auto _ : state) {
    const std::size_t i = idx.find(uniform01(rng) * idx.total());
    idx.set(i, uniform01(rng));
    acc += i;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RateIndexUpdateFind)->Arg(256)->Arg(4096)->Arg(65536);

BENCHMARK_MAIN();
