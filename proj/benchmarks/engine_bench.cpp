#include <benchmark/benchmark.h>

#include <string>

#include "aamkit/scenario.hpp"

using namespace aamkit;

namespace {

// Full scenario runs for a fixed number of iterations (no early stop).
io::ScenarioConfig hilbert_config(std::size_t iters) {
  io::ScenarioConfig c;
  c.name = "bench-hilbert";
  c.kind = io::ScenarioKind::kAamHilbert;
  c.stop = {iters, 1e-300, iters + 1};
  io::HilbertSpec h;
  h.block_dim = 2;
  h.weights = {0.5, 0.3, 0.2};
  io::SetSpec box;
  box.family = "box";
  box.lo = {-1.0, -1.0};
  box.hi = {-0.5, 0.0};
  io::SetSpec ball;
  ball.family = "ball";
  ball.center = {1.0, 0.5};
  ball.radius = 0.4;
  io::SetSpec far = box;
  far.lo = {0.0, 1.0};
  far.hi = {0.5, 1.5};
  h.blocks = {box, ball, far};
  h.directions = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}};
  h.drift = DriftLaw::harmonic(1.0);
  c.hilbert = h;
  return c;
}

io::ScenarioConfig mixture_config(std::size_t iters) {
  io::ScenarioConfig c;
  c.name = "bench-mixture";
  c.kind = io::ScenarioKind::kAamDivergence;
  c.stop = {iters, 1e-300, iters + 1};
  io::DivergenceSpec d;
  d.outcomes = {"a", "b", "c"};
  d.components = {{0.7, 0.2, 0.1}, {0.1, 0.3, 0.6}};
  d.c0 = 0.05;
  d.mu0 = 0.1;
  d.true_weights = std::vector<double>{0.6, 0.4};
  d.sample_count = 10000;
  c.divergence = d;
  return c;
}

void BM_HilbertRun(benchmark::State& state) {
  const auto config = hilbert_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(io::run_scenario(config));
}
BENCHMARK(BM_HilbertRun)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MixtureRun(benchmark::State& state) {
  const auto config = mixture_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(io::run_scenario(config));
}
BENCHMARK(BM_MixtureRun)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
