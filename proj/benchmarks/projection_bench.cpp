#include <benchmark/benchmark.h>

#include <memory>

#include "aamkit/divergence.hpp"
#include "aamkit/hilbert.hpp"
#include "aamkit/rng.hpp"
#include "aamkit/sets.hpp"

using namespace aamkit;

namespace {

div::MixtureProblem make_problem(std::size_t ni, std::size_t ny) {
  Rng rng(1);
  div::MixtureProblem p;
  for (std::size_t y = 0; y < ny; ++y) p.outcomes.push_back("y" + std::to_string(y));
  double mu0 = 1.0;
  for (std::size_t i = 0; i < ni; ++i) {
    auto row = rng.dirichlet(ny);
    for (auto& x : row) x = (x + 0.1) / (1.0 + 0.1 * static_cast<double>(ny));
    for (double x : row) mu0 = std::min(mu0, x);
    p.components.push_back(row);
  }
  p.weight_floor = 0.5 / static_cast<double>(ni * 2);
  p.component_floor = mu0;
  return p;
}

void BM_FlooredRescale(benchmark::State& state) {
  Rng rng(2);
  const auto v = rng.dirichlet(static_cast<std::size_t>(state.range(0)));
  const double floor = 0.5 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(div::floored_rescale(v, floor));
}
BENCHMARK(BM_FlooredRescale)->Arg(2)->Arg(16)->Arg(256);

void BM_WeightProjection(benchmark::State& state) {
  const auto ni = static_cast<std::size_t>(state.range(0));
  const auto p = make_problem(ni, 8);
  Rng rng(3);
  const auto joint = p.joint_from_weights(rng.dirichlet(ni));
  for (auto _ : state) benchmark::DoNotOptimize(div::project_onto_weight_set(joint, p));
}
BENCHMARK(BM_WeightProjection)->Arg(2)->Arg(8)->Arg(32);

void BM_CouplingProjection(benchmark::State& state) {
  const auto ny = static_cast<std::size_t>(state.range(0));
  const auto p = make_problem(4, ny);
  Rng rng(4);
  const div::WeightVector w{{0.25, 0.25, 0.25, 0.25}};
  const auto pbar = rng.dirichlet(ny);
  for (auto _ : state) benchmark::DoNotOptimize(div::project_onto_coupling_set(w, pbar, p));
}
BENCHMARK(BM_CouplingProjection)->Arg(4)->Arg(64)->Arg(1024);

void BM_DiagonalProjection(benchmark::State& state) {
  const auto ni = static_cast<std::size_t>(state.range(0));
  const hilbert::WeightedProductSpace space(3, std::vector<double>(ni, 1.0 / static_cast<double>(ni)));
  Rng rng(5);
  Point q(ni * 3);
  for (auto& x : q) x = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(hilbert::project_onto_diagonal(q, space));
}
BENCHMARK(BM_DiagonalProjection)->Arg(2)->Arg(16)->Arg(128);

void BM_BallProjection(benchmark::State& state) {
  const BallSet ball(Point(static_cast<std::size_t>(state.range(0)), 0.0), 1.0);
  const Point x(static_cast<std::size_t>(state.range(0)), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(hilbert::project_block(x, ball));
}
BENCHMARK(BM_BallProjection)->Arg(2)->Arg(64);

}  // namespace
