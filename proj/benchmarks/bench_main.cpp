#include <random>

#include <benchmark/benchmark.h>

#include "hgde/ball.hpp"
#include "hgde/diffusivity.hpp"
#include "hgde/flow.hpp"
#include "hgde/solvers.hpp"
#include "hgde/transport.hpp"

namespace {

using namespace hgde;

const Curvature kUnit(-1.0);

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 1; i < n; ++i) {
    edges.emplace_back(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng), i);
    for (std::size_t j = 0; j < i; ++j) {
      if (coin(rng)) edges.emplace_back(j, i);
    }
  }
  return Graph(n, edges);
}

void BM_ExpLog(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const Vector x = Vector::Random(d) * (0.5 / std::sqrt(static_cast<double>(d)));
  const Vector v = Vector::Random(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ball::log_map(x, ball::exp_map(x, v, kUnit), kUnit));
  }
}
BENCHMARK(BM_ExpLog)->Arg(2)->Arg(16)->Arg(128);

void BM_ParallelTransport(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const double s = 0.5 / std::sqrt(static_cast<double>(d));
  const Vector x = Vector::Random(d) * s;
  const Vector y = Vector::Random(d) * s;
  const Vector v = Vector::Random(d);
  for (auto _ : state) benchmark::DoNotOptimize(ball::parallel_transport(x, y, v, kUnit));
}
BENCHMARK(BM_ParallelTransport)->Arg(2)->Arg(16)->Arg(128);

void BM_OrcCurvatures(benchmark::State& state) {
  const Graph g = random_graph(static_cast<std::size_t>(state.range(0)), 0.1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(orc_curvatures(g, 0.5));
  state.counters["edges"] = static_cast<double>(g.num_edges());
}
BENCHMARK(BM_OrcCurvatures)->Arg(30)->Arg(100);

void BM_FlowEvaluation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = random_graph(n, 0.1, 2);
  const State z = random_initial_state(n, 16, 2, kUnit);
  const DiffusivityMatrix w = isotropic_weights(g);
  for (auto _ : state) benchmark::DoNotOptimize(hgde_flow(z, w, Activation::identity, kUnit));
}
BENCHMARK(BM_FlowEvaluation)->Arg(50)->Arg(200);

void BM_GlobalAttention(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const State z = random_initial_state(n, 16, 3, kUnit);
  const AttentionParams p = AttentionParams::random(16, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(global_diffusivity(z, p, kUnit));
}
BENCHMARK(BM_GlobalAttention)->Arg(50)->Arg(200);

void BM_SolverStep(benchmark::State& state) {
  const Graph g = random_graph(100, 0.1, 4);
  const State z = random_initial_state(100, 16, 4, kUnit);
  const DiffusivityMatrix w = isotropic_weights(g);
  const FlowFn flow = [&](const State& h, double) {
    return hgde_flow(h, w, Activation::identity, kUnit);
  };
  const bool rk = state.range(0) == 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rk ? hrk4_step(z, 0.0, 0.5, flow, kUnit)
                                : heuler_step(z, 0.0, 0.5, flow, kUnit));
  }
  state.SetLabel(rk ? "hrk4" : "heuler");
}
BENCHMARK(BM_SolverStep)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
