#include <benchmark/benchmark.h>

#include <random>

#include "centerward/entropic.hpp"
#include "centerward/geometry.hpp"
#include "centerward/semidiscrete.hpp"

using namespace centerward;

namespace {

DiscreteTarget gaussian_atoms(std::size_t n) {
  const PointSet s = builtin_density("gaussian")->quasi_sample(n);
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({s[i][0], s[i][1]});
  return DiscreteTarget::uniform(std::move(pts));
}

void BM_BuildLaguerre(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DiscreteTarget t = gaussian_atoms(n);
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = 0.1 * dot(t.points[i], t.points[i]);
  for (auto _ : state) benchmark::DoNotOptimize(build_laguerre(t, psi));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildLaguerre)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_CellMassU2(benchmark::State& state) {
  ConvexPolygon poly = ConvexPolygon::square(2.0);
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 8; ++k) poly.clip({u(gen), u(gen)}, 0.5, k);
  const ArcPolygon cell = intersect_unit_disk(poly);
  for (auto _ : state) benchmark::DoNotOptimize(u2_mass_unchecked(cell));
}
BENCHMARK(BM_CellMassU2);

void BM_DualAscent(benchmark::State& state) {
  const DiscreteTarget t = gaussian_atoms(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dual_ascent(t));
}
BENCHMARK(BM_DualAscent)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Sinkhorn(benchmark::State& state) {
  const int n_r = static_cast<int>(state.range(0));
  const BallGrid grid = build_ball_grid(2, n_r, 2 * n_r);
  const auto p = builtin_density("gaussian");
  const NodeSet target = target_grid(*p, p->support_radius(1e-3), 0.15);
  SinkhornOptions opt;
  opt.epsilons = {0.1, 0.03, 0.01};
  for (auto _ : state) benchmark::DoNotOptimize(sinkhorn_solve(grid.nodes, target, opt));
}
BENCHMARK(BM_Sinkhorn)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
