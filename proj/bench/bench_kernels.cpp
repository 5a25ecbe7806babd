// Serial reference versus OpenMP path for each data-parallel kernel.
// Arg 0 selects serial, arg 1 parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "mtmc/approx.hpp"
#include "mtmc/coupling.hpp"
#include "mtmc/kernels.hpp"
#include "mtmc/samplers.hpp"
#include "mtmc/spectral.hpp"

using namespace mtmc;

namespace {

Execution policy(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

std::vector<double> random_values(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

Matrix random_matrix(std::size_t n, std::uint64_t seed)
{
  const auto v = random_values(n * n, seed);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = v[i * n + j];
  }
  return m;
}

void BM_NearestScan(benchmark::State& state)
{
  const std::size_t dim = 3;
  const auto points = random_values(200000 * dim, 1);
  const auto query = random_values(dim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::nearest_scan(points, dim, query, policy(state)));
}
BENCHMARK(BM_NearestScan)->Arg(0)->Arg(1);

void BM_VecMat(benchmark::State& state)
{
  const std::size_t n = 1024;
  const auto m = random_matrix(n, 3);
  const auto x = random_values(n, 4);
  std::vector<double> out(n);
  for (auto _ : state) {
    kernels::vec_mat(x, m, out, policy(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_VecMat)->Arg(0)->Arg(1);

void BM_MatMul(benchmark::State& state)
{
  const std::size_t n = 192;
  const auto a = random_matrix(n, 5);
  const auto b = random_matrix(n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::mat_mul(a, b, policy(state)));
}
BENCHMARK(BM_MatMul)->Arg(0)->Arg(1);

void BM_EvaluateOnGrid(benchmark::State& state)
{
  ApproximationState archive(2);
  const auto coords = random_values(4000, 7);
  for (std::size_t i = 0; i + 1 < coords.size(); i += 2) archive.insert(Point{coords[i], coords[i + 1]}, coords[i]);
  const auto grid = tensor_grid(Box{{0.0, 0.0}, {1.0, 1.0}}, 200);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_on_grid(archive, grid, policy(state)));
}
BENCHMARK(BM_EvaluateOnGrid)->Arg(0)->Arg(1);

void BM_CoupledRun(benchmark::State& state)
{
  auto a = random_values(16, 8);
  auto q = random_values(16, 9);
  a = normalized(a);
  q = normalized(q);
  const auto kernel = build_kernel(a, q);
  const auto cert = doeblin_epsilon(kernel, 1);
  std::vector<double> p0(16, 0.0);
  p0[0] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(coupled_run(kernel, cert, p0, 50, 2000, 1, policy(state)));
}
BENCHMARK(BM_CoupledRun)->Arg(0)->Arg(1);

void BM_RunChains(benchmark::State& state)
{
  const auto target = targets::mixture_of_bumps({{-1.5}, {1.5}}, {0.6, 0.6}, {1.0, 1.0});
  const auto proposal = Proposal::gaussian_random_walk(1, 2.0);
  std::vector<ChainConfig> configs(8);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    configs[i].length = 5000;
    configs[i].initial = Point{0.0};
    configs[i].seed = 1;
    configs[i].stream = i;
  }
  for (auto _ : state) benchmark::DoNotOptimize(run_chains(configs, target, proposal, policy(state)));
}
BENCHMARK(BM_RunChains)->Arg(0)->Arg(1);

} // namespace

BENCHMARK_MAIN();
