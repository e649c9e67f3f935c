#include <spafac/ca.hpp>
#include <spafac/projectors.hpp>
#include <spafac/sparse_gsvd.hpp>
#include <spafac/tuning.hpp>

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

using namespace spafac;

namespace {

CaInput random_input(Index I, Index J, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cell(1, 30);
  Matrix A(I, J);
  for (Index i = 0; i < A.size(); ++i) A.data()[i] = cell(rng);
  return preprocess_ca(ContingencyTable::make(A));
}

Vector random_vector(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = g(rng);
  return x;
}

void BM_AlsGsvd(benchmark::State& state) {
  const Index n = state.range(0);
  const auto in = random_input(n, n * 3 / 4, 1);
  const auto M = DiagonalMetric::inverse_of(in.r);
  const auto W = DiagonalMetric::inverse_of(in.c);
  for (auto _ : state) benchmark::DoNotOptimize(als_gsvd(in.X, M, W, 4));
}
BENCHMARK(BM_AlsGsvd)->Arg(20)->Arg(80)->Arg(320);

void BM_Gsgsvd(benchmark::State& state) {
  const Index n = state.range(0);
  const auto solver = state.range(1) == 0 ? StepSolver::Exact : StepSolver::Pocs;
  const auto in = random_input(n, n * 3 / 4, 2);
  SparseGsvdConfig cfg = SparseGsvdConfig::uniform(
      4, SparsityConstraint{0.5 * std::sqrt(static_cast<double>(n)), std::nullopt},
      SparsityConstraint{0.5 * std::sqrt(static_cast<double>(n * 3 / 4)), std::nullopt},
      DiagonalMetric::inverse_of(in.r), DiagonalMetric::inverse_of(in.c));
  cfg.solver = solver;
  for (auto _ : state) benchmark::DoNotOptimize(gsgsvd(in.X, cfg));
}
BENCHMARK(BM_Gsgsvd)->ArgsProduct({{20, 80}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ProjL1Ball(benchmark::State& state) {
  const Vector x = random_vector(state.range(0), 3);
  const double radius = 0.3 * x.lpNorm<1>();
  for (auto _ : state) benchmark::DoNotOptimize(proj_l1_ball(x, radius));
}
BENCHMARK(BM_ProjL1Ball)->Range(8, 4096);

void BM_ProjGroupUnitSphere(benchmark::State& state) {
  const Index n = state.range(0);
  const Vector x = random_vector(n, 4);
  std::vector<Index> ids(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i / 4;
  const SparsityConstraint c{std::max(1.0, 0.4 * std::sqrt(static_cast<double>((n + 3) / 4))), GroupPartition(ids)};
  for (auto _ : state) benchmark::DoNotOptimize(proj_group_unit_sphere(x, c));
}
BENCHMARK(BM_ProjGroupUnitSphere)->Range(8, 4096);

void BM_GridSearch(benchmark::State& state) {
  const auto in = random_input(21, 19, 5);
  GridSpec g;
  g.row_fractions = GridSpec::default_fractions();
  g.col_fractions = GridSpec::default_fractions();
  g.ranks = {2, 3};
  g.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_search(in, g));
}
BENCHMARK(BM_GridSearch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
