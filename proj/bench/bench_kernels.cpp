// Parallel kernels against their serial twins.

#include <benchmark/benchmark.h>

#include "annimpute/imputer.hpp"
#include "annimpute/kernels.hpp"
#include "annimpute/ncf.hpp"
#include "annimpute/util/random.hpp"

using namespace annimpute;

namespace {

RealGrid random_grid(std::size_t n, std::size_t m) {
  Rng rng(7);
  RealGrid g(n, m);
  for (double& v : g.values()) v = rng.normal(0.0, 1.0);
  return g;
}

void BM_Covariance(benchmark::State& state) {
  const auto g = random_grid(static_cast<std::size_t>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::covariance(g));
}

void BM_CovarianceSerial(benchmark::State& state) {
  const auto g = random_grid(static_cast<std::size_t>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::covariance(g));
}

void BM_ColumnMeans(benchmark::State& state) {
  const auto g = random_grid(static_cast<std::size_t>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::column_means(g));
}

void BM_ColumnMeansSerial(benchmark::State& state) {
  const auto g = random_grid(static_cast<std::size_t>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::column_means(g));
}

// One NCF forward pass per cell of a complete matrix.
struct ImputeFixture {
  AnnotationMatrix train;
  NCFModel model;

  explicit ImputeFixture(std::size_t items) {
    const LabelSchema schema{0, 4, {}, 1};
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < items; ++i) cells.push_back({i, i % 50, static_cast<int>(i % 5)});
    train = AnnotationMatrix(items, 50, schema, std::move(cells));
    NCFHyper hyper;
    hyper.factors = 32;
    model = ncf::init_model(items, 50, schema, hyper);
  }
};

void BM_NcfImpute(benchmark::State& state) {
  ImputeFixture f(static_cast<std::size_t>(state.range(0)));
  auto predict = [&](std::size_t i, std::size_t j) { return ncf::predict(f.model, i, j); };
  for (auto _ : state) benchmark::DoNotOptimize(impute_cells(f.train, predict));
}

void BM_NcfImputeSerial(benchmark::State& state) {
  ImputeFixture f(static_cast<std::size_t>(state.range(0)));
  auto predict = [&](std::size_t i, std::size_t j) { return ncf::predict(f.model, i, j); };
  for (auto _ : state) benchmark::DoNotOptimize(serial::impute_cells(f.train, predict));
}

}  // namespace

BENCHMARK(BM_Covariance)->Arg(500)->Arg(2000);
BENCHMARK(BM_CovarianceSerial)->Arg(500)->Arg(2000);
BENCHMARK(BM_ColumnMeans)->Arg(500)->Arg(2000);
BENCHMARK(BM_ColumnMeansSerial)->Arg(500)->Arg(2000);
BENCHMARK(BM_NcfImpute)->Arg(1000)->Arg(5000);
BENCHMARK(BM_NcfImputeSerial)->Arg(1000)->Arg(5000);

BENCHMARK_MAIN();
