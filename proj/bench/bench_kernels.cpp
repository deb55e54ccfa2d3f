// Parallel versus serial dense kernels, plus one full boosting run.
//
//   ./bench_kernels --benchmark_filter=Gram

#include "boostsmooth/boost.hpp"
#include "boostsmooth/dense_kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace boostsmooth;

namespace {

Vector design(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
  return x;
}

const KernelSpec kSpec{KernelFamily::gaussian, 0.05};

template <Matrix (*Gram)(const Vector&, const Vector&, const KernelSpec&)>
void BM_Gram(benchmark::State& state) {
  const Vector x = design(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Gram(x, x, kSpec));
  state.SetComplexityN(state.range(0));
}

template <void (*Normalize)(Matrix&)>
void BM_Normalize(benchmark::State& state) {
  const Vector x = design(static_cast<std::size_t>(state.range(0)));
  const Matrix g = serial::kernel_gram(x, x, kSpec);
  for (auto _ : state) {
    Matrix w = g;
    Normalize(w);
    benchmark::DoNotOptimize(w.data());
  }
}

template <void (*Matvec)(const Matrix&, const Vector&, Vector&)>
void BM_Matvec(benchmark::State& state) {
  const Vector x = design(static_cast<std::size_t>(state.range(0)));
  const Matrix g = serial::kernel_gram(x, x, kSpec);
  Vector out;
  for (auto _ : state) {
    Matvec(g, x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <Matrix (*Knn)(const Vector&, const Vector&, std::size_t)>
void BM_Knn(benchmark::State& state) {
  const Vector x = design(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Knn(x, x, 10));
}

void BM_BoostKernel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Vector x = design(n);
  const Vector y = x.array().sin();
  const auto sm = build_smoother(DesignSample(x, y), KernelSmoothing{kSpec});
  BoostConfig c;
  c.max_iterations = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(run_boost(sm, y, c).last_completed_k);
}

}  // namespace

BENCHMARK(BM_Gram<serial::kernel_gram>)->Name("Gram/serial")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_Gram<par::kernel_gram>)->Name("Gram/parallel")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_Normalize<serial::normalize_rows>)->Name("Normalize/serial")->Arg(256)->Arg(2048);
BENCHMARK(BM_Normalize<par::normalize_rows>)->Name("Normalize/parallel")->Arg(256)->Arg(2048);
BENCHMARK(BM_Matvec<serial::matvec>)->Name("Matvec/serial")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_Matvec<par::matvec>)->Name("Matvec/parallel")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_Knn<serial::knn_weights>)->Name("Knn/serial")->Arg(256)->Arg(2048);
BENCHMARK(BM_Knn<par::knn_weights>)->Name("Knn/parallel")->Arg(256)->Arg(2048);
BENCHMARK(BM_BoostKernel)->Name("Boost/kernel_1000_iterations")->Arg(50)->Arg(500);

BENCHMARK_MAIN();
