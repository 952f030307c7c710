#include <benchmark/benchmark.h>

#include "sparse_jacobi/corput.hpp"
#include "sparse_jacobi/fourier_decay.hpp"
#include "sparse_jacobi/gevrey_calculus.hpp"
#include "sparse_jacobi/kronecker_sum.hpp"
#include "sparse_jacobi/prufer_transfer.hpp"
#include "sparse_jacobi/spectral_measure.hpp"

using namespace sparse_jacobi;

namespace {

model::SparseModel sparse() {
  return model::SparseModel(std::vector<BigInt>{BigInt(4), BigInt(20), BigInt(84), BigInt(340)}, 0.7);
}

void BM_TruncatedSpectrum(benchmark::State& state) {
  const auto m = sparse();
  const auto L = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kron::truncated_spectrum(L, m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TruncatedSpectrum)->RangeMultiplier(4)->Range(64, 1024)->Complexity();

void BM_Density(benchmark::State& state) {
  const auto m = sparse();
  const BigInt N = m.truncation(4);
  double lambda = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral::ac_density(N, lambda, m));
    lambda = lambda > 1.9 ? -1.9 : lambda + 0.01;
  }
}
BENCHMARK(BM_Density);

void BM_Gamma(benchmark::State& state) {
  const auto m = sparse();
  const BigInt N = m.truncation(4);
  const spectral::TestFunction f(1.0, 0.4, 0.5, true);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(decay::gamma(t, f, N, m));
}
BENCHMARK(BM_Gamma)->Arg(10)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_PruferJets(benchmark::State& state) {
  const auto m = model::SparseModel(std::vector<BigInt>{BigInt(8), BigInt(72), BigInt(584)}, 0.6);
  const auto n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gevrey::prufer_jets<double>(1.1, m, 3, n));
}
BENCHMARK(BM_PruferJets)->Arg(6)->Arg(12)->Arg(24);

void BM_CorputKernel(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  const decay::Window w{};
  for (auto _ : state) benchmark::DoNotOptimize(decay::corput_kernel(t, 0.5 * t, t, w));
}
BENCHMARK(BM_CorputKernel)->Arg(10)->Arg(1000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
