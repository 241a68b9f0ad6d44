#include <benchmark/benchmark.h>

#include <vector>

#include "wigner1d/kernels.hpp"
#include "wigner1d/transfer.hpp"

using namespace wigner1d;

namespace {

PathEnsemble ensemble(int paths) {
  EnsembleConfig cfg;
  cfg.paths = paths;
  cfg.slices = 64;
  cfg.seed = 3;
  cfg.proposal_rho = suggested_proposal_rho(1.0, 1.0);
  return PathEnsemble::sample(1.0, 1.0, cfg);
}

kernels::Backend backend(const benchmark::State& state) {
  return state.range(1) == 0 ? kernels::Backend::serial : kernels::Backend::openmp;
}

void BM_BuildKernel(benchmark::State& state) {
  const auto e = ensemble(static_cast<int>(state.range(0)));
  const kernels::LoopBlock loops{e.data(), e.size(), e.slices()};
  const kernels::KernelSpec spec{1.0, true, 1.0 / e.dt(), true};
  std::vector<float> k(e.size() * e.size());
  for (auto _ : state) {
    kernels::build_kernel_matrix(loops, spec, k, backend(state));
    benchmark::DoNotOptimize(k.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(k.size()));
  state.counters["threads"] = kernels::thread_count();
}

void BM_ApplyKernel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<float> k(n * n, 0.5F);
  std::vector<double> x(n, 1.0), y(n);
  for (auto _ : state) {
    kernels::apply(k, n, x, y, backend(state));
    benchmark::DoNotOptimize(y.data());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<long>(k.size() * sizeof(float)));
}

}  // namespace

// second argument: 0 = serial reference, 1 = OpenMP
BENCHMARK(BM_BuildKernel)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyKernel)->ArgsProduct({{2000, 8000}, {0, 1}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
