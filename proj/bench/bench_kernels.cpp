// Serial reference kernels against their OpenMP/SIMD counterparts.

#include <benchmark/benchmark.h>

#include <span>
#include <vector>

#include "sensakit/kde.hpp"
#include "sensakit/kernels/kde_sums.hpp"
#include "sensakit/kernels/prim.hpp"
#include "sensakit/rng.hpp"

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  sensakit::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

template <auto Kernel>
void pair_sums(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = normals(n, 1), y = normals(n, 2);
  const std::vector<std::span<const double>> xs{x};
  const double h = sensakit::scott_bandwidth(n);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(xs, y, h));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

template <auto Kernel>
void prim(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = normals(n, 3), y = normals(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, y));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

}  // namespace

BENCHMARK(pair_sums<sensakit::kernels::serial::gaussian_pair_sums>)->Name("pair_sums/serial")->Arg(1000)->Arg(4000);
BENCHMARK(pair_sums<sensakit::kernels::parallel::gaussian_pair_sums>)->Name("pair_sums/parallel")->Arg(1000)->Arg(4000);
BENCHMARK(prim<sensakit::kernels::serial::prim>)->Name("prim/serial")->Arg(1000)->Arg(4000);
BENCHMARK(prim<sensakit::kernels::parallel::prim>)->Name("prim/parallel")->Arg(1000)->Arg(4000);

BENCHMARK_MAIN();
