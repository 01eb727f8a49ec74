// Serial reference kernels against their OpenMP counterparts. Set
// OMP_NUM_THREADS to control the parallel side.

#include <benchmark/benchmark.h>

#include <random>

#include "qcf/kernels.hpp"
#include "qcf/render.hpp"

using namespace qcf;

namespace {

const QtMatrix2& tr_half() {
  static const QtMatrix2 m = canonical_matrix(CanonicalKind::tr(Rational(1, 2)));
  return m;
}

const SupportApprox& support_d5() {
  static const SupportApprox s = enumerate_support(tr_half(), 5);
  return s;
}

const OccupancyGrid& mask_2592() {
  static const OccupancyGrid g = rasterize_support(support_d5(), 2592).occupancy();
  return g;
}

template <bool Parallel>
void EvaluateGrid(benchmark::State& state) {
  const FixedPointEvaluator f(tr_half());
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? kernels::evaluate_grid(f, n) : kernels::serial::evaluate_grid(f, n));
  state.SetItemsProcessed(state.iterations() * n * n);
}

template <bool Parallel>
void ExpandPaths(benchmark::State& state) {
  const auto maps = nonzero_maps(tr_half()).maps;
  std::vector<SignedRect> rects;
  std::vector<std::uint16_t> paths;
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    if (Parallel)
      kernels::expand_paths(maps, depth, rects, paths);
    else
      kernels::serial::expand_paths(maps, depth, rects, paths);
    benchmark::DoNotOptimize(rects.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rects.size()));
}

template <bool Parallel>
void Rasterize(benchmark::State& state) {
  const auto& rects = support_d5().rects();
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? kernels::rasterize(rects, res) : kernels::serial::rasterize(rects, res));
}

template <bool Parallel>
void BoxCounts(benchmark::State& state) {
  const std::vector<int> sides{1, 2, 3, 6, 12, 36, 72, 216};
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? kernels::box_counts(mask_2592(), sides)
                                      : kernels::serial::box_counts(mask_2592(), sides));
}

template <bool Parallel>
void TransformGapSup(benchmark::State& state) {
  const MultiMatrix t = make_step_matrix(3, Rational(1, 2));
  const EvaluableN pi = product_n(3), m = minimum_n(3);
  const int points = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? kernels::transform_gap_sup(t, pi, m, points)
                                      : kernels::serial::transform_gap_sup(t, pi, m, points));
  state.SetItemsProcessed(state.iterations() * points * points * points);
}

template <bool Parallel>
void PrefixSums(benchmark::State& state) {
  const std::vector<int> dims{64, 64, 64};
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> num(-9, 9);
  std::vector<Rational> base(64 * 64 * 64);
  for (auto& v : base) v = Rational(num(rng), 1 << (num(rng) & 7));
  for (auto _ : state) {
    state.PauseTiming();
    auto values = base;
    state.ResumeTiming();
    if (Parallel)
      kernels::prefix_sums(values, dims);
    else
      kernels::serial::prefix_sums(values, dims);
    benchmark::DoNotOptimize(values.data());
  }
}

}  // namespace

BENCHMARK(EvaluateGrid<false>)->Name("EvaluateGrid/serial")->Arg(257)->Unit(benchmark::kMillisecond);
BENCHMARK(EvaluateGrid<true>)->Name("EvaluateGrid/parallel")->Arg(257)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(ExpandPaths<false>)->Name("ExpandPaths/serial")->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(ExpandPaths<true>)->Name("ExpandPaths/parallel")->Arg(5)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(Rasterize<false>)->Name("Rasterize/serial")->Arg(2592)->Unit(benchmark::kMillisecond);
BENCHMARK(Rasterize<true>)->Name("Rasterize/parallel")->Arg(2592)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BoxCounts<false>)->Name("BoxCounts/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BoxCounts<true>)->Name("BoxCounts/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(TransformGapSup<false>)->Name("TransformGapSup/serial")->Arg(65)->Unit(benchmark::kMillisecond);
BENCHMARK(TransformGapSup<true>)->Name("TransformGapSup/parallel")->Arg(65)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(PrefixSums<false>)->Name("PrefixSums/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(PrefixSums<true>)->Name("PrefixSums/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
