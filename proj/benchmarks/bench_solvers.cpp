#include <benchmark/benchmark.h>

#include "fewbody/few_body.hpp"
#include "fewbody/two_body.hpp"

namespace fb = fewbody;

namespace {

// Reference model at twice the pair spectral radius.
const fb::ComplexEnergy kZ(2.0 * 3.0625, fb::kReferenceEps);

void BM_MakeContext(benchmark::State& state) {
  const auto spec = fb::reference_model();
  for (auto _ : state) benchmark::DoNotOptimize(fb::make_context(spec, kZ));
}
BENCHMARK(BM_MakeContext)->Unit(benchmark::kMillisecond);

void BM_LsExact(benchmark::State& state) {
  const auto ctx = fb::make_context(fb::reference_model(), kZ);
  for (auto _ : state) benchmark::DoNotOptimize(fb::solve_ls_exact(ctx));
}
BENCHMARK(BM_LsExact)->Unit(benchmark::kMillisecond);

void BM_FaddeevStacked(benchmark::State& state) {
  const auto ctx = fb::make_context(fb::reference_model(), kZ);
  for (auto _ : state) benchmark::DoNotOptimize(fb::solve_faddeev_system(ctx));
}
BENCHMARK(BM_FaddeevStacked)->Unit(benchmark::kMillisecond);

void BM_AsymFaddeev(benchmark::State& state) {
  const auto ctx = fb::make_context(fb::reference_model(), kZ);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fb::solve_asym_faddeev(ctx, fb::PairMode::heitler_pair));
  }
}
BENCHMARK(BM_AsymFaddeev)->Unit(benchmark::kMillisecond);

void BM_FiniteSum(benchmark::State& state) {
  const auto ctx = fb::make_context(fb::reference_model(), kZ);
  const auto pair_t = fb::asym_pair_t(ctx, fb::PairMode::heitler_pair);
  for (auto _ : state) benchmark::DoNotOptimize(fb::finite_sum_T(pair_t, ctx.g1));
}
BENCHMARK(BM_FiniteSum)->Unit(benchmark::kMillisecond);

void BM_NystromOnShell(benchmark::State& state) {
  const auto ch = fb::TwoBodyChannel::make(0.5, 0, fb::PotentialModel::yamaguchi(-2.5, 1.0), 1.0,
                                           static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fb::solve_ls_onshell(ch));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NystromOnShell)->RangeMultiplier(2)->Range(24, 192)->Complexity();

}  // namespace

BENCHMARK_MAIN();
