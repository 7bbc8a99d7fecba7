#include <benchmark/benchmark.h>

#include "qpspec/gaps.hpp"
#include "qpspec/kam.hpp"
#include "qpspec/rotnum.hpp"
#include "qpspec/spectrum.hpp"

using namespace qps;

static void BM_SturmCount(benchmark::State& st) {
  auto fr = golden_frequency();
  auto H = truncate(amo_potential(0.3), fr, {0.1}, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(eigen_count_below(H, 0.37));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_SturmCount)->RangeMultiplier(4)->Range(500, 32000)->Complexity(benchmark::oN);

static void BM_Eigenvalues(benchmark::State& st) {
  auto fr = golden_frequency();
  auto H = truncate(amo_potential(0.3), fr, {0.1}, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(eigenvalues(H));
}
BENCHMARK(BM_Eigenvalues)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_SpectralSample(benchmark::State& st) {
  auto fr = golden_frequency();
  auto V = amo_potential(0.3);
  for (auto _ : st)
    benchmark::DoNotOptimize(spectral_sample(V, fr, 5000, 8, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_SpectralSample)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_RotationNumber(benchmark::State& st) {
  auto fr = golden_frequency();
  auto c = Cocycle::schrodinger(amo_potential(0.3), 0.4, fr);
  for (auto _ : st) benchmark::DoNotOptimize(rotation_number(c, {0.0}, st.range(0)));
}
BENCHMARK(BM_RotationNumber)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_KamRun(benchmark::State& st) {
  auto fr = golden_frequency();
  MatrixSeries f(1, 3);
  f.set({1}, CMat2(cd(0.1, 0.2), cd(0.3), cd(0.0, -0.1), cd(-0.1, -0.2)));
  f.set({2}, CMat2(cd(0.2), cd(0.1, 0.1), cd(-0.2), cd(-0.2)));
  f.set({3}, CMat2(cd(0.0, 0.1), cd(-0.1), cd(0.2), cd(0.0, -0.1)));
  f = f * (1e-3 / f.l1_norm());
  auto c = Cocycle::kam_form(rotation(0.17), f, fr);
  for (auto _ : st) benchmark::DoNotOptimize(almost_reducibility_run(c, 6));
}
BENCHMARK(BM_KamRun)->Unit(benchmark::kMillisecond);

static void BM_Homogeneity(benchmark::State& st) {
  auto fr = golden_frequency();
  auto scan = spectrum_scan(amo_potential(0.3), fr, 2000, 8, 1e-3);
  for (auto _ : st)
    benchmark::DoNotOptimize(homogeneity_profile(scan, {1e-3, 1e-2, 1e-1}, 2000));
}
BENCHMARK(BM_Homogeneity)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
