#include <benchmark/benchmark.h>

#include "aquad/density.hpp"
#include "aquad/enumerate.hpp"
#include "aquad/geomsieve.hpp"
#include "aquad/modular.hpp"
#include "aquad/polynomial.hpp"
#include "aquad/sieve.hpp"

using namespace aquad;

namespace {

const QuadraticForm& isotropic() {
  static const QuadraticForm q = QuadraticForm::parse("1,1,1,-1");
  return q;
}

void BM_EnumerateIntegral(benchmark::State& state) {
  QuadricInstance inst(isotropic(), 1);
  const auto N = state.range(0);
  std::uint64_t points = 0;
  for (auto _ : state) {
    points = 0;
    enumeration::enumerate_integral(inst, N, [&](const IntegralPoint&) {
      ++points;
      return true;
    });
  }
  state.counters["points"] = static_cast<double>(points);
}
BENCHMARK(BM_EnumerateIntegral)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_EnumerateSIntegral(benchmark::State& state) {
  QuadricInstance inst(isotropic(), 1, SData{2, static_cast<int>(state.range(0))}, Box::parse("-1.5:1.5", 4));
  std::uint64_t points = 0;
  for (auto _ : state) {
    points = 0;
    enumeration::enumerate_s_integral(inst, [&](const IntegralPoint&) {
      ++points;
      return true;
    });
  }
  state.counters["points"] = static_cast<double>(points);
}
BENCHMARK(BM_EnumerateSIntegral)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_FfieldExact(benchmark::State& state) {
  auto q = QuadraticForm::parse("1,2,3,5,7");
  for (auto _ : state) benchmark::DoNotOptimize(modular::count_quadric_ffield_exact(q, 1, state.range(0)));
}
BENCHMARK(BM_FfieldExact)->Arg(31)->Arg(1009)->Arg(1000003);

void BM_CountPrimePower(benchmark::State& state) {
  modular::PrimePowerOptions opt;
  opt.convolution_cap = std::int64_t{1} << 22;
  for (auto _ : state) benchmark::DoNotOptimize(modular::count_prime_power(isotropic(), 1, 3, static_cast<int>(state.range(0)), opt));
}
BENCHMARK(BM_CountPrimePower)->DenseRange(1, 8)->Unit(benchmark::kMicrosecond);

void BM_PadicBallVolume(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(density::padic_ball_volume(isotropic(), 1, 2, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PadicBallVolume)->DenseRange(0, 6, 2)->Unit(benchmark::kMillisecond);

void BM_Sift(benchmark::State& state) {
  QuadricInstance inst(isotropic(), 1);
  auto points = enumeration::enumerate_integral(inst, 300);
  auto seq = sieve::build_sequence(points, Polynomial::parse("x1 + x2 + 3", 4), {2, 3});
  auto filter = sieve::primes_outside({2, 3});
  for (auto _ : state) benchmark::DoNotOptimize(sieve::sift(seq, filter, state.range(0)).sifted);
  state.counters["entries"] = static_cast<double>(points.size());
}
BENCHMARK(BM_Sift)->Arg(20)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_BadPointCount(benchmark::State& state) {
  QuadricInstance inst(isotropic(), 1, SData{2, 5}, Box::parse("-1.5:1.5", 4));
  modular::SubvarietySpec spec({Polynomial::parse("x1", 4), Polynomial::parse("x2", 4)});
  for (auto _ : state) benchmark::DoNotOptimize(geomsieve::bad_point_count(inst, spec, state.range(0), std::nullopt).bad);
}
BENCHMARK(BM_BadPointCount)->Arg(10)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_HalfdimCount(benchmark::State& state) {
  const auto B = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(geomsieve::halfdim_count(1, {1, 1}, 3 * B * B + 1, B).count);
}
BENCHMARK(BM_HalfdimCount)->RangeMultiplier(4)->Range(64, 4096)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
