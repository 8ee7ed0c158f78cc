#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fractal_zeta/merom.hpp"
#include "fractal_zeta/quasi.hpp"
#include "fractal_zeta/tubes.hpp"
#include "fractal_zeta/zeta.hpp"

using namespace fzeta;

namespace {

const double kCantorD = std::log(2.0) / std::log(3.0);

ZetaEvalConfig with_delta(double d) {
    ZetaEvalConfig cfg;
    cfg.delta = d;
    return cfg;
}

void BM_TubeGapSumCantor(benchmark::State& state) {
    const auto set = make_cantor(2, 1.0 / 3.0);
    double t = 1e-9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tube_gapsum(set, t));
        t = t < 1e-2 ? t * 1.7 : 1e-9;
    }
}
BENCHMARK(BM_TubeGapSumCantor);

void BM_TubeGapSumAString(benchmark::State& state) {
    const auto set = make_astring(1.0);
    double t = 1e-9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tube_gapsum(set, t));
        t = t < 1e-2 ? t * 1.7 : 1e-9;
    }
}
BENCHMARK(BM_TubeGapSumAString);

void BM_GrillTubeSliced(benchmark::State& state) {
    const auto tube = tube_model(make_grill(make_cantor(2, 1.0 / 3.0), 1));
    for (auto _ : state) benchmark::DoNotOptimize(tube(1e-4));
}
BENCHMARK(BM_GrillTubeSliced)->Unit(benchmark::kMicrosecond);

void BM_DistanceZetaCantorNumeric(benchmark::State& state) {
    const auto tube = tube_model(make_cantor(2, 1.0 / 3.0));
    const auto cfg = with_delta(1.0 / 6.0);
    const cplx s(kCantorD + 0.2, static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(distance_zeta(tube, s, cfg));
}
BENCHMARK(BM_DistanceZetaCantorNumeric)->Arg(0)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_DistanceZetaCantorClosedForm(benchmark::State& state) {
    const auto model = cantor_model(2, 1.0 / 3.0, 1.0 / 6.0);
    const cplx s(kCantorD + 0.2, 10.0);
    for (auto _ : state) benchmark::DoNotOptimize(model(s));
}
BENCHMARK(BM_DistanceZetaCantorClosedForm);

void BM_DirectZeta1D(benchmark::State& state) {
    const auto set = make_cantor(2, 1.0 / 3.0);
    const auto cfg = with_delta(1.0 / 6.0);
    const cplx s(kCantorD + 0.2, 10.0);
    for (auto _ : state) benchmark::DoNotOptimize(distance_zeta_direct_1d(set, s, cfg));
}
BENCHMARK(BM_DirectZeta1D)->Unit(benchmark::kMicrosecond);

void BM_ResidueFitContour(benchmark::State& state) {
    const auto model = cantor_tube_model(2, 1.0 / 3.0, 1.0 / 6.0);
    for (auto _ : state) benchmark::DoNotOptimize(residue_fit(model.eval, kCantorD, 0.1, ResidueMethod::Contour));
}
BENCHMARK(BM_ResidueFitContour)->Unit(benchmark::kMicrosecond);

void BM_PoleEnumeration(benchmark::State& state) {
    const auto model = union_model({{2, 1.0 / 3.0}, {3, std::pow(3.0, -1.0 / kCantorD)}}, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(model.dims.enumerate(static_cast<double>(state.range(0))));
}
BENCHMARK(BM_PoleEnumeration)->Arg(100)->Arg(1000);

void BM_QuasiCertificate(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(build_quasiperiodic(0.5, {2, 3, 5, 7}));
}
BENCHMARK(BM_QuasiCertificate)->Unit(benchmark::kMicrosecond);

void BM_QuasiSpectrum(benchmark::State& state) {
    const auto q = build_quasiperiodic(0.5, {2, 3});
    const auto tube = tube_model(q.set);
    const int n = static_cast<int>(state.range(0));
    const auto samples = sample_profile(tube, 0.5, 8.0, 40.0 / n, n);
    for (auto _ : state) benchmark::DoNotOptimize(quasi_spectrum(samples, 40.0 / n));
}
BENCHMARK(BM_QuasiSpectrum)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
