#include <benchmark/benchmark.h>

#include "steinpair/colored_graph.hpp"
#include "steinpair/curie_weiss.hpp"
#include "steinpair/heisenberg.hpp"
#include "steinpair/quadratic.hpp"
#include "steinpair/stats.hpp"

using namespace steinpair;

namespace {

void BM_TargetBuild(benchmark::State& state) {
    for (auto _ : state) {
        TargetLaw law = build_target(DriftSpec::monomial(1.0 / 3.0, 2), Interval{}, 0.0);
        benchmark::DoNotOptimize(law.c1());
    }
}
BENCHMARK(BM_TargetBuild)->Unit(benchmark::kMillisecond);

void BM_SteinEval(benchmark::State& state) {
    const TargetLaw law = build_target(DriftSpec::linear(1.0), Interval{}, 0.0);
    const SteinSolution s(law, 0.3);
    double w = -6.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.eval(w).fprime);
        w += 1e-4;
        if (w > 6.0) w = -6.0;
    }
}
BENCHMARK(BM_SteinEval);

void BM_CurieWeissSample(benchmark::State& state) {
    const CurieWeissModel model(BaseMeasure::two_point(), 1.0,
                                static_cast<int>(state.range(0)));
    RngStream rng = derive_stream(1, 2, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.w_of(model.sample_config(rng)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CurieWeissSample)->Arg(256)->Arg(4096);

void BM_CurieWeissKernel(benchmark::State& state) {
    const CurieWeissModel model(BaseMeasure::two_point(), 1.0,
                                static_cast<int>(state.range(0)));
    RngStream rng = derive_stream(1, 2, 4);
    const auto x = model.sample_config(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.cond_stats(x).ed2);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CurieWeissKernel)->Arg(256)->Arg(4096);

void BM_HeisenbergSample(benchmark::State& state) {
    const HeisenbergModel model(4.0, static_cast<int>(state.range(0)));
    RngStream rng = derive_stream(2, 2, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.w_of(model.sample_config(rng)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HeisenbergSample)->Arg(1000);

void BM_HeisenbergKernel(benchmark::State& state) {
    const HeisenbergModel model(4.0, static_cast<int>(state.range(0)));
    RngStream rng = derive_stream(2, 2, 4);
    const auto sigma = model.sample_config(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.cond_stats(sigma).edabs);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HeisenbergKernel)->Arg(1000);

void BM_ColoredGraphKernel(benchmark::State& state) {
    const ColoredGraphModel model(Graph::complete(static_cast<int>(state.range(0))),
                                  static_cast<int>(state.range(0)));
    RngStream rng = derive_stream(3, 2, 3);
    const auto xi = model.sample_config(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.cond_stats(xi).ed2);
    }
}
BENCHMARK(BM_ColoredGraphKernel)->Arg(128)->Arg(512);

void BM_QuadraticKernel(benchmark::State& state) {
    const QuadraticModel model(
        SymmetricMatrix::tridiagonal(static_cast<int>(state.range(0))),
        XLaw(XLaw::Kind::rademacher));
    RngStream rng = derive_stream(4, 2, 3);
    const auto x = model.sample_config(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.cond_stats(x).edabs);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QuadraticKernel)->Arg(1024);

void BM_KsDistance(benchmark::State& state) {
    RngStream rng = derive_stream(5, 2, 3);
    std::vector<double> xs(static_cast<std::size_t>(state.range(0)));
    for (auto& x : xs) x = rng.normal();
    const Ecdf ecdf(std::move(xs));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ks_distance(ecdf, [](double x) { return normal_cdf(x); }));
    }
}
BENCHMARK(BM_KsDistance)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
