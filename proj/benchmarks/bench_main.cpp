#include <benchmark/benchmark.h>

#include "hestonlab/analytic.hpp"
#include "hestonlab/greeks.hpp"
#include "hestonlab/implied_vol.hpp"
#include "hestonlab/mc.hpp"

using namespace hestonlab;

namespace {

const HestonParams kRef{0.04, 0.04, 1.2, 0.3, -0.5};

void BM_AnalyticCall(benchmark::State& st) {
    MarketSpec m;
    m.k = static_cast<double>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(analytic::price(m, kRef).value);
}
BENCHMARK(BM_AnalyticCall)->Arg(60)->Arg(100)->Arg(160)->Unit(benchmark::kMicrosecond);

void BM_ModelIv(benchmark::State& st) {
    const MarketSpec m;
    for (auto _ : st) benchmark::DoNotOptimize(iv::model_iv(kRef, m, 120.0));
}
BENCHMARK(BM_ModelIv)->Unit(benchmark::kMicrosecond);

// items = path steps
void BM_CrudeMc(benchmark::State& st) {
    const SimConfig cfg{st.range(0), 10000, 7, Scheme::crude};
    for (auto _ : st) benchmark::DoNotOptimize(mc::price_crude_mc(MarketSpec{}, kRef, cfg).value);
    st.SetItemsProcessed(st.iterations() * cfg.n_t * cfg.n_p);
}
BENCHMARK(BM_CrudeMc)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MixingMc(benchmark::State& st) {
    const SimConfig cfg{st.range(0), 10000, 7, Scheme::mixing};
    for (auto _ : st) benchmark::DoNotOptimize(mc::price_mixing_mc(MarketSpec{}, kRef, cfg).value);
    st.SetItemsProcessed(st.iterations() * cfg.n_t * cfg.n_p);
}
BENCHMARK(BM_MixingMc)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_PathwiseGreeks(benchmark::State& st) {
    const auto m = MarketSpec::from_forward(100, 100, 0.05, 1);
    const SimConfig cfg{250, 10000, 7, Scheme::mixing};
    for (auto _ : st) benchmark::DoNotOptimize(greeks::pathwise_greeks(m, kRef, cfg).delta);
    st.SetItemsProcessed(st.iterations() * cfg.n_t * cfg.n_p);
}
BENCHMARK(BM_PathwiseGreeks)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
