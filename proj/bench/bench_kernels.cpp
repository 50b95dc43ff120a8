// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "qv/montecarlo.hpp"
#include "qv/pricer.hpp"

using namespace qv;

namespace {

const ModelSpec kModel(HestonParams{0.5, 0.2, 0.3, 0.0});
const MarketState kState{100, 0.2, 0.0, 0.0};

void mc_paths(benchmark::State& st, bool parallel) {
    mc::McConfig cfg;
    cfg.n_paths = st.range(0);
    for (auto _ : st) {
        auto s = parallel ? mc::simulate_terminals(kModel, {}, kState, 1.0, cfg)
                          : mc::simulate_terminals_serial(kModel, {}, kState, 1.0, cfg);
        benchmark::DoNotOptimize(s.spot.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0) * mc::resolved_steps(cfg, 1.0));
}

void tvo_price(benchmark::State& st, Exec exec) {
    const ContractSpec c{TvoCall{0.1, 100}, 3.0};
    for (auto _ : st) {
        auto r = ContourPricer(kModel, {}, c, kState, {}, std::nullopt, exec).run();
        benchmark::DoNotOptimize(r.price.value);
    }
}

void transform_eval(benchmark::State& st, const ModelSpec& m) {
    const TransformQuery q{cplx(1.3, 0.4), cplx(0.7, 0.05), 0.2, 1.0};
    for (auto _ : st) benchmark::DoNotOptimize(fundamental_transform(q, m));
}

} // namespace

BENCHMARK_CAPTURE(mc_paths, parallel, true)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(mc_paths, serial, false)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(tvo_price, parallel, Exec::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(tvo_price, serial, Exec::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(transform_eval, heston, ModelSpec(HestonParams{0.5, 0.2, 0.3, -0.4}));
BENCHMARK_CAPTURE(transform_eval, three_halves, ModelSpec(ThreeHalvesParams{2.0, 0.2, 0.8, -0.5}));
BENCHMARK_CAPTURE(transform_eval, garch, ModelSpec(GarchParams{0.1, 0.4}));

BENCHMARK_MAIN();
