// Serial reference drivers against the OpenMP drivers on a 5 x 7 grid farm.
// Thread count follows OMP_NUM_THREADS.

#include "spimpute/estimators.hpp"
#include "spimpute/evaluation.hpp"
#include "spimpute/reference.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace spimpute;

struct Farm {
    FarmLayout layout = grid_layout(5, 7);
    FarmGraph graph = build_graph(layout, propose_grid_edges(layout));
    Panel panel;

    explicit Farm(std::size_t rows)
        : panel(apply_missingness(synth_panel(layout, {rows, 2.0, 0.95, 1}), {Mechanism::mcar, 0.02, 6, 2})) {}
};

const Farm& farm(std::size_t rows) {
    static const Farm big(5000);
    static const Farm small(300);
    return rows == 5000 ? big : small;
}

template <bool Parallel>
void location(benchmark::State& state) {
    const Farm& f = farm(5000);
    for (auto _ : state) {
        auto r = Parallel ? impute_location(f.panel, f.layout, Kernel::triweight)
                          : reference::impute_location(f.panel, f.layout, Kernel::triweight);
        benchmark::DoNotOptimize(r.filled.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.panel.rows()));
}

template <bool Parallel>
void unweighted(benchmark::State& state) {
    const Farm& f = farm(5000);
    for (auto _ : state) {
        auto r = Parallel ? impute_unweighted_graph(f.panel, f.graph, Kernel::triweight, 2)
                          : reference::impute_unweighted_graph(f.panel, f.graph, Kernel::triweight, 2);
        benchmark::DoNotOptimize(r.filled.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.panel.rows()));
}

template <bool Parallel>
void leave_one_out(benchmark::State& state) {
    const Farm& f = farm(300);
    EstimatorConfig cfg;
    cfg.method = static_cast<Method>(state.range(0));
    for (auto _ : state) {
        auto r = Parallel ? leave_one_out_eval(f.panel, f.layout, f.graph, cfg, Setup::incomplete)
                          : reference::leave_one_out_eval(f.panel, f.layout, f.graph, cfg, Setup::incomplete);
        benchmark::DoNotOptimize(r.mean_rmse);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.panel.rows()));
}

}  // namespace

BENCHMARK(location<false>)->Name("impute_location/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(location<true>)->Name("impute_location/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(unweighted<false>)->Name("impute_unweighted_graph/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(unweighted<true>)->Name("impute_unweighted_graph/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(leave_one_out<false>)->Name("loo/serial")->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(leave_one_out<true>)->Name("loo/openmp")->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
