// Serial reference vs OpenMP kernels for the objective and its gradient.

#include <benchmark/benchmark.h>

#include "../tests/support/desk.hpp"
#include "nlsm/kernels.hpp"
#include "nlsm/solver.hpp"

namespace {

struct Problem {
    nlsm::Dataset ds;
    nlsm::Architecture arch;
    nlsm::WeightPoint wp;
    std::vector<std::size_t> rows;

    Problem(std::size_t n, int depth)
        : ds(nlsm::testing::synthetic_dataset(n, 16, 4, 11))
    {
        arch.depth = depth;
        arch.num_classes = 4;
        arch.input_dim = 16;
        arch.alpha = nlsm::make_alpha(12, 3.0, 5);
        if (depth == 2)
            arch.beta = nlsm::make_alpha(8, 2.0, 6);
        arch = nlsm::with_min_p(arch, ds);
        wp = nlsm::init_weights(arch, 1);
        for (std::size_t i = 0; i < n; ++i)
            rows.push_back(i);
    }
};

template <bool Parallel>
void gradient(benchmark::State& state)
{
    const Problem p(static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        auto g = Parallel ? nlsm::kernels::gradient_sum_omp(p.arch, p.wp, p.ds, p.rows)
                          : nlsm::kernels::gradient_sum_serial(p.arch, p.wp, p.ds, p.rows);
        benchmark::DoNotOptimize(g.w.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void objective(benchmark::State& state)
{
    const Problem p(static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        double v = Parallel ? nlsm::kernels::objective_sum_omp(p.arch, p.wp, p.ds, p.rows)
                            : nlsm::kernels::objective_sum_serial(p.arch, p.wp, p.ds, p.rows);
        benchmark::DoNotOptimize(v);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void sizes(benchmark::internal::Benchmark* b)
{
    for (int depth : {1, 2})
        for (int n : {1000, 20000})
            b->Args({n, depth});
    b->ArgNames({"n", "depth"})->UseRealTime();
}

}  // namespace

BENCHMARK(gradient<false>)->Name("gradient/serial")->Apply(sizes);
BENCHMARK(gradient<true>)->Name("gradient/omp")->Apply(sizes);
BENCHMARK(objective<false>)->Name("objective/serial")->Apply(sizes);
BENCHMARK(objective<true>)->Name("objective/omp")->Apply(sizes);

BENCHMARK_MAIN();
