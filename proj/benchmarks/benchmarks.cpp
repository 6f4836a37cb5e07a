#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "hybran/dataset.hpp"
#include "hybran/limit_cycle.hpp"
#include "hybran/nn.hpp"
#include "hybran/partition.hpp"
#include "hybran/reach.hpp"
#include "hybran/rng.hpp"
#include "hybran/train.hpp"

namespace {

using namespace hybran;

const Box kDomain({-4.0, -std::numbers::pi}, {4.0, std::numbers::pi});

NeuralNet random_net(std::size_t hidden, std::uint64_t seed) {
    return init_net(one_hidden(3, hidden, 2), seed);
}

void BM_Forward(benchmark::State& state) {
    const NeuralNet net = random_net(static_cast<std::size_t>(state.range(0)), 1);
    std::vector<double> in{0.3, -0.7, 0.5}, scratch, out;
    for (auto _ : state) {
        forward_into(net, in, scratch, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_Forward)->Arg(20)->Arg(200);

void BM_IntervalForward(benchmark::State& state) {
    const NeuralNet net = random_net(static_cast<std::size_t>(state.range(0)), 1);
    const Box in({0.0, -1.0, -1.3}, {0.5, -0.5, 1.7});
    for (auto _ : state) {
        Box out = interval_forward(net, in);
        benchmark::DoNotOptimize(out.lo.data());
    }
}
BENCHMARK(BM_IntervalForward)->Arg(20)->Arg(200);

void BM_Locate(benchmark::State& state) {
    const Partition p = make_partition(kDomain, {4, 3});
    Rng rng(3);
    std::vector<std::vector<double>> points;
    for (int i = 0; i < 1024; ++i)
        points.push_back({rng.uniform(-5, 5), rng.uniform(-4, 4)});
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(locate(p, points[i++ & 1023]).cell);
    }
}
BENCHMARK(BM_Locate);

void BM_SplitDispatch(benchmark::State& state) {
    const Partition p = make_partition(kDomain, {4, 3});
    const Box box({-0.5, -1.5}, {0.5, -0.5});
    for (auto _ : state) {
        auto frags = split_dispatch(p, box);
        benchmark::DoNotOptimize(frags.data());
    }
}
BENCHMARK(BM_SplitDispatch);

void BM_StepReach(benchmark::State& state) {
    const Partition p = make_partition(kDomain, {4, 3});
    std::vector<NeuralNet> nets;
    for (std::size_t q = 0; q < p.cell_count(); ++q) nets.push_back(random_net(20, q));
    const Box u_box({-1.3}, {1.7});
    const HybridAutomaton h = assemble(p, nets, {}, u_box);

    ReachConfig cfg;
    cfg.input_box = u_box;
    const auto frags = split_dispatch(p, Box({-0.6, -1.6}, {0.6, -0.4}));
    for (auto _ : state) {
        double escaped = 0.0;
        auto next = step_reach(h, frags, u_box, cfg, &escaped);
        benchmark::DoNotOptimize(next.data());
    }
}
BENCHMARK(BM_StepReach);

void BM_TrainEpoch(benchmark::State& state) {
    const auto traces = generate_traces(LimitCycleParams{}, 10, 150, kDomain, 5);
    const Partition p = make_partition(kDomain, {1, 1});
    const auto datasets = segment(traces, p);

    TrainConfig cfg;
    cfg.epochs = static_cast<int>(state.range(1));
    cfg.seed = 9;
    const Arch arch = one_hidden(3, static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        TrainResult r = train(datasets[0], arch, cfg);
        benchmark::DoNotOptimize(r.final_loss);
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_TrainEpoch)->Args({20, 10})->Args({200, 10})->Unit(benchmark::kMillisecond);

void BM_GenerateTraces(benchmark::State& state) {
    for (auto _ : state) {
        auto traces = generate_traces(LimitCycleParams{}, 50, 150, kDomain, 7);
        benchmark::DoNotOptimize(traces.data());
    }
}
BENCHMARK(BM_GenerateTraces)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
