#include <benchmark/benchmark.h>

#include <cmath>

#include "infospike/entropy.hpp"
#include "infospike/gridenv.hpp"
#include "infospike/network.hpp"
#include "infospike/rng.hpp"
#include "infospike/supervised.hpp"

using namespace infospike;

namespace {

SpikePattern random_pattern(Rng& g, std::size_t channels, double horizon, double rate) {
    SpikePattern p(channels, horizon);
    std::bernoulli_distribution b(rate);
    for (std::size_t c = 0; c < channels; ++c)
        for (long t = 0; t < horizon_steps(horizon, 1.0); ++t)
            if (b(g)) p.add(c, static_cast<double>(t));
    return p;
}

Weights random_weights(Rng& g, std::size_t inputs) {
    std::uniform_real_distribution<double> u(-0.2, 0.5);
    Weights w(static_cast<Eigen::Index>(inputs), 3);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = u(g);
    return w;
}

void BM_NeuronStep(benchmark::State& state) {
    NeuronConfig cfg;
    cfg.inputs = static_cast<std::size_t>(state.range(0));
    Rng g(1);
    Neuron n(cfg, random_weights(g, cfg.inputs));
    std::bernoulli_distribution b(0.05);
    for (auto _ : state) {
        for (std::size_t c = 0; c < cfg.inputs; ++c)
            if (b(g)) n.receive(c);
        benchmark::DoNotOptimize(n.step(g));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NeuronStep)->Arg(2)->Arg(20)->Arg(160);

void BM_SurprisalGradient(benchmark::State& state) {
    NeuronConfig cfg;
    cfg.inputs = 10;
    Rng g(2);
    const double T = static_cast<double>(state.range(0));
    const SpikePattern x = random_pattern(g, cfg.inputs, T, 0.05);
    const Weights w = random_weights(g, cfg.inputs);
    const SpikeTrain y(T, {std::floor(T / 4.0), std::floor(T / 2.0)});
    for (auto _ : state) benchmark::DoNotOptimize(surprisal_with_gradient(cfg, w, x, y).h);
}
BENCHMARK(BM_SurprisalGradient)->Arg(50)->Arg(200);

void BM_EntropyRenewal(benchmark::State& state) {
    NeuronConfig cfg;
    cfg.inputs = 2;
    Rng g(3);
    const long steps = state.range(0);
    const SpikePattern x = random_pattern(g, 2, static_cast<double>(steps), 0.1);
    const Weights w = random_weights(g, 2);
    for (auto _ : state) benchmark::DoNotOptimize(entropy_renewal(cfg, w, x, steps));
}
BENCHMARK(BM_EntropyRenewal)->Arg(30)->Arg(60)->Arg(120);

void BM_MemoryTick(benchmark::State& state) {
    NeuronConfig cfg;
    NetworkLearning learning;
    learning.supervised_mode = SupervisedMode::teacher_forced;
    MemoryNetwork m = build_memory(static_cast<std::size_t>(state.range(0)), cfg, learning);
    Rng g(4);
    std::vector<std::size_t> ext;
    long t = 0;
    for (auto _ : state) {
        ext.clear();
        if (t % 3 == 0) ext.push_back(m.inputs[static_cast<std::size_t>(t / 3) % m.n]);
        benchmark::DoNotOptimize(m.net.tick(ext, g, true).size());
        ++t;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MemoryTick)->Arg(20)->Arg(120);

void BM_GridTraining(benchmark::State& state) {
    const auto arch = static_cast<Architecture>(state.range(0));
    GridConfig world_cfg;
    world_cfg.width = world_cfg.height = arch == Architecture::grouped_32 ? 10 : 3;
    NeuronConfig cfg;
    cfg.kappa = 0.2;
    TrainingOptions opt;
    opt.steps = 1000;
    opt.window = 1000;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng g = split_rng(seed++, "bench.grid");
        GridWorld world(world_cfg, g);
        GridAgent agent = build_grid_agent(arch, world.sensor_count(), cfg, {});
        benchmark::DoNotOptimize(run_training(world, agent, opt, g).reward);
    }
    state.SetItemsProcessed(state.iterations() * opt.steps);
    state.SetLabel(std::string(architecture_name(arch)));
}
BENCHMARK(BM_GridTraining)
    ->Arg(static_cast<int>(Architecture::one_layer_4))
    ->Arg(static_cast<int>(Architecture::grouped_16))
    ->Arg(static_cast<int>(Architecture::grouped_32))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
