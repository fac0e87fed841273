#include <gtest/gtest.h>

#include <algorithm>

#include "infospike/network.hpp"

using namespace infospike;

namespace {

long first_fire(Network& net, std::size_t node, std::size_t input, long at, long horizon, Rng& rng) {
    for (long t = 0; t < horizon; ++t) {
        std::vector<std::size_t> ext;
        if (t == at) ext.push_back(input);
        net.tick(ext, rng, true);
        const auto& f = net.fired();
        if (std::find(f.begin(), f.end(), node) != f.end()) return t;
    }
    return -1;
}

NetworkLearning forced() {
    NetworkLearning l;
    l.supervised_mode = SupervisedMode::teacher_forced;
    return l;
}

}  // namespace

TEST(Network, EmptyGraphHasNoOutputs) {
    Network net;
    Rng rng(1);
    for (int t = 0; t < 5; ++t) EXPECT_TRUE(net.tick({}, rng, true).empty());
}

TEST(Network, DelayedTeacherArrivesAfterDelayPlusLatency) {
    for (long d : {1L, 2L, 5L}) {
        Network net(forced());
        const auto in = net.add_input();
        const auto n = net.add_neuron(NeuronConfig{});
        const auto del = net.add_delay(d);
        net.connect(in, del);
        net.connect(del, n, Pin::teaching);
        net.finalize();
        Rng rng(3);
        const long t0 = 4;
        EXPECT_EQ(first_fire(net, n, in, t0, 40, rng), t0 + d + 1) << "d=" << d;
    }
}

TEST(Network, OutputSeesDelayAtSameStep) {
    Network net;
    const auto in = net.add_input();
    const auto del = net.add_delay(3);
    const auto direct = net.add_output();
    const auto late = net.add_output();
    net.connect(in, direct);
    net.connect(in, del);
    net.connect(del, late);
    net.finalize();
    Rng rng(1);
    std::vector<long> seen_direct, seen_late;
    for (long t = 0; t < 12; ++t) {
        std::vector<std::size_t> ext;
        if (t == 2) ext.push_back(in);
        for (auto o : net.tick(ext, rng, false)) (o == direct ? seen_direct : seen_late).push_back(t);
    }
    EXPECT_EQ(seen_direct, std::vector<long>{2});
    EXPECT_EQ(seen_late, std::vector<long>{5});
}

TEST(Network, SpikeIsNotSeenAtEmissionStep) {
    // Delivery takes one step and alpha(0) = 0, so the first response is two steps later.
    NeuronConfig cfg;
    Network net;
    const auto in = net.add_input();
    const auto n = net.add_neuron(cfg);
    net.connect(in, n);
    net.finalize();
    net.neuron(n).weights().setConstant(50.0);
    Rng rng(2);
    EXPECT_EQ(first_fire(net, n, in, 3, 10, rng), 5);
}

TEST(Network, RejectsBadWiring) {
    Network net;
    const auto in = net.add_input();
    const auto out = net.add_output();
    const auto n = net.add_neuron(NeuronConfig{});
    const auto del = net.add_delay(1);
    EXPECT_THROW(net.connect(in, 99), std::out_of_range);
    EXPECT_THROW(net.connect(99, n), std::out_of_range);
    EXPECT_THROW(net.connect(n, in), std::invalid_argument);
    EXPECT_THROW(net.connect(out, n), std::invalid_argument);
    EXPECT_THROW(net.connect(in, del, Pin::teaching), std::invalid_argument);
    EXPECT_THROW(net.connect(in, out, Pin::reward), std::invalid_argument);
    EXPECT_THROW(net.add_delay(0), std::invalid_argument);
    net.connect(in, n);
    Rng rng(1);
    EXPECT_THROW(net.tick({n}, rng, false), std::invalid_argument);
    EXPECT_THROW(net.tick({42}, rng, false), std::out_of_range);
    EXPECT_THROW(net.add_input(), std::logic_error);
}

TEST(Network, SensoryEdgesDefineInputs) {
    Network net;
    const auto a = net.add_input();
    const auto b = net.add_input();
    const auto n = net.add_neuron(NeuronConfig{});
    net.connect(a, n);
    net.connect(b, n);
    net.connect(a, n, Pin::teaching);
    net.finalize();
    EXPECT_EQ(net.neuron(n).config().inputs, 2u);
    EXPECT_EQ(net.sensory_sources(n), (std::vector<std::size_t>{a, b}));
    EXPECT_EQ(net.edge_count(Pin::sensory), 2u);
    EXPECT_EQ(net.edge_count(Pin::teaching), 1u);
}

TEST(Network, DeterministicUnderSeed) {
    auto run = [](std::uint64_t seed) {
        NeuronConfig cfg;
        cfg.kappa = 0.3;
        Network net;
        const auto in = net.add_input();
        const auto a = net.add_neuron(cfg);
        const auto b = net.add_neuron(cfg);
        net.connect(in, a);
        net.connect(a, b);
        net.connect(b, a);
        net.finalize();
        net.neuron(a).weights().setConstant(0.4);
        net.neuron(b).weights().setConstant(0.6);
        Rng rng(seed);
        std::vector<std::vector<std::size_t>> log;
        for (long t = 0; t < 300; ++t) {
            std::vector<std::size_t> ext;
            if (t % 7 == 0) ext.push_back(in);
            net.tick(ext, rng, false);
            log.push_back(net.fired());
        }
        return log;
    };
    EXPECT_EQ(run(11), run(11));
    EXPECT_NE(run(11), run(12));
}

TEST(Memory, WiringCounts) {
    auto m = build_memory(5, NeuronConfig{});
    EXPECT_EQ(m.cells.size(), 5u);
    EXPECT_EQ(m.net.edge_count(Pin::sensory), 25u);
    EXPECT_EQ(m.net.edge_count(Pin::teaching), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
        const auto& src = m.net.sensory_sources(m.cells[i]);
        EXPECT_EQ(src.size(), 5u);
        EXPECT_EQ(std::count(src.begin(), src.end(), m.cells[i]), 0);
        EXPECT_EQ(std::count(src.begin(), src.end(), m.inputs[i]), 1);
        EXPECT_TRUE(m.net.neuron(m.cells[i]).weights().isZero());
    }
}

TEST(Memory, CanvasScaleAndTooSmall) {
    auto m = build_memory(160, NeuronConfig{});
    EXPECT_EQ(m.net.edge_count(Pin::sensory), 160u * 160u);
    EXPECT_THROW(build_memory(1, NeuronConfig{}), std::invalid_argument);
    EXPECT_THROW(build_memory(0, NeuronConfig{}), std::invalid_argument);
}

TEST(Memory, UntrainedRecallReturnsClue) {
    auto m = build_memory(4, NeuronConfig{});
    SpikePattern p(4, 20.0);
    p.add(0, 2);
    p.add(1, 5);
    p.add(2, 9);
    p.add(3, 13);
    Rng rng(5);
    store(m, p, 0, rng);
    const SpikePattern clue = p.first_spikes(1);
    const SpikePattern r = recall(m, clue, 20.0, rng);
    EXPECT_EQ(r.spike_count(), 1u);
    const auto k = DistanceKernel::gaussian(1.0, 0.25);
    EXPECT_NEAR(pattern_distance(recall(m, SpikePattern(4, 20.0), 20.0, rng), p, k), 4.0, 1e-6);
}

TEST(Memory, FrozenRecallIsStationary) {
    NeuronConfig cfg;
    cfg.kappa = 0.3;
    NetworkLearning learning;
    learning.supervised_mode = SupervisedMode::teacher_forced;
    auto m = build_memory(4, cfg, learning);
    SpikePattern p(4, 20.0);
    for (std::size_t c = 0; c < 4; ++c) p.add(c, 2.0 + 3.0 * static_cast<double>(c));
    Rng rng(7);
    store(m, p, 10, rng);
    const Weights w = m.net.neuron(m.cells[2]).weights();
    Rng a(9), b(9);
    const SpikePattern r1 = recall(m, p.first_spikes(1), 20.0, a);
    const SpikePattern r2 = recall(m, p.first_spikes(1), 20.0, b);
    EXPECT_EQ(write_pattern(r1), write_pattern(r2));
    EXPECT_EQ(m.net.neuron(m.cells[2]).weights(), w);
}

TEST(Memory, StoreRejectsShapeMismatch) {
    auto m = build_memory(3, NeuronConfig{});
    Rng rng(1);
    EXPECT_THROW(store(m, SpikePattern(4, 10.0), 1, rng), std::invalid_argument);
    EXPECT_THROW(recall(m, SpikePattern(2, 10.0), 10.0, rng), std::invalid_argument);
}

TEST(Pixels, RoundTripAndFlattening) {
    const std::string text = "# drawing\n0 0 1\n1 2 3.5\n7 14 9\n";
    const SpikePattern p = read_pixels(text, 20.0);
    EXPECT_EQ(p.channels(), canvas_channels);
    EXPECT_EQ(p.channel(0).size(), 1u);
    EXPECT_EQ(p.channel(15 * 1 + 2).times(), std::vector<double>{3.5});
    EXPECT_EQ(p.channel(15 * 7 + 14).size(), 1u);
    EXPECT_EQ(write_pixels(p), "0 0 1\n1 2 3.5\n7 14 9\n");
    EXPECT_THROW(read_pixels("8 0 1\n", 20.0), std::invalid_argument);
    EXPECT_THROW(read_pixels("0 15 1\n", 20.0), std::invalid_argument);
    EXPECT_THROW(read_pixels("0 0 25\n", 20.0), std::invalid_argument);
    EXPECT_THROW(read_pixels("0 0\n", 20.0), std::invalid_argument);
}
