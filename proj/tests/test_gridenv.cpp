#include <gtest/gtest.h>

#include <cmath>

#include "infospike/gridenv.hpp"

using namespace infospike;

namespace {

ActuatorSpikes cmd(std::initializer_list<Actuator> on) {
    ActuatorSpikes a{};
    for (auto x : on) a[static_cast<std::size_t>(x)] = true;
    return a;
}

}  // namespace

TEST(GridWorld, LegalMove) {
    GridWorld w(GridConfig{}, {0, 0}, {2, 2});
    Rng rng(1);
    const EnvStep e = w.env_step(cmd({Actuator::up}), rng);
    EXPECT_EQ(w.agent(), (Cell{0, 1}));
    EXPECT_EQ(e.reward, 0);
    EXPECT_EQ(e.punish, 0);
    EXPECT_EQ(e.stimulation, 0);
    EXPECT_FALSE(e.consumed);
}

TEST(GridWorld, WallBumpPunishes) {
    GridWorld w(GridConfig{}, {1, 2}, {0, 0});
    Rng rng(1);
    const EnvStep e = w.env_step(cmd({Actuator::up}), rng);
    EXPECT_EQ(w.agent(), (Cell{1, 2}));
    EXPECT_EQ(e.punish, 1);
    EXPECT_EQ(e.punish_bump, 1);
}

TEST(GridWorld, AmbiguousCommandPunishesWithoutMoving) {
    GridWorld w(GridConfig{}, {1, 1}, {0, 0});
    Rng rng(1);
    const EnvStep e = w.env_step(cmd({Actuator::left, Actuator::right}), rng);
    EXPECT_EQ(w.agent(), (Cell{1, 1}));
    EXPECT_EQ(e.punish, 1);
    EXPECT_EQ(e.punish_ambiguous, 1);
}

TEST(GridWorld, AmbiguousAxisCancelsOtherAxisApplies) {
    GridWorld w(GridConfig{}, {1, 1}, {0, 0});
    Rng rng(1);
    const EnvStep e = w.env_step(cmd({Actuator::up, Actuator::left, Actuator::right}), rng);
    EXPECT_EQ(w.agent(), (Cell{1, 2}));
    EXPECT_EQ(e.punish_ambiguous, 1);
}

TEST(GridWorld, ConsumptionRewardsAndRespawnsAwayFromAgent) {
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        GridWorld w(GridConfig{}, {0, 0}, {1, 0});
        const EnvStep e = w.env_step(cmd({Actuator::right}), rng);
        ASSERT_TRUE(e.consumed);
        EXPECT_EQ(e.reward, 1);
        EXPECT_NE(w.resource(), w.agent());
        EXPECT_DOUBLE_EQ(w.energy(), 1.0 - GridConfig{}.energy_decay);
    }
}

TEST(GridWorld, EnergyDrivesStimulation) {
    GridConfig cfg;
    cfg.energy_decay = 1.0;
    cfg.stimulation_scale = 1.0;
    GridWorld w(cfg, {0, 0}, {2, 2});
    Rng rng(1);
    w.env_step(cmd({}), rng);
    EXPECT_EQ(w.energy(), 0.0);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(w.env_step(cmd({}), rng).stimulation, 1);
}

TEST(Sensors, SaturatedAndSilent) {
    GridConfig cfg;
    cfg.sensor_rate = 1.0;
    GridWorld w(cfg, {2, 1}, {0, 2});
    Rng rng(2);
    for (int i = 0; i < 50; ++i)
        EXPECT_EQ(w.sensor_spikes(rng), (std::vector<std::size_t>{5, 9 + 6}));
    cfg.sensor_rate = 0.0;
    GridWorld quiet(cfg, {2, 1}, {0, 2});
    for (int i = 0; i < 50; ++i) EXPECT_TRUE(quiet.sensor_spikes(rng).empty());
    EXPECT_EQ(quiet.sensor_count(), 18u);
}

TEST(Sensors, EmpiricalRateWithinThreeSigma) {
    GridConfig cfg;
    GridWorld w(cfg, {1, 1}, {2, 0});
    Rng rng(8);
    const int n = 10000;
    int agent = 0, res = 0;
    for (int i = 0; i < n; ++i)
        for (auto c : w.sensor_spikes(rng)) {
            if (c == w.agent_channel(w.agent())) ++agent;
            else if (c == w.resource_channel(w.resource())) ++res;
            else ADD_FAILURE() << "unoccupied channel " << c;
        }
    const double p = cfg.sensor_rate * cfg.dt;
    const double sigma = std::sqrt(n * p * (1 - p));
    EXPECT_LE(std::abs(agent - n * p), 3 * sigma);
    EXPECT_LE(std::abs(res - n * p), 3 * sigma);
}

TEST(Faults, FailureRate) {
    GridConfig cfg;
    cfg.width = 3;
    GridWorld w(cfg, {2, 0}, {0, 2});
    w.inject_fault(Actuator::left, Fault::fail(0.4));
    Rng rng(6);
    const int n = 10000;
    int moved = 0, punished = 0;
    for (int i = 0; i < n; ++i) {
        const EnvStep e = w.env_step(cmd({Actuator::left}), rng);
        punished += e.punish_fault;
        if (w.agent().x == 1) {
            ++moved;
            w.env_step(cmd({Actuator::right}), rng);
        }
    }
    const double sigma = std::sqrt(n * 0.4 * 0.6);
    EXPECT_LE(std::abs(moved - 6000), 3 * sigma);
    EXPECT_EQ(moved + punished, n);
}

TEST(Faults, OvershootBumpsNearWall) {
    GridWorld w(GridConfig{}, {1, 1}, {0, 0});
    w.inject_fault(Actuator::up, Fault::overshoot(2));
    Rng rng(1);
    const EnvStep e = w.env_step(cmd({Actuator::up}), rng);
    EXPECT_EQ(e.punish_bump, 1);
    EXPECT_EQ(w.agent(), (Cell{1, 2}));
    GridWorld far(GridConfig{5, 5}, {1, 0}, {4, 4});
    far.inject_fault(Actuator::up, Fault::overshoot(2));
    EXPECT_EQ(far.env_step(cmd({Actuator::up}), rng).punish, 0);
    EXPECT_EQ(far.agent(), (Cell{1, 2}));
    far.inject_fault(Actuator::up, Fault::none());
    far.env_step(cmd({Actuator::up}), rng);
    EXPECT_EQ(far.agent(), (Cell{1, 3}));
}

TEST(Faults, RejectsBadParameters) {
    EXPECT_THROW(Fault::fail(1.5), std::invalid_argument);
    EXPECT_THROW(Fault::overshoot(0), std::invalid_argument);
    EXPECT_THROW(parse_actuator("sideways"), std::invalid_argument);
    EXPECT_EQ(parse_actuator("left"), Actuator::left);
}

TEST(GridWorld, PositionStaysInBoundsAndPunishIsAttributed) {
    GridConfig cfg{4, 3};
    Rng rng(12);
    GridWorld w(cfg, rng);
    w.inject_fault(Actuator::left, Fault::fail(0.3));
    w.inject_fault(Actuator::up, Fault::overshoot(3));
    std::bernoulli_distribution coin(0.4);
    for (int i = 0; i < 20000; ++i) {
        ActuatorSpikes a{};
        for (auto& x : a) x = coin(rng);
        const EnvStep e = w.env_step(a, rng);
        ASSERT_GE(w.agent().x, 0);
        ASSERT_LT(w.agent().x, cfg.width);
        ASSERT_GE(w.agent().y, 0);
        ASSERT_LT(w.agent().y, cfg.height);
        ASSERT_GE(w.resource().x, 0);
        ASSERT_LT(w.resource().x, cfg.width);
        ASSERT_GE(w.resource().y, 0);
        ASSERT_LT(w.resource().y, cfg.height);
        ASSERT_EQ(e.punish, e.punish_bump + e.punish_ambiguous + e.punish_fault);
        ASSERT_GE(e.reward, 0);
        ASSERT_LE(e.punish, 2);
    }
}

TEST(GridAgent, ArchitecturesWireFourActuators) {
    for (auto a : {Architecture::one_layer_4, Architecture::one_layer_8, Architecture::recurrent_12,
                   Architecture::grouped_16, Architecture::grouped_32}) {
        const GridAgent g = build_grid_agent(a, 18, NeuronConfig{}, NetworkLearning{});
        EXPECT_EQ(g.sensors.size(), 18u);
        for (const auto& grp : g.groups) EXPECT_FALSE(grp.empty());
        EXPECT_EQ(parse_architecture(architecture_name(a)), a);
    }
    EXPECT_EQ(build_grid_agent(Architecture::grouped_32, 18, NeuronConfig{}, NetworkLearning{}).groups[0].size(), 8u);
    EXPECT_EQ(build_grid_agent(Architecture::recurrent_12, 18, NeuronConfig{}, NetworkLearning{}).net.neurons().size(),
              12u);
}

TEST(Training, ReproducibleAndAccounted) {
    auto run = [](std::uint64_t seed) {
        Rng rng(seed);
        GridWorld w(GridConfig{}, rng);
        NeuronConfig cfg;
        cfg.kappa = 0.2;
        GridAgent g = build_grid_agent(Architecture::one_layer_4, w.sensor_count(), cfg, NetworkLearning{});
        TrainingOptions opt;
        opt.steps = 3000;
        opt.window = 500;
        opt.record_steps = true;
        return run_training(w, g, opt, rng);
    };
    const TrainingResult a = run(3), b = run(3);
    EXPECT_EQ(step_csv(a), step_csv(b));
    EXPECT_EQ(window_csv(a), window_csv(b));
    ASSERT_EQ(a.windows.size(), 6u);
    EXPECT_EQ(a.windows.back().cumulative_reward, a.reward);
    EXPECT_EQ(a.punish, a.punish_bump + a.punish_ambiguous + a.punish_fault);
    EXPECT_EQ(static_cast<long>(a.consumption_steps.size()), a.reward);
}

TEST(Training, WiringMismatchThrows) {
    Rng rng(1);
    GridWorld w(GridConfig{}, rng);
    GridAgent g = build_grid_agent(Architecture::one_layer_4, 8, NeuronConfig{}, NetworkLearning{});
    EXPECT_THROW(run_training(w, g, TrainingOptions{}, rng), std::invalid_argument);
}
