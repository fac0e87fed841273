#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "infospike/reinforce.hpp"
#include "infospike/supervised.hpp"
#include "testing.hpp"

using namespace infospike;

namespace {

NeuronConfig rl_config() {
    NeuronConfig cfg;
    cfg.inputs = 3;
    cfg.kappa = 0.3;
    return cfg;
}

struct LoggedStep {
    double dh = 0.0;
    Eigen::MatrixXd a;
};

}  // namespace

TEST(Reinforce, ZeroInputsKeepTraceNearZero) {
    NeuronConfig cfg = rl_config();
    Neuron n(cfg);
    EligibilityTrace z(cfg.inputs, cfg.kernels(), 20.0);
    Rng rng(1);
    for (int t = 0; t < 500; ++t) rl_step(n, z, {}, 0, rng);
    EXPECT_EQ(z.value().norm(), 0.0);
}

TEST(Reinforce, DecayIsExact) {
    NeuronConfig cfg = rl_config();
    Neuron n(cfg, Weights::Constant(3, 3, 0.4));
    EligibilityTrace z(cfg.inputs, cfg.kernels(), 20.0);
    Rng rng(2);
    for (int t = 0; t < 10; ++t) rl_step(n, z, {static_cast<std::size_t>(t % 3)}, 0, rng);
    const Eigen::MatrixXd before = z.value();
    ASSERT_GT(before.norm(), 0.0);
    z.decay(1.0, 37);
    EXPECT_NEAR((z.value() - std::exp(-37.0 / 20.0) * before).norm(), 0.0, 1e-15 * before.norm() + 1e-300);
    z.decay(1.0, 100000);
    z.decay(1.0, 5);
    EXPECT_TRUE(z.value().allFinite());
}

TEST(Reinforce, TraceMatchesReplay) {
    std::mt19937_64 g(3);
    for (int inst = 0; inst < 20; ++inst) {
        NeuronConfig cfg = rl_config();
        Neuron n(cfg, testutil::random_weights(g, 3, 3, -0.5, 1.5));
        configure_stimulation(n);
        EligibilityTrace z(cfg.inputs, cfg.kernels(), 15.0);
        Rng rng(100 + static_cast<unsigned>(inst));
        std::bernoulli_distribution spike(0.1);
        std::vector<LoggedStep> log;
        for (int t = 0; t < 200; ++t) {
            std::vector<std::size_t> in;
            for (std::size_t c = 0; c < 3; ++c)
                if (spike(g)) in.push_back(c);
            const StepResult r = rl_step(n, z, in, spike(g) ? 1 : 0, rng);
            log.push_back({r.terms(cfg.kappa).dh, n.alpha_sums()});
        }
        Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(3, 3);
        for (const auto& s : log) ref = std::exp(-1.0 / 15.0) * ref + s.dh / 15.0 * s.a;
        EXPECT_LT((z.value() - ref).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Reinforce, TraceIsLinearAcrossEpisodes) {
    NeuronConfig cfg = rl_config();
    const Weights w = Weights::Constant(3, 3, 0.3);
    Neuron n(cfg, w);
    EligibilityTrace whole(3, 3, 20.0), second(3, 3, 20.0);
    Rng rng(4);
    Eigen::MatrixXd first;
    for (int t = 0; t < 120; ++t) {
        const StepResult r = rl_step(n, whole, {static_cast<std::size_t>(t % 3)}, 0, rng);
        if (t == 59) first = whole.value();
        if (t >= 60) second.update(n, r);
    }
    const Eigen::MatrixXd expect = std::exp(-60.0 / 20.0) * first + second.value();
    EXPECT_LT((whole.value() - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Reinforce, RewardWithZeroTraceIsNoop) {
    NeuronConfig cfg = rl_config();
    Neuron n(cfg, Weights::Constant(3, 3, 0.7));
    EligibilityTrace z(3, 3, 20.0);
    apply_reinforcement(n, z, +1, 0.5);
    EXPECT_EQ(n.weights(), Weights::Constant(3, 3, 0.7));
    EXPECT_THROW(apply_reinforcement(n, z, 0, 0.5), std::invalid_argument);
}

TEST(Reinforce, RewardRaisesProbabilityOfRecentOutput) {
    NeuronConfig cfg = rl_config();
    const Weights w0 = Weights::Constant(3, 3, 0.2);
    SpikePattern x(3, 12.0);
    x.add(0, 0.0);
    x.add(2, 1.0);
    SpikeTrain y(12.0, {4.0});
    const InputSchedule sched = schedule_inputs(x, cfg.dt, 12);
    Neuron n(cfg, w0);
    EligibilityTrace z(3, 3, 20.0);
    for (long t = 0; t < 12; ++t) {
        for (auto c : sched[static_cast<std::size_t>(t)]) n.receive(c);
        z.update(n, n.step_forced(t == 4));
    }
    const double before = pattern_surprisal_discrete(cfg, w0, x, y);
    apply_reinforcement(n, z, +1, 0.05);
    EXPECT_EQ(z.value().norm(), 0.0);
    EXPECT_LT(pattern_surprisal_discrete(cfg, n.weights(), x, y), before);
}

TEST(Reinforce, PunishIsNegatedReward) {
    NeuronConfig cfg = rl_config();
    const Weights w0 = Weights::Constant(3, 3, 0.5);
    Neuron a(cfg, w0), b(cfg, w0);
    EligibilityTrace za(3, 3, 20.0), zb(3, 3, 20.0);
    Rng ra(5), rb(5);
    for (int t = 0; t < 80; ++t) {
        rl_step(a, za, {static_cast<std::size_t>(t % 3)}, 0, ra);
        rl_step(b, zb, {static_cast<std::size_t>(t % 3)}, 0, rb);
    }
    apply_reinforcement(a, za, +1, 0.02);
    apply_reinforcement(b, zb, -1, 0.02);
    EXPECT_LT(((a.weights() - w0) + (b.weights() - w0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Reinforce, LongTraceMatchesSupervisedStep) {
    std::mt19937_64 g(6);
    for (int inst = 0; inst < 10; ++inst) {
        NeuronConfig cfg = rl_config();
        cfg.threshold = 0.6;
        const double T = 40.0;
        const SpikePattern x = testutil::random_pattern(g, 3, T, 0.1);
        const Weights w0 = testutil::random_weights(g, 3, 3, -0.3, 1.0);
        const double tau = 1e12, gamma = 0.01;
        Neuron n(cfg, w0);
        EligibilityTrace z(3, 3, tau);
        Rng rng(200 + static_cast<unsigned>(inst));
        const InputSchedule sched = schedule_inputs(x, cfg.dt, 40);
        std::vector<long> fired;
        for (long t = 0; t < 40; ++t)
            if (rl_step(n, z, sched[static_cast<std::size_t>(t)], 0, rng).fired) fired.push_back(t);
        apply_reinforcement(n, z, +1, gamma * cfg.dt * tau);
        const SpikeTrain y = steps_to_train(fired, cfg.dt, T);
        const Eigen::MatrixXd expect = w0 - gamma * cfg.dt * surprisal_gradient(cfg, w0, x, y);
        EXPECT_LT((n.weights() - expect).cwiseAbs().maxCoeff(), 1e-9) << "instance " << inst;
    }
}
