#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "infospike/entropy.hpp"
#include "infospike/oracles.hpp"
#include "testing.hpp"

using namespace infospike;

namespace {

struct Case {
    NeuronConfig cfg;
    Weights w;
    SpikePattern x;
    int steps = 0;
};

Case random_case(std::mt19937_64& g, int i, int max_steps = 10) {
    Case c;
    c.cfg.inputs = 2;
    c.cfg.kappa = 0.3 + 0.1 * (i % 4);
    c.cfg.refractory = 1.0 + (i % 3);
    c.steps = 4 + i % (max_steps - 3);
    c.x = testutil::random_pattern(g, 2, c.steps, 0.3);
    c.w = testutil::random_weights(g, 2, 3, -0.5, 2.0);
    return c;
}

double rel_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-10});
}

double cosine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a.array() * b.array()).sum() / (a.norm() * b.norm());
}

}  // namespace

TEST(EntropyExact, SingleStepAtHalf) {
    NeuronConfig cfg;
    cfg.kappa = 1.0;
    cfg.threshold = -std::log(std::log(2.0));  // lambda dt = ln 2
    EXPECT_NEAR(entropy_exact(cfg, cfg.zero_weights(), SpikePattern(1, 1.0), 1), std::log(2.0), 1e-14);
}

TEST(EntropyExact, TwoIndependentSteps) {
    NeuronConfig cfg;
    cfg.kappa = 1.0;
    EXPECT_NEAR(entropy_exact(cfg, cfg.zero_weights(), SpikePattern(1, 2.0), 2), 1.23465712973792288, 1e-13);
}

TEST(EntropyExact, BoundsAndOracleAgreement) {
    std::mt19937_64 g(1);
    for (int i = 0; i < 40; ++i) {
        const Case c = random_case(g, i);
        const double H = entropy_exact(c.cfg, c.w, c.x, c.steps);
        EXPECT_GE(H, 0.0);
        EXPECT_LE(H, c.steps * std::log(2.0) + 1e-12);
        const auto dist = oracles::enumerate_output_distribution(c.cfg, c.w, c.x, c.steps);
        double ref = 0.0;
        for (const auto& e : dist)
            if (e.probability > 0.0) ref -= e.probability * std::log(e.probability);
        EXPECT_NEAR(H, ref, 1e-10);
    }
}

TEST(EntropyExact, RejectsLongHorizon) {
    NeuronConfig cfg;
    EXPECT_THROW(entropy_exact(cfg, cfg.zero_weights(), SpikePattern(1, 20.0), 17), std::invalid_argument);
}

TEST(EntropyGradient, MatchesFiniteDifferences) {
    std::mt19937_64 g(2);
    int checked = 0;
    for (int i = 0; checked < 100; ++i) {
        const Case c = random_case(g, i, 9);
        const EntropyEval e = entropy_gradient_exact(c.cfg, c.w, c.x, c.steps);
        if (e.grad.norm() < 1e-4) continue;  // below the finite-difference resolution
        ++checked;
        const Eigen::MatrixXd fd = oracles::fd_gradient(
            [&](const Weights& w) { return entropy_exact(c.cfg, w, c.x, c.steps); }, c.w, 1e-5);
        EXPECT_LT(rel_norm(e.grad, fd), 1e-5) << "case " << i;
    }
}

TEST(EntropyGradient, VanishesWhenDeterministic) {
    NeuronConfig cfg;
    cfg.threshold = 10.0;
    SpikePattern x(1, 6.0);
    x.add(0, 0.0);
    EXPECT_LT(entropy_gradient_exact(cfg, Weights::Constant(1, 3, 0.5), x, 6).grad.norm(), 1e-30);
}

TEST(Renewal, HierarchicalIdentityMatchesEnumeration) {
    std::mt19937_64 g(3);
    for (int i = 0; i < 60; ++i) {
        const Case c = random_case(g, i, 12);
        EXPECT_NEAR(entropy_renewal(c.cfg, c.w, c.x, c.steps), entropy_exact(c.cfg, c.w, c.x, c.steps), 1e-9);
    }
}

TEST(Renewal, WindowProbabilityMatchesEnumeration) {
    std::mt19937_64 g(4);
    for (int i = 0; i < 30; ++i) {
        const Case c = random_case(g, i, 12);
        const long lo = i % c.steps, hi = std::min<long>(c.steps - 1, lo + 2);
        double ref = 0.0;
        for (const auto& e : oracles::enumerate_output_distribution(c.cfg, c.w, c.x, c.steps)) {
            const std::uint32_t win = ((1u << (hi + 1)) - 1u) & ~((1u << lo) - 1u);
            if (e.mask & win) ref += e.probability;
        }
        EXPECT_NEAR(window_spike_probability(c.cfg, c.w, c.x, c.steps, lo, hi), ref, 1e-12);
    }
}

TEST(HatEntropy, BelowFullEntropyAndEqualOnOneStep) {
    std::mt19937_64 g(5);
    for (int i = 0; i < 40; ++i) {
        const Case c = random_case(g, i);
        const HatEval h = hat_entropy(c.cfg, c.w, c.x, c.steps);
        EXPECT_LE(h.H, entropy_exact(c.cfg, c.w, c.x, c.steps) + 1e-12);
        double mass = h.empty;
        for (double p : h.first_spike) mass += p;
        EXPECT_NEAR(mass, 1.0, 1e-12);
        EXPECT_NEAR(hat_entropy(c.cfg, c.w, c.x, 1).H, entropy_exact(c.cfg, c.w, c.x, 1), 1e-14);
    }
}

TEST(HatEntropy, GradientMatchesEnumeratedClassesByFd) {
    std::mt19937_64 g(6);
    int checked = 0;
    for (int i = 0; checked < 100; ++i) {
        const Case c = random_case(g, i, 10);
        const auto f = [&](const Weights& w) {
            return oracles::enumerated_hat_entropy(oracles::enumerate_output_distribution(c.cfg, w, c.x, c.steps),
                                                   c.steps);
        };
        const HatEval h = hat_entropy(c.cfg, c.w, c.x, c.steps);
        EXPECT_NEAR(h.H, f(c.w), 1e-10);
        if (h.grad.norm() < 1e-4) continue;
        ++checked;
        EXPECT_LT(rel_norm(h.grad, oracles::fd_gradient(f, c.w, 1e-5)), 1e-5) << "case " << i;
    }
}

TEST(OnlineEntropy, SilentNeuronKeepsOneTerm) {
    NeuronConfig cfg;
    cfg.threshold = 30.0;
    Neuron n(cfg, Weights::Constant(1, 3, 0.5));
    OnlineEntropy oe(n, {0.1, 50.0});
    Rng rng(1);
    for (long t = 0; t < 500; ++t) {
        oe.step(n, t % 20 == 0 ? std::vector<std::size_t>{0} : std::vector<std::size_t>{}, rng);
        EXPECT_EQ(oe.live_terms(), 1u);
    }
    EXPECT_GE(oe.applied_terms(), 9u);
    EXPECT_LT((n.weights() - Weights::Constant(1, 3, 0.5)).norm(), 1e-9);
}

TEST(OnlineEntropy, LiveTermsStayBounded) {
    NeuronConfig cfg;
    cfg.threshold = 1.0;
    cfg.kappa = 0.3;
    Neuron n(cfg, Weights::Constant(1, 3, 0.3));
    OnlineEntropy oe(n, {0.0, 0.0});
    Rng rng(2);
    long spikes = 0;
    const long steps = 100000;
    for (long t = 0; t < steps; ++t) spikes += oe.step(n, t % 7 == 0 ? std::vector<std::size_t>{0} : std::vector<std::size_t>{}, rng).fired;
    const double rate = static_cast<double>(spikes) / static_cast<double>(steps);
    ASSERT_GT(spikes, 0);
    const double bound = 1.0 + std::ceil(20.0 * rate * static_cast<double>(cfg.memory_steps()));
    EXPECT_LE(static_cast<double>(oe.peak_live_terms()), bound);
}

TEST(OnlineEntropy, LowRateDirectionMatchesExactGradient) {
    std::mt19937_64 g(7);
    int checked = 0;
    for (int i = 0; i < 400 && checked < 15; ++i) {
        NeuronConfig cfg;
        cfg.inputs = 2;
        cfg.kappa = 0.3;
        cfg.threshold = 2.0;
        const SpikePattern x = testutil::random_pattern(g, 2, 8.0, 0.3);
        const Weights w = testutil::random_weights(g, 2, 3, -0.3, 1.2);
        if (window_spike_probability(cfg, w, x, 8, 0, 7) > 0.2) continue;  // not low-rate
        const Eigen::MatrixXd exact = entropy_gradient_exact(cfg, w, x, 8).grad;
        if (exact.norm() < 1e-8) continue;
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(2, 3);
        Rng rng(100 + static_cast<unsigned>(i));
        for (int rep = 0; rep < 200; ++rep) {
            Neuron n(cfg, w);
            OnlineEntropy oe(n, {1.0, 0.0});
            const InputSchedule sched = schedule_inputs(x, cfg.dt, 8);
            for (long t = 0; t < 8; ++t) oe.step(n, sched[static_cast<std::size_t>(t)], rng);
            oe.flush(n);
            acc += w - n.weights();
        }
        ++checked;
        EXPECT_GT(cosine(acc, exact), 0.9) << "case " << i;
    }
    EXPECT_GT(checked, 10);
}

TEST(OnlineEntropy, ToyReducesEntropy) {
    NeuronConfig cfg;
    cfg.inputs = 2;
    Weights w(2, 3);
    w << 0.1, 0.7, 0.3, 0.1, 0.6, 0.3;
    SpikePattern x(2, 60.0);
    x.add(0, 0.0);
    x.add(1, 30.0);
    Neuron n(cfg, w);
    const long steps = 60;
    const double H0 = entropy_renewal(cfg, w, x, steps);
    Rng rng(3);
    for (int it = 0; it < 100; ++it) entropy_iteration(n, x, 0.01, rng);
    EXPECT_LT(entropy_renewal(cfg, n.weights(), x, steps), 0.5 * H0);
}
