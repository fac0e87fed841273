#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "infospike/neuron.hpp"
#include "infospike/oracles.hpp"
#include "testing.hpp"

using namespace infospike;

namespace {

std::vector<bool> mask_bits(std::uint32_t mask, int steps) {
    std::vector<bool> f(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) f[static_cast<std::size_t>(t)] = (mask >> t) & 1u;
    return f;
}

}  // namespace

TEST(Enumeration, RestingTwoStepEntropy) {
    NeuronConfig cfg;
    cfg.kappa = 1.0;
    const auto dist = oracles::enumerate_output_distribution(cfg, cfg.zero_weights(), SpikePattern(1, 2.0), 2);
    ASSERT_EQ(dist.size(), 4u);
    EXPECT_NEAR(dist[1].probability, 0.307799372444653646 * (1.0 - 0.307799372444653646), 1e-15);
    EXPECT_NEAR(oracles::enumerated_entropy(dist), 1.23465712973792288, 1e-13);
}

TEST(Enumeration, RefractoryMasksAreInfeasible) {
    NeuronConfig cfg;
    cfg.refractory = 2.0;
    const auto dist = oracles::enumerate_output_distribution(cfg, cfg.zero_weights(), SpikePattern(1, 4.0), 4);
    EXPECT_FALSE(dist[0b0011].feasible);
    EXPECT_EQ(dist[0b0011].probability, 0.0);
    EXPECT_TRUE(dist[0b0101].feasible);
}

TEST(Enumeration, NormalizedAndMatchesSurprisal) {
    std::mt19937_64 g(31);
    for (int inst = 0; inst < 60; ++inst) {
        NeuronConfig cfg;
        cfg.inputs = 2;
        cfg.kappa = 0.3 + 0.1 * (inst % 5);
        cfg.refractory = 1.0 + (inst % 3);
        const int steps = 6 + inst % 7;
        const SpikePattern x = testutil::random_pattern(g, 2, steps, 0.25);
        const Weights w = testutil::random_weights(g, 2, 3, -1.0, 1.5);
        const auto dist = oracles::enumerate_output_distribution(cfg, w, x, steps);
        double total = 0.0;
        const InputSchedule sched = schedule_inputs(x, cfg.dt, steps);
        for (const auto& e : dist) {
            total += e.probability;
            const double h = surprisal_of_steps(cfg, w, sched, mask_bits(e.mask, steps), true);
            if (!e.feasible) {
                EXPECT_TRUE(std::isinf(h));
                continue;
            }
            EXPECT_NEAR(e.probability, std::exp(-h), 1e-10);
        }
        EXPECT_NEAR(total, 1.0, 1e-9);
    }
}

TEST(Enumeration, RejectsLongHorizons) {
    NeuronConfig cfg;
    EXPECT_THROW(oracles::enumerate_output_distribution(cfg, cfg.zero_weights(), SpikePattern(1, 20.0), 17),
                 std::invalid_argument);
}

TEST(FiniteDifference, QuadraticGradientAndHessian) {
    Eigen::MatrixXd A(2, 2);
    A << 2.0, -1.0, 0.5, 3.0;
    const oracles::ScalarFn f = [&](const Eigen::MatrixXd& w) {
        return (A.array() * w.array() * w.array()).sum() + w(0, 1) * w(1, 0);
    };
    Eigen::MatrixXd w(2, 2);
    w << 0.3, -0.7, 1.1, 0.2;
    Eigen::MatrixXd exact = 2.0 * A.array() * w.array();
    exact(0, 1) += w(1, 0);
    exact(1, 0) += w(0, 1);
    EXPECT_LT((oracles::fd_gradient(f, w, 1e-5) - exact).norm(), 1e-8);
    const Eigen::MatrixXd H = oracles::fd_hessian(f, w, 1e-4);
    EXPECT_NEAR(H(0, 0), 2.0 * A(0, 0), 1e-5);
    EXPECT_NEAR(H(1, 2), 1.0, 1e-5);  // vec index 1 = (1,0), 2 = (0,1)
    EXPECT_NEAR(H(2, 1), 1.0, 1e-5);
    EXPECT_NEAR(H(0, 3), 0.0, 1e-5);
}

TEST(FiniteDifference, RichardsonRatioNearFour) {
    const oracles::ScalarFn f = [](const Eigen::MatrixXd& w) { return std::exp(w(0)) * std::sin(w(1)); };
    Eigen::MatrixXd w(1, 2);
    w << 0.4, 0.9;
    const auto r = oracles::fd_richardson(f, w, 1e-4);
    EXPECT_NEAR(r.ratio, 4.0, 0.5);
    EXPECT_NEAR(r.extrapolated(0), std::exp(0.4) * std::sin(0.9), 1e-9);
    EXPECT_NEAR(r.extrapolated(1), std::exp(0.4) * std::cos(0.9), 1e-9);
}

TEST(FiniteDifference, StepBounds) {
    const oracles::ScalarFn f = [](const Eigen::MatrixXd& w) { return w.sum(); };
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(1, 1);
    EXPECT_THROW(oracles::fd_gradient(f, w, 1e-2), std::invalid_argument);
    EXPECT_THROW(oracles::fd_gradient(f, w, 1e-10), std::invalid_argument);
}

TEST(Quadrature, GaussianIntegral) {
    const auto r = oracles::quadrature_integral(
        [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }, -8.0, 8.0, 0.05);
    EXPECT_NEAR(r.value, 1.0, 1e-10);
    EXPECT_LT(r.error_estimate, 1e-9);
}

TEST(Quadrature, ErrorEstimateTracksTrueError) {
    const auto r = oracles::quadrature_integral([](double t) { return t * t * t * t; }, 0.0, 1.0, 0.1);
    EXPECT_NEAR(r.value, 0.2, 3.0 * r.error_estimate + 1e-12);
    EXPECT_GT(r.error_estimate, 0.0);
    EXPECT_NEAR(oracles::trapezoid({0.0, 1.0, 2.0}, 0.5), 1.0, 1e-15);
}
