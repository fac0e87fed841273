#pragma once

#include <Eigen/Dense>

#include <vector>

#include "infospike/neuron.hpp"

namespace infospike {

struct RlParams {
    double tau_z = 20.0;  // ms
    double gamma_plus = 0.01;
    double gamma_minus = 0.01;
};

/// Discounted surprisal gradient g of the realized output; the trace z is -g.
class EligibilityTrace {
public:
    EligibilityTrace() = default;
    EligibilityTrace(std::size_t inputs, std::size_t kernels, double tau_z);

    /// g <- exp(-dt/tau) g + (dt/tau) dh/dt a for the step just taken by `n`.
    void update(const Neuron& n, const StepResult& r);
    /// Decay without a gradient contribution.
    void decay(double dt, long steps = 1);
    void reset();

    Eigen::MatrixXd value() const { return scale_ * g_; }
    double tau_z() const { return tau_z_; }

private:
    void renormalize();

    Eigen::MatrixXd g_;
    double scale_ = 1.0;
    double tau_z_ = 20.0;
};

/// Stimulation input on the fastest kernel with weight factor * threshold.
void configure_stimulation(Neuron& n, double factor = 0.5);

/// Delivers inputs and stimulation spikes, steps the neuron and updates the trace.
StepResult rl_step(Neuron& n, EligibilityTrace& z, const std::vector<std::size_t>& inputs, std::size_t stimulation,
                   Rng& rng);

/// Reward (sign +1): w -= gamma g. Punishment (sign -1): w += gamma g. The trace is reset.
void apply_reinforcement(Neuron& n, EligibilityTrace& z, int sign, double gamma);

}  // namespace infospike
