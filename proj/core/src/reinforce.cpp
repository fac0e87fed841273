#include "infospike/reinforce.hpp"

#include <cmath>
#include <stdexcept>

namespace infospike {

EligibilityTrace::EligibilityTrace(std::size_t inputs, std::size_t kernels, double tau_z)
    : g_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(inputs), static_cast<Eigen::Index>(kernels))), tau_z_(tau_z) {
    if (!(tau_z > 0.0)) throw std::invalid_argument("eligibility trace: tau_z must be positive");
}

void EligibilityTrace::renormalize() {
    g_ *= scale_;
    scale_ = 1.0;
}

void EligibilityTrace::decay(double dt, long steps) {
    scale_ *= std::exp(-dt * static_cast<double>(steps) / tau_z_);
    if (scale_ < 1e-150) renormalize();
}

void EligibilityTrace::update(const Neuron& n, const StepResult& r) {
    const double dt = n.config().dt;
    decay(dt);
    const double dh = r.terms(n.config().kappa).dh;  // lambda'(u) dt, or the spike branch
    if (dh == 0.0) return;
    const double c = dh / tau_z_ / scale_;
    for (auto ch : n.active_channels()) {
        const auto row = static_cast<Eigen::Index>(ch);
        g_.row(row) += c * n.alpha_sums().row(row);
    }
}

void EligibilityTrace::reset() {
    g_.setZero();
    scale_ = 1.0;
}

void configure_stimulation(Neuron& n, double factor) {
    n.set_stimulation(factor * n.config().threshold, n.config().basis.fastest());
}

StepResult rl_step(Neuron& n, EligibilityTrace& z, const std::vector<std::size_t>& inputs, std::size_t stimulation,
                   Rng& rng) {
    for (auto c : inputs) n.receive(c);
    for (std::size_t i = 0; i < stimulation; ++i) n.stimulate();
    const StepResult r = n.step(rng);
    z.update(n, r);
    return r;
}

void apply_reinforcement(Neuron& n, EligibilityTrace& z, int sign, double gamma) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("reinforcement sign must be +1 or -1");
    n.weights() -= static_cast<double>(sign) * gamma * z.value();
    z.reset();
}

}  // namespace infospike
