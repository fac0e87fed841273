#pragma once

#include <Eigen/Dense>

#include <vector>

#include "infospike/neuron.hpp"

namespace infospike {

struct SurprisalEval {
    double h = 0.0;
    Eigen::MatrixXd grad;
};

/// Discrete surprisal and its exact weight gradient under teacher forcing.
SurprisalEval surprisal_with_gradient(const NeuronConfig& cfg, const Weights& w, const InputSchedule& x,
                                      const std::vector<bool>& fire);
SurprisalEval surprisal_with_gradient(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                      const SpikeTrain& y);
Eigen::MatrixXd surprisal_gradient(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                   const SpikeTrain& y);

struct HessianResult {
    Eigen::MatrixXd H;  // indexed by the column-major vectorization of the weights
    double min_eigenvalue = 0.0;
};

/// Exact Hessian of the discrete surprisal.
HessianResult surprisal_hessian(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                const SpikeTrain& y);
/// Hessian of the differential surprisal, integral of lambda'' a a^T by quadrature.
HessianResult surprisal_hessian_continuous(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                           const SpikeTrain& y, double step);
/// Gradient of the differential surprisal with the same quadrature nodes.
Eigen::MatrixXd surprisal_gradient_continuous(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                              const SpikeTrain& y, double step);

/// Running surprisal gradient g_ik.
class GradientAccumulator {
public:
    GradientAccumulator() = default;
    GradientAccumulator(std::size_t inputs, std::size_t kernels);

    /// Adds coef * a over the neuron's active rows.
    void add(const Neuron& n, double coef);
    void reset() { g_.setZero(); }
    const Eigen::MatrixXd& value() const { return g_; }

private:
    Eigen::MatrixXd g_;
};

enum class SupervisedEvent { hit, teacher_update, false_positive };

struct EventRecord {
    long step = 0;
    SupervisedEvent kind = SupervisedEvent::hit;
};

/// Per-step supervised rule usable inside a network: teacher spikes force an output spike.
class SupervisedRule {
public:
    SupervisedRule() = default;
    explicit SupervisedRule(const NeuronConfig& cfg);

    /// Online mode: stochastic output, updates on teacher-only and false-positive steps.
    StepResult step_online(Neuron& n, bool teacher, double gamma, Rng& rng, std::vector<EventRecord>* log = nullptr);
    /// Teacher-forced mode: the neuron spikes only on teacher steps.
    StepResult step_teacher_forced(Neuron& n, bool teacher, double gamma);
    void reset() { g_.reset(); }
    const GradientAccumulator& accumulator() const { return g_; }

private:
    GradientAccumulator g_;
};

struct IterationLog {
    double surprisal_before = 0.0;
    std::vector<long> output_steps;
    std::vector<EventRecord> events;
};

/// One presentation with spike generation disabled; the neuron is reset first.
IterationLog train_iteration_teacher_forced(Neuron& n, const SpikePattern& x, const SpikeTrain& y, double gamma);
/// One presentation with spike generation enabled; the neuron is reset first.
IterationLog train_iteration_online(Neuron& n, const SpikePattern& x, const SpikeTrain& y, double gamma, Rng& rng);

struct StdpPoint {
    double delta_t = 0.0;  // t_out - t_in
    double delta_w = 0.0;
};

/// Weight change of a single-kernel single-input neuron with one teacher spike at t_out,
/// integrated over [0, horizon] with the given quadrature step.
std::vector<StdpPoint> stdp_curve(const NeuronConfig& cfg, double w, const std::vector<double>& deltas, double t_out,
                                  double horizon, double step, double gamma);

}  // namespace infospike
