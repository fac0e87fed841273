#pragma once

#include <Eigen/Dense>

#include <deque>
#include <limits>
#include <vector>

#include "infospike/neuron.hpp"
#include "infospike/supervised.hpp"

namespace infospike {

struct EntropyEval {
    double H = 0.0;
    Eigen::MatrixXd grad;
};

/// Output entropy over `steps` steps by enumerating all 2^steps patterns (steps <= 16).
double entropy_exact(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, int steps);
/// Entropy and its exact gradient sum_y P(y) dh(y) (1 - h(y)) by enumeration.
EntropyEval entropy_gradient_exact(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, int steps);

/// Exact entropy by the renewal recursion H = H^ + sum_t P{t} H(.|t); O(steps^2), any horizon.
double entropy_renewal(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, long steps);
/// Exact probability of at least one output spike in steps [lo, hi].
double window_spike_probability(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, long steps,
                                long lo, long hi);

struct HatEval {
    double H = 0.0;  // entropy of {empty} U {first spike at t}
    Eigen::MatrixXd grad;
    double empty = 0.0;             // P{no spike}
    std::vector<double> first_spike;  // P{t}, one entry per step
};

/// Hat-space entropy and gradient over steps [0, steps) from the resting state.
HatEval hat_entropy(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, long steps);

/// One live term of the online entropy gradient: the hat-space entropy from `start`
/// evaluated along a shadow trajectory that stays silent after `start`.
struct HatTermState {
    long start = 0;
    long end = std::numeric_limits<long>::max();  // exclusive
    Neuron shadow;
    double log_empty = 0.0;  // -sum x over the steps seen so far
    Eigen::MatrixXd grad_empty;
    Eigen::MatrixXd grad;
    double hat = 0.0;
    double mass = 0.0;  // sum of P{t} seen so far

    explicit HatTermState(const Neuron& state, long start_step);
    /// Consumes one step; the shadow must already hold this step's inputs.
    void advance(const Weights& w, double kappa);
    /// Gradient including the empty class.
    Eigen::MatrixXd total_gradient() const;
    double total_hat() const;
};

struct OnlineEntropyOptions {
    double gamma = 0.01;
    /// Longest term in ms; 0 leaves terms open until an output spike caps them.
    double term_cap = 0.0;
};

/// Online entropy minimization: each own output spike opens a term, and every live term
/// is capped at t_out + t_M.
class OnlineEntropy {
public:
    OnlineEntropy(const Neuron& n, OnlineEntropyOptions opt);

    /// Delivers `inputs`, steps the neuron stochastically and applies expired terms.
    StepResult step(Neuron& n, const std::vector<std::size_t>& inputs, Rng& rng);
    /// Same with the output given (teacher forcing).
    StepResult step_forced(Neuron& n, const std::vector<std::size_t>& inputs, bool fire);
    /// Applies every live term and reopens one term at the neuron's current state.
    void flush(Neuron& n);

    std::size_t live_terms() const { return terms_.size(); }
    std::size_t peak_live_terms() const { return peak_; }
    std::size_t applied_terms() const { return applied_; }

private:
    void after_step(Neuron& n, const StepResult& r);
    void apply(Neuron& n, const HatTermState& t);
    void open(const Neuron& n);

    OnlineEntropyOptions opt_;
    long memory_steps_ = 0;
    long cap_steps_ = 0;
    std::deque<HatTermState> terms_;
    std::size_t peak_ = 0;
    std::size_t applied_ = 0;
};

/// One presentation of x with online entropy minimization; terms are flushed at the end.
/// Returns the sampled output steps.
std::vector<long> entropy_iteration(Neuron& n, const SpikePattern& x, double gamma, Rng& rng);

enum class Phase { supervised, unsupervised, both };

struct PhaseSpec {
    Phase phase = Phase::supervised;
    int iterations = 0;
};

struct CompositeOptions {
    double gamma_sup = 0.01;
    double gamma_uns = 0.01;
    long window = 1;  // half-width in steps of the desired-spike window
};

struct CompositeRecord {
    int iteration = 0;
    Phase phase = Phase::supervised;
    double entropy = 0.0;             // exact, after the iteration
    double desired_probability = 0.0;  // exp(-h(y_d))
    double window_probability = 0.0;   // P(spike within +-window of the first desired spike)
    Eigen::MatrixXd weights;
};

/// Supervised, unsupervised or combined presentations; "both" runs the supervised
/// presentation first, then the unsupervised one.
std::vector<CompositeRecord> composite_train(Neuron& n, const SpikePattern& x, const SpikeTrain& y_d,
                                             const std::vector<PhaseSpec>& schedule, const CompositeOptions& opt,
                                             Rng& rng);

const char* phase_name(Phase p);

}  // namespace infospike
