#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "infospike/alpha.hpp"
#include "infospike/patterns.hpp"

namespace infospike {

using Weights = Eigen::MatrixXd;  // inputs x kernels
using Rng = std::mt19937_64;

struct NeuronConfig {
    std::size_t inputs = 1;
    AlphaBasis basis = AlphaBasis::standard();
    double threshold = 1.0;
    double kappa = 0.1;
    double dt = 1.0;
    double refractory = 1.0;
    /// Short-term memory horizon in ms; 0 selects the basis support.
    double memory = 0.0;

    void validate() const;
    double memory_horizon() const;
    long memory_steps() const;
    long refractory_steps() const;
    std::size_t kernels() const { return basis.size(); }
    Weights zero_weights() const { return Weights::Zero(static_cast<Eigen::Index>(inputs), static_cast<Eigen::Index>(basis.size())); }
};

/// lambda(u) = exp((u - Th) / kappa).
double intensity(const NeuronConfig& cfg, double u);
/// Lambda = 1 - exp(-lambda dt).
double spike_probability(const NeuronConfig& cfg, double lambda);

/// Per-step surprisal contribution and its first two derivatives in u.
struct StepTerms {
    double h = 0.0;
    double dh = 0.0;
    double d2h = 0.0;
};

/// x = lambda*dt and log_x = log(lambda*dt) for the step; `spiked` picks the branch.
StepTerms step_terms(double x, double log_x, double kappa, bool spiked);

struct StepResult {
    bool fired = false;
    bool sampled = false;  // outcome of the stochastic draw (false when no draw was made)
    bool refractory = false;
    double u = 0.0;
    double lambda = 0.0;
    double prob = 0.0;
    double x = 0.0;      // lambda * dt, 0 inside the refractory window
    double log_x = 0.0;  // log(lambda * dt); -inf inside the refractory window

    /// Surprisal terms for the branch given by `spiked` (default: the realized one).
    StepTerms terms(double kappa, bool spiked) const;
    StepTerms terms(double kappa) const { return terms(kappa, fired); }
};

/// Discrete-time SMRM neuron: history of recent inputs, reset on output spikes.
class Neuron {
public:
    explicit Neuron(NeuronConfig cfg);
    Neuron(NeuronConfig cfg, Weights w);

    const NeuronConfig& config() const { return cfg_; }
    Weights& weights() { return w_; }
    const Weights& weights() const { return w_; }

    /// Clears history and output memory; the clock restarts at step 0.
    void reset();
    long now() const { return now_; }
    std::optional<long> last_output() const { return last_out_; }

    /// Queues an input spike on `channel` for the current step.
    void receive(std::size_t channel);
    /// Queues a stimulation spike for the current step.
    void stimulate();
    void set_stimulation(double weight, std::size_t kernel);

    /// Potential at the current step from the stored history.
    double potential() const;

    StepResult step(Rng& rng);
    /// Draws the stochastic spike but fires regardless when `force_fire` is set.
    StepResult step(Rng& rng, bool force_fire);
    StepResult step_forced(bool fire);

    /// Kernel sums a_ik evaluated at the last stepped time, before any reset.
    const Eigen::MatrixXd& alpha_sums() const { return a_; }
    /// Channels with non-zero rows in alpha_sums().
    const std::vector<std::size_t>& active_channels() const { return active_rows_; }

    std::size_t stored_spikes() const;

private:
    StepResult advance(std::optional<bool> forced, Rng* rng, bool force_fire);
    void prune();
    void clear_history();

    NeuronConfig cfg_;
    Weights w_;
    long memory_steps_ = 0;
    long refractory_steps_ = 1;
    std::vector<std::vector<double>> table_;  // table_[k][d] = alpha_k(d * dt)

    std::vector<std::deque<long>> history_;
    std::vector<std::size_t> active_;  // channels with stored spikes
    std::deque<long> stim_history_;
    double stim_weight_ = 0.0;
    std::size_t stim_kernel_ = 0;
    std::optional<long> last_out_;
    long now_ = 0;

    Eigen::MatrixXd a_;
    std::vector<std::size_t> active_rows_;
};

/// Input spikes grouped by discrete step: schedule[t] lists the channels firing at step t.
using InputSchedule = std::vector<std::vector<std::size_t>>;

InputSchedule schedule_inputs(const SpikePattern& x, double dt, long steps);
long horizon_steps(double horizon, double dt);
/// Grid indices of a train whose times must lie on the dt grid.
std::vector<long> train_steps(const SpikeTrain& y, double dt);
SpikeTrain steps_to_train(const std::vector<long>& steps, double dt, double horizon);

/// Discrete-time surprisal of y under teacher forcing.
double pattern_surprisal_discrete(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                  const SpikeTrain& y);

/// Surprisal of an explicit output mask over `steps` steps; +inf if infeasible when `allow_infeasible`.
double surprisal_of_steps(const NeuronConfig& cfg, const Weights& w, const InputSchedule& x,
                          const std::vector<bool>& fire, bool allow_infeasible = false);

/// Continuous-time membrane potential at t given outputs before t (reset semantics).
double potential_continuous(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                            double last_out, double t);

/// Kernel sums a_ik(t) from inputs in (last_out, t).
Eigen::MatrixXd alpha_sums_continuous(const NeuronConfig& cfg, const SpikePattern& x, double last_out, double t);

/// Trapezoid node of the integral over the live (non-refractory) parts of a teacher-forced run.
struct QuadNode {
    double t = 0.0;
    double weight = 0.0;
    double last_out = 0.0;  // -inf before the first output spike
};
std::vector<QuadNode> continuous_nodes(const NeuronConfig& cfg, const SpikeTrain& y, double step);

/// Differential surprisal -sum log lambda(t_y) + integral lambda ds.
double pattern_log_density_continuous(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                      const SpikeTrain& y, double step);

/// Samples an output train for input x (no learning).
SpikeTrain sample_output(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, Rng& rng);

}  // namespace infospike
