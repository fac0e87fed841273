#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "infospike/neuron.hpp"
#include "infospike/reinforce.hpp"
#include "infospike/supervised.hpp"

namespace infospike {

enum class Pin { sensory, teaching, reward, punish, stimulate };
enum class NodeKind { neuron, delay, input, output };

enum class SupervisedMode { online, teacher_forced };

struct NetworkLearning {
    double gamma_supervised = 0.01;
    SupervisedMode supervised_mode = SupervisedMode::online;
    RlParams rl;
    double stimulation_factor = 0.5;
};

/// Synchronous spiking graph. A spike emitted at step t is seen by consumers at t+1;
/// a delay node of d steps re-emits at t+d what it sees at t+1.
/// Output nodes observe their sources at the step they fire.
class Network {
public:
    explicit Network(NetworkLearning learning = {});

    std::size_t add_input();
    std::size_t add_output();
    /// cfg.inputs is replaced by the number of sensory edges at finalize().
    std::size_t add_neuron(const NeuronConfig& cfg);
    std::size_t add_delay(long steps);
    void connect(std::size_t from, std::size_t to, Pin pin = Pin::sensory);
    /// Builds neuron state; weights start at zero.
    void finalize();
    bool finalized() const { return finalized_; }

    /// Clears dynamic state (neurons, queues, traces, clock); keeps weights.
    void reset();

    /// One global step. `external` lists input node indices spiking at this step.
    /// Returns the output nodes that received a spike.
    const std::vector<std::size_t>& tick(const std::vector<std::size_t>& external, Rng& rng, bool learning);

    long now() const { return now_; }
    std::size_t size() const { return nodes_.size(); }
    NodeKind kind(std::size_t node) const { return nodes_.at(node).kind; }
    const std::vector<std::size_t>& inputs() const { return inputs_; }
    const std::vector<std::size_t>& outputs() const { return outputs_; }
    const std::vector<std::size_t>& neurons() const { return neurons_; }
    Neuron& neuron(std::size_t node);
    const Neuron& neuron(std::size_t node) const;
    /// Source node of each sensory channel of a neuron, in channel order.
    const std::vector<std::size_t>& sensory_sources(std::size_t node) const;
    std::size_t edge_count(Pin pin) const;
    /// Nodes that emitted a spike at the last tick.
    const std::vector<std::size_t>& fired() const { return emitted_; }
    NetworkLearning& learning() { return learning_; }

private:
    struct Edge {
        std::size_t to;
        Pin pin;
        std::size_t channel;  // sensory channel index at the destination
    };
    struct Node {
        NodeKind kind = NodeKind::input;
        NeuronConfig cfg;
        long delay = 0;
        std::vector<Edge> out;
        std::vector<std::size_t> sensory;
        std::size_t teaching = 0, reward = 0, punish = 0, stimulate = 0;  // incoming edge counts

        // dynamic
        std::vector<Neuron> cell;  // empty or one
        SupervisedRule rule;
        EligibilityTrace trace;
        std::vector<long> pending;  // delay node emission steps
        std::vector<std::size_t> in_spikes;
        bool teacher = false;
        int reward_in = 0, punish_in = 0;
        std::size_t stim_in = 0;
        bool out_hit = false;
    };

    Node& checked(std::size_t node);
    void deliver(std::size_t from);

    NetworkLearning learning_;
    std::vector<Node> nodes_;
    std::vector<std::size_t> inputs_, outputs_, neurons_;
    std::vector<std::size_t> emitted_, next_emitted_, output_hits_;
    long now_ = 0;
    bool finalized_ = false;
};

struct MemoryNetwork {
    Network net;
    std::size_t n = 0;
    std::vector<std::size_t> inputs;   // external input node per channel
    std::vector<std::size_t> cells;    // neuron node per channel
    /// Steps between an external spike and the teacher-forced response.
    static constexpr long latency = 2;
};

/// One neuron per channel, all-to-all recurrent sensory wiring without self edges,
/// external i to sensory i and through a one-step delay to teaching i.
MemoryNetwork build_memory(std::size_t n, const NeuronConfig& cfg, NetworkLearning learning = {});

/// k presentations with learning on; the network is reset before each.
void store(MemoryNetwork& m, const SpikePattern& pattern, int presentations, Rng& rng);

/// Runs with only the clue as external input. Responses are shifted back by the wiring
/// latency and merged with the clue; responses within one step of a clue spike are dropped.
SpikePattern recall(MemoryNetwork& m, const SpikePattern& clue, double horizon, Rng& rng);

/// Drawing canvas: 8 x 15 pixels, channel 15x + y.
constexpr int canvas_width = 8;
constexpr int canvas_height = 15;
constexpr std::size_t canvas_channels = canvas_width * canvas_height;

/// Lines of `x y t_ms`; '#' starts a comment.
SpikePattern read_pixels(std::string_view text, double horizon);
std::string write_pixels(const SpikePattern& p);

}  // namespace infospike
