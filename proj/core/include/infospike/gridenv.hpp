#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infospike/network.hpp"

namespace infospike {

enum class Actuator { up, down, left, right };
constexpr std::size_t actuator_count = 4;
std::string_view actuator_name(Actuator a);
Actuator parse_actuator(std::string_view name);

struct Fault {
    enum class Kind { none, fail, overshoot };
    Kind kind = Kind::none;
    double probability = 0.0;  // fail
    int cells = 1;             // overshoot

    static Fault none() { return {}; }
    static Fault fail(double p);
    static Fault overshoot(int cells);
};

struct GridConfig {
    int width = 3;
    int height = 3;
    double sensor_rate = 0.2;  // spikes per ms on the occupied cells
    double dt = 1.0;
    double energy_decay = 1.0 / 2000.0;
    double stimulation_scale = 0.2;
    void validate() const;
};

using ActuatorSpikes = std::array<bool, actuator_count>;

struct EnvStep {
    std::vector<std::size_t> sensory;  // sensor channels spiking this step
    int reward = 0;
    int punish = 0;
    int stimulation = 0;
    bool consumed = false;
    int punish_bump = 0;
    int punish_ambiguous = 0;
    int punish_fault = 0;
};

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
};

/// Agent and resource on a grid; "up" increases y.
class GridWorld {
public:
    GridWorld(GridConfig cfg, Rng& rng);
    GridWorld(GridConfig cfg, Cell agent, Cell resource);

    const GridConfig& config() const { return cfg_; }
    Cell agent() const { return agent_; }
    Cell resource() const { return resource_; }
    double energy() const { return energy_; }
    std::size_t sensor_count() const { return static_cast<std::size_t>(2 * cfg_.width * cfg_.height); }
    std::size_t agent_channel(Cell c) const { return static_cast<std::size_t>(c.y * cfg_.width + c.x); }
    std::size_t resource_channel(Cell c) const { return sensor_count() / 2 + agent_channel(c); }

    void inject_fault(Actuator a, Fault f);
    const Fault& fault(Actuator a) const { return faults_[static_cast<std::size_t>(a)]; }

    /// Bernoulli(rate * dt) spikes on the agent and resource cell channels.
    std::vector<std::size_t> sensor_spikes(Rng& rng) const;
    /// Applies one step of actuator commands; `sensory` is left empty.
    EnvStep env_step(const ActuatorSpikes& act, Rng& rng);

private:
    void respawn(Rng& rng);

    GridConfig cfg_;
    Cell agent_, resource_;
    double energy_ = 1.0;
    std::array<Fault, actuator_count> faults_{};
};

enum class Architecture { one_layer_4, one_layer_8, recurrent_12, grouped_16, grouped_32 };
std::string_view architecture_name(Architecture a);
Architecture parse_architecture(std::string_view name);

/// Network wired to a grid world: sensors, modulatory inputs and actuator groups.
struct GridAgent {
    Network net;
    std::vector<std::size_t> sensors;  // input node per sensor channel
    std::size_t reward = 0, punish = 0, stimulate = 0;
    std::array<std::vector<std::size_t>, actuator_count> groups;  // neuron nodes per actuator

    /// Spike-count OR over each group for the last tick.
    ActuatorSpikes actuators() const;
};

GridAgent build_grid_agent(Architecture arch, std::size_t sensor_count, const NeuronConfig& cfg,
                           NetworkLearning learning);

struct FaultEvent {
    long step = 0;
    Actuator actuator = Actuator::left;
    Fault fault;
};

struct TrainingOptions {
    long steps = 10000;
    long window = 1000;
    bool learning = true;
    std::vector<FaultEvent> faults;
    bool record_steps = false;
};

struct StepRecord {
    long step = 0;
    int reward = 0, punish_bump = 0, punish_ambiguous = 0, punish_fault = 0;
    double energy = 0.0;
    Cell agent, resource;
};

struct WindowStats {
    long end = 0;
    int reward = 0;
    int punish = 0;
    long cumulative_reward = 0;
    long cumulative_punish = 0;
};

struct TrainingResult {
    std::vector<WindowStats> windows;
    std::vector<long> consumption_steps;
    std::vector<StepRecord> trace;
    long reward = 0, punish = 0;
    long punish_bump = 0, punish_ambiguous = 0, punish_fault = 0;

    /// Mean steps between consecutive consumptions over the last `count` consumptions.
    double mean_steps_to_resource(std::size_t count) const;
    /// Rewards per step over [from, to).
    double reward_rate(long from, long to) const;
};

/// Closed loop: sensors -> tick -> actuators -> env_step -> modulatory spikes at the next tick.
TrainingResult run_training(GridWorld& world, GridAgent& agent, const TrainingOptions& opt, Rng& rng);

/// Per-window curves: window_end, reward, punish, cumulative_reward, cumulative_punish.
std::string window_csv(const TrainingResult& r);
/// Per-step log (requires record_steps): step, reward, punish by cause, energy, agent and resource cells.
std::string step_csv(const TrainingResult& r);

}  // namespace infospike
