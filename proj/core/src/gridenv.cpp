#include "infospike/gridenv.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

namespace infospike {

std::string_view actuator_name(Actuator a) {
    switch (a) {
        case Actuator::up: return "up";
        case Actuator::down: return "down";
        case Actuator::left: return "left";
        case Actuator::right: return "right";
    }
    return "?";
}

Actuator parse_actuator(std::string_view name) {
    for (std::size_t i = 0; i < actuator_count; ++i)
        if (actuator_name(static_cast<Actuator>(i)) == name) return static_cast<Actuator>(i);
    throw std::invalid_argument("unknown actuator '" + std::string(name) + "'");
}

Fault Fault::fail(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("fault: failure probability must be in [0, 1]");
    return {Kind::fail, p, 1};
}

Fault Fault::overshoot(int cells) {
    if (cells < 1) throw std::invalid_argument("fault: overshoot needs at least one cell");
    return {Kind::overshoot, 0.0, cells};
}

void GridConfig::validate() const {
    if (width < 1 || height < 1 || width * height < 2) throw std::invalid_argument("grid needs at least two cells");
    if (!(sensor_rate >= 0.0) || sensor_rate * dt > 1.0) throw std::invalid_argument("grid: sensor rate * dt must be in [0, 1]");
    if (!(dt > 0.0)) throw std::invalid_argument("grid: dt must be positive");
    if (!(energy_decay >= 0.0)) throw std::invalid_argument("grid: energy decay must be non-negative");
    if (!(stimulation_scale >= 0.0 && stimulation_scale <= 1.0))
        throw std::invalid_argument("grid: stimulation scale must be in [0, 1]");
}

GridWorld::GridWorld(GridConfig cfg, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    std::uniform_int_distribution<int> ux(0, cfg_.width - 1), uy(0, cfg_.height - 1);
    agent_ = {ux(rng), uy(rng)};
    respawn(rng);
}

GridWorld::GridWorld(GridConfig cfg, Cell agent, Cell resource) : cfg_(cfg), agent_(agent), resource_(resource) {
    cfg_.validate();
    auto inside = [&](Cell c) { return c.x >= 0 && c.x < cfg_.width && c.y >= 0 && c.y < cfg_.height; };
    if (!inside(agent) || !inside(resource)) throw std::invalid_argument("grid: cell out of bounds");
}

void GridWorld::respawn(Rng& rng) {
    const int cells = cfg_.width * cfg_.height;
    std::uniform_int_distribution<int> u(0, cells - 2);
    int k = u(rng);
    if (k >= agent_.y * cfg_.width + agent_.x) ++k;
    resource_ = {k % cfg_.width, k / cfg_.width};
}

void GridWorld::inject_fault(Actuator a, Fault f) {
    const auto i = static_cast<std::size_t>(a);
    if (i >= actuator_count) throw std::invalid_argument("unknown actuator");
    faults_[i] = f;
}

std::vector<std::size_t> GridWorld::sensor_spikes(Rng& rng) const {
    std::vector<std::size_t> out;
    const double p = cfg_.sensor_rate * cfg_.dt;
    if (p <= 0.0) return out;
    std::bernoulli_distribution b(p);
    if (b(rng)) out.push_back(agent_channel(agent_));
    if (b(rng)) out.push_back(resource_channel(resource_));
    return out;
}

EnvStep GridWorld::env_step(const ActuatorSpikes& act, Rng& rng) {
    EnvStep e;
    auto axis = [&](Actuator neg, Actuator pos, int& coord, int size) {
        const bool n = act[static_cast<std::size_t>(neg)], p = act[static_cast<std::size_t>(pos)];
        if (n && p) {
            ++e.punish_ambiguous;
            return;
        }
        if (!n && !p) return;
        const Actuator a = n ? neg : pos;
        const Fault& f = faults_[static_cast<std::size_t>(a)];
        if (f.kind == Fault::Kind::fail && std::bernoulli_distribution(f.probability)(rng)) {
            ++e.punish_fault;
            return;
        }
        const int cells = f.kind == Fault::Kind::overshoot ? f.cells : 1;
        const int target = coord + (n ? -cells : cells);
        if (target < 0 || target >= size) {
            ++e.punish_bump;
            coord = std::clamp(target, 0, size - 1);
            return;
        }
        coord = target;
    };
    axis(Actuator::left, Actuator::right, agent_.x, cfg_.width);
    axis(Actuator::down, Actuator::up, agent_.y, cfg_.height);
    e.punish = e.punish_bump + e.punish_ambiguous + e.punish_fault;

    if (agent_ == resource_) {
        e.consumed = true;
        e.reward = 1;
        energy_ = 1.0;
        respawn(rng);
    }
    energy_ = std::max(0.0, energy_ - cfg_.energy_decay);
    const double ps = std::clamp(1.0 - energy_, 0.0, 1.0) * cfg_.stimulation_scale;
    if (ps > 0.0 && std::bernoulli_distribution(ps)(rng)) e.stimulation = 1;
    return e;
}

std::string_view architecture_name(Architecture a) {
    switch (a) {
        case Architecture::one_layer_4: return "one-layer-4";
        case Architecture::one_layer_8: return "one-layer-8";
        case Architecture::recurrent_12: return "recurrent-12";
        case Architecture::grouped_16: return "grouped-16";
        case Architecture::grouped_32: return "grouped-32";
    }
    return "?";
}

Architecture parse_architecture(std::string_view name) {
    for (auto a : {Architecture::one_layer_4, Architecture::one_layer_8, Architecture::recurrent_12,
                   Architecture::grouped_16, Architecture::grouped_32})
        if (architecture_name(a) == name) return a;
    throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

ActuatorSpikes GridAgent::actuators() const {
    ActuatorSpikes out{};
    const auto& fired = net.fired();
    for (std::size_t a = 0; a < actuator_count; ++a)
        for (auto n : groups[a])
            if (std::find(fired.begin(), fired.end(), n) != fired.end()) out[a] = true;
    return out;
}

GridAgent build_grid_agent(Architecture arch, std::size_t sensor_count, const NeuronConfig& cfg,
                           NetworkLearning learning) {
    if (sensor_count == 0) throw std::invalid_argument("grid agent needs sensors");
    GridAgent g{Network(learning), {}, 0, 0, 0, {}};
    for (std::size_t i = 0; i < sensor_count; ++i) g.sensors.push_back(g.net.add_input());
    g.reward = g.net.add_input();
    g.punish = g.net.add_input();
    g.stimulate = g.net.add_input();

    auto add_cell = [&](const std::vector<std::size_t>& sources) {
        const std::size_t n = g.net.add_neuron(cfg);
        for (auto s : sources) g.net.connect(s, n, Pin::sensory);
        g.net.connect(g.reward, n, Pin::reward);
        g.net.connect(g.punish, n, Pin::punish);
        g.net.connect(g.stimulate, n, Pin::stimulate);
        return n;
    };
    auto grouped = [&](std::size_t per) {
        for (std::size_t a = 0; a < actuator_count; ++a)
            for (std::size_t k = 0; k < per; ++k) g.groups[a].push_back(add_cell(g.sensors));
    };

    switch (arch) {
        case Architecture::one_layer_4: grouped(1); break;
        case Architecture::one_layer_8: grouped(2); break;
        case Architecture::grouped_16: grouped(4); break;
        case Architecture::grouped_32: grouped(8); break;
        case Architecture::recurrent_12: {
            // Hidden layer sees the sensors and every other hidden cell; the output layer sees the hidden layer.
            std::vector<std::size_t> hidden;
            for (int k = 0; k < 8; ++k) hidden.push_back(g.net.add_neuron(cfg));
            for (auto h : hidden) {
                for (auto s : g.sensors) g.net.connect(s, h, Pin::sensory);
                for (auto o : hidden)
                    if (o != h) g.net.connect(o, h, Pin::sensory);
                g.net.connect(g.reward, h, Pin::reward);
                g.net.connect(g.punish, h, Pin::punish);
                g.net.connect(g.stimulate, h, Pin::stimulate);
            }
            for (std::size_t a = 0; a < actuator_count; ++a) g.groups[a].push_back(add_cell(hidden));
            break;
        }
    }
    g.net.finalize();
    return g;
}

double TrainingResult::mean_steps_to_resource(std::size_t count) const {
    if (consumption_steps.size() < 2) return std::numeric_limits<double>::infinity();
    const std::size_t n = std::min(count, consumption_steps.size() - 1);
    const long span = consumption_steps.back() - consumption_steps[consumption_steps.size() - 1 - n];
    return static_cast<double>(span) / static_cast<double>(n);
}

double TrainingResult::reward_rate(long from, long to) const {
    if (to <= from) return 0.0;
    const auto lo = std::lower_bound(consumption_steps.begin(), consumption_steps.end(), from);
    const auto hi = std::lower_bound(consumption_steps.begin(), consumption_steps.end(), to);
    return static_cast<double>(hi - lo) / static_cast<double>(to - from);
}

TrainingResult run_training(GridWorld& world, GridAgent& agent, const TrainingOptions& opt, Rng& rng) {
    if (agent.sensors.size() != world.sensor_count())
        throw std::invalid_argument("run_training: agent sensors do not match the world");
    for (const auto& g : agent.groups)
        if (g.empty()) throw std::invalid_argument("run_training: every actuator needs a neuron group");
    if (opt.window < 1) throw std::invalid_argument("run_training: window must be positive");

    TrainingResult r;
    std::vector<FaultEvent> faults = opt.faults;
    std::sort(faults.begin(), faults.end(), [](const auto& a, const auto& b) { return a.step < b.step; });
    std::size_t next_fault = 0;

    std::vector<std::size_t> external;
    EnvStep last;
    WindowStats w;
    for (long t = 0; t < opt.steps; ++t) {
        while (next_fault < faults.size() && faults[next_fault].step <= t) {
            world.inject_fault(faults[next_fault].actuator, faults[next_fault].fault);
            ++next_fault;
        }
        external.clear();
        for (auto c : world.sensor_spikes(rng)) external.push_back(agent.sensors[c]);
        for (int k = 0; k < last.reward; ++k) external.push_back(agent.reward);
        for (int k = 0; k < last.punish; ++k) external.push_back(agent.punish);
        for (int k = 0; k < last.stimulation; ++k) external.push_back(agent.stimulate);
        agent.net.tick(external, rng, opt.learning);
        last = world.env_step(agent.actuators(), rng);

        r.reward += last.reward;
        r.punish += last.punish;
        r.punish_bump += last.punish_bump;
        r.punish_ambiguous += last.punish_ambiguous;
        r.punish_fault += last.punish_fault;
        if (last.consumed) r.consumption_steps.push_back(t);
        w.reward += last.reward;
        w.punish += last.punish;
        if ((t + 1) % opt.window == 0 || t + 1 == opt.steps) {
            w.end = t + 1;
            w.cumulative_reward = r.reward;
            w.cumulative_punish = r.punish;
            r.windows.push_back(w);
            w = WindowStats{};
        }
        if (opt.record_steps)
            r.trace.push_back({t, last.reward, last.punish_bump, last.punish_ambiguous, last.punish_fault,
                               world.energy(), world.agent(), world.resource()});
    }
    return r;
}

std::string window_csv(const TrainingResult& r) {
    std::string out = "window_end,reward,punish,cumulative_reward,cumulative_punish\n";
    for (const auto& w : r.windows)
        out += std::to_string(w.end) + "," + std::to_string(w.reward) + "," + std::to_string(w.punish) + "," +
               std::to_string(w.cumulative_reward) + "," + std::to_string(w.cumulative_punish) + "\n";
    return out;
}

std::string step_csv(const TrainingResult& r) {
    std::string out = "step,reward,punish_bump,punish_ambiguous,punish_fault,energy,agent_x,agent_y,resource_x,resource_y\n";
    for (const auto& s : r.trace)
        out += std::to_string(s.step) + "," + std::to_string(s.reward) + "," + std::to_string(s.punish_bump) + "," +
               std::to_string(s.punish_ambiguous) + "," + std::to_string(s.punish_fault) + "," +
               format_number(s.energy) + "," + std::to_string(s.agent.x) + "," + std::to_string(s.agent.y) + "," +
               std::to_string(s.resource.x) + "," + std::to_string(s.resource.y) + "\n";
    return out;
}

}  // namespace infospike
