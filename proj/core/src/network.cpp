#include "infospike/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <tuple>
#include <stdexcept>

namespace infospike {

Network::Network(NetworkLearning learning) : learning_(learning) {}

Network::Node& Network::checked(std::size_t node) {
    if (node >= nodes_.size()) throw std::out_of_range("network: dangling edge to node " + std::to_string(node));
    return nodes_[node];
}

std::size_t Network::add_input() {
    if (finalized_) throw std::logic_error("network: graph is finalized");
    nodes_.push_back({});
    inputs_.push_back(nodes_.size() - 1);
    return nodes_.size() - 1;
}

std::size_t Network::add_output() {
    if (finalized_) throw std::logic_error("network: graph is finalized");
    Node n;
    n.kind = NodeKind::output;
    nodes_.push_back(std::move(n));
    outputs_.push_back(nodes_.size() - 1);
    return nodes_.size() - 1;
}

std::size_t Network::add_neuron(const NeuronConfig& cfg) {
    if (finalized_) throw std::logic_error("network: graph is finalized");
    Node n;
    n.kind = NodeKind::neuron;
    n.cfg = cfg;
    nodes_.push_back(std::move(n));
    neurons_.push_back(nodes_.size() - 1);
    return nodes_.size() - 1;
}

std::size_t Network::add_delay(long steps) {
    if (finalized_) throw std::logic_error("network: graph is finalized");
    if (steps < 1) throw std::invalid_argument("network: delay must be at least one step");
    Node n;
    n.kind = NodeKind::delay;
    n.delay = steps;
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
}

void Network::connect(std::size_t from, std::size_t to, Pin pin) {
    if (finalized_) throw std::logic_error("network: graph is finalized");
    Node& src = checked(from);
    Node& dst = checked(to);
    if (src.kind == NodeKind::output) throw std::invalid_argument("network: output nodes have no outgoing pin");
    switch (dst.kind) {
        case NodeKind::input:
            throw std::invalid_argument("network: input nodes have no incoming pin");
        case NodeKind::delay:
        case NodeKind::output:
            if (pin != Pin::sensory) throw std::invalid_argument("network: pin not declared on destination");
            src.out.push_back({to, pin, 0});
            return;
        case NodeKind::neuron:
            break;
    }
    Edge e{to, pin, 0};
    switch (pin) {
        case Pin::sensory:
            e.channel = dst.sensory.size();
            dst.sensory.push_back(from);
            break;
        case Pin::teaching: ++dst.teaching; break;
        case Pin::reward: ++dst.reward; break;
        case Pin::punish: ++dst.punish; break;
        case Pin::stimulate: ++dst.stimulate; break;
    }
    src.out.push_back(e);
}

void Network::finalize() {
    if (finalized_) return;
    for (auto& n : nodes_) {
        if (n.kind != NodeKind::neuron) continue;
        n.cfg.inputs = std::max<std::size_t>(1, n.sensory.size());
        n.cfg.validate();
        n.cell.clear();
        n.cell.emplace_back(n.cfg);
        if (n.stimulate > 0) configure_stimulation(n.cell.front(), learning_.stimulation_factor);
        n.rule = SupervisedRule(n.cfg);
        n.trace = EligibilityTrace(n.cfg.inputs, n.cfg.kernels(), learning_.rl.tau_z);
    }
    finalized_ = true;
    reset();
}

void Network::reset() {
    for (auto& n : nodes_) {
        if (!n.cell.empty()) n.cell.front().reset();
        n.rule.reset();
        n.trace.reset();
        n.pending.clear();
        n.in_spikes.clear();
        n.teacher = false;
        n.reward_in = n.punish_in = 0;
        n.stim_in = 0;
    }
    emitted_.clear();
    output_hits_.clear();
    now_ = 0;
}

Neuron& Network::neuron(std::size_t node) {
    Node& n = checked(node);
    if (n.cell.empty()) throw std::invalid_argument("network: node is not a finalized neuron");
    return n.cell.front();
}

const Neuron& Network::neuron(std::size_t node) const {
    return const_cast<Network*>(this)->neuron(node);
}

const std::vector<std::size_t>& Network::sensory_sources(std::size_t node) const { return nodes_.at(node).sensory; }

std::size_t Network::edge_count(Pin pin) const {
    std::size_t c = 0;
    for (const auto& n : nodes_)
        for (const auto& e : n.out)
            if (e.pin == pin && nodes_[e.to].kind == NodeKind::neuron) ++c;
    return c;
}

void Network::deliver(std::size_t from) {
    for (const Edge& e : nodes_[from].out) {
        Node& d = nodes_[e.to];
        switch (d.kind) {
            case NodeKind::delay: d.pending.push_back(now_ + d.delay - 1); break;
            case NodeKind::output: break;
            case NodeKind::input: break;
            case NodeKind::neuron:
                switch (e.pin) {
                    case Pin::sensory: d.in_spikes.push_back(e.channel); break;
                    case Pin::teaching: d.teacher = true; break;
                    case Pin::reward: ++d.reward_in; break;
                    case Pin::punish: ++d.punish_in; break;
                    case Pin::stimulate: ++d.stim_in; break;
                }
                break;
        }
    }
}

const std::vector<std::size_t>& Network::tick(const std::vector<std::size_t>& external, Rng& rng, bool learning) {
    if (!finalized_) finalize();
    for (auto from : emitted_) deliver(from);

    next_emitted_.clear();
    for (auto e : external) {
        if (checked(e).kind != NodeKind::input) throw std::invalid_argument("network: external spike on a non-input node");
        next_emitted_.push_back(e);
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        Node& node = nodes_[i];
        if (node.kind == NodeKind::delay) {
            const auto due = std::remove(node.pending.begin(), node.pending.end(), now_);
            if (due != node.pending.end()) {
                node.pending.erase(due, node.pending.end());
                next_emitted_.push_back(i);
            }
            continue;
        }
        if (node.kind != NodeKind::neuron) continue;
        Neuron& n = node.cell.front();
        for (auto c : node.in_spikes) n.receive(c);
        for (std::size_t s = 0; s < node.stim_in; ++s) n.stimulate();
        const bool rl = learning && node.reward + node.punish > 0;
        if (rl && (node.reward_in > 0 || node.punish_in > 0)) {
            const double coef = node.reward_in * learning_.rl.gamma_plus - node.punish_in * learning_.rl.gamma_minus;
            n.weights() -= coef * node.trace.value();
            node.trace.reset();
        }
        StepResult r;
        if (learning && node.teaching > 0 && learning_.supervised_mode == SupervisedMode::teacher_forced)
            r = node.rule.step_teacher_forced(n, node.teacher, learning_.gamma_supervised);
        else if (learning && node.teaching > 0)
            r = node.rule.step_online(n, node.teacher, learning_.gamma_supervised, rng);
        else
            r = n.step(rng);
        if (rl) node.trace.update(n, r);
        if (r.fired) next_emitted_.push_back(i);
        node.in_spikes.clear();
        node.teacher = false;
        node.reward_in = node.punish_in = 0;
        node.stim_in = 0;
    }

    output_hits_.clear();
    for (auto from : next_emitted_)
        for (const Edge& e : nodes_[from].out)
            if (nodes_[e.to].kind == NodeKind::output) output_hits_.push_back(e.to);
    std::sort(output_hits_.begin(), output_hits_.end());
    output_hits_.erase(std::unique(output_hits_.begin(), output_hits_.end()), output_hits_.end());

    emitted_.swap(next_emitted_);
    ++now_;
    return output_hits_;
}

MemoryNetwork build_memory(std::size_t n, const NeuronConfig& cfg, NetworkLearning learning) {
    if (n < 2) throw std::invalid_argument("memory network needs at least two channels");
    MemoryNetwork m{Network(learning), n, {}, {}};
    for (std::size_t i = 0; i < n; ++i) m.inputs.push_back(m.net.add_input());
    for (std::size_t i = 0; i < n; ++i) m.cells.push_back(m.net.add_neuron(cfg));
    for (std::size_t i = 0; i < n; ++i) {
        m.net.connect(m.inputs[i], m.cells[i], Pin::sensory);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) m.net.connect(m.cells[j], m.cells[i], Pin::sensory);
        const std::size_t d = m.net.add_delay(1);
        m.net.connect(m.inputs[i], d);
        m.net.connect(d, m.cells[i], Pin::teaching);
    }
    m.net.finalize();
    return m;
}

namespace {

InputSchedule external_schedule(const MemoryNetwork& m, const SpikePattern& p, double dt, long steps) {
    InputSchedule s = schedule_inputs(p, dt, steps);
    for (auto& at : s)
        for (auto& c : at) c = m.inputs[c];
    return s;
}

}  // namespace

void store(MemoryNetwork& m, const SpikePattern& pattern, int presentations, Rng& rng) {
    if (pattern.channels() != m.n) throw std::invalid_argument("store: pattern channels must match the network");
    if (m.cells.empty()) return;
    const double dt = m.net.neuron(m.cells.front()).config().dt;
    const long steps = horizon_steps(pattern.horizon(), dt);
    const InputSchedule sched = external_schedule(m, pattern, dt, steps);
    const std::vector<std::size_t> none;
    for (int k = 0; k < presentations; ++k) {
        m.net.reset();
        for (long t = 0; t < steps + MemoryNetwork::latency; ++t)
            m.net.tick(t < steps ? sched[static_cast<std::size_t>(t)] : none, rng, true);
    }
    m.net.reset();
}

SpikePattern recall(MemoryNetwork& m, const SpikePattern& clue, double horizon, Rng& rng) {
    if (clue.channels() != m.n) throw std::invalid_argument("recall: clue channels must match the network");
    const double dt = m.net.neuron(m.cells.front()).config().dt;
    const long steps = horizon_steps(horizon, dt);
    SpikePattern clipped(m.n, horizon);
    for (std::size_t c = 0; c < m.n; ++c)
        for (double t : clue.channel(c).times())
            if (t < horizon) clipped.add(c, t);
    const InputSchedule sched = external_schedule(m, clipped, dt, steps);
    std::vector<std::vector<long>> hits(m.n);
    std::vector<std::size_t> cell_channel(m.net.size(), m.n);
    for (std::size_t c = 0; c < m.n; ++c) cell_channel[m.cells[c]] = c;

    const std::vector<std::size_t> none;
    m.net.reset();
    for (long t = 0; t < steps + MemoryNetwork::latency; ++t) {
        m.net.tick(t < steps ? sched[static_cast<std::size_t>(t)] : none, rng, false);
        for (auto node : m.net.fired()) {
            const std::size_t c = cell_channel[node];
            if (c < m.n && t - MemoryNetwork::latency >= 0) hits[c].push_back(t - MemoryNetwork::latency);
        }
    }
    m.net.reset();

    SpikePattern out(m.n, horizon);
    for (std::size_t c = 0; c < m.n; ++c) {
        std::vector<double> times = clipped.channel(c).times();
        for (long s : hits[c]) {
            const double t = static_cast<double>(s) * dt;
            if (t >= horizon) continue;
            const bool near_clue = std::any_of(clipped.channel(c).times().begin(), clipped.channel(c).times().end(),
                                               [&](double u) { return std::abs(u - t) <= dt + 1e-9; });
            if (!near_clue) times.push_back(t);
        }
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        for (double t : times) out.add(c, t);
    }
    return out;
}

SpikePattern read_pixels(std::string_view text, double horizon) {
    SpikePattern out(canvas_channels, horizon);
    std::vector<std::vector<double>> times(canvas_channels);
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        std::istringstream fields(raw);
        std::string fx, fy, ft, extra;
        if (!(fields >> fx)) continue;
        if (!(fields >> fy >> ft) || (fields >> extra))
            throw std::invalid_argument("pixel line " + std::to_string(line_no) + ": expected 'x y t_ms'");
        int x = 0, y = 0;
        double t = 0.0;
        auto bad = [&](const std::string& f, auto& v) {
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            return ec != std::errc() || p != f.data() + f.size();
        };
        if (bad(fx, x) || bad(fy, y) || bad(ft, t))
            throw std::invalid_argument("pixel line " + std::to_string(line_no) + ": bad number");
        if (x < 0 || x >= canvas_width || y < 0 || y >= canvas_height)
            throw std::invalid_argument("pixel line " + std::to_string(line_no) + ": pixel outside the canvas");
        if (t < 0.0 || t >= horizon)
            throw std::invalid_argument("pixel line " + std::to_string(line_no) + ": time outside [0, T)");
        times[static_cast<std::size_t>(canvas_height * x + y)].push_back(t);
    }
    for (std::size_t c = 0; c < canvas_channels; ++c) {
        auto& v = times[c];
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (double t : v) out.add(c, t);
    }
    return out;
}

std::string write_pixels(const SpikePattern& p) {
    if (p.channels() != canvas_channels) throw std::invalid_argument("write_pixels: pattern is not canvas-sized");
    std::vector<std::tuple<double, int, int>> events;
    for (std::size_t c = 0; c < p.channels(); ++c)
        for (double t : p.channel(c).times())
            events.emplace_back(t, static_cast<int>(c) / canvas_height, static_cast<int>(c) % canvas_height);
    std::sort(events.begin(), events.end());
    std::string out;
    for (const auto& [t, x, y] : events)
        out += std::to_string(x) + " " + std::to_string(y) + " " + format_number(t) + "\n";
    return out;
}

}  // namespace infospike
