#include "infospike/neuron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace infospike {

void NeuronConfig::validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("neuron: kappa must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("neuron: dt must be positive");
    if (refractory < dt - 1e-12) throw std::invalid_argument("neuron: refractory period shorter than dt");
    if (basis.size() == 0) throw std::invalid_argument("neuron: empty alpha basis");
    if (memory != 0.0 && memory < basis.support() - 1e-9)
        throw std::invalid_argument("neuron: memory horizon shorter than the kernel support");
}

double NeuronConfig::memory_horizon() const { return memory > 0.0 ? memory : basis.support(); }

long NeuronConfig::memory_steps() const { return static_cast<long>(std::ceil(memory_horizon() / dt - 1e-9)); }

long NeuronConfig::refractory_steps() const { return std::max(1L, std::lround(refractory / dt)); }

double intensity(const NeuronConfig& cfg, double u) { return std::exp((u - cfg.threshold) / cfg.kappa); }

double spike_probability(const NeuronConfig& cfg, double lambda) { return -std::expm1(-lambda * cfg.dt); }

StepTerms step_terms(double x, double log_x, double kappa, bool spiked) {
    StepTerms s;
    if (!spiked) {
        s.h = x;
        s.dh = x / kappa;
        s.d2h = x / (kappa * kappa);
        return s;
    }
    if (x < 0.0 || (x == 0.0 && !std::isfinite(log_x))) {
        s.h = std::numeric_limits<double>::infinity();
        return s;
    }
    double phi = 0.0;
    double dphi = 0.0;
    if (x < 1e-10) {
        s.h = -(log_x - 0.5 * x);
        phi = 1.0 - 0.5 * x;
        dphi = -0.5 + x / 6.0;
    } else {
        s.h = -std::log(-std::expm1(-x));
        const double e = std::expm1(x);
        phi = std::isinf(e) ? 0.0 : x / e;
        if (x < 1e-3) {
            dphi = -0.5 + x / 6.0 - x * x * x / 180.0;
        } else if (x > 700.0) {
            dphi = 0.0;
        } else {
            dphi = (1.0 + x / std::expm1(-x)) / e;
        }
    }
    s.dh = -phi / kappa;
    s.d2h = -x * dphi / (kappa * kappa);
    return s;
}

StepTerms StepResult::terms(double kappa, bool spiked) const { return step_terms(x, log_x, kappa, spiked); }

Neuron::Neuron(NeuronConfig cfg) : Neuron(cfg, cfg.zero_weights()) {}

Neuron::Neuron(NeuronConfig cfg, Weights w) : cfg_(std::move(cfg)), w_(std::move(w)) {
    cfg_.validate();
    if (w_.rows() != static_cast<Eigen::Index>(cfg_.inputs) || w_.cols() != static_cast<Eigen::Index>(cfg_.kernels()))
        throw std::invalid_argument("neuron: weight matrix shape mismatch");
    memory_steps_ = cfg_.memory_steps();
    refractory_steps_ = cfg_.refractory_steps();
    table_.assign(cfg_.kernels(), std::vector<double>(static_cast<std::size_t>(memory_steps_) + 1));
    for (std::size_t k = 0; k < cfg_.kernels(); ++k)
        for (long d = 0; d <= memory_steps_; ++d)
            table_[k][static_cast<std::size_t>(d)] = cfg_.basis.value(k, static_cast<double>(d) * cfg_.dt);
    history_.resize(cfg_.inputs);
    a_ = Eigen::MatrixXd::Zero(w_.rows(), w_.cols());
}

void Neuron::reset() {
    clear_history();
    last_out_.reset();
    now_ = 0;
    for (auto c : active_rows_) a_.row(static_cast<Eigen::Index>(c)).setZero();
    active_rows_.clear();
}

void Neuron::receive(std::size_t channel) {
    if (channel >= history_.size()) throw std::out_of_range("neuron: input channel out of range");
    auto& h = history_[channel];
    if (h.empty()) active_.push_back(channel);
    h.push_back(now_);
}

void Neuron::stimulate() { stim_history_.push_back(now_); }

void Neuron::set_stimulation(double weight, std::size_t kernel) {
    if (kernel >= cfg_.kernels()) throw std::out_of_range("neuron: stimulation kernel out of range");
    stim_weight_ = weight;
    stim_kernel_ = kernel;
}

void Neuron::clear_history() {
    for (auto c : active_) history_[c].clear();
    active_.clear();
    stim_history_.clear();
}

void Neuron::prune() {
    for (std::size_t i = 0; i < active_.size();) {
        auto& h = history_[active_[i]];
        while (!h.empty() && now_ - h.front() > memory_steps_) h.pop_front();
        if (h.empty()) {
            active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    while (!stim_history_.empty() && now_ - stim_history_.front() > memory_steps_) stim_history_.pop_front();
}

double Neuron::potential() const {
    double u = 0.0;
    const std::size_t m = cfg_.kernels();
    for (auto c : active_) {
        for (long tj : history_[c]) {
            const long d = now_ - tj;
            if (d <= 0 || d > memory_steps_) continue;
            for (std::size_t k = 0; k < m; ++k)
                u += w_(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) * table_[k][static_cast<std::size_t>(d)];
        }
    }
    for (long ts : stim_history_) {
        const long d = now_ - ts;
        if (d > 0 && d <= memory_steps_) u += stim_weight_ * table_[stim_kernel_][static_cast<std::size_t>(d)];
    }
    return u;
}

std::size_t Neuron::stored_spikes() const {
    std::size_t n = 0;
    for (auto c : active_) n += history_[c].size();
    return n;
}

StepResult Neuron::step(Rng& rng) { return advance(std::nullopt, &rng, false); }

StepResult Neuron::step(Rng& rng, bool force_fire) { return advance(std::nullopt, &rng, force_fire); }

StepResult Neuron::step_forced(bool fire) { return advance(fire, nullptr, false); }

StepResult Neuron::advance(std::optional<bool> forced, Rng* rng, bool force_fire) {
    prune();
    for (auto c : active_rows_) a_.row(static_cast<Eigen::Index>(c)).setZero();
    active_rows_ = active_;
    const std::size_t m = cfg_.kernels();
    double u = 0.0;
    for (auto c : active_) {
        const auto row = static_cast<Eigen::Index>(c);
        for (long tj : history_[c]) {
            const long d = now_ - tj;
            if (d <= 0) continue;
            for (std::size_t k = 0; k < m; ++k) a_(row, static_cast<Eigen::Index>(k)) += table_[k][static_cast<std::size_t>(d)];
        }
        u += a_.row(row).dot(w_.row(row));
    }
    for (long ts : stim_history_) {
        const long d = now_ - ts;
        if (d > 0) u += stim_weight_ * table_[stim_kernel_][static_cast<std::size_t>(d)];
    }

    StepResult r;
    r.u = u;
    r.log_x = (u - cfg_.threshold) / cfg_.kappa + std::log(cfg_.dt);
    r.refractory = last_out_ && now_ - *last_out_ < refractory_steps_;
    if (r.refractory) {
        r.lambda = 0.0;
        r.x = 0.0;
        r.log_x = -std::numeric_limits<double>::infinity();
        r.prob = 0.0;
    } else {
        r.lambda = std::exp((u - cfg_.threshold) / cfg_.kappa);
        r.x = std::exp(r.log_x);
        r.prob = -std::expm1(-r.x);
    }
    if (forced) {
        r.fired = *forced;
    } else {
        const double draw = static_cast<double>((*rng)() >> 11) * 0x1.0p-53;
        r.sampled = draw < r.prob;
        r.fired = r.sampled || force_fire;
    }
    if (r.fired) {
        clear_history();
        last_out_ = now_;
    }
    ++now_;
    return r;
}

long horizon_steps(double horizon, double dt) { return std::lround(horizon / dt); }

InputSchedule schedule_inputs(const SpikePattern& x, double dt, long steps) {
    InputSchedule s(static_cast<std::size_t>(std::max(0L, steps)));
    for (std::size_t c = 0; c < x.channels(); ++c)
        for (double t : x.channel(c).times()) {
            const long i = std::lround(t / dt);
            if (i >= 0 && i < steps) s[static_cast<std::size_t>(i)].push_back(c);
        }
    return s;
}

std::vector<long> train_steps(const SpikeTrain& y, double dt) {
    std::vector<long> out;
    for (double t : y.times()) {
        const long i = std::lround(t / dt);
        if (std::abs(static_cast<double>(i) * dt - t) > 1e-9 * std::max(1.0, std::abs(t)))
            throw std::invalid_argument("output spike time not on the dt grid");
        out.push_back(i);
    }
    return out;
}

SpikeTrain steps_to_train(const std::vector<long>& steps, double dt, double horizon) {
    SpikeTrain y(horizon);
    for (long s : steps) y.push_back(static_cast<double>(s) * dt);
    return y;
}

double surprisal_of_steps(const NeuronConfig& cfg, const Weights& w, const InputSchedule& x,
                          const std::vector<bool>& fire, bool allow_infeasible) {
    Neuron n(cfg, w);
    double h = 0.0;
    for (std::size_t t = 0; t < fire.size(); ++t) {
        if (t < x.size())
            for (auto c : x[t]) n.receive(c);
        const StepResult r = n.step_forced(fire[t]);
        if (fire[t] && r.refractory) {
            if (allow_infeasible) return std::numeric_limits<double>::infinity();
            throw std::domain_error("output pattern violates the refractory period");
        }
        h += r.terms(cfg.kappa).h;
    }
    return h;
}

double pattern_surprisal_discrete(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                  const SpikeTrain& y) {
    const long steps = horizon_steps(y.horizon(), cfg.dt);
    std::vector<bool> fire(static_cast<std::size_t>(steps), false);
    for (long s : train_steps(y, cfg.dt))
        if (s < steps) fire[static_cast<std::size_t>(s)] = true;
    return surprisal_of_steps(cfg, w, schedule_inputs(x, cfg.dt, steps), fire);
}

double potential_continuous(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, double last_out,
                            double t) {
    double u = 0.0;
    for (std::size_t c = 0; c < x.channels(); ++c)
        for (double tj : x.channel(c).times()) {
            if (tj <= last_out || tj >= t) continue;
            for (std::size_t k = 0; k < cfg.kernels(); ++k)
                u += w(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) * cfg.basis.value(k, t - tj);
        }
    return u;
}

Eigen::MatrixXd alpha_sums_continuous(const NeuronConfig& cfg, const SpikePattern& x, double last_out, double t) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg.inputs), static_cast<Eigen::Index>(cfg.kernels()));
    for (std::size_t c = 0; c < x.channels(); ++c)
        for (double tj : x.channel(c).times()) {
            if (tj <= last_out || tj >= t) continue;
            for (std::size_t k = 0; k < cfg.kernels(); ++k)
                a(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) += cfg.basis.value(k, t - tj);
        }
    return a;
}

std::vector<QuadNode> continuous_nodes(const NeuronConfig& cfg, const SpikeTrain& y, double step) {
    if (!(step > 0.0) || step > cfg.dt / 4.0 + 1e-12)
        throw std::invalid_argument("continuous quadrature: step must be in (0, dt/4]");
    std::vector<QuadNode> nodes;
    double last = -std::numeric_limits<double>::infinity();
    double seg_start = 0.0;
    auto segment = [&](double a, double b) {
        if (b <= a) return;
        const auto n = static_cast<long>(std::max(1.0, std::ceil((b - a) / step - 1e-9)));
        const double h = (b - a) / static_cast<double>(n);
        for (long i = 0; i <= n; ++i) {
            const double t = (i == n) ? b : a + h * static_cast<double>(i);
            nodes.push_back({t, (i == 0 || i == n) ? 0.5 * h : h, last});
        }
    };
    for (double ty : y.times()) {
        if (ty < seg_start - 1e-9) throw std::domain_error("output pattern violates the refractory period");
        segment(seg_start, ty);
        last = ty;
        seg_start = ty + cfg.refractory;
    }
    segment(seg_start, y.horizon());
    return nodes;
}

double pattern_log_density_continuous(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                      const SpikeTrain& y, double step) {
    double h = 0.0;
    for (const auto& nd : continuous_nodes(cfg, y, step))
        h += nd.weight * intensity(cfg, potential_continuous(cfg, w, x, nd.last_out, nd.t));
    double last = -std::numeric_limits<double>::infinity();
    for (double ty : y.times()) {
        h -= (potential_continuous(cfg, w, x, last, ty) - cfg.threshold) / cfg.kappa;
        last = ty;
    }
    return h;
}

SpikeTrain sample_output(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, Rng& rng) {
    const long steps = horizon_steps(x.horizon(), cfg.dt);
    const InputSchedule sched = schedule_inputs(x, cfg.dt, steps);
    Neuron n(cfg, w);
    SpikeTrain y(x.horizon());
    for (long t = 0; t < steps; ++t) {
        for (auto c : sched[static_cast<std::size_t>(t)]) n.receive(c);
        if (n.step(rng).fired) y.push_back(static_cast<double>(t) * cfg.dt);
    }
    return y;
}

}  // namespace infospike
