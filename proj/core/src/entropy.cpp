#include "infospike/entropy.hpp"

#include <cmath>
#include <stdexcept>

namespace infospike {

namespace {

std::vector<bool> bits(std::uint32_t mask, int steps) {
    std::vector<bool> f(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) f[static_cast<std::size_t>(t)] = (mask >> t) & 1u;
    return f;
}

bool feasible_mask(std::uint32_t mask, int steps, long refr) {
    long last = -1;
    for (int t = 0; t < steps; ++t)
        if ((mask >> t) & 1u) {
            if (last >= 0 && t - last < refr) return false;
            last = t;
        }
    return true;
}

void check_steps(int steps) {
    if (steps < 0 || steps > 16) throw std::invalid_argument("entropy enumeration limited to 16 steps");
}

double plogp(double log_p) { return log_p == -std::numeric_limits<double>::infinity() ? 0.0 : -std::exp(log_p) * log_p; }

// First-spike log-probabilities after a renewal at `k` (k = -1: resting start).
struct Renewal {
    std::vector<double> log_first;  // indexed by j - k - 1
    double log_empty = 0.0;
};

Renewal renewal_from(const NeuronConfig& cfg, const Weights& w, const InputSchedule& sched, long steps, long k) {
    Neuron n(cfg, w);
    for (long t = 0; t <= k; ++t) n.step_forced(t == k);
    Renewal r;
    double log_s = 0.0;
    for (long t = k + 1; t < steps; ++t) {
        for (auto c : sched[static_cast<std::size_t>(t)]) n.receive(c);
        const StepResult s = n.step_forced(false);
        r.log_first.push_back(s.prob > 0.0 ? log_s + std::log(s.prob) : -std::numeric_limits<double>::infinity());
        log_s -= s.x;
    }
    r.log_empty = log_s;
    return r;
}

std::vector<Renewal> all_renewals(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, long steps) {
    const InputSchedule sched = schedule_inputs(x, cfg.dt, steps);
    std::vector<Renewal> out;
    out.reserve(static_cast<std::size_t>(steps + 1));
    for (long k = -1; k < steps; ++k) out.push_back(renewal_from(cfg, w, sched, steps, k));
    return out;
}

}  // namespace

double entropy_exact(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, int steps) {
    check_steps(steps);
    const InputSchedule sched = schedule_inputs(x, cfg.dt, steps);
    const long refr = cfg.refractory_steps();
    double H = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << steps); ++mask) {
        if (!feasible_mask(mask, steps, refr)) continue;
        const double h = surprisal_of_steps(cfg, w, sched, bits(mask, steps));
        H += std::exp(-h) * h;
    }
    return H;
}

EntropyEval entropy_gradient_exact(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, int steps) {
    check_steps(steps);
    const InputSchedule sched = schedule_inputs(x, cfg.dt, steps);
    const long refr = cfg.refractory_steps();
    EntropyEval out;
    out.grad = Eigen::MatrixXd::Zero(w.rows(), w.cols());
    for (std::uint32_t mask = 0; mask < (1u << steps); ++mask) {
        if (!feasible_mask(mask, steps, refr)) continue;
        const SurprisalEval s = surprisal_with_gradient(cfg, w, sched, bits(mask, steps));
        const double p = std::exp(-s.h);
        out.H += p * s.h;
        out.grad += p * (1.0 - s.h) * s.grad;
    }
    return out;
}

double entropy_renewal(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, long steps) {
    const std::vector<Renewal> r = all_renewals(cfg, w, x, steps);
    // E[k + 1] = entropy of the remainder after a renewal at k.
    std::vector<double> E(static_cast<std::size_t>(steps + 1), 0.0);
    for (long k = steps - 1; k >= -1; --k) {
        const Renewal& rk = r[static_cast<std::size_t>(k + 1)];
        double e = plogp(rk.log_empty);
        for (std::size_t i = 0; i < rk.log_first.size(); ++i) {
            const double lp = rk.log_first[i];
            if (lp == -std::numeric_limits<double>::infinity()) continue;
            const long j = k + 1 + static_cast<long>(i);
            e += plogp(lp) + std::exp(lp) * E[static_cast<std::size_t>(j + 1)];
        }
        E[static_cast<std::size_t>(k + 1)] = e;
    }
    return E[0];
}

double window_spike_probability(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, long steps,
                                long lo, long hi) {
    const std::vector<Renewal> r = all_renewals(cfg, w, x, steps);
    std::vector<double> Q(static_cast<std::size_t>(steps + 1), 1.0);  // P(no spike in window | renewal)
    for (long k = steps - 1; k >= -1; --k) {
        const Renewal& rk = r[static_cast<std::size_t>(k + 1)];
        double q = std::exp(rk.log_empty);
        for (std::size_t i = 0; i < rk.log_first.size(); ++i) {
            const long j = k + 1 + static_cast<long>(i);
            if (j >= lo && j <= hi) continue;
            q += std::exp(rk.log_first[i]) * Q[static_cast<std::size_t>(j + 1)];
        }
        Q[static_cast<std::size_t>(k + 1)] = q;
    }
    return 1.0 - Q[0];
}

HatTermState::HatTermState(const Neuron& state, long start_step)
    : start(start_step),
      shadow(state),
      grad_empty(Eigen::MatrixXd::Zero(state.weights().rows(), state.weights().cols())),
      grad(grad_empty) {}

void HatTermState::advance(const Weights& w, double kappa) {
    shadow.weights() = w;
    const StepResult r = shadow.step_forced(false);
    const Eigen::MatrixXd& a = shadow.alpha_sums();
    if (!r.refractory && r.x > 0.0) {
        const StepTerms s = step_terms(r.x, r.log_x, kappa, true);
        const double h = -log_empty + s.h;
        const double p = std::exp(-h);
        if (p > 0.0) {
            grad += p * (1.0 - h) * (grad_empty + s.dh * a);
            hat += p * h;
            mass += p;
        }
    }
    log_empty -= r.x;
    if (r.x > 0.0) grad_empty += (r.x / kappa) * a;
}

Eigen::MatrixXd HatTermState::total_gradient() const {
    const double p0 = std::exp(log_empty);
    return grad + p0 * (1.0 + log_empty) * grad_empty;
}

double HatTermState::total_hat() const { return hat - std::exp(log_empty) * log_empty; }

HatEval hat_entropy(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, long steps) {
    const InputSchedule sched = schedule_inputs(x, cfg.dt, steps);
    HatTermState term(Neuron(cfg, w), 0);
    HatEval out;
    for (long t = 0; t < steps; ++t) {
        for (auto c : sched[static_cast<std::size_t>(t)]) term.shadow.receive(c);
        const double before = term.mass;
        term.advance(w, cfg.kappa);
        out.first_spike.push_back(term.mass - before);
    }
    out.H = term.total_hat();
    out.grad = term.total_gradient();
    out.empty = std::exp(term.log_empty);
    return out;
}

OnlineEntropy::OnlineEntropy(const Neuron& n, OnlineEntropyOptions opt)
    : opt_(opt), memory_steps_(n.config().memory_steps()) {
    cap_steps_ = opt_.term_cap > 0.0 ? std::max(1L, std::lround(opt_.term_cap / n.config().dt)) : 0;
    open(n);
}

void OnlineEntropy::open(const Neuron& n) {
    HatTermState t(n, n.now());
    if (cap_steps_ > 0) t.end = t.start + cap_steps_;
    terms_.push_back(std::move(t));
    peak_ = std::max(peak_, terms_.size());
}

void OnlineEntropy::apply(Neuron& n, const HatTermState& t) {
    n.weights() -= opt_.gamma * t.total_gradient();
    ++applied_;
}

StepResult OnlineEntropy::step(Neuron& n, const std::vector<std::size_t>& inputs, Rng& rng) {
    for (auto& t : terms_) {
        for (auto c : inputs) t.shadow.receive(c);
        t.advance(n.weights(), n.config().kappa);
    }
    for (auto c : inputs) n.receive(c);
    const StepResult r = n.step(rng);
    after_step(n, r);
    return r;
}

StepResult OnlineEntropy::step_forced(Neuron& n, const std::vector<std::size_t>& inputs, bool fire) {
    for (auto& t : terms_) {
        for (auto c : inputs) t.shadow.receive(c);
        t.advance(n.weights(), n.config().kappa);
    }
    for (auto c : inputs) n.receive(c);
    const StepResult r = n.step_forced(fire);
    after_step(n, r);
    return r;
}

void OnlineEntropy::after_step(Neuron& n, const StepResult& r) {
    const long now = n.now();  // first step not yet consumed
    if (r.fired) {
        for (auto& t : terms_) t.end = std::min(t.end, now + memory_steps_);
        open(n);
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->end <= now) {
            apply(n, *it);
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
    if (terms_.empty()) open(n);
}

void OnlineEntropy::flush(Neuron& n) {
    for (const auto& t : terms_) apply(n, t);
    terms_.clear();
    open(n);
}

std::vector<long> entropy_iteration(Neuron& n, const SpikePattern& x, double gamma, Rng& rng) {
    const long steps = horizon_steps(x.horizon(), n.config().dt);
    const InputSchedule sched = schedule_inputs(x, n.config().dt, steps);
    n.reset();
    OnlineEntropy oe(n, {gamma, 0.0});
    std::vector<long> out;
    for (long t = 0; t < steps; ++t)
        if (oe.step(n, sched[static_cast<std::size_t>(t)], rng).fired) out.push_back(t);
    oe.flush(n);
    return out;
}

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::supervised: return "sup";
        case Phase::unsupervised: return "uns";
        case Phase::both: return "both";
    }
    return "?";
}

std::vector<CompositeRecord> composite_train(Neuron& n, const SpikePattern& x, const SpikeTrain& y_d,
                                             const std::vector<PhaseSpec>& schedule, const CompositeOptions& opt,
                                             Rng& rng) {
    const NeuronConfig& cfg = n.config();
    const long steps = horizon_steps(y_d.horizon(), cfg.dt);
    const std::vector<long> desired = train_steps(y_d, cfg.dt);
    std::vector<CompositeRecord> log;
    int iteration = 0;
    for (const auto& ph : schedule) {
        for (int i = 0; i < ph.iterations; ++i) {
            if (ph.phase != Phase::unsupervised) train_iteration_online(n, x, y_d, opt.gamma_sup, rng);
            if (ph.phase != Phase::supervised) entropy_iteration(n, x, opt.gamma_uns, rng);
            CompositeRecord rec;
            rec.iteration = ++iteration;
            rec.phase = ph.phase;
            rec.entropy = entropy_renewal(cfg, n.weights(), x, steps);
            rec.desired_probability = std::exp(-pattern_surprisal_discrete(cfg, n.weights(), x, y_d));
            if (!desired.empty())
                rec.window_probability = window_spike_probability(cfg, n.weights(), x, steps, desired[0] - opt.window,
                                                                  desired[0] + opt.window);
            rec.weights = n.weights();
            log.push_back(std::move(rec));
        }
    }
    return log;
}

}  // namespace infospike
