#include "infospike/supervised.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace infospike {

namespace {

std::vector<bool> fire_mask(const SpikeTrain& y, double dt, long steps) {
    std::vector<bool> fire(static_cast<std::size_t>(steps), false);
    for (long s : train_steps(y, dt))
        if (s >= 0 && s < steps) fire[static_cast<std::size_t>(s)] = true;
    return fire;
}

double min_eigenvalue(const Eigen::MatrixXd& H) {
    if (H.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

SurprisalEval surprisal_with_gradient(const NeuronConfig& cfg, const Weights& w, const InputSchedule& x,
                                      const std::vector<bool>& fire) {
    Neuron n(cfg, w);
    SurprisalEval out;
    out.grad = Eigen::MatrixXd::Zero(w.rows(), w.cols());
    for (std::size_t t = 0; t < fire.size(); ++t) {
        if (t < x.size())
            for (auto c : x[t]) n.receive(c);
        const StepResult r = n.step_forced(fire[t]);
        if (fire[t] && r.refractory) throw std::domain_error("output pattern violates the refractory period");
        const StepTerms s = r.terms(cfg.kappa);
        out.h += s.h;
        for (auto c : n.active_channels()) {
            const auto row = static_cast<Eigen::Index>(c);
            out.grad.row(row) += s.dh * n.alpha_sums().row(row);
        }
    }
    return out;
}

SurprisalEval surprisal_with_gradient(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                      const SpikeTrain& y) {
    const long steps = horizon_steps(y.horizon(), cfg.dt);
    return surprisal_with_gradient(cfg, w, schedule_inputs(x, cfg.dt, steps), fire_mask(y, cfg.dt, steps));
}

Eigen::MatrixXd surprisal_gradient(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                   const SpikeTrain& y) {
    return surprisal_with_gradient(cfg, w, x, y).grad;
}

HessianResult surprisal_hessian(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                const SpikeTrain& y) {
    const long steps = horizon_steps(y.horizon(), cfg.dt);
    const InputSchedule sched = schedule_inputs(x, cfg.dt, steps);
    const std::vector<bool> fire = fire_mask(y, cfg.dt, steps);
    Neuron n(cfg, w);
    const Eigen::Index dim = w.size();
    HessianResult out;
    out.H = Eigen::MatrixXd::Zero(dim, dim);
    for (long t = 0; t < steps; ++t) {
        for (auto c : sched[static_cast<std::size_t>(t)]) n.receive(c);
        const StepResult r = n.step_forced(fire[static_cast<std::size_t>(t)]);
        if (r.fired && r.refractory) throw std::domain_error("output pattern violates the refractory period");
        const double d2h = r.terms(cfg.kappa).d2h;
        if (d2h == 0.0) continue;
        const Eigen::Map<const Eigen::VectorXd> a(n.alpha_sums().data(), dim);
        out.H.selfadjointView<Eigen::Lower>().rankUpdate(a, d2h);
    }
    out.H = out.H.selfadjointView<Eigen::Lower>();
    out.min_eigenvalue = min_eigenvalue(out.H);
    return out;
}

HessianResult surprisal_hessian_continuous(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                           const SpikeTrain& y, double step) {
    const Eigen::Index dim = w.size();
    HessianResult out;
    out.H = Eigen::MatrixXd::Zero(dim, dim);
    const double k2 = cfg.kappa * cfg.kappa;
    for (const auto& nd : continuous_nodes(cfg, y, step)) {
        const Eigen::MatrixXd a = alpha_sums_continuous(cfg, x, nd.last_out, nd.t);
        const double u = (a.array() * w.array()).sum();
        const Eigen::Map<const Eigen::VectorXd> av(a.data(), dim);
        out.H.selfadjointView<Eigen::Lower>().rankUpdate(av, nd.weight * intensity(cfg, u) / k2);
    }
    out.H = out.H.selfadjointView<Eigen::Lower>();
    out.min_eigenvalue = min_eigenvalue(out.H);
    return out;
}

Eigen::MatrixXd surprisal_gradient_continuous(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x,
                                              const SpikeTrain& y, double step) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(w.rows(), w.cols());
    for (const auto& nd : continuous_nodes(cfg, y, step)) {
        const Eigen::MatrixXd a = alpha_sums_continuous(cfg, x, nd.last_out, nd.t);
        const double u = (a.array() * w.array()).sum();
        g += nd.weight * intensity(cfg, u) / cfg.kappa * a;
    }
    double last = -std::numeric_limits<double>::infinity();
    for (double ty : y.times()) {
        g -= alpha_sums_continuous(cfg, x, last, ty) / cfg.kappa;
        last = ty;
    }
    return g;
}

GradientAccumulator::GradientAccumulator(std::size_t inputs, std::size_t kernels)
    : g_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(inputs), static_cast<Eigen::Index>(kernels))) {}

void GradientAccumulator::add(const Neuron& n, double coef) {
    if (coef == 0.0) return;
    for (auto c : n.active_channels()) {
        const auto row = static_cast<Eigen::Index>(c);
        g_.row(row) += coef * n.alpha_sums().row(row);
    }
}

SupervisedRule::SupervisedRule(const NeuronConfig& cfg) : g_(cfg.inputs, cfg.kernels()) {}

StepResult SupervisedRule::step_online(Neuron& n, bool teacher, double gamma, Rng& rng,
                                       std::vector<EventRecord>* log) {
    const long now = n.now();
    const StepResult r = n.step(rng, teacher);
    const double kappa = n.config().kappa;
    const double scale = gamma * n.config().dt;
    if (teacher && r.sampled) {
        g_.reset();
        if (log) log->push_back({now, SupervisedEvent::hit});
    } else if (teacher) {
        g_.add(n, r.terms(kappa, true).dh);
        n.weights() -= scale * g_.value();
        g_.reset();
        if (log) log->push_back({now, SupervisedEvent::teacher_update});
    } else if (r.sampled) {
        g_.add(n, r.terms(kappa, true).dh);
        n.weights() += scale * g_.value();
        g_.reset();
        if (log) log->push_back({now, SupervisedEvent::false_positive});
    } else {
        g_.add(n, r.terms(kappa, false).dh);
    }
    return r;
}

StepResult SupervisedRule::step_teacher_forced(Neuron& n, bool teacher, double gamma) {
    const StepResult r = n.step_forced(teacher);
    g_.add(n, r.terms(n.config().kappa).dh);
    if (teacher) {
        n.weights() -= gamma * n.config().dt * g_.value();
        g_.reset();
    }
    return r;
}

namespace {

template <typename StepFn>
IterationLog run_presentation(Neuron& n, const SpikePattern& x, const SpikeTrain& y, StepFn&& step) {
    const NeuronConfig& cfg = n.config();
    IterationLog log;
    log.surprisal_before = pattern_surprisal_discrete(cfg, n.weights(), x, y);
    const long steps = horizon_steps(y.horizon(), cfg.dt);
    const InputSchedule sched = schedule_inputs(x, cfg.dt, steps);
    const std::vector<bool> fire = fire_mask(y, cfg.dt, steps);
    n.reset();
    for (long t = 0; t < steps; ++t) {
        for (auto c : sched[static_cast<std::size_t>(t)]) n.receive(c);
        if (step(fire[static_cast<std::size_t>(t)], log).fired) log.output_steps.push_back(t);
    }
    return log;
}

}  // namespace

IterationLog train_iteration_teacher_forced(Neuron& n, const SpikePattern& x, const SpikeTrain& y, double gamma) {
    SupervisedRule rule(n.config());
    return run_presentation(n, x, y, [&](bool teacher, IterationLog&) {
        return rule.step_teacher_forced(n, teacher, gamma);
    });
}

IterationLog train_iteration_online(Neuron& n, const SpikePattern& x, const SpikeTrain& y, double gamma, Rng& rng) {
    SupervisedRule rule(n.config());
    return run_presentation(n, x, y, [&](bool teacher, IterationLog& log) {
        return rule.step_online(n, teacher, gamma, rng, &log.events);
    });
}

std::vector<StdpPoint> stdp_curve(const NeuronConfig& cfg, double w, const std::vector<double>& deltas, double t_out,
                                  double horizon, double step, double gamma) {
    if (cfg.kernels() != 1 || cfg.inputs != 1)
        throw std::invalid_argument("stdp curve needs one input channel and one kernel");
    if (!(step > 0.0)) throw std::invalid_argument("stdp curve: step must be positive");
    const AlphaKernel& alpha = cfg.basis.kernel(0);
    std::vector<StdpPoint> out;
    for (double delta : deltas) {
        const double t_in = t_out - delta;
        auto integrand = [&](double s, bool after_out) {
            const bool live = !after_out || t_in > t_out;
            const double a = live ? alpha(s - t_in) : 0.0;
            return intensity(cfg, w * a) * a;
        };
        auto segment = [&](double a, double b, bool after_out) {
            if (b <= a) return 0.0;
            const auto n = static_cast<long>(std::max(1.0, std::ceil((b - a) / step - 1e-9)));
            const double h = (b - a) / static_cast<double>(n);
            double s = 0.0;
            for (long i = 0; i <= n; ++i) {
                const double t = (i == n) ? b : a + h * static_cast<double>(i);
                s += ((i == 0 || i == n) ? 0.5 : 1.0) * integrand(t, after_out);
            }
            return s * h;
        };
        auto piece = [&](double a, double b, bool after_out) {
            if (t_in > a && t_in < b) return segment(a, t_in, after_out) + segment(t_in, b, after_out);
            return segment(a, b, after_out);
        };
        const double integral = piece(0.0, t_out, false) + piece(t_out + cfg.refractory, horizon, true);
        out.push_back({delta, gamma / cfg.kappa * (alpha(delta) - integral)});
    }
    return out;
}

}  // namespace infospike
