#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "experiments.hpp"
#include "infospike/alpha_design.hpp"
#include "infospike/entropy.hpp"
#include "infospike/network.hpp"
#include "infospike/rng.hpp"
#include "infospike/supervised.hpp"

namespace infospike::experiments {

namespace {

using PT = ParamType;

SupervisedMode parse_mode(const std::string& s) {
    if (s == "teacher-forced") return SupervisedMode::teacher_forced;
    if (s == "online") return SupervisedMode::online;
    throw ConfigError("mode must be 'teacher-forced' or 'online'");
}

long most_likely_first_spike(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, long steps) {
    const HatEval h = hat_entropy(cfg, w, x, steps);
    const auto it = std::max_element(h.first_spike.begin(), h.first_spike.end());
    return static_cast<long>(it - h.first_spike.begin());
}

// ---- delay ----

SeedRun run_delay(const Params& p, std::uint64_t seed) {
    NeuronConfig cfg;
    cfg.kappa = p.num("kappa");
    cfg.threshold = p.num("threshold");
    cfg.validate();
    const double target = p.num("dt");
    if (!(target > 0.0) || target != std::floor(target)) throw ConfigError("dt must be a positive whole number of ms");
    const double horizon = target + p.num("tail");
    const long steps = horizon_steps(horizon, cfg.dt);
    const SupervisedMode mode = parse_mode(p.text("mode"));
    const long iters = p.integer("iters");
    const long check = p.integer("check_iter");
    if (iters < 1 || check < 0) throw ConfigError("iters must be positive and check_iter non-negative");

    SpikePattern x(1, horizon);
    x.add(0, 0.0);
    const SpikeTrain y(horizon, {target});

    Rng init = split_rng(seed, "delay.init");
    Rng train = split_rng(seed, "delay.train");
    std::uniform_real_distribution<double> u(0.0, p.num("init"));
    Weights w = cfg.zero_weights();
    for (Eigen::Index k = 0; k < w.cols(); ++k) w(0, k) = u(init);
    Neuron n(cfg, w);

    SeedRun r;
    Table curve{"surprisal", {"iteration", "surprisal", "spike_time_error", "weight_norm"}, {}};
    std::vector<double> h;
    auto record = [&](long it) {
        h.push_back(pattern_surprisal_discrete(cfg, n.weights(), x, y));
        const long t = most_likely_first_spike(cfg, n.weights(), x, steps);
        curve.add({it, h.back(), static_cast<double>(t) * cfg.dt - target, n.weights().norm()});
        return t;
    };
    long t = record(0);
    for (long it = 1; it <= iters; ++it) {
        if (mode == SupervisedMode::teacher_forced)
            train_iteration_teacher_forced(n, x, y, p.num("gamma"));
        else
            train_iteration_online(n, x, y, p.num("gamma"), train);
        t = record(it);
    }
    const double ratio = h[static_cast<std::size_t>(std::min(check, iters))] / h[0];
    const double error = static_cast<double>(t) * cfg.dt - target;
    r.metrics = {{"initial_surprisal", h[0]},
                 {"surprisal_ratio", ratio},
                 {"drop10", h[static_cast<std::size_t>(std::min(10L, iters))] / h[0]},
                 {"spike_time", static_cast<double>(t) * cfg.dt},
                 {"spike_time_error", error}};
    r.pass = ratio < p.num("max_ratio") && std::abs(error) <= p.num("tolerance") + 1e-9;
    Table weights{"weights", {"kernel", "peak", "weight"}, {}};
    for (std::size_t k = 0; k < cfg.kernels(); ++k)
        weights.add({k, cfg.basis.kernel(k).peak, n.weights()(0, static_cast<Eigen::Index>(k))});
    r.tables = {std::move(curve), std::move(weights)};
    return r;
}

Summary summarize_delay(const Params& p, const std::vector<SeedRun>& runs) {
    std::size_t ok = 0;
    double worst = 0.0;
    for (const auto& r : runs) {
        ok += r.pass;
        worst = std::max(worst, r.metric("surprisal_ratio"));
    }
    const std::size_t need = required(p.num("seed_fraction"), runs.size());
    Summary s;
    s.pass = ok >= need;
    s.line = "dt=" + fmt(p.num("dt")) + " ms: worst surprisal ratio at iteration " + p.text("check_iter") + " " +
             fmt(worst, 3) + " (< " + p.text("max_ratio") + "), " + std::to_string(ok) + "/" +
             std::to_string(runs.size()) + " seeds pass (need " + std::to_string(need) + ")";
    return s;
}

// ---- detect ----

SeedRun run_detect(const Params& p, std::uint64_t seed) {
    NeuronConfig cfg;
    cfg.inputs = 2;
    cfg.kappa = p.num("kappa");
    cfg.threshold = p.num("threshold");
    cfg.validate();
    const double d_in = p.num("delta_in"), d_out = p.num("delta_out");
    if (!(d_in > 0.0) || !(d_out > 0.0)) throw ConfigError("delta_in and delta_out must be positive");
    const double horizon = d_in + d_out + p.num("tail");
    const long steps = horizon_steps(horizon, cfg.dt);
    const long target = std::lround((d_in + d_out) / cfg.dt);
    const long half = p.integer("window");
    const long epochs = p.integer("epochs");
    const long every = std::max(1L, p.integer("log_every"));
    const SupervisedMode mode = parse_mode(p.text("mode"));

    SpikePattern full(2, horizon), first(2, horizon), second(2, horizon);
    full.add(0, 0.0);
    full.add(1, d_in);
    first.add(0, 0.0);
    second.add(1, d_in);
    const SpikeTrain y(horizon, {d_in + d_out}), none(horizon);

    Rng rng = split_rng(seed, "detect.train");
    Neuron n(cfg);
    auto present = [&](const SpikePattern& x, const SpikeTrain& t) {
        if (mode == SupervisedMode::online)
            train_iteration_online(n, x, t, p.num("gamma"), rng);
        else
            train_iteration_teacher_forced(n, x, t, p.num("gamma"));
    };
    auto window = [&](const SpikePattern& x) {
        return window_spike_probability(cfg, n.weights(), x, steps, target - half, target + half);
    };

    SeedRun r;
    Table curve{"training", {"epoch", "p_full", "p_first", "p_second"}, {}};
    curve.add({0L, window(full), window(first), window(second)});
    for (long e = 1; e <= epochs; ++e) {
        present(full, y);
        if (p.flag("suppress")) {
            present(first, none);
            present(second, none);
        }
        if (e % every == 0 || e == epochs) curve.add({e, window(full), window(first), window(second)});
    }
    Table shape{"first_spike_probability", {"step", "p_full", "p_first", "p_second"}, {}};
    const HatEval a = hat_entropy(cfg, n.weights(), full, steps), b = hat_entropy(cfg, n.weights(), first, steps),
                  c = hat_entropy(cfg, n.weights(), second, steps);
    for (long t = 0; t < steps; ++t) {
        const auto i = static_cast<std::size_t>(t);
        shape.add({t, a.first_spike[i], b.first_spike[i], c.first_spike[i]});
    }
    const double pf = window(full), p1 = window(first), p2 = window(second);
    r.metrics = {{"p_full", pf}, {"p_first", p1}, {"p_second", p2}};
    r.pass = pf >= p.num("min_full") && p1 <= p.num("max_fragment") && p2 <= p.num("max_fragment");
    r.tables = {std::move(curve), std::move(shape)};
    return r;
}

Summary summarize_detect(const Params& p, const std::vector<SeedRun>& runs) {
    std::size_t ok = 0;
    double lo = 1.0, hi = 0.0;
    for (const auto& r : runs) {
        ok += r.pass;
        lo = std::min(lo, r.metric("p_full"));
        hi = std::max({hi, r.metric("p_first"), r.metric("p_second")});
    }
    const std::size_t need = required(p.num("seed_fraction"), runs.size());
    Summary s;
    s.pass = ok >= need;
    s.line = "P(window | full) min " + fmt(lo, 3) + " (>= " + p.text("min_full") + "), fragments max " + fmt(hi, 3) +
             " (<= " + p.text("max_fragment") + "), " + std::to_string(ok) + "/" + std::to_string(runs.size()) +
             " seeds pass (need " + std::to_string(need) + ")";
    return s;
}

// ---- stdp ----

SeedRun run_stdp(const Params& p, std::uint64_t) {
    NeuronConfig cfg;
    cfg.basis = AlphaBasis::from_peaks({p.num("peak")});
    cfg.threshold = p.num("threshold");
    cfg.kappa = p.num("kappa");
    cfg.validate();
    const double support = cfg.basis.support();
    const double reach = p.num("reach");
    const double t_out = support + 5.0;
    const double horizon = t_out + reach + support + 5.0;
    std::vector<double> deltas;
    for (double d = -reach; d < support; d += p.num("resolution")) deltas.push_back(d);
    const auto curve = stdp_curve(cfg, p.num("w"), deltas, t_out, horizon, p.num("step"), p.num("gamma"));

    SeedRun r;
    Table t{"stdp", {"delta_t", "delta_w"}, {}};
    bool positive = true, negative = true;
    double lo = 1e300, hi = -1e300, mean = 0.0;
    std::size_t tail = 0;
    for (const auto& pt : curve) {
        t.add({pt.delta_t, pt.delta_w});
        if (pt.delta_t > 0.0) positive = positive && pt.delta_w > 0.0;
        if (pt.delta_t < -cfg.refractory) {
            negative = negative && pt.delta_w < 0.0;
            lo = std::min(lo, pt.delta_w);
            hi = std::max(hi, pt.delta_w);
            mean += std::abs(pt.delta_w);
            ++tail;
        }
    }
    mean /= static_cast<double>(std::max<std::size_t>(1, tail));
    const double variation = tail ? (hi - lo) / mean : 0.0;
    r.metrics = {{"positive_lobe", positive ? 1.0 : 0.0},
                 {"negative_tail", negative ? 1.0 : 0.0},
                 {"tail_variation", variation},
                 {"tail_mean", -mean}};
    r.pass = positive && negative && tail > 0 && variation < p.num("max_variation");
    r.tables = {std::move(t)};
    return r;
}

Summary summarize_stdp(const Params& p, const std::vector<SeedRun>& runs) {
    const SeedRun& r = runs.front();
    Summary s;
    s.pass = r.pass;
    s.line = std::string("dw > 0 on (0, support): ") + (r.metric("positive_lobe") > 0 ? "yes" : "no") +
             ", dw < 0 for dt < -refractory: " + (r.metric("negative_tail") > 0 ? "yes" : "no") +
             ", tail variation " + fmt(r.metric("tail_variation"), 3) + " (< " + p.text("max_variation") + ")";
    return s;
}

// ---- alpha-design ----

SeedRun run_alpha_design(const Params& p, std::uint64_t) {
    DesignSpec spec;
    spec.psp_min = p.num("psp_min");
    spec.psp_max = p.num("psp_max");
    spec.delta_s = p.num("delta_s");
    spec.tau = p.num("tau");
    spec.t_max = p.num("t_max");
    spec.validate();
    const auto two = p.list("two_kernel_peaks");
    const auto three = p.list("min_norm_peaks");
    const auto start = p.list("start");
    const auto ref = p.list("reference");
    if (two.size() != 2 || three.size() != 3 || start.size() != 3 || ref.size() != 3)
        throw ConfigError("alpha-design needs 2 two-kernel peaks and 3 values for the other peak lists");

    const TwoKernelResult tk = two_kernel_feasible(spec, AlphaBasis::from_peaks(two));
    const AlphaBasis b3 = AlphaBasis::from_peaks(three);
    const Eigen::Vector3d w = min_norm_weights(spec, b3);
    const double violation = design_violation(spec, b3, w);
    NelderMeadOptions nm;
    nm.max_evaluations = static_cast<int>(p.integer("max_evaluations"));
    const PeakDesign d = optimize_peak_times(spec, {start[0], start[1], start[2]}, nm);

    SeedRun r;
    double worst = 0.0;
    Table peaks{"peaks", {"kernel", "optimized_peak", "reference_peak"}, {}};
    std::vector<double> sorted_ref = ref;
    std::sort(sorted_ref.begin(), sorted_ref.end());
    for (std::size_t k = 0; k < 3; ++k) {
        peaks.add({k, d.peaks[k], sorted_ref[k]});
        worst = std::max(worst, std::abs(d.peaks[k] - sorted_ref[k]));
    }
    Table weights{"min_norm_weights", {"kernel", "peak", "weight"}, {}};
    for (std::size_t k = 0; k < 3; ++k) weights.add({k, three[k], w(static_cast<Eigen::Index>(k))});
    r.metrics = {{"two_kernel_feasible", tk.feasible ? 1.0 : 0.0},
                 {"w2_lower", tk.w2_lower},
                 {"w2_upper", tk.w2_upper},
                 {"min_norm_violation", violation},
                 {"cost", d.cost},
                 {"evaluations", static_cast<double>(d.evaluations)},
                 {"peak_error", worst}};
    r.pass = !tk.feasible && violation <= 1e-6 && worst <= p.num("peak_tolerance");
    Table psp{"psp_profile", {"t", "psp"}, {}};
    try {
        const AlphaBasis bd = AlphaBasis::from_peaks({d.peaks.begin(), d.peaks.end()});
        const Eigen::Vector3d wd = min_norm_weights(spec, bd);
        for (double t = 0.0; t <= spec.t_max + 1e-9; t += spec.delta_s / 2.0) {
            double v = 0.0;
            for (std::size_t k = 0; k < 3; ++k) v += wd(static_cast<Eigen::Index>(k)) * bd.value(k, t);
            psp.add({t, v});
        }
    } catch (const std::domain_error&) {
    }
    r.tables = {std::move(peaks), std::move(weights), std::move(psp)};
    return r;
}

Summary summarize_alpha_design(const Params& p, const std::vector<SeedRun>& runs) {
    const SeedRun& r = runs.front();
    Summary s;
    s.pass = r.pass;
    s.line = std::string("two-kernel ") + (r.metric("two_kernel_feasible") > 0 ? "feasible" : "infeasible") +
             ", min-norm violation " + fmt(r.metric("min_norm_violation"), 3) + " (<= 1e-6), optimized peaks [" +
             r.tables[0].rows[0][1] + ", " + r.tables[0].rows[1][1] + ", " + r.tables[0].rows[2][1] +
             "] max error " + fmt(r.metric("peak_error"), 3) + " ms (<= " + p.text("peak_tolerance") + ")";
    return s;
}

}  // namespace

std::vector<Experiment> neuron_experiments() {
    return {
        {"delay",
         "learn the delay between one input spike and one output spike",
         {{"dt", "6", PT::number, "target delay, ms"},
          {"iters", "1000", PT::integer, "training presentations"},
          {"check_iter", "20", PT::integer, "iteration at which the surprisal ratio is checked"},
          {"kappa", "0.04", PT::number, "stochasticity"},
          {"threshold", "1", PT::number, "threshold"},
          {"gamma", "0.002", PT::number, "learning rate"},
          {"mode", "teacher-forced", PT::text, "teacher-forced | online"},
          {"init", "0.1", PT::number, "initial weights drawn from U(0, init)"},
          {"tail", "15", PT::number, "horizon after the target, ms"},
          {"max_ratio", "0.3", PT::number, "surprisal ratio threshold"},
          {"tolerance", "1", PT::number, "spike-time tolerance, ms"},
          {"seed_fraction", "0.8", PT::number, "fraction of seeds that must pass"}},
         run_delay,
         summarize_delay},
        {"detect",
         "detect a two-spike pattern and suppress responses to its fragments",
         {{"epochs", "400", PT::integer, "training epochs"},
          {"kappa", "0.05", PT::number, "stochasticity"},
          {"threshold", "1", PT::number, "threshold"},
          {"gamma", "0.002", PT::number, "learning rate"},
          {"mode", "online", PT::text, "online | teacher-forced"},
          {"suppress", "1", PT::flag, "present the fragments without a teacher each epoch"},
          {"delta_in", "5", PT::number, "interval between the input spikes, ms"},
          {"delta_out", "4", PT::number, "output delay after the second input, ms"},
          {"tail", "12", PT::number, "horizon after the target, ms"},
          {"window", "1", PT::integer, "half-width of the response window, steps"},
          {"log_every", "20", PT::integer, "epochs between curve rows"},
          {"min_full", "0.8", PT::number, "required P(window | full pattern)"},
          {"max_fragment", "0.05", PT::number, "allowed P(window | fragment)"},
          {"seed_fraction", "0.8", PT::number, "fraction of seeds that must pass"}},
         run_detect,
         summarize_detect},
        {"stdp",
         "weight change against input-output timing for a single kernel",
         {{"peak", "3.3", PT::number, "kernel peak, ms"},
          {"threshold", "1.5", PT::number, "threshold"},
          {"kappa", "0.1", PT::number, "stochasticity"},
          {"w", "0.2", PT::number, "weight"},
          {"gamma", "1", PT::number, "learning rate"},
          {"reach", "60", PT::number, "most negative delta_t, ms"},
          {"resolution", "0.5", PT::number, "delta_t spacing, ms"},
          {"step", "0.01", PT::number, "quadrature step, ms"},
          {"max_variation", "0.1", PT::number, "allowed tail variation relative to its mean"}},
         run_stdp,
         summarize_stdp},
        {"alpha-design",
         "kernel peak design: two-kernel feasibility, minimum-norm weights, peak optimization",
         {{"psp_min", "0.1", PT::number, "largest allowed potential away from tau"},
          {"psp_max", "0.2", PT::number, "potential at tau"},
          {"delta_s", "1", PT::number, "spike-time precision, ms"},
          {"tau", "6", PT::number, "delay for the feasibility checks, ms"},
          {"t_max", "15", PT::number, "longest pattern, ms"},
          {"two_kernel_peaks", "2,6", PT::list, "peaks of the two-kernel basis"},
          {"min_norm_peaks", "2,6,15", PT::list, "peaks of the three-kernel basis"},
          {"start", "2,6,15", PT::list, "optimizer start"},
          {"reference", "1.8,3.3,9.3", PT::list, "expected optimum"},
          {"peak_tolerance", "0.5", PT::number, "allowed peak error, ms"},
          {"max_evaluations", "4000", PT::integer, "optimizer budget"}},
         run_alpha_design,
         summarize_alpha_design},
    };
}

}  // namespace infospike::experiments
