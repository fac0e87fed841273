#include <algorithm>
#include <cmath>

#include "experiments.hpp"
#include "infospike/entropy.hpp"
#include "infospike/rng.hpp"

namespace infospike::experiments {

namespace {

using PT = ParamType;

// ---- entropy-toy ----

SeedRun run_entropy_toy(const Params& p, std::uint64_t seed) {
    NeuronConfig cfg;
    cfg.inputs = 2;
    cfg.kappa = p.num("kappa");
    cfg.threshold = p.num("threshold");
    cfg.validate();
    const auto w1 = p.list("w1"), w2 = p.list("w2");
    if (w1.size() != cfg.kernels() || w2.size() != cfg.kernels()) throw ConfigError("w1 and w2 need 3 weights");
    Weights w(2, 3);
    for (Eigen::Index k = 0; k < 3; ++k) {
        w(0, k) = w1[static_cast<std::size_t>(k)];
        w(1, k) = w2[static_cast<std::size_t>(k)];
    }
    const double sep = p.num("separation");
    if (!(sep >= 2.0)) throw ConfigError("separation must be at least 2 ms");
    const long half = horizon_steps(sep, cfg.dt);
    const long steps = 2 * half;
    SpikePattern x(2, 2.0 * sep);
    x.add(0, 0.0);
    x.add(1, sep);

    Rng rng = split_rng(seed, "entropy-toy.train");
    Neuron n(cfg, w);
    auto response = [&](long lo, long hi) { return window_spike_probability(cfg, n.weights(), x, steps, lo, hi); };

    SeedRun r;
    Table curve{"entropy", {"iteration", "entropy", "p_first_window", "p_second_window"}, {}};
    const double H0 = entropy_renewal(cfg, n.weights(), x, steps);
    const double p1_0 = response(0, half - 1), p2_0 = response(half, steps - 1);
    curve.add({0L, H0, p1_0, p2_0});
    double prev = H0;
    bool strict = true;
    const long iters = p.integer("iters");
    for (long it = 1; it <= iters; ++it) {
        entropy_iteration(n, x, p.num("gamma"), rng);
        const double H = entropy_renewal(cfg, n.weights(), x, steps);
        strict = strict && H < prev;
        prev = H;
        curve.add({it, H, response(0, half - 1), response(half, steps - 1)});
    }
    const double p1 = response(0, half - 1), p2 = response(half, steps - 1);
    const double d1 = n.weights().row(0).sum() - w.row(0).sum();
    const double d2 = n.weights().row(1).sum() - w.row(1).sum();
    r.metrics = {{"initial_entropy", H0},
                 {"final_entropy", prev},
                 {"entropy_ratio", prev / H0},
                 {"strictly_decreasing", strict ? 1.0 : 0.0},
                 {"p_first_window", p1},
                 {"p_second_window", p2},
                 {"channel1_weight_change", d1},
                 {"channel2_weight_change", d2}};
    r.pass = strict && prev <= p.num("max_ratio") * H0 && p2 <= p.num("max_second") && p2 < p2_0 && p1 > p1_0 &&
             d1 > 0.0 && d2 < 0.0;
    Table weights{"weights", {"channel", "w1", "w2", "w3"}, {}};
    for (Eigen::Index c = 0; c < 2; ++c)
        weights.add({static_cast<long>(c), n.weights()(c, 0), n.weights()(c, 1), n.weights()(c, 2)});
    r.tables = {std::move(curve), std::move(weights)};
    return r;
}

Summary summarize_entropy_toy(const Params& p, const std::vector<SeedRun>& runs) {
    std::size_t ok = 0, strict = 0;
    double worst = 0.0, p2 = 0.0;
    for (const auto& r : runs) {
        ok += r.pass;
        strict += r.metric("strictly_decreasing") > 0;
        worst = std::max(worst, r.metric("entropy_ratio"));
        p2 = std::max(p2, r.metric("p_second_window"));
    }
    Summary s;
    s.pass = ok == runs.size();
    s.line = "strictly decreasing on " + std::to_string(strict) + "/" + std::to_string(runs.size()) +
             " seeds, worst final/initial entropy " + fmt(worst, 3) + " (<= " + p.text("max_ratio") +
             "), second-window response max " + fmt(p2, 3) + " (<= " + p.text("max_second") + "), " +
             std::to_string(ok) + "/" + std::to_string(runs.size()) + " seeds pass";
    return s;
}

// ---- composite ----

std::vector<PhaseSpec> schedule(long sup, Phase second, long n) {
    std::vector<PhaseSpec> s;
    if (sup > 0) s.push_back({Phase::supervised, static_cast<int>(sup)});
    if (n > 0) s.push_back({second, static_cast<int>(n)});
    return s;
}

SeedRun run_composite(const Params& p, std::uint64_t seed) {
    NeuronConfig cfg;
    cfg.inputs = 1;
    cfg.kappa = p.num("kappa");
    cfg.threshold = p.num("threshold");
    cfg.basis = AlphaBasis::from_peaks(p.list("peaks"));
    cfg.validate();
    const double horizon = p.num("horizon");
    const double target = p.num("target");
    if (!(target >= 0.0 && target < horizon)) throw ConfigError("target must lie inside the horizon");
    SpikePattern x(1, horizon);
    x.add(0, 0.0);
    const SpikeTrain y(horizon, {target});
    CompositeOptions opt;
    opt.gamma_sup = p.num("gamma_sup");
    opt.gamma_uns = p.num("gamma_uns");
    opt.window = p.integer("window");

    const auto a = schedule(p.integer("a_supervised"), Phase::both, p.integer("a_both"));
    const auto b = schedule(p.integer("b_supervised"), Phase::unsupervised, p.integer("b_unsupervised"));
    Rng ra = split_rng(seed, "composite.a"), rb = split_rng(seed, "composite.b");
    Neuron na(cfg), nb(cfg);
    const auto la = composite_train(na, x, y, a, opt, ra);
    const auto lb = composite_train(nb, x, y, b, opt, rb);

    SeedRun r;
    Table t{"training", {"schedule", "iteration", "phase", "entropy", "desired_probability", "window_probability"}, {}};
    for (const auto& [name, log] : {std::pair{"a", &la}, std::pair{"b", &lb}})
        for (const auto& rec : *log)
            t.add({name, rec.iteration, phase_name(rec.phase), rec.entropy, rec.desired_probability,
                   rec.window_probability});
    const double pa = la.empty() ? 0.0 : la.back().window_probability;
    const double pb = lb.empty() ? 0.0 : lb.back().window_probability;
    const double success = p.num("success");
    r.metrics = {{"a_window_probability", pa},
                 {"b_window_probability", pb},
                 {"a_success", pa >= success ? 1.0 : 0.0},
                 {"b_success", pb >= success ? 1.0 : 0.0}};
    r.pass = pa >= success && pb < success;
    r.tables = {std::move(t)};
    return r;
}

Summary summarize_composite(const Params& p, const std::vector<SeedRun>& runs) {
    std::size_t a = 0, b_fail = 0;
    for (const auto& r : runs) {
        a += r.metric("a_success") > 0;
        b_fail += r.metric("b_success") == 0;
    }
    const std::size_t need_a = required(p.num("a_fraction"), runs.size());
    const std::size_t need_b = required(p.num("b_fraction"), runs.size());
    Summary s;
    s.pass = a >= need_a && b_fail >= need_b;
    s.line = "schedule a succeeds on " + std::to_string(a) + "/" + std::to_string(runs.size()) + " (need " +
             std::to_string(need_a) + "), schedule b fails on " + std::to_string(b_fail) + "/" +
             std::to_string(runs.size()) + " (need " + std::to_string(need_b) + ")";
    return s;
}

}  // namespace

std::vector<Experiment> entropy_experiments() {
    return {
        {"entropy-toy",
         "online entropy minimization on a two-channel, two-spike input",
         {{"iters", "100", PT::integer, "presentations"},
          {"kappa", "0.1", PT::number, "stochasticity"},
          {"threshold", "1.15", PT::number, "threshold"},
          {"gamma", "0.01", PT::number, "learning rate"},
          {"separation", "30", PT::number, "time between the two input spikes, ms; horizon is twice this"},
          {"w1", "0.1,0.7,0.3", PT::list, "initial channel-1 weights"},
          {"w2", "0.1,0.6,0.3", PT::list, "initial channel-2 weights"},
          {"max_ratio", "0.5", PT::number, "allowed final/initial entropy"},
          {"max_second", "0.05", PT::number, "allowed second-window spike probability after training"}},
         run_entropy_toy,
         summarize_entropy_toy},
        {"composite",
         "supervised pretraining followed by combined or unsupervised phases",
         {{"kappa", "0.1", PT::number, "stochasticity"},
          {"threshold", "1", PT::number, "threshold"},
          {"peaks", "1,10", PT::list, "kernel peaks, ms"},
          {"horizon", "20", PT::number, "pattern length, ms"},
          {"target", "6", PT::number, "desired output spike, ms"},
          {"gamma_sup", "0.01", PT::number, "supervised learning rate"},
          {"gamma_uns", "0.01", PT::number, "entropy learning rate"},
          {"window", "1", PT::integer, "half-width of the success window, steps"},
          {"a_supervised", "50", PT::integer, "schedule a: supervised presentations"},
          {"a_both", "100", PT::integer, "schedule a: combined presentations"},
          {"b_supervised", "100", PT::integer, "schedule b: supervised presentations"},
          {"b_unsupervised", "100", PT::integer, "schedule b: unsupervised presentations"},
          {"success", "0.8", PT::number, "window probability counted as success"},
          {"a_fraction", "0.7", PT::number, "fraction of seeds where schedule a must succeed"},
          {"b_fraction", "0.5", PT::number, "fraction of seeds where schedule b must fail"}},
         run_composite,
         summarize_composite},
    };
}

}  // namespace infospike::experiments
