#include <algorithm>
#include <cmath>
#include <random>

#include "experiments.hpp"
#include "infospike/entropy.hpp"
#include "infospike/oracles.hpp"
#include "infospike/rng.hpp"
#include "infospike/supervised.hpp"

namespace infospike::experiments {

namespace {

using PT = ParamType;

SpikePattern random_pattern(Rng& g, std::size_t channels, double horizon, double rate) {
    SpikePattern p(channels, horizon);
    std::bernoulli_distribution b(rate);
    const long steps = horizon_steps(horizon, 1.0);
    for (std::size_t c = 0; c < channels; ++c)
        for (long t = 0; t < steps; ++t)
            if (b(g)) p.add(c, static_cast<double>(t));
    return p;
}

Weights random_weights(Rng& g, std::size_t inputs, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Weights w(static_cast<Eigen::Index>(inputs), 3);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = u(g);
    return w;
}

SpikeTrain random_output(Rng& g, const NeuronConfig& cfg, double horizon, double rate) {
    SpikeTrain y(horizon);
    std::bernoulli_distribution b(rate);
    long last = -1000000;
    for (long t = 0; t < horizon_steps(horizon, cfg.dt); ++t)
        if (t - last >= cfg.refractory_steps() && b(g)) {
            y.push_back(static_cast<double>(t) * cfg.dt);
            last = t;
        }
    return y;
}

double rel_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor) {
    return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

std::vector<bool> mask_bits(std::uint32_t mask, int steps) {
    std::vector<bool> f(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) f[static_cast<std::size_t>(t)] = (mask >> t) & 1u;
    return f;
}

long count(const Params& p, const std::string& key) {
    const long n = p.integer(key);
    if (n < 1) throw ConfigError(key + " must be positive");
    return n;
}

struct Supervised {
    NeuronConfig cfg;
    SpikePattern x;
    Weights w;
    SpikeTrain y;
};

Supervised supervised_case(Rng& g, long i) {
    Supervised s;
    s.cfg.inputs = 2 + i % 2;
    s.cfg.kappa = 0.25 + 0.05 * static_cast<double>(i % 6);
    s.cfg.refractory = 1.0 + static_cast<double>(i % 2);
    const double T = 15.0 + 5.0 * static_cast<double>(i % 4);
    s.x = random_pattern(g, s.cfg.inputs, T, 0.15);
    s.w = random_weights(g, s.cfg.inputs, -0.6, 1.2);
    s.y = random_output(g, s.cfg, T, 0.1);
    return s;
}

struct Unsupervised {
    NeuronConfig cfg;
    SpikePattern x;
    Weights w;
    int steps = 0;
};

Unsupervised entropy_case(Rng& g, long i, int max_steps) {
    Unsupervised c;
    c.cfg.inputs = 2;
    c.cfg.kappa = 0.3 + 0.1 * static_cast<double>(i % 4);
    c.cfg.refractory = 1.0 + static_cast<double>(i % 3);
    c.steps = 4 + static_cast<int>(i % (max_steps - 3));
    c.x = random_pattern(g, 2, c.steps, 0.3);
    c.w = random_weights(g, 2, -0.5, 2.0);
    return c;
}

// ---- suites ----

void normalization(const Params& p, Rng& g, SeedRun& r) {
    const long n = count(p, "instances");
    const int max_steps = static_cast<int>(p.integer("steps"));
    if (max_steps < 4 || max_steps > 16) throw ConfigError("steps must lie in [4, 16]");
    Table t{"normalization", {"instance", "steps", "patterns", "total_probability", "max_probability_error"}, {}};
    double worst_total = 0.0, worst_prob = 0.0;
    for (long i = 0; i < n; ++i) {
        NeuronConfig cfg;
        cfg.inputs = 2;
        cfg.kappa = 0.3 + 0.1 * static_cast<double>(i % 5);
        cfg.refractory = 1.0 + static_cast<double>(i % 3);
        const int steps = std::min(max_steps, 4 + static_cast<int>(i % (max_steps - 3)));
        const SpikePattern x = random_pattern(g, 2, steps, 0.25);
        const Weights w = random_weights(g, 2, -1.0, 1.5);
        const auto dist = oracles::enumerate_output_distribution(cfg, w, x, steps);
        const InputSchedule sched = schedule_inputs(x, cfg.dt, steps);
        double total = 0.0, err = 0.0;
        for (const auto& e : dist) {
            total += e.probability;
            const double h = surprisal_of_steps(cfg, w, sched, mask_bits(e.mask, steps), true);
            const double ref = e.feasible ? std::exp(-h) : 0.0;
            err = std::max(err, std::abs(e.probability - ref));
        }
        worst_total = std::max(worst_total, std::abs(total - 1.0));
        worst_prob = std::max(worst_prob, err);
        t.add({i, static_cast<long>(steps), dist.size(), total, err});
    }
    r.metrics.push_back({"normalization_instances", static_cast<double>(n)});
    r.metrics.push_back({"normalization_max_total_error", worst_total});
    r.metrics.push_back({"normalization_max_probability_error", worst_prob});
    r.pass = r.pass && worst_total <= p.num("total_tolerance") && worst_prob <= p.num("probability_tolerance");
    r.tables.push_back(std::move(t));
}

void gradients(const Params& p, Rng& g, SeedRun& r) {
    const long n = count(p, "gradient_instances");
    const double eps = p.num("fd_step"), tol = p.num("gradient_tolerance");
    Table t{"gradients", {"quantity", "instance", "relative_error"}, {}};
    double sup = 0.0, ent = 0.0, hat = 0.0, hat_value = 0.0;

    for (long i = 0; i < n; ++i) {
        const Supervised s = supervised_case(g, i);
        const Eigen::MatrixXd grad = surprisal_gradient(s.cfg, s.w, s.x, s.y);
        const Eigen::MatrixXd fd = oracles::fd_gradient(
            [&](const Weights& w) { return pattern_surprisal_discrete(s.cfg, w, s.x, s.y); }, s.w, eps);
        const double e = rel_norm(grad, fd, 1e-8);
        sup = std::max(sup, e);
        t.add({"surprisal", i, e});
    }
    // Entropy gradients are compared only where they are resolvable above the difference quotient's roundoff.
    const double floor = p.num("min_gradient");
    long checked = 0;
    for (long i = 0; checked < n; ++i) {
        const Unsupervised c = entropy_case(g, i, 9);
        const EntropyEval e = entropy_gradient_exact(c.cfg, c.w, c.x, c.steps);
        if (e.grad.norm() < floor) continue;
        const Eigen::MatrixXd fd = oracles::fd_gradient(
            [&](const Weights& w) { return entropy_exact(c.cfg, w, c.x, c.steps); }, c.w, eps);
        const double err = rel_norm(e.grad, fd, 1e-10);
        ent = std::max(ent, err);
        t.add({"entropy", checked++, err});
    }
    checked = 0;
    for (long i = 0; checked < n; ++i) {
        const Unsupervised c = entropy_case(g, i, 12);
        const HatEval h = hat_entropy(c.cfg, c.w, c.x, c.steps);
        const auto dist = oracles::enumerate_output_distribution(c.cfg, c.w, c.x, c.steps);
        hat_value = std::max(hat_value, std::abs(h.H - oracles::enumerated_hat_entropy(dist, c.steps)));
        if (h.grad.norm() < floor) continue;
        const Eigen::MatrixXd fd = oracles::fd_gradient(
            [&](const Weights& w) { return hat_entropy(c.cfg, w, c.x, c.steps).H; }, c.w, eps);
        const double err = rel_norm(h.grad, fd, 1e-10);
        hat = std::max(hat, err);
        t.add({"hat_entropy", checked++, err});
    }
    r.metrics.push_back({"gradient_instances", static_cast<double>(n)});
    r.metrics.push_back({"surprisal_gradient_max_error", sup});
    r.metrics.push_back({"entropy_gradient_max_error", ent});
    r.metrics.push_back({"hat_gradient_max_error", hat});
    r.metrics.push_back({"hat_entropy_max_value_error", hat_value});
    r.pass = r.pass && sup < tol && ent < tol && hat < tol && hat_value <= p.num("probability_tolerance");
    r.tables.push_back(std::move(t));
}

void convexity(const Params& p, Rng& g, SeedRun& r) {
    const long n = count(p, "convexity_instances");
    const double max_norm = p.num("max_hessian_norm");
    Table t{"convexity", {"instance", "hessian_norm", "min_eigenvalue", "max_chord_violation", "eigen_checked"}, {}};
    double min_eig = 1e300, min_rel = 1e300, chord = 0.0;
    long checked = 0, skipped = 0;
    for (long i = 0; checked < n; ++i) {
        const Supervised s = supervised_case(g, i);
        const HessianResult H = surprisal_hessian(s.cfg, s.w, s.x, s.y);
        const Weights w2 = random_weights(g, s.cfg.inputs, -0.6, 1.2);
        auto h = [&](const Weights& w) { return pattern_surprisal_discrete(s.cfg, w, s.x, s.y); };
        const double h0 = h(s.w), h1 = h(w2);
        double v = 0.0;
        for (int k = 1; k <= 9; ++k) {
            const double a = 0.1 * k;
            const double ht = h((1.0 - a) * s.w + a * w2);
            v = std::max(v, (ht - ((1.0 - a) * h0 + a * h1)) / std::max(1.0, std::abs(ht)));
        }
        chord = std::max(chord, v);
        // An absolute eigenvalue bound is below double resolution once |H| is large.
        const bool resolvable = H.H.norm() <= max_norm;
        if (H.H.norm() > 0.0) min_rel = std::min(min_rel, H.min_eigenvalue / H.H.norm());
        if (resolvable) {
            min_eig = std::min(min_eig, H.min_eigenvalue);
            ++checked;
        } else {
            ++skipped;
        }
        t.add({i, H.H.norm(), H.min_eigenvalue, v, resolvable ? 1L : 0L});
    }
    r.metrics.push_back({"convexity_instances", static_cast<double>(n)});
    r.metrics.push_back({"convexity_saturated_skipped", static_cast<double>(skipped)});
    r.metrics.push_back({"min_eigenvalue", min_eig});
    r.metrics.push_back({"min_relative_eigenvalue", min_rel});
    r.metrics.push_back({"max_chord_violation", chord});
    r.pass = r.pass && min_eig >= -p.num("eigen_tolerance") && min_rel >= -1e-12 && chord <= 1e-10;
    r.tables.push_back(std::move(t));
}

void metric(const Params& p, Rng& g, SeedRun& r) {
    const long n = count(p, "triples");
    const auto k = DistanceKernel::gaussian(p.num("sigma"));
    const double T = 20.0;
    Table t{"metric", {"check", "worst"}, {}};
    double tri = 0.0, sym = 0.0, self = 0.0, lower = 0.0, empty = 0.0;
    const SpikePattern none(2, T);
    for (long i = 0; i < n; ++i) {
        const double rate = 0.05 + 0.05 * static_cast<double>(i % 4);
        const SpikePattern a = random_pattern(g, 2, T, rate), b = random_pattern(g, 2, T, rate),
                           c = random_pattern(g, 2, T, rate);
        const double ab = pattern_distance(a, b, k), bc = pattern_distance(b, c, k), ac = pattern_distance(a, c, k);
        tri = std::max(tri, ac - (ab + bc));
        sym = std::max(sym, std::abs(ab - pattern_distance(b, a, k)));
        self = std::max(self, pattern_distance(a, a, k));
        lower = std::max(lower, -std::min({ab, bc, ac}));
        empty = std::max(empty, std::abs(pattern_distance(a, none, k) - static_cast<double>(a.spike_count())));
    }
    double singles = 0.0;
    for (double gap : {10.0, 20.0, 40.0}) {
        SpikePattern x(1, 100.0), y(1, 100.0);
        x.add(0, 20.0);
        y.add(0, 20.0 + gap);
        singles = std::max(singles, std::abs(pattern_distance(x, y, k) - 2.0));
    }
    t.add({"triangle_excess", tri});
    t.add({"asymmetry", sym});
    t.add({"self_distance", self});
    t.add({"negative_distance", lower});
    t.add({"empty_minus_count", empty});
    t.add({"separated_singles_minus_2", singles});
    r.metrics.push_back({"metric_triples", static_cast<double>(n)});
    r.metrics.push_back({"triangle_excess", tri});
    r.metrics.push_back({"empty_count_error", empty});
    r.metrics.push_back({"separated_singles_error", singles});
    r.pass = r.pass && tri <= 1e-9 && sym <= 1e-12 && self <= 1e-12 && lower <= 0.0 &&
             empty <= p.num("count_tolerance") && singles <= p.num("singles_tolerance");
    r.tables.push_back(std::move(t));
}

SeedRun run_oracle(const Params& p, std::uint64_t seed) {
    const std::string& suite = p.text("suite");
    const bool all = suite == "all";
    if (!all && suite != "normalization" && suite != "gradients" && suite != "convexity" && suite != "metric")
        throw ConfigError("suite must be normalization, gradients, convexity, metric or all");
    SeedRun r;
    r.pass = true;
    Rng g = split_rng(seed, "oracle." + suite);
    if (all || suite == "normalization") normalization(p, g, r);
    if (all || suite == "gradients") gradients(p, g, r);
    if (all || suite == "convexity") convexity(p, g, r);
    if (all || suite == "metric") metric(p, g, r);
    return r;
}

Summary summarize_oracle(const Params&, const std::vector<SeedRun>& runs) {
    Summary s;
    s.pass = std::all_of(runs.begin(), runs.end(), [](const SeedRun& r) { return r.pass; });
    for (const auto& m : runs.front().metrics) {
        double worst = m.value;
        const bool is_min = m.key == "min_eigenvalue" || m.key == "min_relative_eigenvalue";
        for (const auto& r : runs) worst = is_min ? std::min(worst, r.metric(m.key)) : std::max(worst, r.metric(m.key));
        s.line += (s.line.empty() ? "" : ", ") + m.key + " " + fmt(worst, 3);
    }
    return s;
}

}  // namespace

std::vector<Experiment> oracle_experiments() {
    return {{"oracle",
             "enumeration, finite-difference and metric checks of the core quantities",
             {{"suite", "normalization", PT::text, "normalization | gradients | convexity | metric | all"},
              {"steps", "12", PT::integer, "largest enumerated horizon, steps"},
              {"instances", "50", PT::integer, "normalization instances"},
              {"gradient_instances", "100", PT::integer, "non-degenerate instances per gradient"},
              {"convexity_instances", "50", PT::integer, "Hessian and chord instances"},
              {"triples", "1000", PT::integer, "random pattern triples for the metric axioms"},
              {"fd_step", "1e-5", PT::number, "central-difference step"},
              {"min_gradient", "1e-4", PT::number, "entropy instances with a smaller gradient norm are skipped"},
              {"gradient_tolerance", "1e-5", PT::number, "relative gradient error"},
              {"total_tolerance", "1e-9", PT::number, "|sum P - 1|"},
              {"probability_tolerance", "1e-10", PT::number, "per-pattern probability error"},
              {"eigen_tolerance", "1e-9", PT::number, "allowed negative Hessian eigenvalue"},
              {"max_hessian_norm", "1e6", PT::number, "larger Hessians are left out of the eigenvalue check"},
              {"sigma", "1", PT::number, "distance kernel width, ms"},
              {"count_tolerance", "1e-3", PT::number, "d(x, empty) against the spike count"},
              {"singles_tolerance", "0.01", PT::number, "distance of separated single spikes against 2"}},
             run_oracle,
             summarize_oracle}};
}

}  // namespace infospike::experiments
