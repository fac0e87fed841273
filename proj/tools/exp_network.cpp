#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "experiments.hpp"
#include "infospike/gridenv.hpp"
#include "infospike/rng.hpp"

namespace infospike::experiments {

namespace {

using PT = ParamType;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---- memory ----

struct StoredPattern {
    SpikePattern pattern;
    bool canvas = false;
};

StoredPattern memory_pattern(const Params& p) {
    if (!p.text("pixels").empty()) {
        const std::string text = slurp(p.text("pixels"));
        double last = 0.0;
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);) {
            std::istringstream f(line.substr(0, line.find('#')));
            double x, y, t;
            if (f >> x >> y >> t) last = std::max(last, t);
        }
        return {read_pixels(text, last + p.num("tail")), true};
    }
    const std::string& kind = p.text("pattern");
    if (kind == "synfire") {
        const long n = p.integer("channels");
        if (n < 2) throw ConfigError("channels must be at least 2");
        const double start = p.num("start"), spacing = p.num("spacing");
        if (!(spacing >= 1.0)) throw ConfigError("spacing must be at least 1 ms");
        SpikePattern s(static_cast<std::size_t>(n), start + spacing * static_cast<double>(n - 1) + p.num("tail"));
        for (long c = 0; c < n; ++c) s.add(static_cast<std::size_t>(c), start + spacing * static_cast<double>(c));
        return {s, false};
    }
    if (kind == "staircase") {
        SpikePattern s(5, 30.0);
        const double times[] = {2, 4, 7, 11, 14};
        for (std::size_t c = 0; c < 5; ++c) s.add(c, times[c]);
        return {s, false};
    }
    return {read_pattern(slurp(kind)), false};
}

SeedRun run_memory(const Params& p, std::uint64_t seed) {
    const StoredPattern stored = memory_pattern(p);
    const SpikePattern& x = stored.pattern;
    NeuronConfig cfg;
    cfg.kappa = p.num("kappa");
    cfg.threshold = p.num("threshold");
    cfg.validate();
    NetworkLearning learning;
    learning.gamma_supervised = p.num("gamma");
    const std::string& mode = p.text("mode");
    if (mode == "teacher-forced")
        learning.supervised_mode = SupervisedMode::teacher_forced;
    else if (mode != "online")
        throw ConfigError("mode must be 'teacher-forced' or 'online'");
    const long clue_spikes = p.integer("clue");
    if (clue_spikes < 0) throw ConfigError("clue must be non-negative");
    const SpikePattern clue = x.first_spikes(static_cast<std::size_t>(clue_spikes));
    const auto kernel = DistanceKernel::gaussian(p.num("sigma"));

    MemoryNetwork m = build_memory(x.channels(), cfg, learning);
    Rng store_rng = split_rng(seed, "memory.store"), recall_rng = split_rng(seed, "memory.recall");
    SeedRun r;
    Table curve{"recall", {"iteration", "distance", "recalled_spikes"}, {}};
    SpikePattern recalled = recall(m, clue, x.horizon(), recall_rng);
    curve.add({0L, pattern_distance(recalled, x, kernel), recalled.spike_count()});
    double best = pattern_distance(recalled, x, kernel);
    long best_at = 0;
    for (long it = 1; it <= p.integer("iters"); ++it) {
        store(m, x, 1, store_rng);
        recalled = recall(m, clue, x.horizon(), recall_rng);
        const double d = pattern_distance(recalled, x, kernel);
        curve.add({it, d, recalled.spike_count()});
        if (d < best) best = d, best_at = it;
    }
    r.metrics = {{"final_distance", std::stod(curve.rows.back()[1])},
                 {"best_distance", best},
                 {"best_iteration", static_cast<double>(best_at)},
                 {"pattern_spikes", static_cast<double>(x.spike_count())}};
    r.pass = best <= p.num("max_distance");
    r.tables = {std::move(curve)};
    r.files = {{"recalled.txt", stored.canvas ? write_pixels(recalled) : write_pattern(recalled)}};
    return r;
}

Summary summarize_memory(const Params& p, const std::vector<SeedRun>& runs) {
    const std::size_t len = runs.front().tables.front().rows.size();
    std::vector<double> mean(len, 0.0);
    for (const auto& r : runs)
        for (std::size_t i = 0; i < len; ++i)
            mean[i] += std::stod(r.tables.front().rows[i][1]) / static_cast<double>(runs.size());
    const auto best = std::min_element(mean.begin() + (len > 1 ? 1 : 0), mean.end());
    Summary s;
    s.pass = *best <= p.num("max_distance");
    s.line = "mean recall distance over " + std::to_string(runs.size()) + " seeds: best " + fmt(*best, 3) +
             " at iteration " + std::to_string(best - mean.begin()) + ", final " + fmt(mean.back(), 3) + " (<= " +
             p.text("max_distance") + " required within " + p.text("iters") + " iterations)";
    return s;
}

// ---- grid and faults ----

struct GridSetup {
    GridConfig world;
    NeuronConfig neuron;
    NetworkLearning learning;
    Architecture arch = Architecture::one_layer_4;
};

GridSetup grid_setup(const Params& p) {
    GridSetup g;
    const long size = p.integer("size");
    g.world.width = static_cast<int>(p.integer("width") > 0 ? p.integer("width") : size);
    g.world.height = static_cast<int>(p.integer("height") > 0 ? p.integer("height") : size);
    g.world.sensor_rate = p.num("sensor_rate");
    g.world.energy_decay = p.num("energy_decay");
    g.world.stimulation_scale = p.num("stimulation_scale");
    try {
        g.world.validate();
        g.arch = parse_architecture(p.text("arch"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    g.neuron.kappa = p.num("kappa");
    g.neuron.threshold = p.num("threshold");
    g.neuron.validate();
    g.learning.rl.gamma_plus = p.num("gamma_plus");
    g.learning.rl.gamma_minus = p.num("gamma_minus");
    g.learning.rl.tau_z = p.num("tau_z");
    g.learning.stimulation_factor = p.num("stimulation_factor");
    return g;
}

Table window_table(const std::string& name, const TrainingResult& r) {
    Table t{name, {"window_end", "reward", "punish", "cumulative_reward", "cumulative_punish"}, {}};
    for (const auto& w : r.windows) t.add({w.end, w.reward, w.punish, w.cumulative_reward, w.cumulative_punish});
    return t;
}

TrainingResult train_grid(const GridSetup& g, const TrainingOptions& opt, std::uint64_t seed) {
    Rng rng = split_rng(seed, "grid.run");
    GridWorld world(g.world, rng);
    GridAgent agent = build_grid_agent(g.arch, world.sensor_count(), g.neuron, g.learning);
    return run_training(world, agent, opt, rng);
}

SeedRun run_grid(const Params& p, std::uint64_t seed) {
    const GridSetup g = grid_setup(p);
    TrainingOptions opt;
    opt.steps = p.integer("steps");
    opt.window = p.integer("window");
    opt.record_steps = p.flag("record_steps");
    if (opt.steps < 1 || opt.window < 1) throw ConfigError("steps and window must be positive");
    const std::string& check = p.text("check");
    if (check != "ratio" && check != "curve") throw ConfigError("check must be 'ratio' or 'curve'");

    SeedRun r;
    const TrainingResult trained = train_grid(g, opt, seed);
    r.tables.push_back(window_table("windows", trained));
    if (opt.record_steps) r.files.push_back({"steps.csv", step_csv(trained)});
    const auto last = static_cast<std::size_t>(p.integer("last"));
    r.metrics = {{"reward", static_cast<double>(trained.reward)},
                 {"punish", static_cast<double>(trained.punish)},
                 {"punish_bump", static_cast<double>(trained.punish_bump)},
                 {"punish_ambiguous", static_cast<double>(trained.punish_ambiguous)},
                 {"steps_to_resource", trained.mean_steps_to_resource(last)}};
    if (check == "ratio") {
        opt.learning = false;
        opt.record_steps = false;
        const TrainingResult base = train_grid(g, opt, seed);
        r.tables.push_back(window_table("baseline_windows", base));
        const double b = base.mean_steps_to_resource(last);
        r.metrics.push_back({"baseline_steps_to_resource", b});
        r.metrics.push_back({"ratio", trained.mean_steps_to_resource(last) / b});
        r.pass = r.metrics.back().value < p.num("max_ratio");
    } else {
        r.pass = true;
    }
    return r;
}

double slope(const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    const double mx = (n - 1.0) / 2.0;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sxy += (static_cast<double>(i) - mx) * (y[i] - my);
        sxx += (static_cast<double>(i) - mx) * (static_cast<double>(i) - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

double mean_of(const std::vector<double>& v, std::size_t from, std::size_t to) {
    return std::accumulate(v.begin() + static_cast<long>(from), v.begin() + static_cast<long>(to), 0.0) /
           static_cast<double>(to - from);
}

Summary summarize_grid(const Params& p, const std::vector<SeedRun>& runs) {
    Summary s;
    if (p.text("check") == "ratio") {
        double trained = 0.0, base = 0.0;
        std::size_t ok = 0;
        for (const auto& r : runs) {
            trained += r.metric("steps_to_resource");
            base += r.metric("baseline_steps_to_resource");
            ok += r.pass;
        }
        const double ratio = trained / base;
        s.pass = ratio < p.num("max_ratio");
        s.line = "steps to resource over the last " + p.text("last") + " consumptions: trained " +
                 fmt(trained / static_cast<double>(runs.size())) + ", learning disabled " +
                 fmt(base / static_cast<double>(runs.size())) + ", ratio " + fmt(ratio, 3) + " (< " +
                 p.text("max_ratio") + "); " + std::to_string(ok) + "/" + std::to_string(runs.size()) +
                 " seeds below the ratio";
        return s;
    }
    const std::size_t len = runs.front().tables.front().rows.size();
    if (len < 6) throw ConfigError("curve check needs at least 6 windows");
    std::vector<double> reward(len, 0.0), punish(len, 0.0);
    for (const auto& r : runs)
        for (std::size_t i = 0; i < len; ++i) {
            reward[i] += std::stod(r.tables.front().rows[i][1]) / static_cast<double>(runs.size());
            punish[i] += std::stod(r.tables.front().rows[i][2]) / static_cast<double>(runs.size());
        }
    const auto peak = static_cast<std::size_t>(std::max_element(punish.begin(), punish.end()) - punish.begin());
    const double tail_punish = mean_of(punish, len - 3, len);
    const double r_first = mean_of(reward, 0, 3), r_last = mean_of(reward, len - 3, len);
    const double rs = slope(reward);
    const bool peak_early = peak < len / 2;
    const bool decline = tail_punish <= p.num("decline") * punish[peak];
    const bool rising = rs > 0.0 && r_last >= p.num("rise") * r_first;
    s.pass = peak_early && decline && rising;
    s.line = "punish peak in window " + std::to_string(peak + 1) + "/" + std::to_string(len) + " (" +
             fmt(punish[peak]) + "), last-3 mean " + fmt(tail_punish) + " (<= " + p.text("decline") +
             " x peak: " + (decline ? "yes" : "no") + "); reward slope " + fmt(rs, 3) + ", last-3 " + fmt(r_last) +
             " vs first-3 " + fmt(r_first) + " (>= " + p.text("rise") + "x: " + (rising ? "yes" : "no") + ")";
    return s;
}

Actuator actuator_param(const Params& p, const std::string& key) {
    try {
        return parse_actuator(p.text(key));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

SeedRun run_faults(const Params& p, std::uint64_t seed) {
    const GridSetup g = grid_setup(p);
    const long pre = p.integer("pretrain"), post = p.integer("post"), span = p.integer("span");
    if (pre < span || post < span || span < 1) throw ConfigError("pretrain and post must cover the rate span");
    TrainingOptions opt;
    opt.steps = pre + post;
    opt.window = p.integer("window");
    Fault fail, over;
    try {
        fail = Fault::fail(p.num("fail_probability"));
        over = Fault::overshoot(static_cast<int>(p.integer("overshoot_cells")));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    opt.faults = {{pre, actuator_param(p, "fail_actuator"), fail}, {pre, actuator_param(p, "overshoot_actuator"), over}};
    const TrainingResult t = train_grid(g, opt, seed);
    const double before = t.reward_rate(pre - span, pre);
    const double dip = t.reward_rate(pre, pre + span);
    const double after = t.reward_rate(pre + post - span, pre + post);

    SeedRun r;
    r.metrics = {{"rate_before", before},
                 {"rate_after_fault", dip},
                 {"rate_recovered", after},
                 {"recovery", before > 0.0 ? after / before : 0.0},
                 {"punish_fault", static_cast<double>(t.punish_fault)},
                 {"punish_bump", static_cast<double>(t.punish_bump)}};
    r.pass = before > 0.0 && after >= p.num("recovery") * before;
    r.tables = {window_table("windows", t)};
    return r;
}

Summary summarize_faults(const Params& p, const std::vector<SeedRun>& runs) {
    std::size_t ok = 0;
    double lo = 1e300;
    for (const auto& r : runs) {
        ok += r.pass;
        lo = std::min(lo, r.metric("recovery"));
    }
    const std::size_t need = required(p.num("seed_fraction"), runs.size());
    Summary s;
    s.pass = ok >= need;
    s.line = "reward rate recovered to >= " + p.text("recovery") + " of the pre-fault rate on " + std::to_string(ok) +
             "/" + std::to_string(runs.size()) + " seeds (need " + std::to_string(need) + "), lowest " + fmt(lo, 3);
    return s;
}

std::vector<ParamSpec> grid_params(const std::string& arch, const std::string& gamma_minus, const std::string& steps) {
    return {{"size", "3", PT::integer, "grid side"},
            {"width", "0", PT::integer, "grid width (0: size)"},
            {"height", "0", PT::integer, "grid height (0: size)"},
            {"arch", arch, PT::text, "one-layer-4 | one-layer-8 | recurrent-12 | grouped-16 | grouped-32"},
            {"steps", steps, PT::integer, "training steps"},
            {"window", "5000", PT::integer, "steps per curve window"},
            {"kappa", "0.2", PT::number, "stochasticity"},
            {"threshold", "1", PT::number, "threshold"},
            {"gamma_plus", "0.01", PT::number, "reward learning rate"},
            {"gamma_minus", gamma_minus, PT::number, "punishment learning rate"},
            {"tau_z", "20", PT::number, "eligibility time constant, ms"},
            {"sensor_rate", "0.2", PT::number, "sensor spikes per ms"},
            {"energy_decay", "0.0005", PT::number, "energy lost per step"},
            {"stimulation_scale", "0.2", PT::number, "stimulation probability at zero energy"},
            {"stimulation_factor", "0.5", PT::number, "stimulation weight as a fraction of the threshold"}};
}

}  // namespace

std::vector<Experiment> network_experiments() {
    auto grid = grid_params("one-layer-4", "0.01", "50000");
    for (ParamSpec extra : std::vector<ParamSpec>{
             {"check", "ratio", PT::text, "ratio: steps-to-resource against learning disabled; curve: learning curve shape"},
             {"last", "200", PT::integer, "consumptions averaged for steps-to-resource"},
             {"max_ratio", "0.5", PT::number, "required trained/baseline ratio"},
             {"decline", "0.75", PT::number, "last-3-window punish mean relative to the peak"},
             {"rise", "1.25", PT::number, "last-3/first-3 reward ratio"},
             {"record_steps", "0", PT::flag, "write the per-step log"}})
        grid.push_back(extra);
    auto faults = grid_params("grouped-16", "0.001", "0");
    faults.erase(std::find_if(faults.begin(), faults.end(), [](const ParamSpec& s) { return s.key == "steps"; }));
    for (ParamSpec extra : std::vector<ParamSpec>{
             {"pretrain", "50000", PT::integer, "steps before the faults"},
             {"post", "30000", PT::integer, "steps after the faults"},
             {"span", "10000", PT::integer, "steps over which reward rates are measured"},
             {"fail_actuator", "left", PT::text, "actuator that fails"},
             {"fail_probability", "0.4", PT::number, "failure probability"},
             {"overshoot_actuator", "up", PT::text, "actuator that overshoots"},
             {"overshoot_cells", "2", PT::integer, "cells moved by the overshooting actuator"},
             {"recovery", "0.7", PT::number, "required recovered/pre-fault reward rate"},
             {"seed_fraction", "0.7", PT::number, "fraction of seeds that must recover"}})
        faults.push_back(extra);
    return {
        {"memory",
         "store a spike pattern in the recurrent memory network and recall it from a clue",
         {{"pattern", "synfire", PT::text, "synfire | staircase | path to a pattern file"},
          {"pixels", "", PT::text, "path to an 'x y t_ms' drawing (overrides pattern)"},
          {"channels", "20", PT::integer, "synfire channels"},
          {"start", "2", PT::number, "synfire first spike, ms"},
          {"spacing", "3", PT::number, "synfire spacing, ms"},
          {"tail", "10", PT::number, "horizon after the last spike, ms"},
          {"iters", "60", PT::integer, "presentations"},
          {"clue", "1", PT::integer, "leading spikes given as the clue"},
          {"kappa", "0.1", PT::number, "stochasticity"},
          {"threshold", "1", PT::number, "threshold"},
          {"gamma", "0.01", PT::number, "learning rate"},
          {"mode", "teacher-forced", PT::text, "teacher-forced | online"},
          {"sigma", "1", PT::number, "distance kernel width, ms"},
          {"max_distance", "4", PT::number, "required mean distance"}},
         run_memory,
         summarize_memory},
        {"grid", "reward-modulated learning of a grid world agent", grid, run_grid, summarize_grid},
        {"faults", "adaptation to actuator faults after training", faults, run_faults, summarize_faults},
    };
}

}  // namespace infospike::experiments
