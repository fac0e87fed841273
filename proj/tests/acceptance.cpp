// Acceptance run: one PASS/FAIL line per criterion. Exits nonzero on a FAIL only with --strict.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <set>
#include <thread>

#include "experiments.hpp"

using namespace infospike::experiments;

namespace {

struct Part {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> set;
    std::string seeds = "0..9";
};

struct Criterion {
    int id = 0;
    std::string title;
    double limit_s = 0.0;  // 0: no runtime bound
    std::vector<Part> parts;
};

std::vector<Criterion> criteria() {
    const auto oracle = [](const std::string& suite) { return Part{"oracle", {{"suite", suite}}, "0"}; };
    return {
        {1, "probability normalization", 60, {oracle("normalization")}},
        {2, "gradient fidelity", 120, {oracle("gradients")}},
        {3, "convexity", 0, {oracle("convexity")}},
        {4, "metric axioms", 0, {oracle("metric")}},
        {5,
         "delay learning",
         60,
         {{"delay", {{"dt", "3"}, {"gamma", "0.002"}}},
          {"delay", {{"dt", "6"}, {"gamma", "0.002"}}},
          {"delay", {{"dt", "18"}, {"gamma", "0.004"}}}}},
        {6, "pattern detection with suppression", 0, {{"detect", {}}}},
        {7, "STDP curve", 0, {{"stdp", {}, "0"}}},
        {8, "alpha design", 0, {{"alpha-design", {}, "0"}}},
        {9, "memory recall", 120, {{"memory", {}}}},
        {10, "entropy toy", 0, {{"entropy-toy", {}}}},
        {11, "composite advantage", 0, {{"composite", {}}}},
        {12,
         "grid agent",
         600,
         {{"grid", {{"check", "ratio"}}},
          {"grid",
           {{"size", "10"},
            {"arch", "grouped-32"},
            {"gamma_plus", "0.005"},
            {"gamma_minus", "5e-5"},
            {"steps", "50000"},
            {"check", "curve"}}}}},
        {13, "fault adaptation", 0, {{"faults", {}}}},
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    bool strict = false;
    std::vector<int> only;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_flag("--strict", strict, "exit 1 if any criterion fails");
    app.add_option("--only", only, "criterion ids to run");
    app.add_option("--threads", threads, "worker threads across seeds");
    CLI11_PARSE(app, argc, argv);
    const std::set<int> selected(only.begin(), only.end());

    int failed = 0, errors = 0;
    for (const auto& c : criteria()) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        bool pass = true;
        std::string detail;
        try {
            for (const auto& part : c.parts) {
                const Experiment* e = find(part.experiment);
                if (!e) throw std::runtime_error("no experiment '" + part.experiment + "'");
                Params p = defaults(*e);
                for (const auto& [k, v] : part.set) p.set(k, v);
                const auto runs = run_seeds(*e, p, parse_seeds(part.seeds), threads);
                const Summary s = e->summarize(p, runs);
                pass = pass && s.pass;
                detail += (detail.empty() ? "" : " | ") + part.experiment + ": " + s.line;
            }
        } catch (const std::exception& err) {
            pass = false;
            ++errors;
            detail += (detail.empty() ? "" : " | ") + std::string("error: ") + err.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string timing = fmt(secs, 3) + " s";
        if (c.limit_s > 0.0) {
            timing += " of " + fmt(c.limit_s, 3) + " s";
            if (secs > c.limit_s) {
                pass = false;
                timing += ", over the runtime bound";
            }
        }
        failed += !pass;
        std::printf("%s %2d %s: %s (%s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), detail.c_str(),
                    timing.c_str());
        std::fflush(stdout);
    }
    std::printf("%d failed\n", failed);
    if (errors) return 1;
    return strict && failed ? 1 : 0;
}
