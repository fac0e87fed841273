#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "experiments.hpp"

namespace fs = std::filesystem;
using namespace infospike::experiments;

namespace {

enum Exit { ok = 0, error = 1, miss = 2, unknown = 3, write_failure = 4 };

void list_experiments() {
    for (const auto& e : registry()) std::cout << e.name << "  " << e.description << "\n";
}

void print_params(const Experiment& e) {
    std::cout << e.name << ": " << e.description << "\n";
    for (const auto& s : e.params) std::cout << "  --" << s.key << " (default " << (s.value.empty() ? "\"\"" : s.value)
                                             << ")  " << s.help << "\n";
}

// "--key value" and "--key=value" pairs left over by the parser.
void apply_extras(Params& p, const std::vector<std::string>& extras) {
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& a = extras[i];
        if (a.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + a + "'");
        std::string key = a.substr(2), value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else if (i + 1 < extras.size()) {
            value = extras[++i];
        } else if (p.has(key) && p.specs().end() != std::find_if(p.specs().begin(), p.specs().end(), [&](auto& s) {
                       return s.key == key && s.type == ParamType::flag;
                   })) {
            value = "1";
        } else {
            throw ConfigError("missing value for '--" + key + "'");
        }
        std::replace(key.begin(), key.end(), '-', '_');
        p.set(key, value);
    }
}

bool write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spiking neuron learning experiments"};
    std::string name, config, seeds = "0", out_dir;
    std::vector<std::string> sets;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool csv = false, quiet = false, show_params = false;
    app.add_option("experiment", name, "experiment name, or 'list'")->required();
    app.add_option("--config", config, "key = value file; [experiment] sections apply to one experiment");
    app.add_option("--seed,--seeds", seeds, "seed or inclusive range a..b");
    app.add_option("--threads", threads, "worker threads across seeds");
    app.add_option("--out", out_dir, "directory for CSV tables, the summary and artifacts");
    app.add_option("--set", sets, "parameter override key=value (repeatable)");
    app.add_flag("--csv", csv, "print the first table of the first seed to stdout");
    app.add_flag("--quiet", quiet, "print only the summary line");
    app.add_flag("--params", show_params, "list the experiment parameters and exit");
    app.allow_extras();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : error;
    }

    if (name == "list") {
        list_experiments();
        return ok;
    }
    const Experiment* e = find(name);
    if (!e) {
        std::cerr << "unknown experiment '" << name << "'; known:\n";
        for (const auto& x : registry()) std::cerr << "  " << x.name << "\n";
        return unknown;
    }
    if (show_params) {
        print_params(*e);
        return ok;
    }

    Params p;
    std::vector<std::uint64_t> seed_list;
    try {
        p = defaults(*e);
        if (!config.empty()) {
            std::ifstream in(config);
            if (!in) throw ConfigError("cannot read config '" + config + "'");
            std::ostringstream text;
            text << in.rdbuf();
            apply_config(p, parse_config(text.str()), e->name);
        }
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
            p.set(s.substr(0, eq), s.substr(eq + 1));
        }
        apply_extras(p, app.remaining());
        seed_list = parse_seeds(seeds);
    } catch (const ConfigError& err) {
        std::cerr << "invalid configuration: " << err.what() << "\n";
        return error;
    }

    std::vector<SeedRun> runs;
    Summary summary;
    try {
        runs = run_seeds(*e, p, seed_list, threads);
        summary = e->summarize(p, runs);
    } catch (const ConfigError& err) {
        std::cerr << "invalid configuration: " << err.what() << "\n";
        return error;
    } catch (const std::exception& err) {
        std::cerr << e->name << " failed: " << err.what() << "\n";
        return error;
    }

    if (!quiet && !csv)
        for (const auto& r : runs) {
            std::cout << "seed " << r.seed << (r.pass ? " pass" : " miss");
            for (const auto& m : r.metrics) std::cout << " " << m.key << "=" << fmt(m.value, 5);
            std::cout << "\n";
        }
    if (csv && !runs.front().tables.empty()) std::cout << runs.front().tables.front().csv();
    const std::string line = std::string(summary.pass ? "PASS " : "MISS ") + e->name + ": " + summary.line + "\n";
    (csv ? std::cerr : std::cout) << line;

    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        bool good = !ec && write_file(fs::path(out_dir) / (e->name + "_summary.txt"), line + p.dump());
        for (const auto& r : runs) {
            const std::string stem = e->name + "_seed" + std::to_string(r.seed) + "_";
            for (const auto& t : r.tables) good = good && write_file(fs::path(out_dir) / (stem + t.name + ".csv"), t.csv());
            for (const auto& [file, text] : r.files) good = good && write_file(fs::path(out_dir) / (stem + file), text);
        }
        if (!good) {
            std::cerr << "cannot write results to '" << out_dir << "'\n";
            return write_failure;
        }
    }
    return summary.pass ? ok : miss;
}
