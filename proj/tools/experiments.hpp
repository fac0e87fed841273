#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace infospike::experiments {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ParamType { number, integer, flag, text, list };

struct ParamSpec {
    std::string key;
    std::string value;  // default
    ParamType type = ParamType::number;
    std::string help;
};

/// Typed experiment parameters; unknown keys and malformed values raise ConfigError.
class Params {
public:
    Params() = default;
    explicit Params(std::vector<ParamSpec> specs);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    double num(const std::string& key) const;
    long integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    std::vector<double> list(const std::string& key) const;

    const std::vector<ParamSpec>& specs() const { return specs_; }
    /// key=value lines in declaration order.
    std::string dump() const;

private:
    const ParamSpec& spec(const std::string& key) const;
    std::vector<ParamSpec> specs_;
};

/// Flat `key = value` text with `[section]` headers; keys are returned as "section.key".
std::map<std::string, std::string> parse_config(std::string_view text);
/// Applies top-level keys and keys of section `name`; other sections are ignored.
void apply_config(Params& p, const std::map<std::string, std::string>& cfg, const std::string& name);

struct Cell {
    Cell(double v);
    Cell(long v);
    Cell(int v) : Cell(static_cast<long>(v)) {}
    Cell(std::size_t v) : Cell(static_cast<long>(v)) {}
    Cell(std::string v) : s(std::move(v)) {}
    Cell(const char* v) : s(v) {}
    std::string s;
};

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<Cell> row);
    std::string csv() const;
};

struct Metric {
    std::string key;
    double value = 0.0;
};

struct SeedRun {
    std::uint64_t seed = 0;
    bool pass = false;
    std::vector<Metric> metrics;
    std::vector<Table> tables;
    std::vector<std::pair<std::string, std::string>> files;  // extra text artifacts

    double metric(const std::string& key) const;
};

struct Summary {
    bool pass = false;
    std::string line;  // key metric against its threshold
};

struct Experiment {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    std::function<SeedRun(const Params&, std::uint64_t)> run;
    std::function<Summary(const Params&, const std::vector<SeedRun>&)> summarize;
};

const std::vector<Experiment>& registry();
const Experiment* find(std::string_view name);
Params defaults(const Experiment& e);

/// Runs each seed independently on up to `threads` workers; results keep seed order.
std::vector<SeedRun> run_seeds(const Experiment& e, const Params& p, const std::vector<std::uint64_t>& seeds,
                               unsigned threads);

/// "7" or "0..9" (inclusive).
std::vector<std::uint64_t> parse_seeds(std::string_view spec);

/// Passing seed count needed for a fraction of n runs.
std::size_t required(double fraction, std::size_t n);

std::string fmt(double v, int digits = 4);

// Experiment definitions, one per group.
std::vector<Experiment> neuron_experiments();
std::vector<Experiment> entropy_experiments();
std::vector<Experiment> network_experiments();
std::vector<Experiment> oracle_experiments();

}  // namespace infospike::experiments
