#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "infospike/patterns.hpp"

namespace infospike::experiments {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& v) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return !s.empty() && ec == std::errc() && p == s.data() + s.size() && std::isfinite(v);
}

bool parse_long(std::string_view s, long& v) {
    s = trim(s);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return !s.empty() && ec == std::errc() && p == s.data() + s.size();
}

bool parse_bool(std::string_view s, bool& v) {
    s = trim(s);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return v = true, true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return v = false, true;
    return false;
}

bool parse_list(std::string_view s, std::vector<double>& out) {
    out.clear();
    s = trim(s);
    if (s.empty()) return true;
    while (true) {
        const auto comma = s.find(',');
        double v = 0.0;
        if (!parse_double(s.substr(0, comma), v)) return false;
        out.push_back(v);
        if (comma == std::string_view::npos) return true;
        s.remove_prefix(comma + 1);
    }
}

void check_value(const ParamSpec& s, const std::string& value) {
    bool ok = true;
    switch (s.type) {
        case ParamType::number: { double v; ok = parse_double(value, v); break; }
        case ParamType::integer: { long v; ok = parse_long(value, v); break; }
        case ParamType::flag: { bool v; ok = parse_bool(value, v); break; }
        case ParamType::list: { std::vector<double> v; ok = parse_list(value, v); break; }
        case ParamType::text: break;
    }
    if (!ok) throw ConfigError("bad value '" + value + "' for '" + s.key + "'");
}

}  // namespace

Params::Params(std::vector<ParamSpec> specs) : specs_(std::move(specs)) {
    for (const auto& s : specs_) check_value(s, s.value);
}

const ParamSpec& Params::spec(const std::string& key) const {
    for (const auto& s : specs_)
        if (s.key == key) return s;
    throw ConfigError("unknown parameter '" + key + "'");
}

bool Params::has(const std::string& key) const {
    return std::any_of(specs_.begin(), specs_.end(), [&](const ParamSpec& s) { return s.key == key; });
}

void Params::set(const std::string& key, const std::string& value) {
    for (auto& s : specs_)
        if (s.key == key) {
            const std::string v(trim(value));
            check_value(s, v);
            s.value = v;
            return;
        }
    throw ConfigError("unknown parameter '" + key + "'");
}

double Params::num(const std::string& key) const {
    double v = 0.0;
    if (!parse_double(spec(key).value, v)) throw ConfigError("'" + key + "' is not a number");
    return v;
}

long Params::integer(const std::string& key) const {
    long v = 0;
    if (!parse_long(spec(key).value, v)) throw ConfigError("'" + key + "' is not an integer");
    return v;
}

bool Params::flag(const std::string& key) const {
    bool v = false;
    if (!parse_bool(spec(key).value, v)) throw ConfigError("'" + key + "' is not a flag");
    return v;
}

const std::string& Params::text(const std::string& key) const { return spec(key).value; }

std::vector<double> Params::list(const std::string& key) const {
    std::vector<double> v;
    if (!parse_list(spec(key).value, v)) throw ConfigError("'" + key + "' is not a list");
    return v;
}

std::string Params::dump() const {
    std::string out;
    for (const auto& s : specs_) out += s.key + " = " + s.value + "\n";
    return out;
}

std::map<std::string, std::string> parse_config(std::string_view text) {
    std::map<std::string, std::string> out;
    std::istringstream in{std::string(text)};
    std::string raw, section;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find_first_of("#;"); hash != std::string::npos) raw.resize(hash);
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": bad section");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        out[section.empty() ? key : section + "." + key] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

void apply_config(Params& p, const std::map<std::string, std::string>& cfg, const std::string& name) {
    for (const auto& [k, v] : cfg)
        if (k.find('.') == std::string::npos) p.set(k, v);
    const std::string prefix = name + ".";
    for (const auto& [k, v] : cfg)
        if (k.rfind(prefix, 0) == 0) p.set(k.substr(prefix.size()), v);
}

Cell::Cell(double v) : s(format_number(v)) {}
Cell::Cell(long v) : s(std::to_string(v)) {}

void Table::add(std::vector<Cell> row) {
    std::vector<std::string> r;
    r.reserve(row.size());
    for (auto& c : row) r.push_back(std::move(c.s));
    rows.push_back(std::move(r));
}

std::string Table::csv() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
        out += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

double SeedRun::metric(const std::string& key) const {
    for (const auto& m : metrics)
        if (m.key == key) return m.value;
    throw std::out_of_range("no metric '" + key + "'");
}

const std::vector<Experiment>& registry() {
    static const std::vector<Experiment> all = [] {
        std::vector<Experiment> v;
        for (auto group : {neuron_experiments(), entropy_experiments(), network_experiments(), oracle_experiments()})
            for (auto& e : group) v.push_back(std::move(e));
        return v;
    }();
    return all;
}

const Experiment* find(std::string_view name) {
    for (const auto& e : registry())
        if (e.name == name) return &e;
    return nullptr;
}

Params defaults(const Experiment& e) { return Params(e.params); }

std::vector<SeedRun> run_seeds(const Experiment& e, const Params& p, const std::vector<std::uint64_t>& seeds,
                               unsigned threads) {
    std::vector<SeedRun> out(seeds.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < seeds.size();) {
            try {
                out[i] = e.run(p, seeds[i]);
                out[i].seed = seeds[i];
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(seeds.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

std::vector<std::uint64_t> parse_seeds(std::string_view spec) {
    spec = trim(spec);
    auto one = [](std::string_view s) {
        long v = 0;
        if (!parse_long(s, v) || v < 0) throw ConfigError("bad seed '" + std::string(s) + "'");
        return static_cast<std::uint64_t>(v);
    };
    const auto dots = spec.find("..");
    if (dots == std::string_view::npos) return {one(spec)};
    const std::uint64_t a = one(spec.substr(0, dots)), b = one(spec.substr(dots + 2));
    if (b < a) throw ConfigError("empty seed range");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
    return out;
}

std::size_t required(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
}

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace infospike::experiments
