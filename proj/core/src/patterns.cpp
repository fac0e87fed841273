#include "infospike/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace infospike {

SpikeTrain::SpikeTrain(double horizon, std::vector<double> times)
    : horizon_(horizon), times_(std::move(times)) {
    if (!(horizon_ >= 0.0)) throw std::invalid_argument("spike train horizon must be non-negative");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (times_[i] < 0.0 || times_[i] >= horizon_)
            throw std::invalid_argument("spike time outside [0, T)");
        if (i > 0 && times_[i] <= times_[i - 1])
            throw std::invalid_argument("spike times must be strictly increasing");
    }
}

void SpikeTrain::push_back(double t) {
    if (t < 0.0 || t >= horizon_) throw std::invalid_argument("spike time outside [0, T)");
    if (!times_.empty() && t <= times_.back())
        throw std::invalid_argument("spike times must be strictly increasing");
    times_.push_back(t);
}

bool SpikeTrain::respects_refractory(double refractory) const {
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (times_[i] - times_[i - 1] < refractory - 1e-9) return false;
    return true;
}

SpikePattern::SpikePattern(std::size_t channels, double horizon)
    : horizon_(horizon), trains_(channels, SpikeTrain(horizon)) {}

SpikePattern::SpikePattern(std::vector<SpikeTrain> trains) : trains_(std::move(trains)) {
    if (!trains_.empty()) horizon_ = trains_.front().horizon();
    for (const auto& t : trains_)
        if (t.horizon() != horizon_) throw std::invalid_argument("channels must share one horizon");
}

std::size_t SpikePattern::spike_count() const {
    std::size_t n = 0;
    for (const auto& t : trains_) n += t.size();
    return n;
}

void SpikePattern::add(std::size_t channel, double t) { trains_.at(channel).push_back(t); }

SpikePattern SpikePattern::first_spikes(std::size_t k) const {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t c = 0; c < trains_.size(); ++c)
        for (double t : trains_[c].times()) all.emplace_back(t, c);
    std::sort(all.begin(), all.end());
    std::vector<std::vector<double>> kept(trains_.size());
    for (std::size_t i = 0; i < std::min(k, all.size()); ++i) kept[all[i].second].push_back(all[i].first);
    SpikePattern out(trains_.size(), horizon_);
    for (std::size_t c = 0; c < kept.size(); ++c)
        for (double t : kept[c]) out.add(c, t);
    return out;
}

SpikePattern concat(const SpikePattern& a, const SpikePattern& b) {
    if (a.channels() != b.channels()) throw std::invalid_argument("concat: channel count mismatch");
    SpikePattern out(a.channels(), a.horizon() + b.horizon());
    for (std::size_t c = 0; c < a.channels(); ++c) {
        for (double t : a.channel(c).times()) out.add(c, t);
        for (double t : b.channel(c).times()) out.add(c, t + a.horizon());
    }
    return out;
}

DistanceKernel DistanceKernel::gaussian(double sigma, double step) {
    return DistanceKernel{Kind::gaussian, sigma, step};
}

DistanceKernel DistanceKernel::delta(double tolerance) {
    return DistanceKernel{Kind::delta, 0.0, tolerance};
}

namespace {

double smoothed(const std::vector<double>& times, double t, double sigma) {
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const double cut = 10.0 * sigma;
    auto lo = std::lower_bound(times.begin(), times.end(), t - cut);
    double s = 0.0;
    for (auto it = lo; it != times.end() && *it <= t + cut; ++it) {
        const double z = (t - *it) / sigma;
        s += norm * std::exp(-0.5 * z * z);
    }
    return s;
}

double delta_distance(const std::vector<double>& x, const std::vector<double>& y, double tol) {
    std::size_t i = 0, j = 0, matched = 0;
    while (i < x.size() && j < y.size()) {
        if (std::abs(x[i] - y[j]) <= tol) {
            ++matched; ++i; ++j;
        } else if (x[i] < y[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return static_cast<double>(x.size() + y.size() - 2 * matched);
}

}  // namespace

double channel_distance(const SpikeTrain& x, const SpikeTrain& y, const DistanceKernel& k) {
    if (!(k.step > 0.0)) throw std::invalid_argument("distance: quadrature step must be positive");
    if (x.horizon() != y.horizon()) throw std::invalid_argument("distance: horizon mismatch");
    if (k.kind == DistanceKernel::Kind::delta) return delta_distance(x.times(), y.times(), k.step);

    if (!(k.sigma > 0.0)) throw std::invalid_argument("distance: sigma must be positive");
    if (k.step > k.sigma / 4.0 + 1e-12) throw std::invalid_argument("distance: step must be <= sigma/4");
    if (x.empty() && y.empty()) return 0.0;

    const double a = -4.0 * k.sigma;
    const double b = x.horizon() + 4.0 * k.sigma;
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / k.step));
    const double h = (b - a) / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = a + h * static_cast<double>(i);
        const double v = std::abs(smoothed(x.times(), t, k.sigma) - smoothed(y.times(), t, k.sigma));
        sum += (i == 0 || i == n) ? 0.5 * v : v;
    }
    return sum * h;
}

double pattern_distance(const SpikePattern& x, const SpikePattern& y, const DistanceKernel& k) {
    if (x.channels() != y.channels() || x.horizon() != y.horizon())
        throw std::invalid_argument("distance: pattern shape mismatch");
    double d = 0.0;
    for (std::size_t c = 0; c < x.channels(); ++c) d += channel_distance(x.channel(c), y.channel(c), k);
    return d;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("pattern line " + std::to_string(line) + ": bad number '" +
                                    std::string(s) + "'");
    return v;
}

}  // namespace

SpikePattern read_pattern(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    bool have_header = false;
    SpikePattern out;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        std::istringstream fields{std::string(line)};
        std::string f1, f2, extra;
        fields >> f1 >> f2;
        if (f2.empty() || (fields >> extra))
            throw std::invalid_argument("pattern line " + std::to_string(line_no) + ": expected two fields");

        if (!have_header) {
            if (f1.rfind("T=", 0) != 0 || f2.rfind("N=", 0) != 0)
                throw std::invalid_argument("pattern: missing 'T=<ms> N=<channels>' header");
            const double horizon = parse_double(std::string_view(f1).substr(2), line_no);
            const double n = parse_double(std::string_view(f2).substr(2), line_no);
            if (horizon < 0.0 || n < 0.0 || n != std::floor(n))
                throw std::invalid_argument("pattern: invalid header values");
            out = SpikePattern(static_cast<std::size_t>(n), horizon);
            have_header = true;
            continue;
        }
        const double ch = parse_double(f1, line_no);
        const double t = parse_double(f2, line_no);
        if (ch < 0.0 || ch != std::floor(ch) || ch >= static_cast<double>(out.channels()))
            throw std::invalid_argument("pattern line " + std::to_string(line_no) + ": bad channel");
        if (t < 0.0 || t >= out.horizon())
            throw std::invalid_argument("pattern line " + std::to_string(line_no) + ": time outside [0, T)");
        const auto& train = out.channel(static_cast<std::size_t>(ch));
        if (!train.empty() && t <= train.times().back())
            throw std::invalid_argument("pattern line " + std::to_string(line_no) + ": decreasing time");
        out.add(static_cast<std::size_t>(ch), t);
    }
    if (!have_header) throw std::invalid_argument("pattern: empty input");
    return out;
}

std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string write_pattern(const SpikePattern& p) {
    std::string out = "T=" + format_number(p.horizon()) + " N=" + std::to_string(p.channels()) + "\n";
    for (std::size_t c = 0; c < p.channels(); ++c)
        for (double t : p.channel(c).times()) out += std::to_string(c) + " " + format_number(t) + "\n";
    return out;
}

}  // namespace infospike
