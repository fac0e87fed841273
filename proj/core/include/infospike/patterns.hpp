#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace infospike {

/// Ordered event times of one channel on [0, horizon). Times are in ms.
class SpikeTrain {
public:
    SpikeTrain() = default;
    explicit SpikeTrain(double horizon, std::vector<double> times = {});

    double horizon() const { return horizon_; }
    const std::vector<double>& times() const { return times_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    double operator[](std::size_t i) const { return times_[i]; }

    /// Appends a spike; it must be later than the last one and inside the horizon.
    void push_back(double t);

    /// True when consecutive spikes are at least `refractory` apart.
    bool respects_refractory(double refractory) const;

    bool operator==(const SpikeTrain&) const = default;

private:
    double horizon_ = 0.0;
    std::vector<double> times_;
};

/// Fixed number of channels sharing one horizon.
class SpikePattern {
public:
    SpikePattern() = default;
    SpikePattern(std::size_t channels, double horizon);
    explicit SpikePattern(std::vector<SpikeTrain> trains);

    std::size_t channels() const { return trains_.size(); }
    double horizon() const { return horizon_; }
    const SpikeTrain& channel(std::size_t i) const { return trains_.at(i); }
    const std::vector<SpikeTrain>& trains() const { return trains_; }
    std::size_t spike_count() const;

    void add(std::size_t channel, double t);

    /// Pattern holding only the first `k` spikes in time order (ties by channel).
    SpikePattern first_spikes(std::size_t k) const;

    bool operator==(const SpikePattern&) const = default;

private:
    double horizon_ = 0.0;
    std::vector<SpikeTrain> trains_;
};

SpikePattern concat(const SpikePattern& a, const SpikePattern& b);

struct DistanceKernel {
    enum class Kind { gaussian, delta };
    Kind kind = Kind::gaussian;
    double sigma = 1.0;
    double step = 0.25;

    static DistanceKernel gaussian(double sigma, double step);
    static DistanceKernel gaussian(double sigma) { return gaussian(sigma, sigma / 8.0); }
    static DistanceKernel delta(double tolerance);
};

/// L1 distance between the kernel-smoothed trains.
double channel_distance(const SpikeTrain& x, const SpikeTrain& y, const DistanceKernel& k);

/// Sum of channel distances.
double pattern_distance(const SpikePattern& x, const SpikePattern& y, const DistanceKernel& k);

/// Parses the `T=<ms> N=<channels>` text format.
SpikePattern read_pattern(std::string_view text);
std::string write_pattern(const SpikePattern& p);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

}  // namespace infospike
