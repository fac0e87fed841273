#pragma once

#include <cstddef>
#include <vector>

namespace infospike {

/// Normalized double exponential a0 * (exp(-t/tau_m) - exp(-t/tau_s)) for t > 0.
struct AlphaKernel {
    double tau_m = 0.0;
    double tau_s = 0.0;
    double alpha0 = 0.0;
    double peak = 0.0;

    static AlphaKernel from_time_constants(double tau_m, double tau_s);
    /// Kernel with tau_m = ratio * tau_s peaking at `peak` ms.
    static AlphaKernel from_peak(double peak, double ratio = 4.0);

    double operator()(double t) const;
    /// Integral over (0, inf).
    double integral() const { return alpha0 * (tau_m - tau_s); }
    /// First time after the peak where the kernel drops below `fraction` of its peak.
    double support(double fraction = 1e-4) const;
};

class AlphaBasis {
public:
    AlphaBasis() = default;
    explicit AlphaBasis(std::vector<AlphaKernel> kernels);

    static AlphaBasis from_peaks(const std::vector<double>& peaks, double ratio = 4.0);
    static AlphaBasis standard() { return from_peaks({1.8, 3.3, 9.3}); }

    std::size_t size() const { return kernels_.size(); }
    const AlphaKernel& kernel(std::size_t k) const { return kernels_.at(k); }
    double value(std::size_t k, double t) const { return kernels_[k](t); }
    std::vector<double> peaks() const;
    /// Longest kernel support.
    double support(double fraction = 1e-4) const;
    /// Index of the kernel with the earliest peak.
    std::size_t fastest() const;

private:
    std::vector<AlphaKernel> kernels_;
};

}  // namespace infospike
