#include "infospike/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace infospike {

AlphaKernel AlphaKernel::from_time_constants(double tau_m, double tau_s) {
    if (!(tau_s > 0.0) || !(tau_m > tau_s))
        throw std::invalid_argument("alpha kernel needs tau_m > tau_s > 0");
    AlphaKernel k;
    k.tau_m = tau_m;
    k.tau_s = tau_s;
    k.peak = tau_m * tau_s / (tau_m - tau_s) * std::log(tau_m / tau_s);
    k.alpha0 = 1.0 / (std::exp(-k.peak / tau_m) - std::exp(-k.peak / tau_s));
    return k;
}

AlphaKernel AlphaKernel::from_peak(double peak, double ratio) {
    if (!(peak > 0.0)) throw std::invalid_argument("alpha kernel peak must be positive");
    if (!(ratio > 1.0)) throw std::invalid_argument("alpha kernel ratio must exceed 1");
    const double tau_s = peak * (ratio - 1.0) / (ratio * std::log(ratio));
    return from_time_constants(ratio * tau_s, tau_s);
}

double AlphaKernel::operator()(double t) const {
    if (t <= 0.0) return 0.0;
    return alpha0 * (std::exp(-t / tau_m) - std::exp(-t / tau_s));
}

double AlphaKernel::support(double fraction) const {
    double lo = peak;
    double hi = peak + tau_m;
    while ((*this)(hi) >= fraction) hi += tau_m;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((*this)(mid) >= fraction ? lo : hi) = mid;
    }
    return hi;
}

AlphaBasis::AlphaBasis(std::vector<AlphaKernel> kernels) : kernels_(std::move(kernels)) {
    if (kernels_.empty()) throw std::invalid_argument("alpha basis needs at least one kernel");
}

AlphaBasis AlphaBasis::from_peaks(const std::vector<double>& peaks, double ratio) {
    std::vector<AlphaKernel> ks;
    for (double p : peaks) ks.push_back(AlphaKernel::from_peak(p, ratio));
    return AlphaBasis(std::move(ks));
}

std::vector<double> AlphaBasis::peaks() const {
    std::vector<double> out;
    for (const auto& k : kernels_) out.push_back(k.peak);
    return out;
}

double AlphaBasis::support(double fraction) const {
    double s = 0.0;
    for (const auto& k : kernels_) s = std::max(s, k.support(fraction));
    return s;
}

std::size_t AlphaBasis::fastest() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kernels_.size(); ++k)
        if (kernels_[k].peak < kernels_[best].peak) best = k;
    return best;
}

}  // namespace infospike
