#pragma once

#include <random>

#include "infospike/neuron.hpp"
#include "infospike/patterns.hpp"

namespace infospike::testutil {

inline SpikePattern random_pattern(std::mt19937_64& rng, std::size_t channels, double horizon, double rate,
                                   double dt = 1.0) {
    SpikePattern p(channels, horizon);
    std::bernoulli_distribution b(rate);
    const long steps = horizon_steps(horizon, dt);
    for (std::size_t c = 0; c < channels; ++c)
        for (long t = 0; t < steps; ++t)
            if (b(rng)) p.add(c, static_cast<double>(t) * dt);
    return p;
}

inline Weights random_weights(std::mt19937_64& rng, std::size_t inputs, std::size_t kernels, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Weights w(static_cast<Eigen::Index>(inputs), static_cast<Eigen::Index>(kernels));
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = u(rng);
    return w;
}

/// Output train with refractory-respecting random spikes on the dt grid.
inline SpikeTrain random_output(std::mt19937_64& rng, const NeuronConfig& cfg, double horizon, double rate) {
    SpikeTrain y(horizon);
    std::bernoulli_distribution b(rate);
    const long steps = horizon_steps(horizon, cfg.dt);
    long last = -1000000;
    for (long t = 0; t < steps; ++t)
        if (t - last >= cfg.refractory_steps() && b(rng)) {
            y.push_back(static_cast<double>(t) * cfg.dt);
            last = t;
        }
    return y;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12}); }

}  // namespace infospike::testutil
