#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "infospike/neuron.hpp"

namespace infospike::oracles {

struct EnumeratedPattern {
    std::uint32_t mask = 0;  // bit t set = output spike at step t
    double probability = 0.0;
    bool feasible = true;
};

/// All 2^steps output masks with probabilities from a standalone evaluation of the model.
std::vector<EnumeratedPattern> enumerate_output_distribution(const NeuronConfig& cfg, const Weights& w,
                                                             const SpikePattern& x, int steps);

/// Probability of one mask under the standalone evaluation.
double mask_probability(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, int steps,
                        std::uint32_t mask);

/// Entropy sum -p log p over the enumeration.
double enumerated_entropy(const std::vector<EnumeratedPattern>& dist);

/// Entropy of {empty} U {first spike at t}, class probabilities summed over the enumeration.
double enumerated_hat_entropy(const std::vector<EnumeratedPattern>& dist, int steps);

using ScalarFn = std::function<double(const Eigen::MatrixXd&)>;

/// Central-difference gradient.
Eigen::MatrixXd fd_gradient(const ScalarFn& f, const Eigen::MatrixXd& w, double eps);

struct RichardsonCheck {
    Eigen::MatrixXd coarse;  // step eps
    Eigen::MatrixXd fine;    // step eps/2
    Eigen::MatrixXd finer;   // step eps/4
    Eigen::MatrixXd extrapolated;
    /// |coarse - fine| / |fine - finer| (about 4 for a smooth function).
    double ratio = 0.0;
};
RichardsonCheck fd_richardson(const ScalarFn& f, const Eigen::MatrixXd& w, double eps);

/// Central-difference Hessian over the column-major vectorization of w.
Eigen::MatrixXd fd_hessian(const ScalarFn& f, const Eigen::MatrixXd& w, double eps);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  // |T(h) - T(h/2)| / 3
};

/// Trapezoid rule over equally spaced samples.
double trapezoid(const std::vector<double>& samples, double step);
/// Trapezoid rule on [a, b] with step halving for the error estimate.
QuadratureResult quadrature_integral(const std::function<double(double)>& f, double a, double b, double step);

}  // namespace infospike::oracles
