#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "infospike/alpha.hpp"

namespace infospike {

struct DesignSpec {
    double psp_min = 0.1;
    double psp_max = 0.2;
    double delta_s = 1.0;  // spike-time precision, ms
    double tau = 6.0;      // input-to-output delay, ms
    double t_max = 15.0;   // longest pattern, ms

    void validate() const;
};

/// Maximum constraint violation of a PSP profile: |PSP(tau) - psp_max| and PSP(t) - psp_min
/// for grid points t in [0, t_max] with |t - tau| >= delta_s; grid step delta_s / 2.
double design_violation(const DesignSpec& spec, const AlphaBasis& basis, const Eigen::VectorXd& w);

struct TwoKernelResult {
    bool feasible = false;
    std::optional<Eigen::Vector2d> witness;  // smallest |w2| in the feasible interval
    double w2_lower = 0.0;
    double w2_upper = 0.0;
};

TwoKernelResult two_kernel_feasible(const DesignSpec& spec, const AlphaBasis& basis);

/// Closed-form weights with PSP(tau) = psp_max and PSP(tau -+ delta_s) = psp_min.
/// Throws std::domain_error for a singular denominator.
Eigen::Vector3d min_norm_weights(const DesignSpec& spec, const AlphaBasis& basis);

/// Mean weight norm over delays in [delta_s, t_max], 64-point trapezoid. Singular points
/// contribute `penalty` in place of the norm; `singular` (if given) counts them.
double design_cost(const DesignSpec& spec, const std::array<double, 3>& peaks, double penalty = 1e3,
                   int* singular = nullptr);

struct NelderMeadOptions {
    double initial_step = 1.0;
    double tolerance = 1e-6;
    int max_evaluations = 4000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opt = {});

struct PeakDesign {
    std::array<double, 3> peaks{};  // sorted
    double cost = 0.0;
    int evaluations = 0;
    int penalized = 0;  // objective evaluations that hit a singular point
};

PeakDesign optimize_peak_times(const DesignSpec& spec, std::array<double, 3> initial = {2.0, 6.0, 15.0},
                               const NelderMeadOptions& opt = {});

}  // namespace infospike
