#include "infospike/alpha_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace infospike {

void DesignSpec::validate() const {
    if (!(psp_min > 0.0 && psp_min < psp_max)) throw std::invalid_argument("design: need 0 < psp_min < psp_max");
    if (!(delta_s > 0.0)) throw std::invalid_argument("design: delta_s must be positive");
    if (!(tau >= delta_s)) throw std::invalid_argument("design: delay shorter than delta_s");
    if (!(t_max > delta_s)) throw std::invalid_argument("design: t_max must exceed delta_s");
}

namespace {

// Grid points of the inequality constraints.
std::vector<double> check_grid(const DesignSpec& spec) {
    std::vector<double> ts;
    const double h = spec.delta_s / 2.0;
    const auto n = static_cast<long>(std::floor(std::max(spec.t_max, spec.tau + spec.delta_s) / h + 1e-9));
    for (long i = 0; i <= n; ++i) {
        const double t = h * static_cast<double>(i);
        if (std::abs(t - spec.tau) >= spec.delta_s - 1e-12) ts.push_back(t);
    }
    return ts;
}

double psp(const AlphaBasis& basis, const Eigen::VectorXd& w, double t) {
    double u = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) u += w(static_cast<Eigen::Index>(k)) * basis.value(k, t);
    return u;
}

}  // namespace

double design_violation(const DesignSpec& spec, const AlphaBasis& basis, const Eigen::VectorXd& w) {
    double v = std::abs(psp(basis, w, spec.tau) - spec.psp_max);
    for (double t : check_grid(spec)) v = std::max(v, psp(basis, w, t) - spec.psp_min);
    return v;
}

TwoKernelResult two_kernel_feasible(const DesignSpec& spec, const AlphaBasis& basis) {
    spec.validate();
    if (basis.size() != 2) throw std::invalid_argument("two-kernel design needs exactly two kernels");
    const double a1s = basis.value(0, spec.tau);
    const double a2s = basis.value(1, spec.tau);
    if (a1s <= 0.0) throw std::domain_error("two-kernel design: first kernel vanishes at the delay");

    TwoKernelResult r;
    r.w2_lower = -std::numeric_limits<double>::infinity();
    r.w2_upper = std::numeric_limits<double>::infinity();
    bool contradiction = false;
    for (double t : check_grid(spec)) {
        // With w1 = (psp_max - w2 a2s) / a1s the constraint is c w2 <= b.
        const double a1 = basis.value(0, t);
        const double a2 = basis.value(1, t);
        const double c = a2 - a2s * a1 / a1s;
        const double b = spec.psp_min - spec.psp_max * a1 / a1s;
        if (std::abs(c) < 1e-15) {
            if (b < 0.0) contradiction = true;
        } else if (c > 0.0) {
            r.w2_upper = std::min(r.w2_upper, b / c);
        } else {
            r.w2_lower = std::max(r.w2_lower, b / c);
        }
    }
    r.feasible = !contradiction && r.w2_lower <= r.w2_upper;
    if (r.feasible) {
        const double w2 = std::clamp(0.0, r.w2_lower, r.w2_upper);
        r.witness = Eigen::Vector2d((spec.psp_max - w2 * a2s) / a1s, w2);
    }
    return r;
}

Eigen::Vector3d min_norm_weights(const DesignSpec& spec, const AlphaBasis& basis) {
    spec.validate();
    if (basis.size() != 3) throw std::invalid_argument("min-norm design needs exactly three kernels");
    const double tau = spec.tau;
    const double ds = spec.delta_s;
    auto a = [&](int p, double t) { return basis.value(static_cast<std::size_t>(p - 1), t); };
    auto D2 = [&](int p, int q, double t1, double t2) { return a(p, t1) * a(q, t2) - a(p, t2) * a(q, t1); };
    auto D = [&](int p, int q) { return D2(p, q, tau + ds, tau - ds); };
    auto G = [&](int p, int q) { return D2(p, q, tau, tau - ds) + D2(p, q, tau + ds, tau); };

    const double n1 = spec.psp_min * G(3, 2) - spec.psp_max * D(3, 2);
    const double d1 = a(3, tau) * D(1, 2) + a(2, tau) * D(3, 1) - a(1, tau) * D(3, 2);
    const double n2 = spec.psp_min * G(1, 3) - spec.psp_max * D(1, 3);
    const double d2 = a(1, tau) * D(2, 3) + a(3, tau) * D(1, 2) - a(2, tau) * D(1, 3);
    const double n3 = spec.psp_min * G(2, 1) - spec.psp_max * D(2, 1);
    const double d3 = a(2, tau) * D(3, 1) + a(1, tau) * D(2, 3) - a(3, tau) * D(2, 1);
    const double scale = std::max({std::abs(D(1, 2)), std::abs(D(2, 3)), std::abs(D(3, 1)), 1e-300});
    for (double d : {d1, d2, d3})
        if (!(std::abs(d) > 1e-12 * scale) || !std::isfinite(d))
            throw std::domain_error("min-norm design: degenerate kernel geometry");
    return {n1 / d1, n2 / d2, n3 / d3};
}

double design_cost(const DesignSpec& spec, const std::array<double, 3>& peaks, double penalty, int* singular) {
    for (double p : peaks)
        if (!(p > 0.0) || !std::isfinite(p)) {
            if (singular) ++*singular;
            return penalty;
        }
    std::array<double, 3> sorted = peaks;
    std::sort(sorted.begin(), sorted.end());
    if (sorted[1] - sorted[0] < 1e-6 || sorted[2] - sorted[1] < 1e-6) {
        if (singular) ++*singular;
        return penalty;
    }
    const AlphaBasis basis = AlphaBasis::from_peaks({sorted[0], sorted[1], sorted[2]});
    constexpr int nodes = 64;
    const double a = spec.delta_s;
    const double h = (spec.t_max - a) / (nodes - 1);
    double s = 0.0;
    for (int i = 0; i < nodes; ++i) {
        DesignSpec at = spec;
        at.tau = a + h * i;
        double l = penalty;
        try {
            l = min_norm_weights(at, basis).norm();
            if (!std::isfinite(l)) l = penalty;
        } catch (const std::domain_error&) {
            l = penalty;
        }
        if (l == penalty && singular) ++*singular;
        s += (i == 0 || i == nodes - 1 ? 0.5 : 1.0) * l;
    }
    return s * h / spec.t_max;
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opt.initial_step;
    NelderMeadResult r;
    std::vector<double> fv(n + 1);
    auto eval = [&](const std::vector<double>& x) {
        ++r.evaluations;
        return f(x);
    };
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    while (r.evaluations < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
        double spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                spread = std::max(spread, std::abs(simplex[i][j] - simplex[best][j]));
        if (std::abs(fv[worst] - fv[best]) <= opt.tolerance * (std::abs(fv[best]) + 1e-12) && spread <= 1e-6 * (1.0 + opt.initial_step)) {
            r.converged = true;
            break;
        }
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < n; ++j) c[j] += simplex[i][j] / static_cast<double>(n);
        auto along = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j) x[j] = c[j] + t * (simplex[worst][j] - c[j]);
            return x;
        };
        const std::vector<double> xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            const std::vector<double> xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const std::vector<double> xc = along(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < (outside ? fr : fv[worst])) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    fv[i] = eval(simplex[i]);
                }
            }
        }
    }
    const auto it = std::min_element(fv.begin(), fv.end());
    r.x = simplex[static_cast<std::size_t>(it - fv.begin())];
    r.value = *it;
    return r;
}

PeakDesign optimize_peak_times(const DesignSpec& spec, std::array<double, 3> initial, const NelderMeadOptions& opt) {
    spec.validate();
    PeakDesign d;
    auto f = [&](const std::vector<double>& x) { return design_cost(spec, {x[0], x[1], x[2]}, 1e3, &d.penalized); };
    const NelderMeadResult r = nelder_mead(f, {initial[0], initial[1], initial[2]}, opt);
    d.peaks = {r.x[0], r.x[1], r.x[2]};
    std::sort(d.peaks.begin(), d.peaks.end());
    d.cost = r.value;
    d.evaluations = r.evaluations;
    return d;
}

}  // namespace infospike
