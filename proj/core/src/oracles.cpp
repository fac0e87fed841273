#include "infospike/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace infospike::oracles {

namespace {

struct InputSpike {
    std::size_t channel;
    long step;
};

std::vector<InputSpike> quantize(const SpikePattern& x, double dt) {
    std::vector<InputSpike> out;
    for (std::size_t c = 0; c < x.channels(); ++c)
        for (double t : x.channel(c).times()) out.push_back({c, std::lround(t / dt)});
    return out;
}

double probability(const NeuronConfig& cfg, const Weights& w, const std::vector<InputSpike>& in, int steps,
                   std::uint32_t mask, bool& feasible) {
    const long mem = static_cast<long>(std::ceil(cfg.memory_horizon() / cfg.dt - 1e-9));
    const long refr = std::max(1L, std::lround(cfg.refractory / cfg.dt));
    bool have_last = false;
    long last = 0;
    double p = 1.0;
    feasible = true;
    for (long t = 0; t < steps; ++t) {
        double u = 0.0;
        for (const auto& s : in) {
            if (s.step >= t || t - s.step > mem) continue;
            if (have_last && s.step <= last) continue;
            for (std::size_t k = 0; k < cfg.basis.size(); ++k)
                u += w(static_cast<Eigen::Index>(s.channel), static_cast<Eigen::Index>(k)) *
                     cfg.basis.value(k, static_cast<double>(t - s.step) * cfg.dt);
        }
        double big_lambda = 1.0 - std::exp(-std::exp((u - cfg.threshold) / cfg.kappa) * cfg.dt);
        if (have_last && t - last < refr) big_lambda = 0.0;
        const bool spike = (mask >> t) & 1u;
        if (spike) {
            if (big_lambda == 0.0) feasible = false;
            p *= big_lambda;
            have_last = true;
            last = t;
        } else {
            p *= 1.0 - big_lambda;
        }
    }
    return p;
}

}  // namespace

double mask_probability(const NeuronConfig& cfg, const Weights& w, const SpikePattern& x, int steps,
                        std::uint32_t mask) {
    if (steps < 0 || steps > 16) throw std::invalid_argument("enumeration limited to 16 steps");
    bool feasible = true;
    return probability(cfg, w, quantize(x, cfg.dt), steps, mask, feasible);
}

std::vector<EnumeratedPattern> enumerate_output_distribution(const NeuronConfig& cfg, const Weights& w,
                                                             const SpikePattern& x, int steps) {
    if (steps < 0 || steps > 16) throw std::invalid_argument("enumeration limited to 16 steps");
    const auto in = quantize(x, cfg.dt);
    std::vector<EnumeratedPattern> out;
    out.reserve(std::size_t{1} << steps);
    for (std::uint32_t mask = 0; mask < (1u << steps); ++mask) {
        EnumeratedPattern e;
        e.mask = mask;
        e.probability = probability(cfg, w, in, steps, mask, e.feasible);
        if (!e.feasible) e.probability = 0.0;
        out.push_back(e);
    }
    return out;
}

double enumerated_entropy(const std::vector<EnumeratedPattern>& dist) {
    double h = 0.0;
    for (const auto& e : dist)
        if (e.probability > 0.0) h -= e.probability * std::log(e.probability);
    return h;
}

double enumerated_hat_entropy(const std::vector<EnumeratedPattern>& dist, int steps) {
    std::vector<double> cls(static_cast<std::size_t>(steps) + 1, 0.0);  // last entry: empty pattern
    for (const auto& e : dist) {
        int first = steps;
        for (int t = 0; t < steps; ++t)
            if ((e.mask >> t) & 1u) {
                first = t;
                break;
            }
        cls[static_cast<std::size_t>(first)] += e.probability;
    }
    double h = 0.0;
    for (double p : cls)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

namespace {

double checked(const ScalarFn& f, const Eigen::MatrixXd& w) {
    const double v = f(w);
    if (!std::isfinite(v)) throw std::domain_error("finite difference: non-finite function value");
    return v;
}

void check_eps(double eps) {
    if (!(eps >= 1e-8 && eps <= 1e-4 * (1.0 + 1e-12))) throw std::invalid_argument("finite difference: eps outside [1e-8, 1e-4]");
}

Eigen::MatrixXd central(const ScalarFn& f, const Eigen::MatrixXd& w, double eps) {
    Eigen::MatrixXd g(w.rows(), w.cols());
    Eigen::MatrixXd p = w;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double orig = p(i);
        p(i) = orig + eps;
        const double fp = checked(f, p);
        p(i) = orig - eps;
        const double fm = checked(f, p);
        p(i) = orig;
        g(i) = (fp - fm) / (2.0 * eps);
    }
    return g;
}

}  // namespace

Eigen::MatrixXd fd_gradient(const ScalarFn& f, const Eigen::MatrixXd& w, double eps) {
    check_eps(eps);
    return central(f, w, eps);
}

RichardsonCheck fd_richardson(const ScalarFn& f, const Eigen::MatrixXd& w, double eps) {
    check_eps(eps / 4.0);
    check_eps(eps);
    RichardsonCheck r;
    r.coarse = central(f, w, eps);
    r.fine = central(f, w, eps / 2.0);
    r.finer = central(f, w, eps / 4.0);
    r.extrapolated = (4.0 * r.fine - r.coarse) / 3.0;
    const double d1 = (r.coarse - r.fine).norm();
    const double d2 = (r.fine - r.finer).norm();
    r.ratio = d2 > 0.0 ? d1 / d2 : 0.0;
    return r;
}

Eigen::MatrixXd fd_hessian(const ScalarFn& f, const Eigen::MatrixXd& w, double eps) {
    check_eps(eps);
    const Eigen::Index n = w.size();
    Eigen::MatrixXd H(n, n);
    Eigen::MatrixXd p = w;
    const double f0 = checked(f, w);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double oi = p(i);
        p(i) = oi + eps;
        const double fp = checked(f, p);
        p(i) = oi - eps;
        const double fm = checked(f, p);
        p(i) = oi;
        H(i, i) = (fp - 2.0 * f0 + fm) / (eps * eps);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double oj = p(j);
            double v[4];
            int idx = 0;
            for (double si : {1.0, -1.0})
                for (double sj : {1.0, -1.0}) {
                    p(i) = oi + si * eps;
                    p(j) = oj + sj * eps;
                    v[idx++] = checked(f, p);
                }
            p(i) = oi;
            p(j) = oj;
            H(i, j) = H(j, i) = (v[0] - v[1] - v[2] + v[3]) / (4.0 * eps * eps);
        }
    }
    return H;
}

double trapezoid(const std::vector<double>& samples, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("quadrature: step must be positive");
    if (samples.size() < 2) return 0.0;
    double s = 0.5 * (samples.front() + samples.back());
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) s += samples[i];
    return s * step;
}

QuadratureResult quadrature_integral(const std::function<double(double)>& f, double a, double b, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("quadrature: step must be positive");
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / step - 1e-9)));
    const double h = (b - a) / static_cast<double>(n);
    std::vector<double> ys(2 * n + 1);
    for (std::size_t i = 0; i <= 2 * n; ++i) ys[i] = f(a + 0.5 * h * static_cast<double>(i));
    std::vector<double> coarse(n + 1);
    for (std::size_t i = 0; i <= n; ++i) coarse[i] = ys[2 * i];
    const double tc = trapezoid(coarse, h);
    const double tf = trapezoid(ys, 0.5 * h);
    return {tf, std::abs(tc - tf) / 3.0};
}

}  // namespace infospike::oracles
