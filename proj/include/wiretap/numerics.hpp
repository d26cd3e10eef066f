#pragma once

// Deterministic numerical kernels: log-domain Gaussian densities,
// stable log-sum-exp, and composite Gauss-Legendre quadrature.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wiretap {

inline constexpr double log_two_pi = 1.8378770664093454836;

/// log N(y; mean, sigma^2) in nats.
inline double log_gaussian_pdf(double y, double mean, double sigma) {
    if (!(sigma > 0.0))
        throw std::domain_error("log_gaussian_pdf: sigma must be positive");
    const double z = (y - mean) / sigma;
    return -0.5 * log_two_pi - std::log(sigma) - 0.5 * z * z;
}

/// log sum_k exp(v_k) with max-subtraction.
inline double log_sum_exp(std::span<const double> terms) {
    if (terms.empty())
        throw std::domain_error("log_sum_exp: empty term list");
    const double m = *std::max_element(terms.begin(), terms.end());
    if (!std::isfinite(m))
        return m;  // all -inf, or a genuine inf dominates
    double s = 0.0;
    for (double t : terms)
        s += std::exp(t - m);
    return m + std::log(s);
}

/// log sum_k exp(log_weight_k + log_value_k).
inline double log_sum_exp(std::span<const std::pair<double, double>> terms) {
    if (terms.empty())
        throw std::domain_error("log_sum_exp: empty term list");
    std::vector<double> sums;
    sums.reserve(terms.size());
    for (const auto& [lw, lv] : terms)
        sums.push_back(lw + lv);
    return log_sum_exp(std::span<const double>(sums));
}

/// Fixed-panel quadrature rule on a closed interval.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lo = 0.0;
    double hi = 0.0;
};

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void legendre_rule(int order, std::vector<double>& x, std::vector<double>& w) {
    x.assign(order, 0.0);
    w.assign(order, 0.0);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15)
                break;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[order - 1 - i] = w[i];
    }
}

}  // namespace detail

/// Composite Gauss-Legendre rule: `panels` equal subintervals of [lo, hi],
/// `order` nodes per panel. Exact for polynomials of degree <= 2*order-1
/// per panel.
inline QuadratureRule build_rule(double lo, double hi, int panels, int order) {
    if (!(lo < hi))
        throw std::domain_error("build_rule: requires lo < hi");
    if (panels < 1 || order < 1)
        throw std::domain_error("build_rule: panels and order must be positive");
    std::vector<double> gx, gw;
    detail::legendre_rule(order, gx, gw);
    QuadratureRule rule;
    rule.lo = lo;
    rule.hi = hi;
    rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
    rule.weights.reserve(static_cast<std::size_t>(panels) * order);
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h;
        const double c = a + 0.5 * h;
        for (int j = 0; j < order; ++j) {
            rule.nodes.push_back(c + 0.5 * h * gx[j]);
            rule.weights.push_back(0.5 * h * gw[j]);
        }
    }
    return rule;
}

/// Sum of weights * f(nodes). Deterministic for identical inputs.
template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double v = f(rule.nodes[k]);
        if (!std::isfinite(v))
            throw std::runtime_error("integrate: non-finite integrand at node y=" +
                                     std::to_string(rule.nodes[k]));
        acc += rule.weights[k] * v;
    }
    return acc;
}

}  // namespace wiretap
