#pragma once

// epsilon-KKT validation of a candidate input distribution: the Xi profile
// over the nonnegative axis, the two negated optimality tests, the refined
// profile argmax, and the violating support set.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "wiretap/model.hpp"

namespace wiretap {

struct KktReport {
    bool valid = false;
    double capacity_proxy = 0.0;        // Xi(A; P_X)
    double max_profile_violation = 0.0; // max over grid of Xi(x) - Xi(A)
    std::vector<std::pair<double, double>> support_violations;  // (x_i, Xi(x_i) - Xi(A))
    double candidate_x = 0.0;           // refined profile argmax, in [0, A]
    std::vector<std::pair<double, double>> profile;  // (x, Xi(x)), sorted by x

    bool condition_a_fired(double epsilon) const { return max_profile_violation > epsilon; }
    bool condition_b_fired() const { return !support_violations.empty(); }
};

/// Default KKT scan step: min(sigma1, A)/50, capped so the grid never
/// exceeds 5e4 points.
inline double default_grid_step(const ChannelPair& ch, double amplitude) {
    double step = std::min(ch.sigma1, amplitude) / 50.0;
    return std::max(step, amplitude / 5e4);
}

namespace detail {

/// Golden-section maximization of f on [lo, hi] to the given x tolerance.
template <class F>
double golden_section_max(F&& f, double lo, double hi, double xtol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

inline std::vector<double> profile_grid(const SymmetricInput& input, double grid_step) {
    std::vector<double> xs;
    for (double x = 0.0; x < input.amplitude; x += grid_step)
        xs.push_back(x);
    xs.push_back(input.amplitude);
    xs.insert(xs.end(), input.half_points.begin(), input.half_points.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

}  // namespace detail

/// Xi sampled on the uniform grid over [0, A] plus the exact support
/// points. Evenness of Xi makes the negative axis redundant.
inline std::vector<std::pair<double, double>> xi_profile(const SymmetricInput& input,
                                                         const ChannelPair& ch, double grid_step,
                                                         int panels = default_panels,
                                                         int order = default_order) {
    if (!(grid_step > 0.0))
        throw std::domain_error("xi_profile: grid_step must be positive");
    const XiEvaluator ev(input, ch, panels, order);
    std::vector<std::pair<double, double>> prof;
    for (double x : detail::profile_grid(input, grid_step))
        prof.emplace_back(x, ev.xi(x));
    return prof;
}

/// Runs both negated KKT tests at tolerance epsilon. capacity_proxy is
/// Xi(A; input); candidate_x is the grid argmax refined by golden-section
/// search within one grid step.
inline KktReport validate(const SymmetricInput& input, const ChannelPair& ch, double epsilon,
                          double grid_step, int panels = default_panels,
                          int order = default_order) {
    if (!(epsilon > 0.0))
        throw std::domain_error("validate: epsilon must be positive");
    if (!(grid_step > 0.0))
        throw std::domain_error("validate: grid_step must be positive");
    const XiEvaluator ev(input, ch, panels, order);

    KktReport rep;
    rep.profile.reserve(64);
    std::size_t argmax = 0;
    for (double x : detail::profile_grid(input, grid_step)) {
        const double v = ev.xi(x);
        rep.profile.emplace_back(x, v);
        if (v > rep.profile[argmax].second)
            argmax = rep.profile.size() - 1;
    }
    rep.capacity_proxy = ev.xi(input.amplitude);

    double max_xi = rep.profile[argmax].second;
    rep.max_profile_violation = max_xi - rep.capacity_proxy;

    const double lo = std::max(0.0, rep.profile[argmax].first - grid_step);
    const double hi = std::min(input.amplitude, rep.profile[argmax].first + grid_step);
    rep.candidate_x = hi > lo ? detail::golden_section_max([&](double x) { return ev.xi(x); },
                                                           lo, hi, 1e-9)
                              : rep.profile[argmax].first;
    const double refined = ev.xi(rep.candidate_x);
    rep.max_profile_violation = std::max(rep.max_profile_violation,
                                         refined - rep.capacity_proxy);

    for (std::size_t i = 0; i < input.half_size(); ++i) {
        if (input.half_points[i] == input.amplitude)
            continue;  // deviation at the pin is identically zero
        const double dev = ev.xi(input.half_points[i]) - rep.capacity_proxy;
        if (std::abs(dev) > epsilon)
            rep.support_violations.emplace_back(input.half_points[i], dev);
    }
    rep.valid = rep.max_profile_violation <= epsilon && rep.support_violations.empty();
    return rep;
}

/// The set S of support points whose Xi value falls outside the horizontal
/// epsilon-strip around Xi(A). The pin itself is always excluded.
inline std::vector<double> violating_set(const SymmetricInput& input, const ChannelPair& ch,
                                         double epsilon, int panels = default_panels,
                                         int order = default_order) {
    if (!(epsilon > 0.0))
        throw std::domain_error("violating_set: epsilon must be positive");
    const XiEvaluator ev(input, ch, panels, order);
    const double xi_a = ev.xi(input.amplitude);
    std::vector<double> s;
    for (std::size_t i = 0; i < input.half_size(); ++i) {
        if (input.half_points[i] == input.amplitude)
            continue;
        if (std::abs(ev.xi(input.half_points[i]) - xi_a) > epsilon)
            s.push_back(input.half_points[i]);
    }
    return s;
}

}  // namespace wiretap
