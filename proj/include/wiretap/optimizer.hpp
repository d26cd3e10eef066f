#pragma once

// Inner loops of the solver: the Blahut-Arimoto-style multiplicative
// probability update over a fixed support, and gradient ascent with
// backtracking line search on the support locations.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "wiretap/model.hpp"

namespace wiretap {

struct AscentParams {
    int n_ba = 100;
    int n_ga = 20;
    double backtrack_alpha = 0.3;  // sufficient-increase fraction, in (0, 1/2)
    double backtrack_beta = 0.5;   // step shrink factor, in (0, 1)
    double initial_step = 0.0;     // 0 means 0.1 * sigma1
    double fd_check_tol = 1e-6;
    int max_shrinks = 30;

    double step_for(const ChannelPair& ch) const {
        return initial_step > 0.0 ? initial_step : 0.1 * ch.sigma1;
    }
};

/// One multiplicative update w_i' = w_i exp(Xi(x_i)) / Z. Fixed points are
/// exactly the equal-Xi KKT equality condition on the support.
inline SymmetricInput ba_step(const SymmetricInput& input, const ChannelPair& ch,
                              int panels = default_panels, int order = default_order) {
    const XiEvaluator ev(input, ch, panels, order);
    SymmetricInput out = input;
    std::vector<double> logw(input.half_size());
    for (std::size_t i = 0; i < input.half_size(); ++i)
        logw[i] = std::log(input.half_weights[i]) + ev.xi(input.half_points[i]);
    const double log_z = log_sum_exp(std::span<const double>(logw));
    if (!std::isfinite(log_z))
        throw std::runtime_error("ba_step: non-finite normalizer");
    for (std::size_t i = 0; i < input.half_size(); ++i)
        out.half_weights[i] = std::exp(logw[i] - log_z);
    return out;
}

/// n_ba composed BA steps. Weights that underflow 1e-12 are floored there
/// and the vector renormalized, so the multiplicative update can recover.
inline SymmetricInput run_ba(const SymmetricInput& input, const ChannelPair& ch, int n_ba,
                             int panels = default_panels, int order = default_order) {
    SymmetricInput cur = input;
    for (int it = 0; it < n_ba; ++it) {
        cur = ba_step(cur, ch, panels, order);
        bool floored = false;
        for (double& w : cur.half_weights)
            if (w < 1e-12) {
                w = 1e-12;
                floored = true;
            }
        if (floored) {
            const double s =
                std::accumulate(cur.half_weights.begin(), cur.half_weights.end(), 0.0);
            for (double& w : cur.half_weights)
                w /= s;
        }
    }
    return cur;
}

/// Accelerated fixed-point iteration on the weights alone. The update
/// w_i' = w_i exp(eta Xi(x_i)) / Z shares ba_step's fixed points for any
/// gain eta > 0, but near a support transition the unit-gain update
/// contracts the slow weight mode by only ~1e-4 per step, so thousands
/// of BA steps are needed to pull the support deviations inside the KKT
/// tolerance. Scaling the gain so the largest exponent stays ~0.05
/// finishes the same decay in tens of steps. Weights parked at the
/// 1e-12 floor are excluded from the spread: their Xi deficit reflects a
/// dead atom that clustering or the support update removes, not an
/// unconverged weight.
inline SymmetricInput equalize_weights(const SymmetricInput& input, const ChannelPair& ch,
                                       double target_spread, int max_iters,
                                       int panels = default_panels,
                                       int order = default_order) {
    const std::size_t n = input.half_size();
    std::vector<double> xi(n), logw(n);
    const auto measure = [&](const SymmetricInput& in) {
        const XiEvaluator ev(in, ch, panels, order);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < n; ++i) {
            xi[i] = ev.xi(in.half_points[i]);
            if (in.half_weights[i] > 2e-12) {
                lo = std::min(lo, xi[i]);
                hi = std::max(hi, xi[i]);
            }
        }
        return hi - lo;
    };
    const auto step = [&](const SymmetricInput& in, double eta) {
        SymmetricInput out = in;
        for (std::size_t i = 0; i < n; ++i)
            logw[i] = std::log(in.half_weights[i]) + eta * xi[i];
        const double log_z = log_sum_exp(std::span<const double>(logw));
        if (!std::isfinite(log_z))
            return in;
        for (std::size_t i = 0; i < n; ++i)
            out.half_weights[i] = std::max(std::exp(logw[i] - log_z), 1e-12);
        const double s =
            std::accumulate(out.half_weights.begin(), out.half_weights.end(), 0.0);
        for (double& w : out.half_weights)
            w /= s;
        return out;
    };
    SymmetricInput cur = input;
    double spread = measure(cur);
    // Only operate in the terminal regime: with the locations still far
    // from stationary, a long weight-only run starves atoms the ascent
    // would have relocated instead.
    if (spread > 1e-2)
        return input;
    // Gains that overshoot a fast weight mode make the spread grow; the
    // cap backs off on such steps and recovers geometrically, so the
    // slow mode always gets the largest gain the fast modes tolerate.
    double eta_cap = 200.0;
    for (int it = 0; it < max_iters && spread > target_spread; ++it) {
        const double eta = std::clamp(0.05 / spread, 1.0, eta_cap);
        const SymmetricInput next = step(cur, eta);
        const double next_spread = measure(next);
        if (next_spread >= spread) {
            if (eta <= 1.0)
                break;  // even the unit-gain update stalls: converged enough
            eta_cap = eta / 2.0;
            spread = measure(cur);  // refresh xi[], clobbered by measure(next)
            continue;
        }
        cur = next;
        spread = next_spread;
        eta_cap = std::min(eta_cap * 1.3, 200.0);
    }
    return cur;
}

/// d(I1 - I2)/dx_i per half point. Component i is w_i [J(x_i, s1) - J(x_i, s2)]
/// where J is the location sensitivity of the cross entropy against the
/// output density; the mirrored point -x_i contributes an equal term, which
/// the pair-total weight w_i absorbs. The pinned component is reported too
/// but never applied by ascend.
inline std::vector<double> secrecy_gradient(const SymmetricInput& input, const ChannelPair& ch,
                                            int panels = default_panels,
                                            int order = default_order) {
    const XiEvaluator ev(input, ch, panels, order);
    std::vector<double> g(input.half_size());
    for (std::size_t i = 0; i < input.half_size(); ++i)
        // Xi is even, so the derivative at a zero atom vanishes identically;
        // evaluating it would only pick up quadrature noise.
        g[i] = input.half_points[i] == 0.0
                   ? 0.0
                   : input.half_weights[i] * ev.xi_gradient(input.half_points[i]);
    return g;
}

namespace detail {

/// Move free points along a scaled gradient, clamp to [0, A], restore
/// ordering. The pinned last point stays at A; exact collisions are left
/// for CLUSTER to resolve.
inline SymmetricInput moved_input(const SymmetricInput& input, const std::vector<double>& grad,
                                  double step) {
    SymmetricInput out = input;
    const std::size_t n = input.half_size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        out.half_points[i] =
            std::clamp(input.half_points[i] + step * grad[i], 0.0, input.amplitude);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return out.half_points[a] < out.half_points[b];
    });
    SymmetricInput sorted = out;
    for (std::size_t i = 0; i < n; ++i) {
        sorted.half_points[i] = out.half_points[idx[i]];
        sorted.half_weights[i] = out.half_weights[idx[i]];
    }
    return sorted;
}

}  // namespace detail

/// Backtracking-line-search gradient ascent on the free support locations.
/// Secrecy information is nondecreasing across the call by construction.
inline SymmetricInput ascend(const SymmetricInput& input, const ChannelPair& ch,
                             const AscentParams& params, int panels = default_panels,
                             int order = default_order) {
    SymmetricInput cur = input;
    double f_cur = XiEvaluator(cur, ch, panels, order).secrecy_information();
    for (int it = 0; it < params.n_ga; ++it) {
        const std::vector<double> grad = secrecy_gradient(cur, ch, panels, order);
        double g2 = 0.0, gmax = 0.0;
        for (std::size_t i = 0; i + 1 < grad.size(); ++i) {
            g2 += grad[i] * grad[i];
            gmax = std::max(gmax, std::abs(grad[i]));
        }
        if (g2 < 1e-28)
            break;
        // Scale so the largest component initially moves step_for(ch): the
        // objective is nearly flat along the support trajectories and a raw
        // gradient step would crawl; backtracking shrinks from here.
        double step = params.step_for(ch) / gmax;
        bool accepted = false;
        for (int shrink = 0; shrink <= params.max_shrinks; ++shrink) {
            const SymmetricInput cand = detail::moved_input(cur, grad, step);
            const double f_cand = XiEvaluator(cand, ch, panels, order).secrecy_information();
            if (f_cand >= f_cur + params.backtrack_alpha * step * g2) {
                cur = cand;
                f_cur = f_cand;
                accepted = true;
                break;
            }
            step *= params.backtrack_beta;
        }
        if (!accepted)
            break;  // the point set is already stationary at this resolution
    }
    return cur;
}

}  // namespace wiretap
