#pragma once

// CLUSTER and UPDATE: merging support points closer than the minimum
// distance, and inserting/replacing points around the KKT profile argmax.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wiretap/kkt.hpp"
#include "wiretap/model.hpp"

namespace wiretap {

struct UpdatePolicy {
    double min_dist = 1e-2;  // cluster threshold
    double delta = 0.1;      // replacement window around the candidate
};

namespace detail {

/// One greedy left-to-right merge pass. Returns true if anything merged.
inline bool cluster_pass(SymmetricInput& in, double min_dist) {
    const std::size_t n = in.half_points.size();
    std::vector<double> xs, ws;
    bool changed = false;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        double wsum = in.half_weights[i];
        double xw = in.half_points[i] * in.half_weights[i];
        bool has_pin = in.half_points[i] == in.amplitude;
        bool has_zero = in.half_points[i] == 0.0;
        while (j + 1 < n && in.half_points[j + 1] - in.half_points[j] < min_dist) {
            ++j;
            wsum += in.half_weights[j];
            xw += in.half_points[j] * in.half_weights[j];
            has_pin = has_pin || in.half_points[j] == in.amplitude;
            has_zero = has_zero || in.half_points[j] == 0.0;
        }
        double loc = xw / wsum;
        if (has_pin)
            loc = in.amplitude;  // pinning wins over the weighted mean
        else if (loc < min_dist / 2.0 || (has_zero && loc < min_dist))
            loc = 0.0;  // below min_dist/2 the mirror point is within range too
        if (j > i || loc != in.half_points[i])
            changed = true;
        xs.push_back(loc);
        ws.push_back(wsum);
        i = j + 1;
    }
    in.half_points = std::move(xs);
    in.half_weights = std::move(ws);
    return changed;
}

/// Re-sort by location and collapse exact duplicates (summed weight), so
/// an x_hat landing on an existing point merges into it.
inline void sort_and_merge_duplicates(SymmetricInput& in) {
    std::vector<std::size_t> idx(in.half_points.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
        idx[k] = k;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return in.half_points[a] < in.half_points[b];
    });
    std::vector<double> xs, ws;
    for (std::size_t k : idx) {
        if (!xs.empty() && xs.back() == in.half_points[k]) {
            ws.back() += in.half_weights[k];
        } else {
            xs.push_back(in.half_points[k]);
            ws.push_back(in.half_weights[k]);
        }
    }
    in.half_points = std::move(xs);
    in.half_weights = std::move(ws);
}

inline void set_uniform_full_support(SymmetricInput& in) {
    const double full = static_cast<double>(in.full_support_size());
    for (std::size_t i = 0; i < in.half_points.size(); ++i)
        in.half_weights[i] = (in.half_points[i] == 0.0 ? 1.0 : 2.0) / full;
}

}  // namespace detail

/// Merge every maximal run of half points with successive gaps below
/// min_dist into one point at the probability-weighted mean, carrying the
/// summed weight. A run containing the pin collapses onto A. Idempotent.
inline SymmetricInput cluster(const SymmetricInput& input, const UpdatePolicy& policy) {
    SymmetricInput out = input;
    // A merge can create a new sub-min_dist gap; iterate to a fixed point.
    while (detail::cluster_pass(out, policy.min_dist)) {
    }
    return out;
}

/// Support update after a failed KKT validation, driven by the candidate
/// point x_hat and the violating set S of the report:
///  - both tests fired and S holds x1, x2 with |x1-x2| < delta bracketing
///    x_hat: x_hat replaces both, taking their combined weight;
///  - otherwise, test (a) fired: x_hat is inserted (or merged into a point
///    within min_dist) and all probabilities reset uniform over the full
///    support;
///  - otherwise (only test (b)): uniform reset on the unchanged support.
inline SymmetricInput update(const SymmetricInput& input, const KktReport& report,
                             double epsilon, const UpdatePolicy& policy) {
    if (report.valid)
        throw std::logic_error("update: called with a valid KKT report");
    const bool fired_a = report.condition_a_fired(epsilon);
    const bool fired_b = report.condition_b_fired();
    // A candidate at tiny positive x stands for the mirror pair {-x, +x},
    // which the full-axis cluster rule would merge into an atom at 0.
    const double x_hat =
        report.candidate_x < policy.min_dist / 2.0 ? 0.0 : report.candidate_x;

    SymmetricInput out = input;

    if (fired_a && fired_b) {
        std::vector<double> s;
        for (const auto& [x, dev] : report.support_violations)
            s.push_back(x);
        std::sort(s.begin(), s.end());
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            const double x1 = s[i], x2 = s[i + 1];
            if (x2 - x1 < policy.delta && x_hat >= x1 && x_hat <= x2) {
                std::vector<double> xs, ws;
                double wsum = 0.0;
                for (std::size_t k = 0; k < out.half_points.size(); ++k) {
                    if (out.half_points[k] == x1 || out.half_points[k] == x2) {
                        wsum += out.half_weights[k];
                    } else {
                        xs.push_back(out.half_points[k]);
                        ws.push_back(out.half_weights[k]);
                    }
                }
                xs.push_back(x_hat == out.amplitude ? out.amplitude : x_hat);
                ws.push_back(wsum);
                out.half_points = std::move(xs);
                out.half_weights = std::move(ws);
                detail::sort_and_merge_duplicates(out);
                return out;
            }
        }
        // No qualifying pair: fall through to the insertion branch.
    }

    if (fired_a) {
        bool near_existing = false;
        for (double x : out.half_points)
            if (std::abs(x - x_hat) < policy.min_dist)
                near_existing = true;
        if (!near_existing) {
            out.half_points.push_back(x_hat);
            out.half_weights.push_back(0.0);  // overwritten by the uniform reset
            detail::sort_and_merge_duplicates(out);
        }
        detail::set_uniform_full_support(out);
        return out;
    }

    // Only (b) fired. Support points are part of the validation grid, so a
    // positive deviation would have fired (a) as well; the violations here
    // all sit below the strip, marking points whose mass the optimum
    // rejects (BA keeps shrinking their weight). Drop them; if one was
    // actually needed, (a) fires there on a later pass and reinserts it.
    std::vector<double> xs, ws;
    for (std::size_t k = 0; k < out.half_points.size(); ++k) {
        bool drop = false;
        for (const auto& [x, dev] : report.support_violations)
            if (out.half_points[k] == x && dev < 0.0)
                drop = true;
        if (!drop) {
            xs.push_back(out.half_points[k]);
            ws.push_back(out.half_weights[k]);
        }
    }
    if (xs.size() < out.half_points.size()) {
        double s = 0.0;
        for (double w : ws)
            s += w;
        for (double& w : ws)
            w /= s;
        out.half_points = std::move(xs);
        out.half_weights = std::move(ws);
        return out;
    }
    // No negative violations (grid anomaly): reset uniform and let BA rerun.
    detail::set_uniform_full_support(out);
    return out;
}

}  // namespace wiretap
