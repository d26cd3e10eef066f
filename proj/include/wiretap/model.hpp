#pragma once

// Channel and input-distribution types, and the information functionals:
// output mixtures, mutual information, secrecy information, and the
// marginal information density difference Xi.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "wiretap/numerics.hpp"

namespace wiretap {

/// Noise standard deviations of the legitimate (sigma1) and eavesdropper
/// (sigma2) channel legs.
struct ChannelPair {
    double sigma1;
    double sigma2;

    ChannelPair(double s1, double s2) : sigma1(s1), sigma2(s2) {
        if (!(s1 > 0.0) || !(s2 > 0.0))
            throw std::domain_error("ChannelPair: sigmas must be positive");
    }

    /// sigma1 < sigma2: the eavesdropper leg is strictly noisier.
    bool degraded() const { return sigma1 < sigma2; }
};

/// Half-support representation of a symmetric discrete input on [-A, A].
/// half_points are the nonnegative support points, increasing, with the
/// peak A pinned as the last entry. half_weights[i] is the total
/// probability of the pair {+x_i, -x_i} (of the singleton when x_i == 0).
struct SymmetricInput {
    double amplitude = 0.0;
    std::vector<double> half_points;
    std::vector<double> half_weights;

    std::size_t half_size() const { return half_points.size(); }
    bool has_zero() const { return !half_points.empty() && half_points.front() == 0.0; }

    /// Number of points of the full symmetric support: 2n - [x0 == 0].
    int full_support_size() const {
        return 2 * static_cast<int>(half_points.size()) - (has_zero() ? 1 : 0);
    }

    /// Throws if a structural invariant is violated.
    void check(double tol = 1e-12) const {
        if (half_points.empty() || half_points.size() != half_weights.size())
            throw std::domain_error("SymmetricInput: empty or mismatched vectors");
        double sum = 0.0;
        for (std::size_t i = 0; i < half_points.size(); ++i) {
            if (half_points[i] < 0.0)
                throw std::domain_error("SymmetricInput: negative half point");
            if (i > 0 && !(half_points[i] > half_points[i - 1]))
                throw std::domain_error("SymmetricInput: points not strictly increasing");
            if (!(half_weights[i] > 0.0))
                throw std::domain_error("SymmetricInput: nonpositive weight");
            sum += half_weights[i];
        }
        if (std::abs(sum - 1.0) > tol)
            throw std::domain_error("SymmetricInput: weights do not sum to 1");
        if (half_points.back() != amplitude)
            throw std::domain_error("SymmetricInput: peak point must equal amplitude");
    }
};

/// Gaussian mixture output density induced by a SymmetricInput through one
/// channel leg, with the symmetric pairs expanded.
struct OutputMixture {
    double sigma = 0.0;
    std::vector<double> means;    // full symmetric support, increasing
    std::vector<double> weights;  // per-mean probabilities
};

inline OutputMixture output_mixture(const SymmetricInput& input, double sigma) {
    if (!(sigma > 0.0))
        throw std::domain_error("output_mixture: sigma must be positive");
    OutputMixture mix;
    mix.sigma = sigma;
    const std::size_t n = input.half_points.size();
    for (std::size_t i = n; i-- > 0;) {
        if (input.half_points[i] > 0.0) {
            mix.means.push_back(-input.half_points[i]);
            mix.weights.push_back(0.5 * input.half_weights[i]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (input.half_points[i] == 0.0) {
            mix.means.push_back(0.0);
            mix.weights.push_back(input.half_weights[i]);
        } else {
            mix.means.push_back(input.half_points[i]);
            mix.weights.push_back(0.5 * input.half_weights[i]);
        }
    }
    return mix;
}

inline double log_output_pdf(const OutputMixture& mix, double y) {
    std::vector<double> terms;
    terms.reserve(mix.means.size());
    for (std::size_t j = 0; j < mix.means.size(); ++j)
        terms.push_back(std::log(mix.weights[j]) + log_gaussian_pdf(y, mix.means[j], mix.sigma));
    return log_sum_exp(std::span<const double>(terms));
}

inline constexpr int default_panels = 64;
inline constexpr int default_order = 10;

/// Integration domain for a mixture with means in [-A, A] and component
/// std dev sigma; the 8-sigma margin keeps tail mass below 1e-14.
inline QuadratureRule channel_rule(double amplitude, double sigma,
                                   int panels = default_panels, int order = default_order) {
    const double margin = 8.0 * sigma;
    return build_rule(-amplitude - margin, amplitude + margin, panels, order);
}

/// Differential entropy of a Gaussian, nats.
inline double gaussian_entropy(double sigma) {
    return 0.5 * (log_two_pi + 1.0) + std::log(sigma);
}

namespace detail {

/// Log mixture density tabulated at the nodes of a quadrature rule.
struct PdfTable {
    QuadratureRule rule;
    std::vector<double> log_pdf;
    double sigma;

    PdfTable(const SymmetricInput& input, double sig, int panels, int order)
        : rule(channel_rule(input.amplitude, sig, panels, order)),
          sigma(sig) {
        const OutputMixture mix = output_mixture(input, sig);
        log_pdf.reserve(rule.nodes.size());
        for (double y : rule.nodes)
            log_pdf.push_back(log_output_pdf(mix, y));
    }

    /// h(Y) = -int P_Y log P_Y.
    double entropy() const {
        double h = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k)
            h -= rule.weights[k] * std::exp(log_pdf[k]) * log_pdf[k];
        return h;
    }

    /// D(N(x, sigma^2) || P_Y) = -h(N) - int phi_sigma(y-x) log P_Y.
    double kl_from_point(double x) const {
        double cross = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double phi = std::exp(log_gaussian_pdf(rule.nodes[k], x, sigma));
            cross += rule.weights[k] * phi * log_pdf[k];
        }
        return -gaussian_entropy(sigma) - cross;
    }

    /// d/dx of -int phi_sigma(y-x) log P_Y, i.e. the location sensitivity
    /// of the cross entropy (the d/dx int phi log phi term vanishes).
    double kl_gradient(double x) const {
        double g = 0.0;
        const double inv_var = 1.0 / (sigma * sigma);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double d = rule.nodes[k] - x;
            const double phi = std::exp(log_gaussian_pdf(rule.nodes[k], x, sigma));
            g -= rule.weights[k] * phi * d * inv_var * log_pdf[k];
        }
        return g;
    }
};

}  // namespace detail

/// One tabulation of both output densities for a fixed input; all Xi and
/// mutual-information evaluations against that input share it.
class XiEvaluator {
public:
    XiEvaluator(const SymmetricInput& input, const ChannelPair& ch,
                int panels = default_panels, int order = default_order)
        : t1_(input, ch.sigma1, panels, order), t2_(input, ch.sigma2, panels, order) {}

    double xi(double x) const { return t1_.kl_from_point(x) - t2_.kl_from_point(x); }

    double mi_legit() const { return clamp_mi(t1_.entropy() - gaussian_entropy(t1_.sigma)); }
    double mi_eve() const { return clamp_mi(t2_.entropy() - gaussian_entropy(t2_.sigma)); }
    double secrecy_information() const { return mi_legit() - mi_eve(); }

    /// d Xi-cross-entropy terms / dx, used by the secrecy gradient.
    double xi_gradient(double x) const { return t1_.kl_gradient(x) - t2_.kl_gradient(x); }

private:
    static double clamp_mi(double v) {
        if (v < 0.0) {
            if (v < -1e-9)
                throw std::runtime_error("mutual information negative beyond tolerance");
            return 0.0;
        }
        return v;
    }

    detail::PdfTable t1_, t2_;
};

/// I(X; Y) in nats for Y = X + N(0, sigma^2).
inline double mutual_information(const SymmetricInput& input, double sigma,
                                 int panels = default_panels, int order = default_order) {
    detail::PdfTable t(input, sigma, panels, order);
    const double v = t.entropy() - gaussian_entropy(sigma);
    if (v < 0.0) {
        if (v < -1e-9)
            throw std::runtime_error("mutual_information: negative beyond tolerance");
        return 0.0;
    }
    return v;
}

/// I(X; Y1) - I(X; Y2).
inline double secrecy_information(const SymmetricInput& input, const ChannelPair& ch,
                                  int panels = default_panels, int order = default_order) {
    return mutual_information(input, ch.sigma1, panels, order) -
           mutual_information(input, ch.sigma2, panels, order);
}

/// Marginal information density difference
/// Xi(x) = D(N(x,s1^2) || P_Y1) - D(N(x,s2^2) || P_Y2); even in x for
/// symmetric inputs.
inline double xi(double x, const SymmetricInput& input, const ChannelPair& ch,
                 int panels = default_panels, int order = default_order) {
    return XiEvaluator(input, ch, panels, order).xi(x);
}

/// Mutual information of a Gaussian input of the given variance.
inline double gaussian_input_mi(double input_variance, double sigma) {
    if (input_variance < 0.0)
        throw std::domain_error("gaussian_input_mi: variance must be nonnegative");
    return 0.5 * std::log1p(input_variance / (sigma * sigma));
}

/// E[X^2] of the symmetric input (the mean is 0).
inline double input_variance(const SymmetricInput& input) {
    double v = 0.0;
    for (std::size_t i = 0; i < input.half_points.size(); ++i)
        v += input.half_weights[i] * input.half_points[i] * input.half_points[i];
    return v;
}

}  // namespace wiretap
