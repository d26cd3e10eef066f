#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wiretap/model.hpp"

using namespace wiretap;

namespace {

SymmetricInput make_input(double amplitude, std::vector<double> xs, std::vector<double> ws) {
    SymmetricInput in;
    in.amplitude = amplitude;
    in.half_points = std::move(xs);
    in.half_weights = std::move(ws);
    return in;
}

}  // namespace

TEST_CASE("output_mixture expands symmetric pairs") {
    const OutputMixture two = output_mixture(make_input(1.0, {1.0}, {1.0}), 1.0);
    REQUIRE(two.means.size() == 2);
    CHECK(two.means[0] == -1.0);
    CHECK(two.means[1] == 1.0);
    CHECK(two.weights[0] == doctest::Approx(0.5));
    CHECK(two.weights[1] == doctest::Approx(0.5));

    const OutputMixture zero = output_mixture(make_input(0.0, {0.0}, {1.0}), 2.0);
    REQUIRE(zero.means.size() == 1);
    CHECK(zero.means[0] == 0.0);
    CHECK(zero.weights[0] == doctest::Approx(1.0));

    const OutputMixture three = output_mixture(make_input(2.0, {0.0, 2.0}, {0.4, 0.6}), 1.0);
    REQUIRE(three.means.size() == 3);
    CHECK(three.means[0] == -2.0);
    CHECK(three.means[1] == 0.0);
    CHECK(three.means[2] == 2.0);
    CHECK(three.weights[0] == doctest::Approx(0.3));
    CHECK(three.weights[1] == doctest::Approx(0.4));
    CHECK(three.weights[2] == doctest::Approx(0.3));
}

TEST_CASE("log_output_pdf values and evenness") {
    const OutputMixture one = output_mixture(make_input(0.0, {0.0}, {1.0}), 1.0);
    CHECK(log_output_pdf(one, 0.0) == doctest::Approx(-0.9189385332).epsilon(1e-9));

    // {±2, 1/2 each}: at y=0 the two equal components sum to phi(2)
    const OutputMixture pair = output_mixture(make_input(2.0, {2.0}, {1.0}), 1.0);
    CHECK(log_output_pdf(pair, 0.0) == doctest::Approx(-2.9189385332).epsilon(1e-9));

    const OutputMixture mix = output_mixture(make_input(2.0, {0.0, 2.0}, {0.4, 0.6}), 1.3);
    for (double y : {0.1, 0.75, 2.0, 5.5})
        CHECK(log_output_pdf(mix, y) == doctest::Approx(log_output_pdf(mix, -y)).epsilon(1e-12));
}

TEST_CASE("mutual_information limits") {
    // a lone atom at zero carries no information
    CHECK(std::abs(mutual_information(make_input(1.0, {0.0}, {1.0}), 1.0)) < 1e-9);
    // the pair {+-a} collapses to a point mass as a -> 0
    CHECK(mutual_information(make_input(1e-3, {1e-3}, {1.0}), 1.0) < 1e-6);
}

TEST_CASE("mutual_information against the trapezoid oracle") {
    const SymmetricInput in = make_input(2.0, {2.0}, {1.0});
    const double oracle = oracles::trapezoid_mi(in, 1.0, -10.0, 10.0);
    // frozen reference from the oracle itself
    CHECK(oracle == doctest::Approx(0.632720193736847).epsilon(1e-9));
    CHECK(mutual_information(in, 1.0) == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(mutual_information(in, 1.0) <= std::log(2.0) + 1e-9);
}

TEST_CASE("secrecy_information") {
    const ChannelPair same(1.0, 1.0);
    const SymmetricInput in = make_input(2.0, {0.0, 2.0}, {0.4, 0.6});
    CHECK(std::abs(secrecy_information(in, same)) < 1e-9);
    CHECK(std::abs(secrecy_information(make_input(1.5, {1.5}, {1.0}), same)) < 1e-9);

    const ChannelPair ch(1.0, std::sqrt(10.0));
    const SymmetricInput pair = make_input(2.0, {2.0}, {1.0});
    const double oracle = oracles::trapezoid_mi(pair, 1.0, -10.0, 10.0) -
                          oracles::trapezoid_mi(pair, ch.sigma2, -2.0 - 9.0 * ch.sigma2,
                                                2.0 + 9.0 * ch.sigma2);
    CHECK(oracle == doctest::Approx(0.4651807074).epsilon(1e-8));
    CHECK(secrecy_information(pair, ch) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("xi closed forms") {
    const ChannelPair same(1.3, 1.3);
    const SymmetricInput in = make_input(2.0, {0.0, 2.0}, {0.4, 0.6});
    for (double x : {0.0, 0.5, 1.7})
        CHECK(std::abs(xi(x, in, same)) < 1e-9);

    // point mass at zero: Xi(x) = x^2/2 (1/s1^2 - 1/s2^2), a Gaussian KL closed form
    const ChannelPair ch(1.0, std::sqrt(10.0));
    const SymmetricInput point = make_input(2.0, {0.0}, {1.0});
    for (double x : {0.0, 1.0, 2.0}) {
        const double expected = 0.5 * x * x * (1.0 - 0.1);
        CHECK(xi(x, point, ch) == doctest::Approx(expected).epsilon(1e-8));
    }

    const SymmetricInput mix = make_input(1.5, {0.0, 0.8, 1.5}, {0.2, 0.3, 0.5});
    for (double x : {0.3, 1.0, 1.5})
        CHECK(xi(x, mix, ch) == doctest::Approx(xi(-x, mix, ch)).epsilon(1e-9));
}

TEST_CASE("gaussian_input_mi and input_variance") {
    CHECK(gaussian_input_mi(0.0, 2.0) == 0.0);
    CHECK(gaussian_input_mi(4.0, 2.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(gaussian_input_mi(3.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_input_mi(-1.0, 1.0), std::domain_error);

    CHECK(input_variance(make_input(2.0, {0.0}, {1.0})) == 0.0);
    CHECK(input_variance(make_input(3.0, {3.0}, {1.0})) == doctest::Approx(9.0));
    CHECK(input_variance(make_input(2.0, {0.0, 2.0}, {0.4, 0.6})) == doctest::Approx(2.4));
}

TEST_CASE("information inequalities on random inputs") {
    oracles::InputGenerator gen(42);
    const ChannelPair ch(1.0, 2.0);
    for (int i = 0; i < 15; ++i) {
        const SymmetricInput in = gen.next();
        const double mi1 = mutual_information(in, ch.sigma1);
        const double mi2 = mutual_information(in, ch.sigma2);
        CHECK(mi1 >= 0.0);
        CHECK(mi1 <= std::log(static_cast<double>(in.full_support_size())) + 1e-9);
        // degradedness: the noisier leg carries less information
        CHECK(mi1 >= mi2 - 1e-9);
    }
}

TEST_CASE("expectation of Xi equals the secrecy information") {
    oracles::InputGenerator gen(1234);
    const ChannelPair ch(1.0, std::sqrt(10.0));
    for (int i = 0; i < 10; ++i) {
        const SymmetricInput in = gen.next(5, 4.0);
        const XiEvaluator ev(in, ch);
        double expect = 0.0;
        for (std::size_t k = 0; k < in.half_size(); ++k)
            expect += in.half_weights[k] * ev.xi(in.half_points[k]);
        CHECK(expect == doctest::Approx(ev.secrecy_information()).epsilon(1e-7));
    }
}

TEST_CASE("SymmetricInput validation") {
    CHECK_NOTHROW(make_input(2.0, {0.0, 2.0}, {0.4, 0.6}).check());
    CHECK_THROWS(make_input(2.0, {2.0, 0.0}, {0.4, 0.6}).check());
    CHECK_THROWS(make_input(2.0, {0.0, 1.0}, {0.4, 0.6}).check());   // pin missing
    CHECK_THROWS(make_input(2.0, {0.0, 2.0}, {0.4, 0.5}).check());   // weights sum != 1
    CHECK(make_input(2.0, {0.0, 2.0}, {0.4, 0.6}).full_support_size() == 3);
    CHECK(make_input(2.0, {1.0, 2.0}, {0.4, 0.6}).full_support_size() == 4);
}
