#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "wiretap/numerics.hpp"

using namespace wiretap;

TEST_CASE("log_gaussian_pdf closed forms") {
    CHECK(log_gaussian_pdf(0.0, 0.0, 1.0) == doctest::Approx(-0.9189385332046727).epsilon(1e-12));
    CHECK(log_gaussian_pdf(1.0, 0.0, 1.0) == doctest::Approx(-1.4189385332046727).epsilon(1e-12));
    for (double m : {-3.0, 0.0, 7.5})
        for (double s : {0.2, 1.0, 4.0})
            CHECK(log_gaussian_pdf(m, m, s) ==
                  doctest::Approx(-0.5 * std::log(2.0 * M_PI * s * s)).epsilon(1e-12));
    CHECK_THROWS_AS(log_gaussian_pdf(0.0, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(log_gaussian_pdf(0.0, 0.0, -1.0), std::domain_error);
}

TEST_CASE("log_sum_exp basics") {
    const std::vector<std::pair<double, double>> single{{std::log(1.0), -3.25}};
    CHECK(log_sum_exp(std::span<const std::pair<double, double>>(single)) ==
          doctest::Approx(-3.25).epsilon(1e-15));

    const std::vector<std::pair<double, double>> equal{{std::log(0.5), 1.7}, {std::log(0.5), 1.7}};
    CHECK(log_sum_exp(std::span<const std::pair<double, double>>(equal)) ==
          doctest::Approx(1.7).epsilon(1e-15));

    // 1/2 * 1 + 1/2 * 3 = 2
    const std::vector<std::pair<double, double>> mix{{std::log(0.5), 0.0},
                                                     {std::log(0.5), std::log(3.0)}};
    CHECK(log_sum_exp(std::span<const std::pair<double, double>>(mix)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));

    const std::vector<double> empty;
    CHECK_THROWS_AS(log_sum_exp(std::span<const double>(empty)), std::domain_error);
}

TEST_CASE("log_sum_exp handles extreme magnitudes and permutations") {
    std::vector<double> terms{700.0, 699.0, -700.0};
    const double big = log_sum_exp(std::span<const double>(terms));
    CHECK(std::isfinite(big));
    CHECK(big == doctest::Approx(700.0 + std::log1p(std::exp(-1.0))).epsilon(1e-13));

    std::mt19937 rng(7);
    std::vector<double> v{-3.0, 0.5, 2.0, -11.0, 4.25};
    const double ref = log_sum_exp(std::span<const double>(v));
    for (int i = 0; i < 20; ++i) {
        std::shuffle(v.begin(), v.end(), rng);
        CHECK(log_sum_exp(std::span<const double>(v)) == doctest::Approx(ref).epsilon(1e-14));
    }
}

TEST_CASE("build_rule structure") {
    const QuadratureRule r = build_rule(-1.0, 1.0, 4, 6);
    CHECK(r.nodes.size() == 24);
    double wsum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        CHECK(r.weights[i] > 0.0);
        CHECK(r.nodes[i] >= -1.0);
        CHECK(r.nodes[i] <= 1.0);
        if (i > 0)
            CHECK(r.nodes[i] > r.nodes[i - 1]);
        wsum += r.weights[i];
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(build_rule(1.0, 1.0, 4, 6), std::domain_error);
    CHECK_THROWS_AS(build_rule(2.0, 1.0, 4, 6), std::domain_error);
}

TEST_CASE("quadrature against closed forms") {
    const QuadratureRule unit = build_rule(-1.0, 1.0, 8, 6);
    CHECK(integrate(unit, [](double) { return 1.0; }) == doctest::Approx(2.0).epsilon(1e-12));

    // standard normal mass over [-8, 8]; erf closed form is 1 - 1.2e-15
    const QuadratureRule r8 = build_rule(-8.0, 8.0, 32, 8);
    const double mass =
        integrate(r8, [](double y) { return std::exp(log_gaussian_pdf(y, 0.0, 1.0)); });
    CHECK(mass == doctest::Approx(std::erf(8.0 / std::sqrt(2.0))).epsilon(1e-10));
    CHECK(std::abs(mass - 1.0) < 1e-10);

    // second moment of the standard normal
    const QuadratureRule r10 = build_rule(-10.0, 10.0, 40, 10);
    CHECK(integrate(r10, [](double y) { return y * y * std::exp(log_gaussian_pdf(y, 0.0, 1.0)); }) ==
          doctest::Approx(1.0).epsilon(1e-9));

    const QuadratureRule rpi = build_rule(0.0, M_PI, 16, 8);
    CHECK(integrate(rpi, [](double y) { return std::sin(y); }) == doctest::Approx(2.0).epsilon(1e-8));

    const QuadratureRule r02 = build_rule(0.0, 2.0, 4, 4);
    CHECK(integrate(r02, [](double) { return 0.0; }) == 0.0);
    CHECK(integrate(r02, [](double) { return 1.0; }) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("gaussian mass on solver-style domains") {
    // mean anywhere in [-A, A], domain padded by 8 sigma
    for (double a : {0.5, 2.0, 6.0})
        for (double s : {0.7, 1.0, 3.2}) {
            const QuadratureRule r = build_rule(-a - 8.0 * s, a + 8.0 * s, 64, 10);
            for (double mean : {-a, 0.0, a}) {
                const double mass =
                    integrate(r, [&](double y) { return std::exp(log_gaussian_pdf(y, mean, s)); });
                CHECK(std::abs(mass - 1.0) < 1e-9);
            }
        }
}

TEST_CASE("integrate is linear") {
    const QuadratureRule r = build_rule(-3.0, 5.0, 16, 8);
    auto f = [](double y) { return std::sin(y) + 0.3 * y; };
    auto g = [](double y) { return std::exp(-y * y); };
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> cd(-4.0, 4.0);
    for (int i = 0; i < 25; ++i) {
        const double a = cd(rng), b = cd(rng);
        const double lhs = integrate(r, [&](double y) { return a * f(y) + b * g(y); });
        const double rhs = a * integrate(r, f) + b * integrate(r, g);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("integrate rejects non-finite integrands") {
    const QuadratureRule r = build_rule(0.0, 1.0, 2, 4);
    CHECK_THROWS_AS(integrate(r, [](double y) { return std::log(y - 0.5); }), std::runtime_error);
}
