#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wiretap/kkt.hpp"
#include "wiretap/optimizer.hpp"
#include "wiretap/solver.hpp"

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

TEST_CASE("default_grid_step") {
    const ChannelPair ch(1.0, 2.0);
    CHECK(default_grid_step(ch, 2.0) == doctest::Approx(1.0 / 50).epsilon(1e-12));
    CHECK(default_grid_step(ch, 0.5) == doctest::Approx(0.5 / 50).epsilon(1e-12));
    // capped so the grid never exceeds 5e4 points
    CHECK(default_grid_step(ChannelPair(1e-6, 2.0), 3.0) == doctest::Approx(3.0 / 5e4));
}

TEST_CASE("xi_profile closed forms") {
    SUBCASE("identical channels give an identically zero profile") {
        const ChannelPair same(1.3, 1.3);
        const SymmetricInput in = make_input(2.0, {0.0, 1.0, 2.0}, {0.2, 0.3, 0.5});
        for (const auto& [x, v] : xi_profile(in, same, 0.1))
            CHECK(std::abs(v) < 1e-9);
    }
    SUBCASE("point mass at zero") {
        // With P_X = delta_0, Xi(x) = x^2/2 (1/s1^2 - 1/s2^2).
        const ChannelPair ch(1.0, std::sqrt(10.0));
        const SymmetricInput delta = make_input(2.0, {0.0}, {1.0});
        const double c = 0.5 * (1.0 - 0.1);
        for (const auto& [x, v] : xi_profile(delta, ch, 0.25))
            CHECK(std::abs(v - c * x * x) < 1e-8);
    }
    SUBCASE("support points appear as grid abscissae") {
        const ChannelPair ch(1.0, std::sqrt(1.5));
        const SymmetricInput in = make_input(1.0, {0.37, 1.0}, {0.5, 0.5});
        const auto prof = xi_profile(in, ch, 0.2);
        bool found = false;
        for (const auto& [x, v] : prof)
            if (x == 0.37)
                found = true;
        CHECK(found);
        for (std::size_t i = 1; i < prof.size(); ++i)
            CHECK(prof[i].first > prof[i - 1].first);
        CHECK(prof.front().first == 0.0);
        CHECK(prof.back().first == 1.0);
    }
    SUBCASE("rejects non-positive step") {
        const ChannelPair ch(1.0, 2.0);
        const SymmetricInput in = make_input(1.0, {1.0}, {1.0});
        CHECK_THROWS_AS(xi_profile(in, ch, 0.0), std::domain_error);
    }
}

TEST_CASE("validate accepts a converged small-amplitude optimum") {
    const ChannelPair ch(1.0, std::sqrt(10.0));
    const double amplitude = 0.8;
    // optimize {+-A} by BA-only; at small A the two-point distribution is optimal
    SymmetricInput in = make_input(amplitude, {amplitude}, {1.0});
    in = run_ba(in, ch, 50);
    const KktReport rep = validate(in, ch, 1e-4, default_grid_step(ch, amplitude));
    CHECK(rep.valid);
    CHECK_FALSE(rep.condition_a_fired(1e-4));
    CHECK_FALSE(rep.condition_b_fired());
    CHECK(rep.capacity_proxy > 0.0);
    // Xi(A) should agree with the secrecy information at the optimum
    const double si = secrecy_information(in, ch);
    CHECK(std::abs(rep.capacity_proxy - si) < 1e-4);
}

TEST_CASE("validate rejects a pinned point mass at large amplitude") {
    const ChannelPair ch(1.0, std::sqrt(10.0));
    const SymmetricInput in = make_input(5.0, {5.0}, {1.0});
    const KktReport rep = validate(in, ch, 1e-4, default_grid_step(ch, 5.0));
    CHECK_FALSE(rep.valid);
    CHECK(rep.condition_a_fired(1e-4));
    // for {+-5} the profile peaks in the interior, near the origin
    CHECK(rep.candidate_x < 2.5);
    CHECK(rep.max_profile_violation > 1e-4);
    // refined candidate beats every grid point
    const XiEvaluator ev(in, ch);
    double grid_max = -1e300;
    for (const auto& [x, v] : rep.profile)
        grid_max = std::max(grid_max, v);
    CHECK(ev.xi(rep.candidate_x) >= grid_max - 1e-12);
}

TEST_CASE("validate with a huge tolerance always passes") {
    const ChannelPair ch(1.0, std::sqrt(1.5));
    const SymmetricInput in = make_input(3.0, {0.0, 1.0, 3.0}, {0.5, 0.3, 0.2});
    const KktReport rep = validate(in, ch, 1e6, default_grid_step(ch, 3.0));
    CHECK(rep.valid);
}

TEST_CASE("condition (b) fires independently of (a)") {
    const ChannelPair ch(1.0, std::sqrt(10.0));
    // start from a BA-converged two-point optimum, then append a tiny-weight
    // interior point whose Xi sits below the strip: (b) fires, (a) need not
    const double amplitude = 0.8;
    SymmetricInput base = make_input(amplitude, {amplitude}, {1.0});
    base = run_ba(base, ch, 50);
    SymmetricInput spiked = base;
    spiked.half_points = {0.0, amplitude};
    spiked.half_weights = {1e-9, 1.0 - 1e-9};
    const KktReport rep = validate(spiked, ch, 1e-4, default_grid_step(ch, amplitude));
    const XiEvaluator ev(spiked, ch);
    const double dev0 = ev.xi(0.0) - ev.xi(amplitude);
    REQUIRE(std::abs(dev0) > 1e-4);  // the interior point really violates the strip
    CHECK(rep.condition_b_fired());
    CHECK_FALSE(rep.valid);
    REQUIRE(rep.support_violations.size() == 1);
    CHECK(rep.support_violations[0].first == 0.0);
    CHECK(rep.support_violations[0].second == doctest::Approx(dev0).epsilon(1e-10));
}

TEST_CASE("violating_set matches the report and excludes the pin") {
    const ChannelPair ch(1.0, std::sqrt(10.0));
    const SymmetricInput in = make_input(5.0, {0.0, 2.5, 5.0}, {0.2, 0.3, 0.5});
    const double step = default_grid_step(ch, 5.0);
    const KktReport rep = validate(in, ch, 1e-4, step);
    const std::vector<double> s = violating_set(in, ch, 1e-4);
    REQUIRE(s.size() == rep.support_violations.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i] == rep.support_violations[i].first);
        CHECK(s[i] != 5.0);
    }
    CHECK_THROWS_AS(violating_set(in, ch, 0.0), std::domain_error);
    CHECK_THROWS_AS(validate(in, ch, -1.0, step), std::domain_error);
    CHECK_THROWS_AS(validate(in, ch, 1e-4, 0.0), std::domain_error);
}

TEST_CASE("capacity proxy equals the profile value at the amplitude") {
    const ChannelPair ch(1.0, std::sqrt(1.5));
    oracles::InputGenerator gen(4242);
    for (int i = 0; i < 5; ++i) {
        const SymmetricInput in = gen.next(4, 3.0);
        const KktReport rep = validate(in, ch, 1e-4, default_grid_step(ch, in.amplitude));
        CHECK(rep.profile.back().first == in.amplitude);
        CHECK(rep.capacity_proxy == doctest::Approx(rep.profile.back().second).epsilon(1e-12));
    }
}
