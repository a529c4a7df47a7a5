#include <doctest.h>

#include <cmath>
#include <vector>

#include "spectra/ode.hpp"

using namespace spectra;

namespace {

double harmonic_error(double max_step, double tol) {
    ode::Options opt;
    opt.tol = {tol, tol * 1e-2};
    opt.max_step = max_step;
    opt.initial_step = max_step;
    double y[2] = {0.0, 1.0};
    auto f = [](double, std::span<const double> s, std::span<double> d) {
        d[0] = s[1];
        d[1] = -s[0];
    };
    ode::integrate(f, 0.0, 10.0, y, {}, opt);
    return std::hypot(y[0] - std::sin(10.0), y[1] - std::cos(10.0));
}

}  // namespace

TEST_CASE("harmonic oscillator reaches its closed form") {
    CHECK(harmonic_error(0.5, 1e-12) < 1e-10);
}

TEST_CASE("eighth order: error ratio under step halving with loose control") {
    // Tolerance so loose the step is pinned by max_step.
    const double e1 = harmonic_error(0.8, 1.0), e2 = harmonic_error(0.4, 1.0);
    const double order = std::log2(e1 / e2);
    CHECK(order > 7.5);
    CHECK(order < 8.5);
}

TEST_CASE("landing points are visited exactly and flagged") {
    std::vector<double> stops{0.3, 1.7, 2.25};
    std::vector<double> seen;
    double y[1] = {1.0};
    auto f = [](double, std::span<const double> s, std::span<double> d) { d[0] = -s[0]; };
    ode::integrate(f, 0.0, 3.0, y, stops, {}, [&](double x, std::span<const double>, bool at_stop) {
        if (at_stop) seen.push_back(x);
    });
    REQUIRE(seen.size() == 5);
    CHECK(seen[0] == 0.0);
    CHECK(seen[1] == 0.3);
    CHECK(seen[2] == 1.7);
    CHECK(seen[3] == 2.25);
    CHECK(seen[4] == 3.0);
    CHECK(y[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-10));
}

TEST_CASE("backward integration") {
    double y[1] = {std::exp(-2.0)};
    auto f = [](double, std::span<const double> s, std::span<double> d) { d[0] = -s[0]; };
    ode::integrate(f, 2.0, 0.0, y, std::vector<double>{1.0}, {});
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("jump in the right-hand side is sampled on the correct side") {
    // y' = 1 on [0, 1), 0 afterwards: y(2) = 1 exactly when the jump is a stop.
    double y[1] = {0.0};
    auto f = [](double x, std::span<const double>, std::span<double> d) { d[0] = x < 1.0 ? 1.0 : 0.0; };
    ode::integrate(f, 0.0, 2.0, y, std::vector<double>{1.0}, {});
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("unreachable tolerance raises an integration error with location") {
    // Finite-time blow-up at x = 1.
    double y[1] = {1.0};
    auto f = [](double, std::span<const double> s, std::span<double> d) { d[0] = s[0] * s[0]; };
    try {
        ode::integrate(f, 0.0, 2.0, y, {}, {});
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.location() == doctest::Approx(1.0).epsilon(1e-3));
    }
}
