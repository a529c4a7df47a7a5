#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spectra/quadrature.hpp"

using namespace spectra;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    for (std::size_t n : {2u, 5u, 16u}) {
        const auto r = quad::gauss_legendre(n);
        const int deg = static_cast<int>(2 * n - 1);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], deg - 1);
        // even power deg - 1: exact value 2 / deg
        CHECK(s == doctest::Approx(2.0 / deg).epsilon(1e-13));
    }
}

TEST_CASE("Chebyshev-U rule is a probability rule for the semicircle") {
    const auto r = quad::chebyshev_u_probability(128);
    double w = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        w += r.weights[i];
        m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
    }
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
    // second moment of (2/pi) sqrt(1-t^2) is 1/4
    CHECK(m2 == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("adaptive Gauss-Kronrod with a kink on a break") {
    auto f = [](double x) { return std::fabs(x - 0.3); };
    const double br[] = {0.3};
    const auto r = quad::integrate(f, 0.0, 1.0, 1e-14, 1e-13, br);
    CHECK(r.value == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-13));
    const auto s = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-13));
}
