#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles/square_well.hpp"
#include "spectra/errors.hpp"
#include "spectra/scattering.hpp"

using namespace spectra;

TEST_CASE("free potential: a = 1, b = 0") {
    const std::vector<double> ks{0.1, 1.0, 7.0};
    const auto d = jost_coefficients(Potential::zero(), ks);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        CHECK(std::abs(d.a[i] - 1.0) < 1e-14);
        CHECK(std::abs(d.b[i]) < 1e-14);
    }
}

TEST_CASE("square well against the transfer-matrix closed form") {
    const double depth = 1.0, left = 0.5, right = 2.5;
    const auto v = Potential::square_well(depth, left, right);
    std::vector<double> ks;
    for (int i = 0; i < 40; ++i) ks.push_back(0.2 + 0.5 * i);
    const auto d = jost_coefficients(v, ks, {}, Execution::serial);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto o = oracle::square_well_ab(depth, left, right, ks[i]);
        CHECK(std::abs(d.a[i] - o.a) < 1e-10);
        CHECK(std::abs(d.b[i] - o.b) < 1e-10);
        CHECK(d.log_abs_a[i] == doctest::Approx(std::log(std::abs(o.a))).epsilon(1e-9));
        CHECK(std::fabs(std::norm(d.a[i]) - std::norm(d.b[i]) - 1.0) < 1e-10);
    }
}

TEST_CASE("a barrier is handled with an evanescent interior") {
    const auto v = Potential::square_well(-4.0, 0.0, 1.0);
    const auto o = oracle::square_well_ab(-4.0, 0.0, 1.0, 1.0);
    const auto p = jost_point(v, 1.0);
    CHECK(std::abs(p.a - o.a) < 1e-10);
    CHECK(std::abs(p.b - o.b) < 1e-10);
}

TEST_CASE("bound states match the transcendental equations") {
    for (auto [V0, L] : {std::pair{0.5, 1.0}, std::pair{1.0, 2.0}, std::pair{20.0, 2.0}}) {
        const auto want = oracle::square_well_eigenvalues(V0, L);
        const auto got = bound_states(Potential::square_well(V0, 0.0, L));
        REQUIRE(got.energies.size() == want.size());
        CHECK(got.expected_count == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) CHECK(got.energies[i] == doctest::Approx(want[i]).epsilon(1e-8));
    }
    CHECK(bound_states(Potential::square_well(-1.0, 0.0, 1.0)).energies.empty());
}

TEST_CASE("matching phase counts eigenvalues") {
    const auto v = Potential::square_well(20.0, 0.0, 2.0);
    const auto e = oracle::square_well_eigenvalues(20.0, 2.0);
    const double pi = 3.141592653589793;
    CHECK(std::floor(matching_phase(v, -1e-6) / pi) == static_cast<double>(e.size()));
    CHECK(std::floor(matching_phase(v, 0.5 * (e[0] + e[1])) / pi) == 1.0);
    CHECK_THROWS_AS(matching_phase(v, 0.1), DomainError);
}

TEST_CASE("sum rule on a shallow well") {
    const auto v = Potential::square_well(0.5, 0.0, 1.0);
    CHECK(sum_rule_rhs(v) == doctest::Approx(3.141592653589793 / 8.0 * 0.25).epsilon(1e-13));
    SumRuleConfig cfg;
    cfg.exec = Execution::serial;
    const auto r = sum_rule_residual(v, cfg);
    CHECK(std::fabs(r.residual) / r.rhs < 1e-3);
    CHECK(std::fabs(r.tail_estimate) < 0.1 * r.rhs);
    CHECK(r.error_bar > 0.0);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(jost_point(Potential::wigner_von_neumann(), 1.0), ValidationError);
    CHECK_THROWS_AS(jost_point(Potential::square_well(1.0, 0.0, 1.0), 0.0), DomainError);
    const std::vector<double> bad{2.0, 1.0};
    CHECK_THROWS_AS(jost_coefficients(Potential::square_well(1.0, 0.0, 1.0), bad), ValidationError);
}
