#include <doctest.h>

#include <cmath>
#include <limits>

#include "spectra/construct.hpp"
#include "spectra/errors.hpp"
#include "spectra/prufer.hpp"

using namespace spectra;

namespace {

ConstructionConfig constant_h(double c, std::vector<double> momenta, double horizon) {
    ConstructionConfig cfg;
    cfg.h = [c](double) { return c; };
    cfg.momenta = std::move(momenta);
    cfg.anchors.assign(cfg.momenta.size(), 0.0);
    cfg.horizon = horizon;
    return cfg;
}

// Least-squares slope of log R^2 against log(1 + x) on [lo, hi].
double rate(const ConstructionResult& r, double lo, double hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t i = 0; i < r.grid.size(); i += 50) {
        if (r.grid[i] < lo || r.grid[i] > hi) continue;
        const double x = std::log1p(r.grid[i]), y = r.traces[0].log_R2[i];
        sx += x, sy += y, sxx += x * x, sxy += x * y, n += 1;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("single momentum with constant h decays at rate -c/4") {
    for (double c : {0.5, 1.0}) {
        const auto r = build_resonant_potential(constant_h(c, {1.0}, 1e3));
        CHECK(rate(r, 10.0, 1e3) == doctest::Approx(-c / 4.0).epsilon(0.05));
    }
}

TEST_CASE("envelope |V| (1 + x) <= h on the grid") {
    ConstructionConfig cfg = constant_h(0.0, {1.0}, 300.0);
    cfg.h = [](double x) { return std::log(2.0 + x); };
    const auto r = build_resonant_potential(cfg);
    for (std::size_t i = 0; i < r.grid.size(); i += 7) {
        const double x = r.grid[i];
        CHECK(std::fabs(r.potential.eval(x)) * (1.0 + x) <= cfg.h(x) * (1.0 + 1e-12));
    }
}

TEST_CASE("the recorded phase drives the tabulated potential consistently") {
    const auto r = build_resonant_potential(constant_h(1.0, {1.0}, 200.0));
    // Independent run of the linear equation with the tabulated V.
    const auto p = integrate_prufer(r.potential, 1.0, 0.0, r.theta0, 1.0, 200.0);
    for (double x : {10.0, 50.0, 150.0, 199.0}) {
        const double a = interpolate(p.grid, p.log_R2, x);
        const double b = interpolate(r.grid, r.traces[0].log_R2, x);
        CHECK(a == doctest::Approx(b).epsilon(1e-3));
    }
}

TEST_CASE("direct eigenfunction integration agrees with the trace amplitude") {
    const auto r = build_resonant_potential(constant_h(1.0, {1.0}, 100.0));
    const double th = r.theta0;
    IntegratorConfig ic;
    ic.tol = {1e-11, 1e-13};
    const auto d = integrate_eigenfunction(r.potential, 1.0, 0.0, std::sin(th), std::cos(th), 100.0, ic);
    const double u = d.u.back(), up = d.u_prime.back();
    CHECK(std::log(u * u + up * up) == doctest::Approx(r.traces[0].log_R2.back()).epsilon(1e-4));
}

TEST_CASE("h = 0 gives the zero potential and constant amplitude") {
    const auto r = build_resonant_potential(constant_h(0.0, {1.0, 2.0}, 50.0));
    for (std::size_t i = 0; i < r.grid.size(); i += 100) CHECK(r.potential.eval(r.grid[i]) == 0.0);
    for (const auto& t : r.traces)
        for (double y : t.log_R2) CHECK(std::fabs(y) < 1e-12);
}

TEST_CASE("close momenta resonate more than distant ones") {
    const auto close = build_resonant_potential(constant_h(0.5, {1.0, 1.01}, 300.0));
    const auto far = build_resonant_potential(constant_h(0.5, {1.0, 2.0}, 300.0));
    CHECK(close.cross_sup[1][0] > 3.0 * far.cross_sup[1][0]);
}

TEST_CASE("infinite budget accepts the first anchor candidate") {
    auto cfg = constant_h(0.5, {1.0, 1.01}, 100.0);
    cfg.anchors.clear();
    cfg.cross_budget = std::numeric_limits<double>::infinity();
    const auto r = build_resonant_potential(cfg);
    REQUIRE(r.anchors.size() == 2);
    CHECK(r.anchors[0] == 0.0);
    CHECK(r.anchors[1] == 0.0);
    CHECK(r.anchor_choices[1].trials.size() == 1);
}

TEST_CASE("unreachable budget raises with the trial record") {
    auto cfg = constant_h(0.5, {1.0, 1.01}, 100.0);
    cfg.anchors.clear();
    cfg.cross_budget = 1e-9;
    cfg.anchor_candidates = {0.0, 10.0};
    try {
        build_resonant_potential(cfg);
        FAIL("expected AnchorSelectionError");
    } catch (const AnchorSelectionError& e) {
        CHECK(e.trials().size() == 2);
        CHECK_FALSE(e.trials()[1].accepted);
    }
}

TEST_CASE("config validation") {
    auto cfg = constant_h(1.0, {2.0, 1.0}, 10.0);
    CHECK_THROWS_AS(validate_construction(cfg), ValidationError);
    cfg = constant_h(1.0, {1.0}, 10.0);
    cfg.h = [](double x) { return 2.0 - x; };
    CHECK_THROWS_AS(validate_construction(cfg), ValidationError);
    cfg = constant_h(1.0, {1.0}, 1e3);
    cfg.h = [](double x) { return std::sqrt(1.0 + x); };
    CHECK(validate_construction(cfg) > 1.0);
    cfg.enforce_growth_cap = true;
    CHECK_THROWS_AS(validate_construction(cfg), ValidationError);
    CHECK(default_anchor_candidates(1e3).front() == 0.0);
}
