#include <doctest.h>

#include <gsl/gsl_sf_expint.h>

#include <cmath>

#include "spectra/errors.hpp"
#include "spectra/wkb.hpp"

using namespace spectra;

TEST_CASE("WvN phase equals k x - 4 Si(2x) / k") {
    const auto v = Potential::wigner_von_neumann();
    for (double k : {0.5, 1.0, 2.0})
        for (double x : {0.3, 5.0, 37.2, 100.0}) {
            const double want = k * x - 4.0 * gsl_sf_Si(2.0 * x) / k;
            CHECK(wkb_phase(v, k, x) == doctest::Approx(want).epsilon(1e-12));
        }
    // k^2 t + 8 Si(4kt) / (2k) at k = 2, t = 25
    CHECK(modified_phase(v, 2.0, 25.0) == doctest::Approx(100.0 + 2.0 * gsl_sf_Si(200.0)).epsilon(1e-12));
}

TEST_CASE("power-law phase") {
    const auto v = Potential::power_law(1.0, 0.5);
    const double x = 50.0;
    const double integral = 2.0 * (std::sqrt(1.0 + x) - 1.0);
    CHECK(wkb_phase(v, 1.5, x) == doctest::Approx(1.5 * x - integral / 3.0).epsilon(1e-12));
}

TEST_CASE("free case residual vanishes") {
    const auto r = wkb_compare(Potential::zero(), 1.0, 1e3);
    for (double a : r.amplitude_residual) CHECK(a < 1e-12);
    for (double p : r.phase_residual) CHECK(std::fabs(p) < 1e-10);
}

TEST_CASE("power-law spread decreases, WvN at k = 1 is flagged") {
    const auto p = wkb_compare(Potential::power_law(1.0, 0.7), 1.0, 1e4);
    CHECK(p.decreasing);
    CHECK_FALSE(p.resonance_suspected);
    const auto w = wkb_compare(Potential::wigner_von_neumann(), 1.0, 1e4);
    CHECK(w.resonance_suspected);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(wkb_phase(Potential::zero(), 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(wkb_compare(Potential::zero(), 1.0, 50.0), ValidationError);
}
