#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles/paths.hpp"
#include "spectra/bethe.hpp"
#include "spectra/errors.hpp"

using namespace spectra;

TEST_CASE("free m-function solves 2 m^2 + z m + 1 = 0 in the upper half-plane") {
    for (auto z : {std::complex<double>(0.3, 0.1), std::complex<double>(-5.0, 1e-3), std::complex<double>(1.0, 4.0)}) {
        const auto m = m_free(z);
        CHECK(std::abs(2.0 * m * m + z * m + 1.0) < 1e-13);
        CHECK(m.imag() > 0.0);
    }
    CHECK(m_free({1.0, 0.0}).imag() == doctest::Approx(std::sqrt(7.0) / 4.0));
}

TEST_CASE("zero tree reproduces the free density") {
    const TreePotential t(3);
    for (double lambda : {0.0, 1.0, -1.0, 2.0, -2.0}) {
        const auto e = spectral_density_root(t, lambda);
        CHECK(e.value == doctest::Approx(free_density(lambda)).epsilon(1e-6));
        CHECK(green_root_boundary(t, lambda).imag() / std::numbers::pi ==
              doctest::Approx(free_density(lambda)).epsilon(1e-13));
    }
    CHECK(std::fabs(root_entropy(t).value) < 1e-12);
    CHECK(pearson_rhs(t) == 1.0);
}

TEST_CASE("tree fold equals brute-force path enumeration") {
    for (int R = 0; R <= 10; ++R) {
        const auto t = TreePotential::random(R, 100 + static_cast<std::uint64_t>(R), -2.0, 2.0);
        CHECK(pearson_rhs(t) == doctest::Approx(oracle::path_expectation(t)).epsilon(1e-13));
    }
}

TEST_CASE("labels, subtrees and swaps") {
    const auto t = TreePotential::from_labels(2, {{"", 1.0}, {"0", 2.0}, {"1", 3.0}, {"01", 4.0}, {"10", 5.0}});
    CHECK(t.at("01") == 4.0);
    CHECK(t.at(2, 1) == 4.0);
    CHECK(TreePotential::label(2, 2) == "10");
    CHECK(t.at("0101") == 0.0);
    const auto s = t.subtree(1, 0);
    CHECK(s.depth() == 1);
    CHECK(s.at("") == 2.0);
    CHECK(s.at("1") == 4.0);
    CHECK(t.subtree(3, 5).is_zero());
    const auto w = t.with_children_swapped(0, 0);
    CHECK(w.at("0") == 3.0);
    CHECK(w.at("00") == 5.0);
    CHECK(w.at("11") == 4.0);
    CHECK(t.weighted_square_mass() == doctest::Approx(1.0 + (4.0 + 9.0) / 2.0 + (16.0 + 25.0) / 4.0));
    CHECK_THROWS_AS(TreePotential::from_labels(1, {{"00", 1.0}}), ValidationError);
    CHECK_THROWS_AS(TreePotential::from_labels(2, {{"0x", 1.0}}), ValidationError);
}

TEST_CASE("entropy is invariant under child swaps and root-only value is exact") {
    const auto t = TreePotential::random(4, 9);
    const double s = root_entropy(t).value;
    CHECK(root_entropy(t.with_children_swapped(0, 0)).value == doctest::Approx(s).epsilon(1e-12));
    CHECK(root_entropy(t.with_children_swapped(1, 1)).value == doctest::Approx(s).epsilon(1e-12));
    const auto r = verify_pearson(TreePotential::from_labels(0, {{"", 0.5}}));
    CHECK(r.margin == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.s_root == doctest::Approx(-0.0625).epsilon(1e-9));
}

TEST_CASE("Pearson and step inequalities hold on random trees") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto t = TreePotential::random(static_cast<int>(seed % 5), seed, -1.5, 1.5);
        const auto r = verify_pearson(t);
        CHECK(r.margin >= -1e-9);
        CHECK(r.jensen_margin >= -1e-9);
        CHECK(r.jensen_bound <= std::log(r.rhs) + 1e-12);
        CHECK(step_inequality_check(t, 0, 0).margin >= -1e-9);
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(green_root(TreePotential(1), {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(green_root_boundary(TreePotential(1), 3.0), DomainError);
    CHECK_THROWS_AS(spectral_density_root(TreePotential(1), 0.0, {1e-3, 1e-2}), ValidationError);
    CHECK_THROWS_AS(TreePotential(25), ValidationError);
}
