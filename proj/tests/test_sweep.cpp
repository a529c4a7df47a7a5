#include <doctest.h>

#include <cmath>
#include <vector>

#include "spectra/scattering.hpp"
#include "spectra/sweep.hpp"

using namespace spectra;

TEST_CASE("ensemble: parallel run reproduces the serial reference") {
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
    EnsembleConfig cfg;
    cfg.horizon_n = 200;
    cfg.exec = Execution::serial;
    const auto a = random_ensemble(seeds, cfg);
    cfg.exec = Execution::parallel;
    const auto b = random_ensemble(seeds, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].seed == seeds[i]);
        CHECK(a[i].final_log_R2 == b[i].final_log_R2);
        CHECK(a[i].sup_log_R == b[i].sup_log_R);
        CHECK(a[i].sup_log_R >= 0.5 * a[i].final_log_R2 - 1e-12);
    }
}

TEST_CASE("embedded scan of the free potential is bounded everywhere") {
    const std::vector<double> ks{0.5, 1.0, 1.5};
    ScanConfig cfg;
    cfg.horizon = 1e3;
    cfg.window = {1e1, 1e3};
    const auto r = embedded_scan(Potential::zero(), ks, cfg);
    REQUIRE(r.rows.size() == 3);
    for (const auto& row : r.rows) {
        CHECK(row.label == Growth::bounded);
        CHECK(std::fabs(row.forward_slope) < 1e-10);
    }
    CHECK(r.decaying_momenta.empty());
    CHECK(r.decaying_energy_sum == 0.0);
}

TEST_CASE("Jost sweep: parallel equals serial bit for bit") {
    std::vector<double> ks;
    for (int i = 0; i < 16; ++i) ks.push_back(0.3 + 0.7 * i);
    const auto v = Potential::square_well(1.0, 0.0, 2.0);
    const auto s = jost_coefficients(v, ks, {}, Execution::serial);
    const auto p = jost_coefficients(v, ks, {}, Execution::parallel);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        CHECK(s.a[i] == p.a[i]);
        CHECK(s.b[i] == p.b[i]);
    }
}

TEST_CASE("exceptions from workers surface in index order") {
    std::vector<int> hit(8, 0);
    try {
        for_each_index(8, Execution::parallel, [&](std::size_t i) {
            hit[i] = 1;
            if (i == 3 || i == 6) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "3");
    }
}

TEST_CASE("batch Pearson check") {
    std::vector<TreePotential> trees;
    for (std::uint64_t s = 0; s < 4; ++s) trees.push_back(TreePotential::random(3, s));
    const auto r = verify_pearson_many(trees, {}, Execution::parallel);
    REQUIRE(r.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r[i].s_root == verify_pearson(trees[i]).s_root);
}
