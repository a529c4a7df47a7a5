#include "spectra/sweep.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "spectra/errors.hpp"

namespace spectra {

std::string_view to_string(Execution e) { return e == Execution::serial ? "serial" : "parallel"; }

void set_thread_count(int n) {
    if (n > 0) omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

ScanResult embedded_scan(const Potential& v, std::span<const double> k_grid, const ScanConfig& cfg) {
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (!(k_grid[i] > 0.0)) throw DomainError("embedded_scan: k must be positive");
        if (i > 0 && !(k_grid[i] > k_grid[i - 1])) throw ValidationError("embedded_scan: k grid must increase");
    }
    if (!(cfg.window.hi <= cfg.horizon)) throw ValidationError("embedded_scan: fit window beyond horizon");
    const double back = cfg.subordinate_horizon > 0.0 ? cfg.subordinate_horizon : 10.0 * cfg.horizon;
    if (!(back >= cfg.horizon)) throw ValidationError("embedded_scan: subordinate horizon below horizon");

    ScanResult out;
    out.rows.resize(k_grid.size());
    for_each_index(k_grid.size(), cfg.exec, [&](std::size_t i) {
        const double k = k_grid[i];
        const auto fwd = integrate_prufer(v, k, 0.0, cfg.theta0, 1.0, cfg.horizon, cfg.integrator);
        const auto sub = subordinate_prufer(v, k, cfg.window.lo, back, cfg.integrator);
        const auto cf = classify_solution(fwd, cfg.window);
        const auto cs = classify_solution(sub, cfg.window);
        ScanRow& r = out.rows[i];
        r.k = k;
        r.forward_slope = cf.slope;
        r.subordinate_slope = cs.slope;
        r.label = cs.label == Growth::decaying ? Growth::decaying : cf.label;
    });
    for (const auto& r : out.rows) {
        if (r.label != Growth::decaying) continue;
        out.decaying_momenta.push_back(r.k);
        out.decaying_energy_sum += r.k * r.k;
    }
    return out;
}

std::vector<EnsembleRow> random_ensemble(std::span<const std::uint64_t> seeds, const EnsembleConfig& cfg) {
    if (!(cfg.k > 0.0)) throw DomainError("random_ensemble: k must be positive");
    if (cfg.horizon_n < 1) throw ValidationError("random_ensemble: horizon_n must be >= 1");
    std::vector<EnsembleRow> rows(seeds.size());
    const double X = static_cast<double>(cfg.horizon_n);
    for_each_index(seeds.size(), cfg.exec, [&](std::size_t i) {
        const auto v = Potential::random_decay(cfg.alpha, seeds[i], cfg.bump, cfg.horizon_n);
        const auto tr = integrate_prufer(v, cfg.k, 0.0, cfg.theta0, 1.0, X, cfg.integrator);
        EnsembleRow& r = rows[i];
        r.seed = seeds[i];
        r.final_log_R2 = tr.log_R2.back();
        r.sup_log_R = 0.5 * *std::max_element(tr.log_R2.begin(), tr.log_R2.end());
    });
    return rows;
}

std::vector<EntropyReport> verify_pearson_many(std::span<const TreePotential> trees, const EntropyConfig& cfg,
                                               Execution exec) {
    std::vector<EntropyReport> out(trees.size());
    EntropyConfig inner = cfg;
    inner.exec = Execution::serial;
    for_each_index(trees.size(), exec, [&](std::size_t i) { out[i] = verify_pearson(trees[i], inner); });
    return out;
}

}  // namespace spectra
