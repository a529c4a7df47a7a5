#pragma once

// Independent-job kernels. Each takes an Execution; serial and parallel
// runs give identical results because every job writes its own slot.

#include <cstdint>
#include <span>
#include <vector>

#include "spectra/bethe.hpp"
#include "spectra/execution.hpp"
#include "spectra/potential.hpp"
#include "spectra/prufer.hpp"

namespace spectra {

struct ScanConfig {
    double horizon = 1e4;
    FitWindow window{1e2, 1e4};
    /// Backward start for the subordinate solution; 0 uses 10 * horizon.
    double subordinate_horizon = 0.0;
    double theta0 = 1.5707963267948966;
    IntegratorConfig integrator{};
    Execution exec = Execution::parallel;
};

struct ScanRow {
    double k = 0.0;
    double forward_slope = 0.0;      // solution started at 0 with phase theta0
    double subordinate_slope = 0.0;  // solution selected by backward integration
    Growth label = Growth::bounded;  // decaying from the subordinate slope, else from the forward one
};

struct ScanResult {
    std::vector<ScanRow> rows;  // in k order
    std::vector<double> decaying_momenta;
    double decaying_energy_sum = 0.0;  // sum of k^2 over decaying rows
};

ScanResult embedded_scan(const Potential& v, std::span<const double> k_grid, const ScanConfig& cfg = {});

struct EnsembleRow {
    std::uint64_t seed = 0;
    double final_log_R2 = 0.0;  // log R^2 at the horizon
    double sup_log_R = 0.0;     // sup over [0, horizon] of log R
};

struct EnsembleConfig {
    double alpha = 1.0;
    double k = 1.0;
    int horizon_n = 10000;
    BumpProfile bump{1.0, 3.0};
    double theta0 = 1.5707963267948966;
    IntegratorConfig integrator{};
    Execution exec = Execution::parallel;
};

/// Forward Prufer runs on random_decay potentials, one per seed.
std::vector<EnsembleRow> random_ensemble(std::span<const std::uint64_t> seeds, const EnsembleConfig& cfg);

std::vector<EntropyReport> verify_pearson_many(std::span<const TreePotential> trees, const EntropyConfig& cfg,
                                               Execution exec = Execution::parallel);

}  // namespace spectra
