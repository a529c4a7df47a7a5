#pragma once

// Potentials with prescribed embedded eigenvalues k_j^2, built from
// self-consistent Prufer phases:
//
//   V(x) = - sum_j  h(x) / (2^j (1 + x)) * chi(x > x_j) * sin 2 theta(x, k_j)
//
// where every theta(., k_j) solves the Prufer phase equation driven by this
// same V. The whole system is one nonlinear ODE integrated forward once.

#include <functional>
#include <numbers>
#include <vector>

#include "spectra/errors.hpp"
#include "spectra/ode.hpp"
#include "spectra/potential.hpp"
#include "spectra/prufer.hpp"

namespace spectra {

struct ConstructionConfig {
    std::function<double(double)> h;
    std::vector<double> momenta;            // k_1 < ... < k_J
    std::vector<double> anchors;            // x_1 <= ... <= x_J; empty selects automatically
    std::vector<double> anchor_candidates;  // auto policy; empty uses default_anchor_candidates()
    double horizon = 1e4;
    double cross_budget = 1.0;
    double theta0 = std::numbers::pi / 2.0;
    double grid_step = 0.0;  // 0: min(0.005, (2 pi / k_J) / 1250); V is tabulated on this grid
    ode::Tolerance tol{};
    bool enforce_growth_cap = false;  // h(x) <= (1 + x)^(1/4)
};

struct AnchorTrial {
    double candidate = 0.0;
    double max_cross = 0.0;  // sup over x of the cross integrals involving k_n
    bool accepted = false;
};

struct AnchorChoice {
    double anchor = 0.0;
    std::vector<AnchorTrial> trials;
};

struct ConstructionResult {
    Potential potential;             // tabulated
    std::vector<double> grid;        // shared by traces and targets
    std::vector<PruferTrace> traces; // one per momentum
    std::vector<double> anchors;
    std::vector<AnchorChoice> anchor_choices;  // filled under the auto policy
    /// cross_sup[n][j], j < n: sup_{x <= horizon} |int_{x_n}^x h/(1+y) sin 2theta_n sin 2theta_j dy|.
    std::vector<std::vector<double>> cross_sup;
    std::vector<std::vector<double>> decay_targets;
    double growth_cap_ratio = 0.0;  // max h(x) / (1 + x)^(1/4) on the validation sample
    double sum_energies = 0.0;      // sum_j k_j^2
    double theta0 = 0.0;
    double cross_budget = 1.0;
    bool within_budget = true;      // verified only up to the horizon
};

class AnchorSelectionError : public NumericalError {
public:
    AnchorSelectionError(const std::string& what, std::vector<AnchorTrial> trials)
        : NumericalError(what), trials_(std::move(trials)) {}
    const std::vector<AnchorTrial>& trials() const noexcept { return trials_; }

private:
    std::vector<AnchorTrial> trials_;
};

/// 0, then 1, 2, 5 times powers of ten below horizon / 2.
std::vector<double> default_anchor_candidates(double horizon);

/// Checks the config invariants; returns max h(x) / (1 + x)^(1/4).
double validate_construction(const ConstructionConfig& cfg);

ConstructionResult build_resonant_potential(const ConstructionConfig& cfg);

/// Chooses x_n (0-based n) given cfg.anchors[0..n-1]: the smallest candidate
/// for which a trial integration of momenta 0..n keeps every cross integral
/// pairing k_n with an earlier momentum within cfg.cross_budget.
AnchorChoice select_anchor(const ConstructionConfig& cfg, std::size_t n, const std::vector<double>& candidates);

struct DecayReport {
    double max_deviation = 0.0;   // max |log R^2 - target| over the grid
    double tail_R2_integral = 0.0;  // int R^2 over the final decade of the grid
    std::vector<double> decade_edges;
    std::vector<double> decade_max_deviation;  // per [edge_i, edge_{i+1}]
};

/// Asymptotic log R^2 for momentum j on the result grid:
///   -int_{x_j}^x h(y) / (2^(j+2) k_j (1 + y)) dy     (j 0-based).
/// The own resonant term of V contributes -h sin^2(2 theta) / (2^(j+1) k_j (1+x)),
/// and sin^2 averages to 1/2.
std::vector<double> decay_target(const ConstructionConfig& cfg, const std::vector<double>& anchors,
                                 std::size_t j, const std::vector<double>& grid);

DecayReport verify_decay(const ConstructionResult& result, std::size_t j);

}  // namespace spectra
