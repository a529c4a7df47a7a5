#pragma once

// Whole-line scattering for potentials supported in [0, L] (free for x < 0).
// The Jost solution f(x, k) = exp(ikx) for x >= L; for x <= 0 it is
// a(k) exp(ikx) + b(k) exp(-ikx).

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "spectra/execution.hpp"
#include "spectra/ode.hpp"
#include "spectra/potential.hpp"

namespace spectra {

struct JostConfig {
    ode::Tolerance tol{1e-12, 1e-14};
    double steps_per_period = 20.0;
};

struct ScatteringData {
    std::vector<double> k_grid;
    std::vector<std::complex<double>> a;
    std::vector<std::complex<double>> b;
    std::vector<std::complex<double>> jost_at_zero;
    std::vector<double> log_abs_a;  // computed from a - 1 without cancellation
};

struct JostPoint {
    std::complex<double> a;
    std::complex<double> b;
    double log_abs_a = 0.0;
};

/// Single momentum. Integrates f = alpha e^{ikx} + beta e^{-ikx} backward
/// from L through the variation-of-constants system
///   alpha' =  V f e^{-ikx} / (2ik),   beta' = -V f e^{ikx} / (2ik).
JostPoint jost_point(const Potential& v, double k, const JostConfig& cfg = {});

/// Throws ValidationError for non-compact support or k <= 0.
ScatteringData jost_coefficients(const Potential& v, std::span<const double> k_grid, const JostConfig& cfg = {},
                                 Execution exec = Execution::parallel);

struct BoundStates {
    std::vector<double> energies;  // increasing, all < 0
    std::vector<std::string> warnings;
    std::size_t expected_count = 0;  // from the phase count just below E = 0
};

struct BoundStateConfig {
    int grid_points = 400;
    double energy_tol = 1e-10;
    ode::Tolerance tol{1e-12, 1e-14};
};

/// Negative eigenvalues of -d^2/dx^2 + V on the line. The decaying solution
/// from the left is followed in the phase psi (u = rho sin psi, u' = rho cos psi);
/// eigenvalues are where the matching phase crosses a multiple of pi,
/// bracketed on an energy grid over (-sup|V|, 0) and bisected.
BoundStates bound_states(const Potential& v, const BoundStateConfig& cfg = {});

/// Matching phase G(E) = psi(L) + atan(1/kappa) for E = -kappa^2 < 0.
/// floor(G / pi) counts eigenvalues below E.
double matching_phase(const Potential& v, double energy, const ode::Tolerance& tol = {1e-12, 1e-14});

struct SumRuleConfig {
    double k_min = 1e-3;
    double k_max = 0.0;  // 0: 40 (1 + sqrt(sup|V|))
    int nodes_per_panel = 16;
    double panel_width = 0.0;  // 0: min(0.5, 1 / L)
    JostConfig jost{};
    BoundStateConfig bound{};
    Execution exec = Execution::parallel;
};

struct SumRuleReport {
    double lhs_integral = 0.0;  // int_{k_min < |k| < k_max} log|a| k^2 dk
    double tail_estimate = 0.0; // |k| > k_max from a C/k^2 fit of the integrand
    double low_k_estimate = 0.0;  // |k| < k_min, power-fit estimate, not added
    double eigenvalue_sum = 0.0;  // (2 pi / 3) sum |E_j|^{3/2}
    double rhs = 0.0;             // (pi / 8) int V^2
    double residual = 0.0;        // lhs + tail + eigenvalue term - rhs
    double error_bar = 0.0;
    double k_min = 0.0;
    double k_max = 0.0;
    std::size_t k_evaluations = 0;
    BoundStates bound;
};

/// Throws NumericalError when the tail exceeds 10% of the right-hand side.
SumRuleReport sum_rule_residual(const Potential& v, const SumRuleConfig& cfg = {});

/// (pi / 8) int V^2 by adaptive quadrature over the support.
double sum_rule_rhs(const Potential& v);

}  // namespace spectra
