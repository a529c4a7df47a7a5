#pragma once

#include <string_view>
#include <vector>

#include "spectra/ode.hpp"
#include "spectra/potential.hpp"

namespace spectra {

struct IntegratorConfig {
    ode::Tolerance tol{};
    /// Maximum step is (2*pi / k) / steps_per_period.
    double steps_per_period = 20.0;
    /// Step cap used when the energy gives no oscillation scale (E <= 0).
    double max_step_cap = 1.0;
    /// When non-empty, traces are recorded exactly on these abscissae
    /// (plus the endpoints) instead of at every accepted step.
    std::vector<double> output_grid;
};

/// Solution of -u'' + V u = E u sampled on an increasing grid.
struct SolutionTrace {
    double energy = 0.0;
    std::vector<double> grid;
    std::vector<double> u;
    std::vector<double> u_prime;
    ode::Tolerance tol{};
    ode::Stats stats{};
};

/// Modified Prufer variables u = R sin(theta), u' = k R cos(theta).
/// theta is the continuous lift, never reduced.
struct PruferTrace {
    double k = 0.0;
    std::vector<double> grid;
    std::vector<double> theta;
    std::vector<double> log_R2;
    ode::Tolerance tol{};
    ode::Stats stats{};
};

/// Integrates the eigenfunction equation from x0 to X (X > x0).
SolutionTrace integrate_eigenfunction(const Potential& v, double energy, double x0, double u0, double u0p,
                                      double X, const IntegratorConfig& cfg = {});

/// Integrates the Prufer system
///   (log R^2)' = V sin(2 theta) / k,   theta' = k - V sin^2(theta) / k
/// from x0 to X. X < x0 integrates backward; the returned grid is always
/// increasing.
PruferTrace integrate_prufer(const Potential& v, double k, double x0, double theta0, double R0, double X,
                             const IntegratorConfig& cfg = {});

/// Solution that is subordinate (smallest) at large x: integrated backward
/// from `horizon` to `x_to`, which makes the decaying branch the attracting
/// one. log R^2 is normalised to 0 at the horizon.
PruferTrace subordinate_prufer(const Potential& v, double k, double x_to, double horizon,
                               const IntegratorConfig& cfg = {});

enum class Growth { decaying, bounded, growing };

std::string_view to_string(Growth g);

struct FitWindow {
    double lo = 0.0;
    double hi = 0.0;
};

struct Classification {
    Growth label = Growth::bounded;
    double slope = 0.0;  // d log R / d log x, least squares on the window
};

/// Slope thresholds: decaying below -0.25, growing above +0.25.
inline constexpr double kGrowthThreshold = 0.25;

Classification classify_solution(const PruferTrace& trace, FitWindow window);

/// Linear interpolation of a trace column at x (x inside the grid).
double interpolate(const std::vector<double>& grid, const std::vector<double>& values, double x);

/// Reconstructs u and u' from a Prufer trace.
void reconstruct(const PruferTrace& trace, std::vector<double>& u, std::vector<double>& u_prime);

}  // namespace spectra
