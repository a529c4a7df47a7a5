#pragma once

#include <vector>

#include "spectra/ode.hpp"
#include "spectra/potential.hpp"

namespace spectra {

/// k x - (1 / 2k) int_0^x V.
double wkb_phase(const Potential& v, double k, double x);

/// k^2 t + (1 / 2k) int_0^{2kt} V.
double modified_phase(const Potential& v, double k, double t);

struct WkbConfig {
    ode::Tolerance tol{1e-12, 1e-14};
    double steps_per_period = 20.0;
    int points_per_decade = 100;
};

struct WkbReport {
    double k = 0.0;
    double horizon = 0.0;
    std::vector<double> grid;
    std::vector<double> phase;               // wkb_phase on the grid
    std::vector<double> amplitude_residual;  // ||u / u_wkb| - 1|, u / u_wkb normalised to 1 at the horizon
    std::vector<double> phase_residual;      // arg(u / u_wkb), continuous
    /// Spread max - min of |u / u_wkb| over [h/100, h/10] and [h/10, h].
    /// Unlike the residual arrays these do not depend on where the
    /// normalisation happens.
    double previous_decade_spread = 0.0;
    double final_decade_spread = 0.0;
    bool decreasing = false;          // final spread below previous
    bool resonance_suspected = false; // spread not decreasing, or above 1 on the final decade
};

/// Solves -u'' + V u = k^2 u backward from X with outgoing WKB data
/// u = e^{i phase}, u' = i (k - V / 2k) u, and compares with e^{i phase}
/// on a grid (uniform on [0, 10], logarithmic beyond).
/// Needs X >= 100 max(1, onset of V).
WkbReport wkb_compare(const Potential& v, double k, double X, const WkbConfig& cfg = {});

}  // namespace spectra
