#pragma once

// Rooted binary tree (the half Bethe lattice, every vertex has two forward
// neighbours) with a potential supported up to a finite depth.

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spectra/execution.hpp"

namespace spectra {

class TreePotential {
public:
    /// All-zero tree of the given depth.
    explicit TreePotential(int depth = 0);

    /// Labels are binary strings ("" is the root, children append 0 / 1).
    /// Missing labels are 0; labels deeper than `depth` are rejected.
    static TreePotential from_labels(int depth, const std::map<std::string, double>& values);

    /// Values iid uniform on [lo, hi] from a 64-bit Mersenne Twister.
    static TreePotential random(int depth, std::uint64_t seed, double lo = -1.0, double hi = 1.0);

    int depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Vertex `index` (0 .. 2^level - 1, the label read as a binary number) on `level`.
    double at(int level, std::size_t index) const;
    void set(int level, std::size_t index, double value);
    double at(const std::string& label) const;

    static std::string label(int level, std::size_t index);

    /// Subtree rooted at (level, index), re-rooted; depth shrinks by level.
    /// A vertex one level below the depth gives the zero tree.
    TreePotential subtree(int level, std::size_t index) const;

    /// Swaps the subtrees below the two children of (level, index).
    TreePotential with_children_swapped(int level, std::size_t index) const;

    /// sum_n 2^-n sum_{|v| = n} V(v)^2.
    double weighted_square_mass() const;

    bool is_zero() const;

    std::map<std::string, double> labels() const;

private:
    int depth_;
    std::vector<double> values_;  // level order, root first
};

/// Root of 2 m^2 + z m + 1 = 0 with Im m > 0. For real z inside
/// (-2 sqrt 2, 2 sqrt 2) this is the boundary value from the upper half-plane.
std::complex<double> m_free(std::complex<double> z);

/// <delta_O, (H - z)^-1 delta_O> by recursion from the leaves; vertices below
/// the depth use m_free(z). Requires Im z > 0.
std::complex<double> green_root(const TreePotential& tree, std::complex<double> z);

/// Same recursion at real lambda with free boundary m_free(lambda + i0):
/// the exact boundary value m(lambda + i0) of the finitely supported tree.
std::complex<double> green_root_boundary(const TreePotential& tree, double lambda);

inline constexpr double kBandEdge = 2.8284271247461903;  // 2 sqrt 2

/// sqrt(8 - lambda^2) / (4 pi): spectral density at the root with V = 0.
double free_density(double lambda);

struct DensityEstimate {
    double value = 0.0;
    double error = 0.0;       // spread of the two highest-order extrapolants
    bool flagged = false;     // successive differences do not shrink
    std::vector<double> samples;  // Im m(lambda + i eps) / pi per schedule entry
};

/// Im m(lambda + i0) / pi by polynomial (Richardson) extrapolation to eps = 0
/// over a decreasing schedule.
DensityEstimate spectral_density_root(const TreePotential& tree, double lambda,
                                      const std::vector<double>& epsilon_schedule = {1e-2, 5e-3, 2.5e-3});

enum class BoundaryMode { exact, extrapolated };

struct EntropyConfig {
    int quadrature_nodes = 128;
    std::vector<double> epsilon_schedule{1e-2, 5e-3, 2.5e-3};
    BoundaryMode boundary = BoundaryMode::exact;
    Execution exec = Execution::serial;
};

struct EntropyResult {
    double value = 0.0;
    std::vector<double> excluded_nodes;  // lambda where the density was not positive
    bool flagged = false;                // some extrapolation was flagged
};

/// int ln(rho) dw with rho = density / free_density and
/// dw = sqrt(8 - lambda^2) / (4 pi) d lambda, by Gauss quadrature for the
/// semicircle weight.
EntropyResult root_entropy(const TreePotential& tree, const EntropyConfig& cfg = {});

/// Path expectation E exp(-phi / 4), phi = sum of V^2 along a random
/// forward path, by the fold g(v) = exp(-V(v)^2 / 4) (g(c0) + g(c1)) / 2.
double pearson_rhs(const TreePotential& tree);

struct EntropyReport {
    double s_root = 0.0;
    double rhs = 1.0;
    double margin = 0.0;           // s_root - ln rhs
    double jensen_bound = 0.0;     // -weighted_square_mass / 4
    double jensen_margin = 0.0;    // s_root - jensen_bound
    std::vector<double> epsilon_schedule;
    int quadrature_nodes = 0;
    BoundaryMode boundary = BoundaryMode::exact;
    std::vector<double> excluded_nodes;
    bool flagged = false;
};

EntropyReport verify_pearson(const TreePotential& tree, const EntropyConfig& cfg = {});

struct StepCheck {
    double margin = 0.0;  // s_v - ln((e^{s_c0} + e^{s_c1}) / 2) + V(v)^2 / 4
    double s_vertex = 0.0;
    double s_child0 = 0.0;
    double s_child1 = 0.0;
    bool flagged = false;
};

StepCheck step_inequality_check(const TreePotential& tree, int level, std::size_t index,
                                const EntropyConfig& cfg = {});

}  // namespace spectra
