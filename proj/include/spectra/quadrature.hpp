#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace spectra::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(std::size_t n);

/// n-point Gauss rule for the weight sqrt(1 - t^2) on [-1, 1] (Chebyshev of
/// the second kind), normalised so the weights sum to 1. Nodes cluster at
/// the endpoints.
Rule chebyshev_u_probability(std::size_t n);

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
};

/// Adaptive 7/15-point Gauss-Kronrod on [a, b]. Interior `breaks` split the
/// interval first so that kinks of the integrand sit on panel edges.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-13, double rel_tol = 1e-12,
                 std::span<const double> breaks = {}, std::size_t max_depth = 60);

/// Composite Gauss-Legendre: maps `rule` onto every panel [edges[i], edges[i+1]]
/// and returns the flattened nodes and weights.
Rule composite(const Rule& rule, std::span<const double> edges);

}  // namespace spectra::quad
