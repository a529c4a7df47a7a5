#include "spectra/prufer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectra/errors.hpp"

namespace spectra {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> stops_for(const Potential& v, double a, double b, const IntegratorConfig& cfg) {
    std::vector<double> s = v.breakpoints(a, b);
    s.insert(s.end(), cfg.output_grid.begin(), cfg.output_grid.end());
    return s;
}

// Records the endpoints, every landing point when an output grid was
// requested, and every accepted step otherwise.
struct Recorder {
    bool only_stops;
    template <class Push>
    void operator()(bool at_stop, Push&& push) const {
        if (!only_stops || at_stop) push();
    }
};

}  // namespace

std::string_view to_string(Growth g) {
    switch (g) {
        case Growth::decaying: return "decaying";
        case Growth::bounded: return "bounded";
        case Growth::growing: return "growing";
    }
    return "unknown";
}

SolutionTrace integrate_eigenfunction(const Potential& v, double energy, double x0, double u0, double u0p,
                                      double X, const IntegratorConfig& cfg) {
    if (!(X > x0)) throw ValidationError("integrate_eigenfunction: need X > x0");
    if (x0 < 0.0) throw DomainError("integrate_eigenfunction: x0 must be >= 0");
    SolutionTrace tr;
    tr.energy = energy;
    tr.tol = cfg.tol;

    ode::Options opt;
    opt.tol = cfg.tol;
    opt.max_step = energy > 0.0 ? kTwoPi / std::sqrt(energy) / cfg.steps_per_period : cfg.max_step_cap;

    const auto stops = stops_for(v, x0, X, cfg);
    const Recorder rec{!cfg.output_grid.empty()};
    double y[2] = {u0, u0p};
    auto rhs = [&](double x, std::span<const double> s, std::span<double> d) {
        d[0] = s[1];
        d[1] = (v.eval(x) - energy) * s[0];
    };
    tr.stats = ode::integrate(rhs, x0, X, y, stops, opt, [&](double x, std::span<const double> s, bool at_stop) {
        rec(at_stop, [&] {
            tr.grid.push_back(x);
            tr.u.push_back(s[0]);
            tr.u_prime.push_back(s[1]);
        });
    });
    return tr;
}

PruferTrace integrate_prufer(const Potential& v, double k, double x0, double theta0, double R0, double X,
                             const IntegratorConfig& cfg) {
    if (!(k > 0.0)) throw DomainError("integrate_prufer: k must be positive");
    if (!(R0 > 0.0)) throw DomainError("integrate_prufer: R0 must be positive");
    if (x0 < 0.0 || X < 0.0) throw DomainError("integrate_prufer: interval must lie in x >= 0");
    PruferTrace tr;
    tr.k = k;
    tr.tol = cfg.tol;
    if (X == x0) {
        tr.grid = {x0};
        tr.theta = {theta0};
        tr.log_R2 = {2.0 * std::log(R0)};
        return tr;
    }

    ode::Options opt;
    opt.tol = cfg.tol;
    opt.max_step = kTwoPi / k / cfg.steps_per_period;

    // The state holds the slow phase  phi = theta - k (x - x0)  so that the
    // error control sees an O(1) quantity instead of the growing lift.
    const double inv_k = 1.0 / k;
    auto rhs = [&](double x, std::span<const double> s, std::span<double> d) {
        const double theta = k * (x - x0) + s[0];
        const double sn = std::sin(theta), cs = std::cos(theta);
        const double vx = v.eval(x);
        d[0] = -vx * sn * sn * inv_k;
        d[1] = 2.0 * vx * sn * cs * inv_k;
    };
    double y[2] = {theta0, 2.0 * std::log(R0)};
    const auto stops = stops_for(v, x0, X, cfg);
    const Recorder rec{!cfg.output_grid.empty()};
    tr.stats = ode::integrate(rhs, x0, X, y, stops, opt, [&](double x, std::span<const double> s, bool at_stop) {
        rec(at_stop, [&] {
            tr.grid.push_back(x);
            tr.theta.push_back(k * (x - x0) + s[0]);
            tr.log_R2.push_back(s[1]);
        });
    });
    if (X < x0) {
        std::reverse(tr.grid.begin(), tr.grid.end());
        std::reverse(tr.theta.begin(), tr.theta.end());
        std::reverse(tr.log_R2.begin(), tr.log_R2.end());
    }
    return tr;
}

PruferTrace subordinate_prufer(const Potential& v, double k, double x_to, double horizon,
                               const IntegratorConfig& cfg) {
    if (!(horizon > x_to)) throw ValidationError("subordinate_prufer: need horizon > x_to");
    // Any phase except the one exceptional growing branch converges onto
    // the subordinate solution; pi/4 is generic.
    return integrate_prufer(v, k, horizon, k * horizon + std::numbers::pi / 4.0, 1.0, x_to, cfg);
}

double interpolate(const std::vector<double>& grid, const std::vector<double>& values, double x) {
    if (grid.empty()) throw ValidationError("interpolate: empty grid");
    if (x <= grid.front()) return values.front();
    if (x >= grid.back()) return values.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return values[i] + t * (values[i + 1] - values[i]);
}

Classification classify_solution(const PruferTrace& trace, FitWindow window) {
    if (trace.grid.size() < 2) throw ValidationError("classify_solution: trace too short");
    if (!(window.lo > 0.0) || !(window.hi > window.lo))
        throw ValidationError("classify_solution: window must satisfy 0 < lo < hi");
    if (window.lo < trace.grid.front() || window.hi > trace.grid.back())
        throw ValidationError("classify_solution: window not inside trace grid");
    const double decades = std::log10(window.hi / window.lo);
    if (decades < 1.0 - 1e-12) throw ValidationError("classify_solution: window shorter than one decade");

    // Resample on a log-uniform grid so each decade weighs the same.
    const std::size_t m = static_cast<std::size_t>(std::ceil(64.0 * decades)) + 1;
    const double llo = std::log(window.lo), lhi = std::log(window.hi);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double lx = llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(m - 1);
        const double ly = 0.5 * interpolate(trace.grid, trace.log_R2, std::exp(lx));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(m);
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Classification c;
    c.slope = slope;
    c.label = slope < -kGrowthThreshold ? Growth::decaying
              : slope > kGrowthThreshold ? Growth::growing
                                         : Growth::bounded;
    return c;
}

void reconstruct(const PruferTrace& trace, std::vector<double>& u, std::vector<double>& u_prime) {
    const std::size_t n = trace.grid.size();
    u.resize(n);
    u_prime.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::exp(0.5 * trace.log_R2[i]);
        u[i] = r * std::sin(trace.theta[i]);
        u_prime[i] = trace.k * r * std::cos(trace.theta[i]);
    }
}

}  // namespace spectra
