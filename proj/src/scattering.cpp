#include "spectra/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spectra/errors.hpp"
#include "spectra/quadrature.hpp"

namespace spectra {

namespace {

constexpr double kPi = std::numbers::pi;

double compact_support(const Potential& v, const char* who) {
    const double L = v.support_bound();
    if (!std::isfinite(L)) throw ValidationError(std::string(who) + ": potential must have compact support");
    return L;
}

}  // namespace

JostPoint jost_point(const Potential& v, double k, const JostConfig& cfg) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("jost: k must be positive");
    const double L = compact_support(v, "jost");
    const double x0 = std::min(v.support_onset(), L);
    JostPoint out{{1.0, 0.0}, {0.0, 0.0}, 0.0};
    if (!(L > x0)) return out;

    using C = std::complex<double>;
    const C inv_2ik = 1.0 / C(0.0, 2.0 * k);
    // y = (Re g, Im g, Re b, Im b) with alpha = 1 + g, beta = b
    auto rhs = [&](double x, std::span<const double> s, std::span<double> d) {
        const double vx = v.eval(x);
        if (vx == 0.0) {
            std::fill(d.begin(), d.end(), 0.0);
            return;
        }
        const C alpha(1.0 + s[0], s[1]);
        const C beta(s[2], s[3]);
        const C e2 = std::polar(1.0, 2.0 * k * x);
        const C da = vx * (alpha + beta * std::conj(e2)) * inv_2ik;
        const C db = -vx * (alpha * e2 + beta) * inv_2ik;
        d[0] = da.real();
        d[1] = da.imag();
        d[2] = db.real();
        d[3] = db.imag();
    };
    ode::Options opt;
    opt.tol = cfg.tol;
    const double scale = std::max(k, std::sqrt(v.sup_abs()));
    opt.max_step = 2.0 * kPi / scale / cfg.steps_per_period;
    double y[4] = {0.0, 0.0, 0.0, 0.0};
    const auto stops = v.breakpoints(x0, L);
    ode::integrate(rhs, L, x0, y, stops, opt);

    const C g(y[0], y[1]);
    out.a = 1.0 + g;
    out.b = C(y[2], y[3]);
    out.log_abs_a = 0.5 * std::log1p(2.0 * g.real() + std::norm(g));
    return out;
}

ScatteringData jost_coefficients(const Potential& v, std::span<const double> k_grid, const JostConfig& cfg,
                                 Execution exec) {
    compact_support(v, "jost_coefficients");
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (!(k_grid[i] > 0.0)) throw DomainError("jost_coefficients: k must be positive");
        if (i > 0 && !(k_grid[i] > k_grid[i - 1]))
            throw ValidationError("jost_coefficients: k grid must be increasing");
    }
    const std::size_t n = k_grid.size();
    ScatteringData d;
    d.k_grid.assign(k_grid.begin(), k_grid.end());
    d.a.resize(n);
    d.b.resize(n);
    d.jost_at_zero.resize(n);
    d.log_abs_a.resize(n);
    for_each_index(n, exec, [&](std::size_t i) {
        const JostPoint p = jost_point(v, k_grid[i], cfg);
        d.a[i] = p.a;
        d.b[i] = p.b;
        d.jost_at_zero[i] = p.a + p.b;
        d.log_abs_a[i] = p.log_abs_a;
    });
    return d;
}

double matching_phase(const Potential& v, double energy, const ode::Tolerance& tol) {
    if (!(energy < 0.0)) throw DomainError("matching_phase: energy must be negative");
    const double L = compact_support(v, "matching_phase");
    const double x0 = std::min(v.support_onset(), L);
    const double kappa = std::sqrt(-energy);
    const double start = std::atan2(1.0, kappa);
    double y[1] = {start};
    if (L > x0) {
        auto rhs = [&](double x, std::span<const double> s, std::span<double> d) {
            const double sn = std::sin(s[0]), cs = std::cos(s[0]);
            d[0] = cs * cs - (v.eval(x) - energy) * sn * sn;
        };
        ode::Options opt;
        opt.tol = tol;
        opt.max_step = 2.0 * kPi / std::sqrt(v.sup_abs() + kappa * kappa + 1.0) / 20.0;
        ode::integrate(rhs, x0, L, y, v.breakpoints(x0, L), opt);
    }
    return y[0] + start;
}

BoundStates bound_states(const Potential& v, const BoundStateConfig& cfg) {
    compact_support(v, "bound_states");
    if (cfg.grid_points < 2) throw ValidationError("bound_states: need at least two grid points");
    BoundStates out;
    const double S = v.sup_abs();
    if (!(S > 0.0)) return out;

    auto count = [&](double e) { return static_cast<long>(std::floor(matching_phase(v, e, cfg.tol) / kPi)); };
    const double e_lo = -S, e_hi = -S * 1e-12;
    const int n = cfg.grid_points;
    std::vector<double> grid(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) grid[static_cast<std::size_t>(i)] = e_lo + (e_hi - e_lo) * i / n;
    std::vector<long> counts(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) counts[i] = count(grid[i]);

    if (counts.front() != 0) {
        std::ostringstream os;
        os << "phase count " << counts.front() << " at E=-sup|V|; expected 0";
        out.warnings.push_back(os.str());
    }
    out.expected_count = static_cast<std::size_t>(std::max(0L, counts.back() - counts.front()));

    // Root of G(E) = m pi inside [lo, hi].
    auto bisect = [&](double lo, double hi, long m) {
        const double target = static_cast<double>(m) * kPi;
        while (hi - lo > cfg.energy_tol) {
            const double mid = 0.5 * (lo + hi);
            if (matching_phase(v, mid, cfg.tol) < target) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    // Splits an interval until every piece holds at most one crossing.
    auto resolve = [&](auto&& self, double lo, double hi, long c_lo, long c_hi, int depth) -> void {
        if (c_hi == c_lo) return;
        if (c_hi - c_lo == 1) {
            out.energies.push_back(bisect(lo, hi, c_hi));
            return;
        }
        if (depth == 0 || hi - lo < cfg.energy_tol) {
            std::ostringstream os;
            os << c_hi - c_lo << " crossings unresolved in [" << lo << ", " << hi << "]";
            out.warnings.push_back(os.str());
            for (long m = c_lo + 1; m <= c_hi; ++m) out.energies.push_back(bisect(lo, hi, m));
            return;
        }
        const int parts = 16;
        double prev_e = lo;
        long prev_c = c_lo;
        for (int p = 1; p <= parts; ++p) {
            const double e = p == parts ? hi : lo + (hi - lo) * p / parts;
            const long c = p == parts ? c_hi : count(e);
            self(self, prev_e, e, prev_c, c, depth - 1);
            prev_e = e;
            prev_c = c;
        }
    };

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const long c_lo = counts[i], c_hi = counts[i + 1];
        if (c_hi < c_lo) {
            std::ostringstream os;
            os << "phase count decreased on [" << grid[i] << ", " << grid[i + 1] << "]";
            out.warnings.push_back(os.str());
            continue;
        }
        if (c_hi - c_lo > 1) {
            std::ostringstream os;
            os << "energy grid too coarse near E=" << grid[i] << ": refining " << c_hi - c_lo << " crossings";
            out.warnings.push_back(os.str());
        }
        resolve(resolve, grid[i], grid[i + 1], c_lo, c_hi, 8);
    }
    std::sort(out.energies.begin(), out.energies.end());
    if (out.energies.size() != out.expected_count) {
        std::ostringstream os;
        os << "found " << out.energies.size() << " eigenvalues, phase count says " << out.expected_count;
        out.warnings.push_back(os.str());
    }
    return out;
}

double sum_rule_rhs(const Potential& v) {
    const double L = compact_support(v, "sum_rule_rhs");
    const double x0 = std::min(v.support_onset(), L);
    if (!(L > x0)) return 0.0;
    const auto br = v.breakpoints(x0, L);
    const auto r = quad::integrate([&](double x) { return v.eval(x) * v.eval(x); }, x0, L, 1e-15, 1e-13, br);
    return kPi / 8.0 * r.value;
}

SumRuleReport sum_rule_residual(const Potential& v, const SumRuleConfig& cfg) {
    const double L = compact_support(v, "sum_rule_residual");
    SumRuleReport rep;
    rep.k_min = cfg.k_min;
    rep.k_max = cfg.k_max > 0.0 ? cfg.k_max : 40.0 * (1.0 + std::sqrt(v.sup_abs()));
    if (!(rep.k_min > 0.0) || !(rep.k_max > 4.0 * rep.k_min))
        throw ValidationError("sum_rule_residual: need 0 < 4 k_min < k_max");
    if (cfg.nodes_per_panel < 2) throw ValidationError("sum_rule_residual: nodes_per_panel must be >= 2");

    rep.rhs = sum_rule_rhs(v);
    rep.bound = bound_states(v, cfg.bound);
    double eig = 0.0;
    for (double e : rep.bound.energies) eig += std::pow(-e, 1.5);
    rep.eigenvalue_sum = 2.0 * kPi / 3.0 * eig;
    if (v.sup_abs() == 0.0) return rep;

    // Panels: doubling from k_min up to 1, uniform up to k_max / 2, and a
    // uniform tail window [k_max / 2, k_max] split in quarters for the fit.
    const double width = cfg.panel_width > 0.0 ? cfg.panel_width : std::min(0.5, 1.0 / std::max(L - v.support_onset(), 1e-300));
    const double half = 0.5 * rep.k_max;
    std::vector<double> edges{rep.k_min};
    const double split = std::min(1.0, half);
    while (2.0 * edges.back() < split) edges.push_back(2.0 * edges.back());
    edges.push_back(split);
    if (half > split) {
        const int m = static_cast<int>(std::ceil((half - split) / width));
        for (int i = 1; i <= m; ++i) edges.push_back(split + (half - split) * i / m);
    }
    const std::size_t tail_first = edges.size() - 1;
    const int mt = 4 * static_cast<int>(std::ceil(half / width / 4.0));
    for (int i = 1; i <= mt; ++i) edges.push_back(half + half * i / mt);

    const auto rule = quad::composite(quad::gauss_legendre(static_cast<std::size_t>(cfg.nodes_per_panel)), edges);
    std::vector<double> ks = rule.nodes;
    const auto data = jost_coefficients(v, ks, cfg.jost, cfg.exec);
    rep.k_evaluations = ks.size();

    const double tail_lo = edges[tail_first], tail_mid = half + half / 2.0;
    double lhs = 0.0, c_first = 0.0, c_second = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const double k = ks[i];
        const double integrand = data.log_abs_a[i] * k * k;
        lhs += rule.weights[i] * integrand;
        if (k > tail_lo) {
            // C = mean of integrand * k^2 over each half of the window
            if (k < tail_mid) c_first += rule.weights[i] * integrand * k * k;
            else c_second += rule.weights[i] * integrand * k * k;
        }
    }
    c_first /= half / 2.0;
    c_second /= half / 2.0;
    const double c_fit = 0.5 * (c_first + c_second);
    rep.lhs_integral = 2.0 * lhs;
    rep.tail_estimate = 2.0 * c_fit / rep.k_max;

    // Power fit I ~ A k^p through the first two nodes.
    const double i0 = data.log_abs_a[0] * ks[0] * ks[0], i1 = data.log_abs_a[1] * ks[1] * ks[1];
    if (i0 != 0.0 && i1 != 0.0 && (i0 > 0.0) == (i1 > 0.0)) {
        const double p = std::log(i1 / i0) / std::log(ks[1] / ks[0]);
        rep.low_k_estimate = p > -1.0 ? 2.0 * i0 / std::pow(ks[0], p) * std::pow(rep.k_min, p + 1.0) / (p + 1.0)
                                      : std::numeric_limits<double>::infinity();
    }
    rep.error_bar = std::fabs(rep.low_k_estimate) + 2.0 * std::fabs(c_first - c_second) / rep.k_max;
    rep.residual = rep.lhs_integral + rep.tail_estimate + rep.eigenvalue_sum - rep.rhs;

    if (std::fabs(rep.tail_estimate) > 0.1 * std::fabs(rep.rhs)) {
        std::ostringstream os;
        os << "sum_rule_residual: tail estimate " << rep.tail_estimate << " exceeds 10% of rhs " << rep.rhs
           << " (k_max=" << rep.k_max << ")";
        throw NumericalError(os.str());
    }
    return rep;
}

}  // namespace spectra
