#include "spectra/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spectra/quadrature.hpp"

namespace spectra {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double derivative(const std::function<double(double)>& h, double x) {
    const double d = 1e-6 * std::max(1.0, x);
    const double lo = std::max(0.0, x - d);
    return (h(x + d) - h(lo)) / (x + d - lo);
}

struct CoupledRun {
    std::vector<double> grid;
    std::vector<std::vector<double>> theta;
    std::vector<std::vector<double>> log_R2;
    std::vector<double> v_left, s_left;
    std::vector<TabulatedParams::Jump> jumps;
    std::vector<std::vector<double>> cross_sup;
};

// Integrates the coupled phase/amplitude system for the first
// anchors.size() momenta. With record == false only cross_sup is filled.
CoupledRun run_coupled(const ConstructionConfig& cfg, const std::vector<double>& anchors, double step,
                       bool record) {
    const std::size_t m = anchors.size();
    const std::size_t pairs = m * (m - 1) / 2;
    const std::vector<double> k(cfg.momenta.begin(), cfg.momenta.begin() + static_cast<long>(m));
    std::vector<double> weight(m);
    for (std::size_t j = 0; j < m; ++j) weight[j] = std::ldexp(1.0, -static_cast<int>(j + 1));

    // pair p <-> (j, n), j < n
    std::vector<std::pair<std::size_t, std::size_t>> pair_of;
    for (std::size_t n = 1; n < m; ++n)
        for (std::size_t j = 0; j < n; ++j) pair_of.emplace_back(j, n);

    std::vector<double> sin2(m), sinsq(m);
    // V for given phases; `right` picks the right limit at an anchor.
    auto potential_at = [&](double x, const double* phi, bool right) {
        double hx = cfg.h(x) / (1.0 + x);
        double v = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double th = k[j] * x + phi[j];
            const double sn = std::sin(th);
            sin2[j] = 2.0 * sn * std::cos(th);
            sinsq[j] = sn * sn;
            const bool active = right ? x >= anchors[j] : x > anchors[j];
            if (active) v -= weight[j] * hx * sin2[j];
        }
        return v;
    };

    auto rhs = [&](double x, std::span<const double> s, std::span<double> d) {
        const double v = potential_at(x, s.data(), false);
        for (std::size_t j = 0; j < m; ++j) {
            d[j] = -v * sinsq[j] / k[j];
            d[m + j] = v * sin2[j] / k[j];
        }
        const double hx = cfg.h(x) / (1.0 + x);
        for (std::size_t p = 0; p < pairs; ++p) {
            const auto [j, n] = pair_of[p];
            d[2 * m + p] = x > anchors[n] ? hx * sin2[n] * sin2[j] : 0.0;
        }
    };

    // dV/dx on one side of x, from the analytic phase derivatives.
    auto slope_at = [&](double x, const double* phi, bool right) {
        const double v = potential_at(x, phi, right);
        const double hx = cfg.h(x);
        const double c = hx / (1.0 + x);
        const double cp = (derivative(cfg.h, x) * (1.0 + x) - hx) / ((1.0 + x) * (1.0 + x));
        double vp = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const bool active = right ? x >= anchors[j] : x > anchors[j];
            if (!active) continue;
            const double th = k[j] * x + phi[j];
            const double dth = k[j] - v * sinsq[j] / k[j];
            vp -= weight[j] * (cp * sin2[j] + c * 2.0 * std::cos(2.0 * th) * dth);
        }
        return std::pair{v, vp};
    };

    std::vector<double> stops;
    const std::size_t cells = static_cast<std::size_t>(std::ceil(cfg.horizon / step - 1e-9));
    for (std::size_t i = 1; i < cells; ++i) stops.push_back(static_cast<double>(i) * cfg.horizon / cells);
    for (double a : anchors)
        if (a > 0.0 && a < cfg.horizon) stops.push_back(a);
    std::sort(stops.begin(), stops.end());

    CoupledRun out;
    out.cross_sup.assign(m, std::vector<double>(m, 0.0));
    if (record) {
        out.theta.assign(m, {});
        out.log_R2.assign(m, {});
    }

    std::vector<double> y(2 * m + pairs, 0.0);
    for (std::size_t j = 0; j < m; ++j) y[j] = cfg.theta0;

    ode::Options opt;
    opt.tol = cfg.tol;
    opt.max_step = step;
    ode::integrate(rhs, 0.0, cfg.horizon, y, stops, opt, [&](double x, std::span<const double> s, bool at_stop) {
        if (!at_stop) return;
        for (std::size_t p = 0; p < pairs; ++p) {
            const auto [j, n] = pair_of[p];
            out.cross_sup[n][j] = std::max(out.cross_sup[n][j], std::fabs(s[2 * m + p]));
        }
        if (!record) return;
        out.grid.push_back(x);
        for (std::size_t j = 0; j < m; ++j) {
            out.theta[j].push_back(k[j] * x + s[j]);
            out.log_R2[j].push_back(s[m + j]);
        }
        const auto [vl, sl] = slope_at(x, s.data(), x == 0.0);
        out.v_left.push_back(vl);
        out.s_left.push_back(sl);
        if (x > 0.0 && std::find(anchors.begin(), anchors.end(), x) != anchors.end()) {
            const auto [vr, sr] = slope_at(x, s.data(), true);
            out.jumps.push_back({out.grid.size() - 1, vr, sr});
        }
    });
    return out;
}

double auto_step(const ConstructionConfig& cfg) {
    if (cfg.grid_step > 0.0) return cfg.grid_step;
    const double kmax = *std::max_element(cfg.momenta.begin(), cfg.momenta.end());
    return std::min(0.005, 2.0 * std::numbers::pi / kmax / 1250.0);
}

double max_cross_with(const CoupledRun& run, std::size_t n) {
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, run.cross_sup[n][j]);
    return worst;
}

}  // namespace

std::vector<double> default_anchor_candidates(double horizon) {
    std::vector<double> c{0.0};
    for (double decade = 1.0; decade < horizon; decade *= 10.0)
        for (double f : {1.0, 2.0, 5.0})
            if (f * decade < 0.5 * horizon) c.push_back(f * decade);
    return c;
}

double validate_construction(const ConstructionConfig& cfg) {
    if (!cfg.h) throw ValidationError("construction: h is not set");
    if (cfg.momenta.empty()) throw ValidationError("construction: no momenta");
    for (std::size_t j = 0; j < cfg.momenta.size(); ++j) {
        if (!(cfg.momenta[j] > 0.0) || !std::isfinite(cfg.momenta[j]))
            throw ValidationError("construction: momenta must be positive");
        if (j > 0 && !(cfg.momenta[j] > cfg.momenta[j - 1]))
            throw ValidationError("construction: momenta must be strictly increasing");
    }
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon))
        throw ValidationError("construction: horizon must be positive");
    if (!(cfg.cross_budget > 0.0)) throw ValidationError("construction: cross_budget must be positive");
    if (cfg.grid_step < 0.0) throw ValidationError("construction: grid_step must be >= 0");
    if (!cfg.anchors.empty()) {
        if (cfg.anchors.size() != cfg.momenta.size())
            throw ValidationError("construction: need one anchor per momentum");
        for (std::size_t j = 0; j < cfg.anchors.size(); ++j) {
            if (!(cfg.anchors[j] >= 0.0) || !(cfg.anchors[j] < cfg.horizon))
                throw ValidationError("construction: anchors must lie in [0, horizon)");
            if (j > 0 && cfg.anchors[j] < cfg.anchors[j - 1])
                throw ValidationError("construction: anchors must be nondecreasing");
        }
    }

    // Dense sample: uniform near the origin, logarithmic beyond.
    std::vector<double> xs;
    for (int i = 0; i <= 200; ++i) xs.push_back(std::min(cfg.horizon, 0.01 * i));
    const double lhi = std::log(std::max(cfg.horizon, 2.0));
    for (int i = 0; i <= 2000; ++i) xs.push_back(std::exp(lhi * i / 2000.0) - 1.0 + 2.0);
    std::sort(xs.begin(), xs.end());
    double prev = -kInf, ratio = 0.0;
    for (double x : xs) {
        if (x > cfg.horizon) break;
        const double hx = cfg.h(x);
        if (!std::isfinite(hx) || hx < 0.0) throw ValidationError("construction: h must be finite and >= 0");
        if (hx < prev - 1e-12 * std::max(1.0, std::fabs(prev)))
            throw ValidationError("construction: h is not nondecreasing near x=" + std::to_string(x));
        prev = hx;
        ratio = std::max(ratio, hx / std::pow(1.0 + x, 0.25));
    }
    if (cfg.enforce_growth_cap && ratio > 1.0 + 1e-12)
        throw ValidationError("construction: h exceeds (1+x)^(1/4) (ratio " + std::to_string(ratio) + ")");
    return ratio;
}

AnchorChoice select_anchor(const ConstructionConfig& cfg, std::size_t n, const std::vector<double>& candidates) {
    if (n >= cfg.momenta.size()) throw ValidationError("select_anchor: index out of range");
    if (cfg.anchors.size() < n) throw ValidationError("select_anchor: earlier anchors not fixed");
    const double floor_x = n == 0 ? 0.0 : cfg.anchors[n - 1];
    AnchorChoice choice;
    const double step = auto_step(cfg);
    for (double c : candidates) {
        if (c < floor_x || c >= cfg.horizon) continue;
        AnchorTrial trial{c, 0.0, false};
        if (n > 0 && std::isfinite(cfg.cross_budget)) {
            std::vector<double> anchors(cfg.anchors.begin(), cfg.anchors.begin() + static_cast<long>(n));
            anchors.push_back(c);
            trial.max_cross = max_cross_with(run_coupled(cfg, anchors, step, false), n);
        }
        trial.accepted = trial.max_cross <= cfg.cross_budget;
        choice.trials.push_back(trial);
        if (trial.accepted) {
            choice.anchor = c;
            return choice;
        }
    }
    std::ostringstream os;
    os << "select_anchor: no candidate keeps the cross integrals of momentum " << n << " within "
       << cfg.cross_budget << " (tried";
    for (const auto& t : choice.trials) os << " " << t.candidate << ":" << t.max_cross;
    os << ")";
    throw AnchorSelectionError(os.str(), choice.trials);
}

std::vector<double> decay_target(const ConstructionConfig& cfg, const std::vector<double>& anchors,
                                 std::size_t j, const std::vector<double>& grid) {
    const double scale = 1.0 / (std::ldexp(1.0, static_cast<int>(j + 2)) * cfg.momenta[j]);
    const auto gl = quad::gauss_legendre(6);
    std::vector<double> out(grid.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double a = std::max(grid[i - 1], anchors[j]), b = grid[i];
        if (b > a) {
            const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
            double s = 0.0;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                const double y = c + hw * gl.nodes[q];
                s += gl.weights[q] * cfg.h(y) / (1.0 + y);
            }
            acc += hw * s;
        }
        out[i] = -scale * acc;
    }
    return out;
}

ConstructionResult build_resonant_potential(const ConstructionConfig& cfg_in) {
    ConstructionConfig cfg = cfg_in;
    ConstructionResult res;
    res.growth_cap_ratio = validate_construction(cfg);
    res.theta0 = cfg.theta0;
    res.cross_budget = cfg.cross_budget;

    if (cfg.anchors.empty()) {
        const auto candidates =
            cfg.anchor_candidates.empty() ? default_anchor_candidates(cfg.horizon) : cfg.anchor_candidates;
        for (std::size_t n = 0; n < cfg.momenta.size(); ++n) {
            res.anchor_choices.push_back(select_anchor(cfg, n, candidates));
            cfg.anchors.push_back(res.anchor_choices.back().anchor);
        }
    }
    res.anchors = cfg.anchors;

    CoupledRun run = run_coupled(cfg, cfg.anchors, auto_step(cfg), true);
    const std::size_t m = cfg.momenta.size();

    res.cross_sup = run.cross_sup;
    for (std::size_t n = 0; n < m; ++n)
        for (std::size_t j = 0; j < n; ++j)
            if (res.cross_sup[n][j] > cfg.cross_budget) res.within_budget = false;
    if (!cfg_in.anchors.empty() || res.within_budget) {
        // Manual anchors report the budget; the auto policy guarantees it.
    } else {
        std::vector<AnchorTrial> trials;
        for (const auto& c : res.anchor_choices) trials.insert(trials.end(), c.trials.begin(), c.trials.end());
        std::ostringstream os;
        os << "construction: chosen anchors exceed cross budget " << cfg.cross_budget
           << " once all momenta are coupled";
        throw AnchorSelectionError(os.str(), std::move(trials));
    }

    for (std::size_t j = 0; j < m; ++j) {
        PruferTrace tr;
        tr.k = cfg.momenta[j];
        tr.grid = run.grid;
        tr.theta = std::move(run.theta[j]);
        tr.log_R2 = std::move(run.log_R2[j]);
        tr.tol = cfg.tol;
        res.traces.push_back(std::move(tr));
        res.decay_targets.push_back(decay_target(cfg, cfg.anchors, j, run.grid));
        res.sum_energies += cfg.momenta[j] * cfg.momenta[j];
    }
    res.grid = run.grid;
    res.potential = Potential::tabulated(run.grid, std::move(run.v_left), std::move(run.s_left), std::move(run.jumps));
    return res;
}

DecayReport verify_decay(const ConstructionResult& result, std::size_t j) {
    if (j >= result.traces.size()) throw ValidationError("verify_decay: momentum index out of range");
    const auto& tr = result.traces[j];
    const auto& target = result.decay_targets[j];
    const auto& g = result.grid;
    DecayReport rep;
    for (std::size_t i = 0; i < g.size(); ++i)
        rep.max_deviation = std::max(rep.max_deviation, std::fabs(tr.log_R2[i] - target[i]));

    const double X = g.back();
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (g[i] <= X / 10.0) continue;
        const double a = std::max(g[i - 1], X / 10.0);
        const double ra = std::exp(interpolate(g, tr.log_R2, a));
        rep.tail_R2_integral += 0.5 * (g[i] - a) * (ra + std::exp(tr.log_R2[i]));
    }

    rep.decade_edges.push_back(0.0);
    for (double e = 1.0; e < X; e *= 10.0) rep.decade_edges.push_back(e);
    rep.decade_edges.push_back(X);
    rep.decade_max_deviation.assign(rep.decade_edges.size() - 1, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto it = std::upper_bound(rep.decade_edges.begin(), rep.decade_edges.end(), g[i]);
        std::size_t d = static_cast<std::size_t>(it - rep.decade_edges.begin());
        d = d == 0 ? 0 : std::min(d - 1, rep.decade_max_deviation.size() - 1);
        rep.decade_max_deviation[d] = std::max(rep.decade_max_deviation[d], std::fabs(tr.log_R2[i] - target[i]));
    }
    return rep;
}

}  // namespace spectra
