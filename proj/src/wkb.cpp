#include "spectra/wkb.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "spectra/errors.hpp"
#include "spectra/quadrature.hpp"

namespace spectra {

namespace {

// int_a^b V, split on the potential's kinks and on unit cells so that
// oscillatory kinds stay well resolved.
double integral_of(const Potential& v, double a, double b) {
    if (b <= a) return 0.0;
    const double lo = std::max(a, v.support_onset());
    const double hi = std::min(b, v.support_bound());
    if (!(hi > lo)) return 0.0;
    std::vector<double> br = v.breakpoints(lo, hi);
    for (double x = std::floor(lo) + 1.0; x < hi; x += 1.0) br.push_back(x);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return quad::integrate([&](double x) { return v.eval(x); }, lo, hi, 1e-15, 1e-14, br).value;
}

}  // namespace

double wkb_phase(const Potential& v, double k, double x) {
    if (!(k > 0.0)) throw DomainError("wkb_phase: k must be positive");
    if (x < 0.0) throw DomainError("wkb_phase: x must be >= 0");
    return k * x - integral_of(v, 0.0, x) / (2.0 * k);
}

double modified_phase(const Potential& v, double k, double t) {
    if (!(k > 0.0)) throw DomainError("modified_phase: k must be positive");
    if (t < 0.0) throw DomainError("modified_phase: t must be >= 0");
    return k * k * t + integral_of(v, 0.0, 2.0 * k * t) / (2.0 * k);
}

WkbReport wkb_compare(const Potential& v, double k, double X, const WkbConfig& cfg) {
    if (!(k > 0.0)) throw DomainError("wkb_compare: k must be positive");
    if (!(X >= 100.0 * std::max(1.0, v.support_onset())))
        throw ValidationError("wkb_compare: horizon must lie two decades beyond the support onset");
    if (cfg.points_per_decade < 4) throw ValidationError("wkb_compare: need at least 4 points per decade");

    WkbReport rep;
    rep.k = k;
    rep.horizon = X;
    auto& g = rep.grid;
    for (int i = 0; i < 100; ++i) g.push_back(0.1 * i);
    const int m = static_cast<int>(std::ceil(cfg.points_per_decade * std::log10(X / 10.0)));
    for (int i = 0; i <= m; ++i) g.push_back(i == m ? X : 10.0 * std::pow(X / 10.0, static_cast<double>(i) / m));

    const std::size_t n = g.size();
    rep.phase.resize(n);
    double acc = 0.0;
    rep.phase[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        acc += integral_of(v, g[i - 1], g[i]);
        rep.phase[i] = k * g[i] - acc / (2.0 * k);
    }

    // u = alpha e^{ikx} + beta e^{-ikx}; alpha, beta are constant where V = 0.
    using C = std::complex<double>;
    const C inv_2ik = 1.0 / C(0.0, 2.0 * k);
    auto rhs = [&](double x, std::span<const double> s, std::span<double> d) {
        const double vx = v.eval(x);
        const C e = std::polar(1.0, k * x);
        const C u = C(s[0], s[1]) * e + C(s[2], s[3]) * std::conj(e);
        const C da = vx * u * std::conj(e) * inv_2ik;
        const C db = -vx * u * e * inv_2ik;
        d[0] = da.real();
        d[1] = da.imag();
        d[2] = db.real();
        d[3] = db.imag();
    };
    const double vX = v.eval(X);
    const C uX = std::polar(1.0, rep.phase.back());
    const double c = vX / (2.0 * k * k);
    const C alpha = 0.5 * (2.0 - c) * uX * std::polar(1.0, -k * X);
    const C beta = 0.5 * c * uX * std::polar(1.0, k * X);
    double y[4] = {alpha.real(), alpha.imag(), beta.real(), beta.imag()};

    std::vector<C> ratio(n);
    ratio[n - 1] = 1.0;
    std::size_t next = n - 1;
    ode::Options opt;
    opt.tol = cfg.tol;
    opt.max_step = 2.0 * std::numbers::pi / k / cfg.steps_per_period;
    std::vector<double> stops = v.breakpoints(0.0, X);
    stops.insert(stops.end(), g.begin() + 1, g.end() - 1);
    ode::integrate(rhs, X, 0.0, y, stops, opt, [&](double x, std::span<const double> s, bool at_stop) {
        if (!at_stop) return;
        while (next > 0 && g[next] > x) --next;
        if (g[next] != x) return;
        const C e = std::polar(1.0, k * x);
        const C u = C(s[0], s[1]) * e + C(s[2], s[3]) * std::conj(e);
        ratio[next] = u * std::polar(1.0, -rep.phase[next]);
    });

    rep.amplitude_residual.resize(n);
    rep.phase_residual.resize(n);
    double lift = 0.0;
    for (std::size_t j = n; j-- > 0;) {
        rep.amplitude_residual[j] = std::fabs(std::abs(ratio[j]) - 1.0);
        double a = std::arg(ratio[j]);
        if (j + 1 < n) {
            const double prev = rep.phase_residual[j + 1];
            a += lift;
            while (a - prev > std::numbers::pi) a -= 2.0 * std::numbers::pi, lift -= 2.0 * std::numbers::pi;
            while (a - prev < -std::numbers::pi) a += 2.0 * std::numbers::pi, lift += 2.0 * std::numbers::pi;
        }
        rep.phase_residual[j] = a;
    }

    auto spread = [&](double lo, double hi) {
        double mn = INFINITY, mx = -INFINITY;
        for (std::size_t j = 0; j < n; ++j) {
            if (g[j] < lo * (1.0 - 1e-12) || g[j] > hi * (1.0 + 1e-12)) continue;
            const double r = std::abs(ratio[j]);
            mn = std::min(mn, r);
            mx = std::max(mx, r);
        }
        return mx - mn;
    };
    rep.final_decade_spread = spread(X / 10.0, X);
    rep.previous_decade_spread = spread(X / 100.0, X / 10.0);
    rep.decreasing = rep.final_decade_spread < rep.previous_decade_spread;
    rep.resonance_suspected = (!rep.decreasing && rep.final_decade_spread > 0.0) || rep.final_decade_spread > 1.0;
    return rep;
}

}  // namespace spectra
