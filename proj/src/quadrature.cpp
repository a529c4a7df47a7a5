#include "spectra/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spectra::quad {

Rule gauss_legendre(std::size_t n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * t * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::fabs(dt) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - t * t) * dp * dp);
        r.nodes[i] = -t;
        r.nodes[n - 1 - i] = t;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

Rule chebyshev_u_probability(std::size_t n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double np1 = static_cast<double>(n) + 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = std::numbers::pi * (static_cast<double>(i) + 1.0) / np1;
        const double s = std::sin(phi);
        // Orders nodes ascending in t.
        r.nodes[n - 1 - i] = std::cos(phi);
        r.weights[n - 1 - i] = 2.0 / np1 * s * s;
    }
    return r;
}

namespace {

constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double value;
    double error;
};

Panel kronrod15(const std::function<double(double)>& f, double a, double b, std::size_t& evals) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    const double fc = f(c);
    double gauss = fc * wg[3];
    double kron = fc * wgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = hw * xgk[j];
        const double s = f(c - dx) + f(c + dx);
        kron += wgk[j] * s;
        if (j % 2 == 1) gauss += wg[j / 2] * s;
    }
    evals += 15;
    return {kron * hw, std::fabs((kron - gauss) * hw)};
}

void adapt(const std::function<double(double)>& f, double a, double b, double tol, Panel whole,
           std::size_t depth, Result& out) {
    if (whole.error <= tol || depth == 0 || std::fabs(b - a) < 1e-14 * std::max(1.0, std::fabs(a))) {
        out.value += whole.value;
        out.error += whole.error;
        return;
    }
    const double m = 0.5 * (a + b);
    const Panel left = kronrod15(f, a, m, out.evaluations);
    const Panel right = kronrod15(f, m, b, out.evaluations);
    adapt(f, a, m, 0.5 * tol, left, depth - 1, out);
    adapt(f, m, b, 0.5 * tol, right, depth - 1, out);
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, std::span<const double> breaks, std::size_t max_depth) {
    Result out;
    if (a == b) return out;
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);

    std::vector<double> edges{lo};
    for (double x : breaks)
        if (x > lo && x < hi) edges.push_back(x);
    edges.push_back(hi);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // A coarse first pass sets the scale for the relative tolerance.
    std::vector<Panel> first(edges.size() - 1);
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        first[i] = kronrod15(f, edges[i], edges[i + 1], out.evaluations);
        scale += std::fabs(first[i].value);
    }
    const double total_tol = std::max(abs_tol, rel_tol * scale);
    const double span = hi - lo;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double share = total_tol * (edges[i + 1] - edges[i]) / span;
        adapt(f, edges[i], edges[i + 1], share, first[i], max_depth, out);
    }
    out.value *= sign;
    return out;
}

Rule composite(const Rule& rule, std::span<const double> edges) {
    Rule r;
    if (edges.size() < 2) return r;
    r.nodes.reserve(rule.nodes.size() * (edges.size() - 1));
    r.weights.reserve(rule.nodes.size() * (edges.size() - 1));
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double c = 0.5 * (edges[p] + edges[p + 1]);
        const double hw = 0.5 * (edges[p + 1] - edges[p]);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            r.nodes.push_back(c + hw * rule.nodes[i]);
            r.weights.push_back(hw * rule.weights[i]);
        }
    }
    return r;
}

}  // namespace spectra::quad
