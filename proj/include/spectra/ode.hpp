#pragma once

// Dormand-Prince 8(5,3) explicit Runge-Kutta integrator with step-size
// control, a hard maximum step and forced landing points.
//
// Landing points ("stops") serve two purposes: potentials with kinks or
// jumps publish them as breakpoints so no step straddles a discontinuity,
// and callers that need the solution on a fixed grid pass the grid. Stage
// evaluations at the two ends of a step are nudged one ulp into the step,
// so a right-hand side that is only piecewise smooth is always sampled on
// the correct side of a jump.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "spectra/errors.hpp"

namespace spectra::ode {

struct Tolerance {
    double rtol = 1e-10;
    double atol = 1e-12;
};

struct Options {
    Tolerance tol{};
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  // 0: automatic
    std::size_t max_steps = 100'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

namespace dop853 {
    constexpr double c2 = 0.526001519587677318785587544488e-01;
    constexpr double c3 = 0.789002279381515978178381316732e-01;
    constexpr double c4 = 0.118350341907227396726757197510e+00;
    constexpr double c5 = 0.281649658092772603273242802490e+00;
    constexpr double c6 = 0.333333333333333333333333333333e+00;
    constexpr double c7 = 0.25e+00;
    constexpr double c8 = 0.307692307692307692307692307692e+00;
    constexpr double c9 = 0.651282051282051282051282051282e+00;
    constexpr double c10 = 0.6e+00;
    constexpr double c11 = 0.857142857142857142857142857142e+00;
    constexpr double a21 = 5.26001519587677318785587544488e-2;
    constexpr double a31 = 1.97250569845378994544595329183e-2;
    constexpr double a32 = 5.91751709536136983633785987549e-2;
    constexpr double a41 = 2.95875854768068491816892993775e-2;
    constexpr double a43 = 8.87627564304205475450678981324e-2;
    constexpr double a51 = 2.41365134159266685502369798665e-1;
    constexpr double a53 = -8.84549479328286085344864962717e-1;
    constexpr double a54 = 9.24834003261792003115737966543e-1;
    constexpr double a61 = 3.7037037037037037037037037037e-2;
    constexpr double a64 = 1.70828608729473871279604482173e-1;
    constexpr double a65 = 1.25467687566822425016691814123e-1;
    constexpr double a71 = 3.7109375e-2;
    constexpr double a74 = 1.70252211019544039314978060272e-1;
    constexpr double a75 = 6.02165389804559606850219397283e-2;
    constexpr double a76 = -1.7578125e-2;
    constexpr double a81 = 3.70920001185047927108779319836e-2;
    constexpr double a84 = 1.70383925712239993810214054705e-1;
    constexpr double a85 = 1.07262030446373284651809199168e-1;
    constexpr double a86 = -1.53194377486244017527936158236e-2;
    constexpr double a87 = 8.27378916381402288758473766002e-3;
    constexpr double a91 = 6.24110958716075717114429577812e-1;
    constexpr double a94 = -3.36089262944694129406857109825e0;
    constexpr double a95 = -8.68219346841726006818189891453e-1;
    constexpr double a96 = 2.75920996994467083049415600797e1;
    constexpr double a97 = 2.01540675504778934086186788979e1;
    constexpr double a98 = -4.34898841810699588477366255144e1;
    constexpr double a101 = 4.77662536438264365890433908527e-1;
    constexpr double a104 = -2.48811461997166764192642586468e0;
    constexpr double a105 = -5.90290826836842996371446475743e-1;
    constexpr double a106 = 2.12300514481811942347288949897e1;
    constexpr double a107 = 1.52792336328824235832596922938e1;
    constexpr double a108 = -3.32882109689848629194453265587e1;
    constexpr double a109 = -2.03312017085086261358222928593e-2;
    constexpr double a111 = -9.3714243008598732571704021658e-1;
    constexpr double a114 = 5.18637242884406370830023853209e0;
    constexpr double a115 = 1.09143734899672957818500254654e0;
    constexpr double a116 = -8.14978701074692612513997267357e0;
    constexpr double a117 = -1.85200656599969598641566180701e1;
    constexpr double a118 = 2.27394870993505042818970056734e1;
    constexpr double a119 = 2.49360555267965238987089396762e0;
    constexpr double a1110 = -3.0467644718982195003823669022e0;
    constexpr double a121 = 2.27331014751653820792359768449e0;
    constexpr double a124 = -1.05344954667372501984066689879e1;
    constexpr double a125 = -2.00087205822486249909675718444e0;
    constexpr double a126 = -1.79589318631187989172765950534e1;
    constexpr double a127 = 2.79488845294199600508499808837e1;
    constexpr double a128 = -2.85899827713502369474065508674e0;
    constexpr double a129 = -8.87285693353062954433549289258e0;
    constexpr double a1210 = 1.23605671757943030647266201528e1;
    constexpr double a1211 = 6.43392746015763530355970484046e-1;
    constexpr double b1 = 5.42937341165687622380535766363e-2;
    constexpr double b6 = 4.45031289275240888144113950566e0;
    constexpr double b7 = 1.89151789931450038304281599044e0;
    constexpr double b8 = -5.8012039600105847814672114227e0;
    constexpr double b9 = 3.1116436695781989440891606237e-1;
    constexpr double b10 = -1.52160949662516078556178806805e-1;
    constexpr double b11 = 2.01365400804030348374776537501e-1;
    constexpr double b12 = 4.47106157277725905176885569043e-2;
    constexpr double e31 = 0.244094488188976377952755905512e+00;
    constexpr double e32 = 0.733846688281611857341361741547e+00;
    constexpr double e33 = 0.220588235294117647058823529412e-01;
    constexpr double e51 = 0.1312004499419488073250102996e-01;
    constexpr double e56 = -0.1225156446376204440720569753e+01;
    constexpr double e57 = -0.4957589496572501915214079952e+00;
    constexpr double e58 = 0.1664377182454986536961530415e+01;
    constexpr double e59 = -0.3503288487499736816886487290e+00;
    constexpr double e510 = 0.3341791187130174790297318841e+00;
    constexpr double e511 = 0.8192320648511571246570742613e-01;
    constexpr double e512 = -0.2235530786388629525884427845e-01;
}  // namespace dop853

namespace detail {

inline double rms_norm(std::span<const double> v, std::span<const double> scale) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = v[i] / scale[i];
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace detail

/// Integrates y' = f(x, y) from x0 to x1 (either direction), overwriting y
/// with the solution at x1.
///
/// `f(x, y, dy)` must fill dy. `observe(x, y, at_stop)` is called at x0 and
/// after every accepted step; `at_stop` is true when the step landed on one
/// of `stops` or on x1. Stops outside the open interval (x0, x1) are ignored
/// and need not be sorted.
template <class Rhs, class Observer>
Stats integrate(Rhs&& f, double x0, double x1, std::span<double> y,
                std::span<const double> stops, const Options& opt, Observer&& observe) {
    using namespace dop853;
    const std::size_t n = y.size();
    Stats stats;
    observe(x0, std::span<const double>(y), true);
    if (x1 == x0 || n == 0) return stats;

    const double dir = x1 > x0 ? 1.0 : -1.0;

    std::vector<double> landing;
    landing.reserve(stops.size() + 1);
    for (double s : stops)
        if ((s - x0) * dir > 0.0 && (x1 - s) * dir > 0.0) landing.push_back(s);
    landing.push_back(x1);
    if (dir > 0)
        std::sort(landing.begin(), landing.end());
    else
        std::sort(landing.begin(), landing.end(), std::greater<>());
    landing.erase(std::unique(landing.begin(), landing.end()), landing.end());

    std::vector<double> work(16 * n);
    auto slot = [&](std::size_t i) { return std::span<double>(work.data() + i * n, n); };
    auto k1 = slot(0), k2 = slot(1), k3 = slot(2), k4 = slot(3), k5 = slot(4), k6 = slot(5),
         k7 = slot(6), k8 = slot(7), k9 = slot(8), k10 = slot(9), k11 = slot(10), k12 = slot(11);
    auto yt = slot(12), ynew = slot(13), sc = slot(14), tmp = slot(15);

    auto eval = [&](double x, std::span<const double> yy, std::span<double> dy) {
        ++stats.evaluations;
        f(x, yy, dy);
    };

    double x = x0;
    eval(std::nextafter(x, x1), y, k1);

    const double rtol = opt.tol.rtol, atol = opt.tol.atol;
    const double hmax = std::min(opt.max_step, std::fabs(x1 - x0));

    // Initial step guess following Hairer's HINIT for order 8.
    double h = opt.initial_step;
    if (h <= 0.0) {
        for (std::size_t i = 0; i < n; ++i) sc[i] = atol + rtol * std::fabs(y[i]);
        const double dnf = detail::rms_norm(k1, sc);
        const double dny = detail::rms_norm(std::span<const double>(y), sc);
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
        h = std::min(h, hmax);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + dir * h * k1[i];
        eval(x + dir * h, yt, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = (k2[i] - k1[i]);
        const double der2 = detail::rms_norm(tmp, sc) / h;
        const double der12 = std::max(std::fabs(der2), dnf);
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::fabs(h) * 1e-3)
                                         : std::pow(0.01 / der12, 1.0 / 8.0);
        h = std::min({100.0 * std::fabs(h), h1, hmax});
    }
    h = std::min(h, hmax);

    std::size_t next_stop = 0;
    bool last_rejected = false;
    double h_unclipped = h;

    while (next_stop < landing.size()) {
        if (stats.accepted + stats.rejected >= opt.max_steps)
            throw IntegrationError("maximum number of steps exceeded", x);
        const double target = landing[next_stop];
        const double remaining = (target - x) * dir;
        bool clipped = false;
        double hs = h;
        if (hs >= remaining * (1.0 - 1e-12)) {
            h_unclipped = std::max(h_unclipped, hs);
            hs = remaining;
            clipped = true;
        }
        if (hs < 1e-14 * std::max(1.0, std::fabs(x)) && !clipped)
            throw IntegrationError("step size underflow", x);

        const double hd = dir * hs;
        const double x_end = clipped ? target : x + hd;

        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + hd * (a21 * k1[i]);
        eval(x + c2 * hd, yt, k2);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + hd * (a31 * k1[i] + a32 * k2[i]);
        eval(x + c3 * hd, yt, k3);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + hd * (a41 * k1[i] + a43 * k3[i]);
        eval(x + c4 * hd, yt, k4);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + hd * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        eval(x + c5 * hd, yt, k5);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + hd * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        eval(x + c6 * hd, yt, k6);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + hd * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        eval(x + c7 * hd, yt, k7);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + hd * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
        eval(x + c8 * hd, yt, k8);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + hd * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] +
                                 a97 * k7[i] + a98 * k8[i]);
        eval(x + c9 * hd, yt, k9);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + hd * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                                 a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
        eval(x + c10 * hd, yt, k10);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + hd * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                                 a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        eval(x + c11 * hd, yt, k11);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + hd * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                                 a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
                                 a1211 * k11[i]);
        eval(std::nextafter(x_end, x), yt, k12);

        double err5 = 0.0, err3 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double incr = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                                b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
            ynew[i] = y[i] + hd * incr;
            const double s = atol + rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            const double e3 = incr - e31 * k1[i] - e32 * k9[i] - e33 * k12[i];
            const double e5 = e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] + e59 * k9[i] +
                              e510 * k10[i] + e511 * k11[i] + e512 * k12[i];
            err3 += (e3 / s) * (e3 / s);
            err5 += (e5 / s) * (e5 / s);
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) deno = 1.0;
        const double err = hs * err5 / std::sqrt(static_cast<double>(n) * deno);

        // Step control: fac1 = 0.333, fac2 = 6, safety 0.9, exponent 1/8.
        const double fac11 = std::pow(err, 0.125);
        double fac = std::clamp(fac11 / 0.9, 1.0 / 6.0, 1.0 / 0.333);

        if (!std::isfinite(err)) {
            ++stats.rejected;
            h = hs * 0.25;
            last_rejected = true;
            continue;
        }

        if (err <= 1.0) {
            ++stats.accepted;
            double hnew = hs / fac;
            if (last_rejected) hnew = std::min(hnew, hs);
            last_rejected = false;
            x = x_end;
            std::copy(ynew.begin(), ynew.end(), y.begin());
            if (clipped) {
                ++next_stop;
                hnew = std::max(hnew, h_unclipped);
                h_unclipped = 0.0;
            }
            // Stage 12 is not taken at the accepted solution, so the first
            // stage of the next step needs a fresh evaluation.
            if (next_stop < landing.size()) eval(std::nextafter(x, x1), y, k1);
            h = std::min(hnew, hmax);
            for (double v : y)
                if (!std::isfinite(v)) throw IntegrationError("non-finite solution", x);
            observe(x, std::span<const double>(y), clipped);
        } else {
            ++stats.rejected;
            h = hs / std::min(1.0 / 0.333, fac11 / 0.9);
            last_rejected = true;
        }
    }
    return stats;
}

/// Convenience overload without an observer.
template <class Rhs>
Stats integrate(Rhs&& f, double x0, double x1, std::span<double> y,
                std::span<const double> stops, const Options& opt) {
    return integrate(std::forward<Rhs>(f), x0, x1, y, stops, opt,
                     [](double, std::span<const double>, bool) {});
}

}  // namespace spectra::ode
