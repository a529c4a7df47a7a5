#include "spectra/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "spectra/errors.hpp"

namespace spectra {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Index of the last element <= x, or npos when x < v.front().
std::size_t locate(const std::vector<double>& v, double x) {
    auto it = std::upper_bound(v.begin(), v.end(), x);
    if (it == v.begin()) return static_cast<std::size_t>(-1);
    return static_cast<std::size_t>(it - v.begin()) - 1;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

void validate_bump(const BumpProfile& b) {
    if (!(b.width > 0.0) || !std::isfinite(b.width))
        throw ValidationError("bump width must be positive and finite");
    if (!std::isfinite(b.amplitude)) throw ValidationError("bump amplitude must be finite");
}

}  // namespace

double BumpProfile::shape(double t) noexcept {
    if (!(t > 0.0 && t < 1.0)) return 0.0;
    const double s = t * (1.0 - t);
    return 64.0 * s * s * s;
}

double BumpProfile::sup() const noexcept { return std::fabs(amplitude); }

double BumpProfile::integral() const noexcept { return amplitude * width * 16.0 / 35.0; }

double BumpProfile::integral_squared() const noexcept {
    // 4096 * B(7, 7) = 4096 * 6! 6! / 13!
    return amplitude * amplitude * width * (4096.0 * 518400.0 / 6227020800.0);
}

std::string_view to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::zero: return "zero";
        case PotentialKind::square_well: return "square_well";
        case PotentialKind::wigner_von_neumann: return "wigner_von_neumann";
        case PotentialKind::pearson_sparse: return "pearson_sparse";
        case PotentialKind::random_decay: return "random_decay";
        case PotentialKind::power_law: return "power_law";
        case PotentialKind::tabulated: return "tabulated";
    }
    return "unknown";
}

PotentialKind potential_kind_from_string(std::string_view name) {
    for (auto k : {PotentialKind::zero, PotentialKind::square_well, PotentialKind::wigner_von_neumann,
                   PotentialKind::pearson_sparse, PotentialKind::random_decay, PotentialKind::power_law,
                   PotentialKind::tabulated})
        if (to_string(k) == name) return k;
    throw ValidationError("unknown potential kind '" + std::string(name) + "'");
}

struct Potential::State {
    PotentialKind kind;
    PotentialParams params;
    double support_bound = kInf;
    double support_onset = 0.0;
    double sup_abs = 0.0;
    // Tabulated: right-limit overrides, indexed like grid (NaN when none).
    std::vector<double> right_value;
    std::vector<double> right_slope;
};

Potential::Potential() : Potential(zero()) {}

Potential::Potential(std::shared_ptr<const State> s) : state_(std::move(s)) {}

Potential Potential::zero() {
    auto s = std::make_shared<State>();
    s->kind = PotentialKind::zero;
    s->params = ZeroParams{};
    s->support_bound = 0.0;
    return Potential(std::move(s));
}

Potential Potential::square_well(double depth, double left, double right) {
    if (!std::isfinite(depth) || !std::isfinite(left) || !std::isfinite(right))
        throw ValidationError("square well parameters must be finite");
    if (left < 0.0 || !(right > left)) throw ValidationError("square well needs 0 <= left < right");
    auto s = std::make_shared<State>();
    s->kind = PotentialKind::square_well;
    s->params = SquareWellParams{depth, left, right};
    s->support_bound = right;
    s->support_onset = left;
    s->sup_abs = std::fabs(depth);
    return Potential(std::move(s));
}

Potential Potential::wigner_von_neumann() {
    auto s = std::make_shared<State>();
    s->kind = PotentialKind::wigner_von_neumann;
    s->params = WignerVonNeumannParams{};
    s->sup_abs = 16.0;
    return Potential(std::move(s));
}

Potential Potential::pearson_sparse(std::vector<double> amplitudes, std::vector<double> centers,
                                    BumpProfile bump) {
    validate_bump(bump);
    if (amplitudes.size() != centers.size())
        throw ValidationError("pearson_sparse: amplitudes and centers differ in length");
    if (amplitudes.empty()) throw ValidationError("pearson_sparse: need at least one bump");
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (!std::isfinite(centers[i]) || !std::isfinite(amplitudes[i]))
            throw ValidationError("pearson_sparse: non-finite input");
        if (centers[i] < 0.0) throw ValidationError("pearson_sparse: centers must be >= 0");
        if (i > 0 && !(centers[i] - centers[i - 1] > bump.width))
            throw ValidationError("pearson_sparse: bumps " + std::to_string(i - 1) + " and " +
                                  std::to_string(i) + " overlap");
    }
    PearsonParams p{std::move(amplitudes), std::move(centers), bump, 0.0, false, {}};
    for (std::size_t i = 1; i < p.centers.size(); ++i)
        p.center_ratios.push_back(p.centers[i - 1] > 0.0 ? p.centers[i] / p.centers[i - 1] : kInf);

    // Decay law of |a_n| from the nonzero tail: sum a_n^2 < inf iff p > 1/2.
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < p.amplitudes.size(); ++i)
        if (p.amplitudes[i] != 0.0) {
            lx.push_back(std::log(static_cast<double>(i + 1)));
            ly.push_back(std::log(std::fabs(p.amplitudes[i])));
        }
    if (lx.size() >= 3) {
        p.amplitude_decay_exponent = -least_squares_slope(lx, ly);
        p.square_summable = p.amplitude_decay_exponent > 0.5;
    } else {
        // Too short to see a trend; a finite list is trivially summable.
        p.amplitude_decay_exponent = kInf;
        p.square_summable = true;
    }

    auto s = std::make_shared<State>();
    s->kind = PotentialKind::pearson_sparse;
    double sup = 0.0;
    for (double a : p.amplitudes) sup = std::max(sup, std::fabs(a));
    s->sup_abs = sup * bump.sup();
    s->support_onset = p.centers.front();
    s->support_bound = p.centers.back() + bump.width;
    s->params = std::move(p);
    return Potential(std::move(s));
}

std::vector<double> uniform_amplitudes(std::uint64_t seed, int count) {
    std::mt19937_64 gen(seed);
    std::vector<double> a(static_cast<std::size_t>(std::max(count, 0)));
    for (auto& v : a) {
        // 53 random mantissa bits; identical on every platform.
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        v = 2.0 * u - 1.0;
    }
    return a;
}

Potential Potential::random_decay(double alpha, std::uint64_t seed, BumpProfile bump, int horizon_n) {
    validate_bump(bump);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("random_decay: alpha must be > 0");
    if (horizon_n < 1) throw ValidationError("random_decay: horizon_n must be >= 1");
    if (bump.width > 1.0) throw ValidationError("random_decay: bump width must be <= 1");
    RandomDecayParams p{alpha, seed, bump, horizon_n, uniform_amplitudes(seed, horizon_n)};
    auto s = std::make_shared<State>();
    s->kind = PotentialKind::random_decay;
    double sup = 0.0;
    for (int n = 1; n <= horizon_n; ++n)
        sup = std::max(sup, std::fabs(p.amplitudes[n - 1]) * std::pow(n, -alpha));
    s->sup_abs = sup * bump.sup();
    s->support_onset = 1.0;
    s->support_bound = horizon_n + bump.width;
    s->params = std::move(p);
    return Potential(std::move(s));
}

Potential Potential::power_law(double amplitude, double exponent) {
    if (!std::isfinite(amplitude) || !std::isfinite(exponent) || exponent < 0.0)
        throw ValidationError("power_law: need finite amplitude and exponent >= 0");
    auto s = std::make_shared<State>();
    s->kind = PotentialKind::power_law;
    s->params = PowerLawParams{amplitude, exponent};
    s->sup_abs = std::fabs(amplitude);
    return Potential(std::move(s));
}

Potential Potential::tabulated(std::vector<double> grid, std::vector<double> values,
                               std::vector<double> slopes, std::vector<TabulatedParams::Jump> jumps) {
    const std::size_t n = grid.size();
    if (n < 2) throw ValidationError("tabulated: need at least two grid points");
    if (values.size() != n) throw ValidationError("tabulated: grid and values differ in length");
    if (!slopes.empty() && slopes.size() != n)
        throw ValidationError("tabulated: grid and slopes differ in length");
    if (grid.front() < 0.0) throw ValidationError("tabulated: grid must start at x >= 0");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(grid[i]) || !std::isfinite(values[i]))
            throw ValidationError("tabulated: non-finite entry");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ValidationError("tabulated: grid must be strictly increasing");
    }
    if (slopes.empty()) {
        // Three-point derivative on the nonuniform grid; one-sided at ends.
        slopes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0 || i == n - 1) {
                const std::size_t a = i == 0 ? 0 : n - 2;
                slopes[i] = (values[a + 1] - values[a]) / (grid[a + 1] - grid[a]);
            } else {
                const double h0 = grid[i] - grid[i - 1], h1 = grid[i + 1] - grid[i];
                slopes[i] = (values[i + 1] - values[i]) * h0 / (h1 * (h0 + h1)) +
                            (values[i] - values[i - 1]) * h1 / (h0 * (h0 + h1));
            }
        }
    }
    auto s = std::make_shared<State>();
    s->kind = PotentialKind::tabulated;
    s->right_value.assign(n, std::numeric_limits<double>::quiet_NaN());
    s->right_slope.assign(n, std::numeric_limits<double>::quiet_NaN());
    double sup = 0.0;
    for (double v : values) sup = std::max(sup, std::fabs(v));
    for (const auto& j : jumps) {
        if (j.index >= n) throw ValidationError("tabulated: jump index out of range");
        if (!std::isfinite(j.value) || !std::isfinite(j.slope))
            throw ValidationError("tabulated: non-finite jump data");
        s->right_value[j.index] = j.value;
        s->right_slope[j.index] = j.slope;
        sup = std::max(sup, std::fabs(j.value));
    }
    s->sup_abs = sup;
    s->support_onset = grid.front();
    s->support_bound = grid.back();
    s->params = TabulatedParams{std::move(grid), std::move(values), std::move(slopes), std::move(jumps)};
    return Potential(std::move(s));
}

PotentialKind Potential::kind() const noexcept { return state_->kind; }
const PotentialParams& Potential::params() const noexcept { return state_->params; }
double Potential::support_bound() const noexcept { return state_->support_bound; }
double Potential::support_onset() const noexcept { return state_->support_onset; }
double Potential::sup_abs() const noexcept { return state_->sup_abs; }

double Potential::eval(double x) const {
    if (!(x >= 0.0)) throw DomainError("potential evaluated at negative or NaN x=" + std::to_string(x));
    const State& st = *state_;
    return std::visit(
        overloaded{
            [](const ZeroParams&) { return 0.0; },
            [x](const SquareWellParams& p) { return (x >= p.left && x <= p.right) ? -p.depth : 0.0; },
            [x](const WignerVonNeumannParams&) {
                if (x < 1e-4) {
                    const double t = 4.0 * x * x;
                    return 16.0 * (1.0 - t / 6.0 + t * t / 120.0);
                }
                return 8.0 * std::sin(2.0 * x) / x;
            },
            [x](const PearsonParams& p) {
                const std::size_t i = locate(p.centers, x);
                if (i == static_cast<std::size_t>(-1)) return 0.0;
                return p.amplitudes[i] * p.bump(x - p.centers[i]);
            },
            [x](const RandomDecayParams& p) {
                const double fl = std::floor(x);
                if (fl < 1.0 || fl > p.horizon_n) return 0.0;
                const int n = static_cast<int>(fl);
                const double w = p.bump(x - fl);
                if (w == 0.0) return 0.0;
                return std::pow(static_cast<double>(n), -p.alpha) * p.amplitudes[n - 1] * w;
            },
            [x](const PowerLawParams& p) { return p.amplitude * std::pow(1.0 + x, -p.exponent); },
            [x, &st](const TabulatedParams& p) {
                const auto& g = p.grid;
                if (x < g.front() || x > g.back()) return 0.0;
                std::size_t i = locate(g, x);
                if (i == g.size() - 1) {
                    return p.values[i];
                }
                double v0 = p.values[i], m0 = p.slopes[i];
                if (!std::isnan(st.right_value[i])) {
                    v0 = st.right_value[i];
                    m0 = st.right_slope[i];
                }
                if (x == g[i]) return v0;
                const double v1 = p.values[i + 1], m1 = p.slopes[i + 1];
                const double h = g[i + 1] - g[i];
                const double t = (x - g[i]) / h;
                const double t2 = t * t, t3 = t2 * t;
                return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * v1 +
                       (t3 - t2) * h * m1;
            },
        },
        st.params);
}

std::optional<double> Potential::envelope(double x) const {
    if (!(x >= 0.0)) throw DomainError("envelope evaluated at negative x");
    return std::visit(
        overloaded{
            [](const ZeroParams&) -> std::optional<double> { return 0.0; },
            [x](const SquareWellParams& p) -> std::optional<double> {
                return (x >= p.left && x <= p.right) ? std::fabs(p.depth) : 0.0;
            },
            [x](const WignerVonNeumannParams&) -> std::optional<double> { return x <= 1.0 ? 16.0 : 8.0 / x; },
            [x](const PearsonParams& p) -> std::optional<double> {
                const std::size_t i = locate(p.centers, x);
                if (i == static_cast<std::size_t>(-1) || x > p.centers[i] + p.bump.width) return 0.0;
                return std::fabs(p.amplitudes[i]) * p.bump.sup();
            },
            [x](const RandomDecayParams& p) -> std::optional<double> {
                const double fl = std::floor(x);
                if (fl < 1.0 || fl > p.horizon_n) return 0.0;
                return std::pow(fl, -p.alpha) * p.bump.sup();
            },
            [x](const PowerLawParams& p) -> std::optional<double> {
                return std::fabs(p.amplitude) * std::pow(1.0 + x, -p.exponent);
            },
            [](const TabulatedParams&) -> std::optional<double> { return std::nullopt; },
        },
        state_->params);
}

std::vector<double> Potential::breakpoints(double a, double b) const {
    const double lo = std::min(a, b), hi = std::max(a, b);
    std::vector<double> out;
    auto add = [&](double x) {
        if (x > lo && x < hi) out.push_back(x);
    };
    std::visit(overloaded{
                   [](const ZeroParams&) {},
                   [&](const SquareWellParams& p) {
                       add(p.left);
                       add(p.right);
                   },
                   [](const WignerVonNeumannParams&) {},
                   [&](const PearsonParams& p) {
                       for (double c : p.centers) {
                           add(c);
                           add(c + p.bump.width);
                       }
                   },
                   [&](const RandomDecayParams& p) {
                       const int first = std::max(1, static_cast<int>(std::floor(lo)));
                       const int last = std::min(p.horizon_n, static_cast<int>(std::ceil(hi)));
                       for (int n = first; n <= last; ++n) {
                           add(n);
                           add(n + p.bump.width);
                       }
                   },
                   [](const PowerLawParams&) {},
                   [&](const TabulatedParams& p) {
                       auto it = std::upper_bound(p.grid.begin(), p.grid.end(), lo);
                       for (; it != p.grid.end() && *it < hi; ++it) out.push_back(*it);
                   },
               },
               state_->params);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace spectra
