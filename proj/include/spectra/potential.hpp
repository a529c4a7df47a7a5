#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spectra {

/// Smooth compactly supported profile  amplitude * b(s / width)  with
/// b(t) = 64 t^3 (1 - t)^3 on [0, 1] (peak 1 at t = 1/2, b, b', b'' vanish at
/// both ends) and 0 elsewhere.
struct BumpProfile {
    double width = 1.0;
    double amplitude = 1.0;

    static double shape(double t) noexcept;
    double operator()(double s) const noexcept { return amplitude * shape(s / width); }
    double sup() const noexcept;
    double integral() const noexcept;          // int W
    double integral_squared() const noexcept;  // int W^2
};

enum class PotentialKind {
    zero,
    square_well,
    wigner_von_neumann,
    pearson_sparse,
    random_decay,
    power_law,
    tabulated,
};

std::string_view to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(std::string_view name);

struct ZeroParams {};

/// V = -depth on [left, right], 0 elsewhere.
struct SquareWellParams {
    double depth = 0.0;
    double left = 0.0;
    double right = 1.0;
};

/// V = 8 sin(2x) / x, V(0) = 16.
struct WignerVonNeumannParams {};

/// V = sum_n a_n W(x - x_n); bump n occupies [x_n, x_n + width].
struct PearsonParams {
    std::vector<double> amplitudes;
    std::vector<double> centers;
    BumpProfile bump;
    // Finite data cannot decide sum a_n^2 < inf; fitted |a_n| ~ n^-p and
    // the flag records p > 1/2.
    double amplitude_decay_exponent = 0.0;
    bool square_summable = false;
    std::vector<double> center_ratios;  // x_n / x_{n-1}
};

/// V = n^-alpha a_n W(x - n), n = 1..horizon_n, a_n iid uniform on [-1, 1].
struct RandomDecayParams {
    double alpha = 1.0;
    std::uint64_t seed = 0;
    BumpProfile bump;
    int horizon_n = 1;
    std::vector<double> amplitudes;  // a_1 .. a_N
};

/// V = amplitude * (1 + x)^-exponent.
struct PowerLawParams {
    double amplitude = 1.0;
    double exponent = 1.0;
};

/// Piecewise cubic Hermite table. A node listed in `jumps` carries a
/// right-limit value/slope distinct from the left limit stored in
/// values/slopes; eval at such a node returns the right limit.
struct TabulatedParams {
    struct Jump {
        std::size_t index = 0;
        double value = 0.0;
        double slope = 0.0;
    };
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> slopes;
    std::vector<Jump> jumps;
};

using PotentialParams = std::variant<ZeroParams, SquareWellParams, WignerVonNeumannParams, PearsonParams,
                                     RandomDecayParams, PowerLawParams, TabulatedParams>;

/// Half-line potential V(x), x >= 0. Immutable; copies share state and
/// evaluation is safe from any number of threads.
class Potential {
public:
    static Potential zero();
    static Potential square_well(double depth, double left, double right);
    static Potential wigner_von_neumann();
    static Potential pearson_sparse(std::vector<double> amplitudes, std::vector<double> centers,
                                    BumpProfile bump);
    static Potential random_decay(double alpha, std::uint64_t seed, BumpProfile bump, int horizon_n);
    static Potential power_law(double amplitude, double exponent);
    static Potential tabulated(std::vector<double> grid, std::vector<double> values,
                               std::vector<double> slopes = {},
                               std::vector<TabulatedParams::Jump> jumps = {});

    Potential();

    PotentialKind kind() const noexcept;
    const PotentialParams& params() const noexcept;

    double eval(double x) const;
    double operator()(double x) const { return eval(x); }

    /// Declared bound e(x) >= |V(x)|, when the kind has one.
    std::optional<double> envelope(double x) const;

    /// V vanishes for x > support_bound(); +inf when not compactly supported.
    double support_bound() const noexcept;

    /// Infimum of the support (where V may first be nonzero).
    double support_onset() const noexcept;

    /// Upper bound for sup |V|.
    double sup_abs() const noexcept;

    /// Points in the open interval (a, b) where V or a low derivative is not
    /// smooth. Integrators land on these.
    std::vector<double> breakpoints(double a, double b) const;

private:
    struct State;
    explicit Potential(std::shared_ptr<const State> s);
    std::shared_ptr<const State> state_;
};

/// Portable uniform draw on [-1, 1] used by random_decay (first draw from a
/// 64-bit Mersenne Twister seeded with `seed`, n-th draw for a_n).
std::vector<double> uniform_amplitudes(std::uint64_t seed, int count);

}  // namespace spectra
