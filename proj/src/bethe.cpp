#include "spectra/bethe.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "spectra/errors.hpp"
#include "spectra/quadrature.hpp"

namespace spectra {

namespace {

using C = std::complex<double>;

std::size_t offset(int level) { return (std::size_t{1} << level) - 1; }

void check_depth(int depth) {
    if (depth < 0 || depth > 24) throw ValidationError("tree depth must lie in [0, 24]");
}

// Bottom-up recursion with `boundary` as the m-value of every vertex below
// the depth.
C fold_green(const TreePotential& t, C z, C boundary) {
    const int R = t.depth();
    std::vector<C> below(std::size_t{1} << (R + 1), boundary);
    for (int level = R; level >= 0; --level) {
        const std::size_t width = std::size_t{1} << level;
        std::vector<C> here(width);
        for (std::size_t i = 0; i < width; ++i)
            here[i] = 1.0 / (t.at(level, i) - z - below[2 * i] - below[2 * i + 1]);
        below = std::move(here);
    }
    return below[0];
}

}  // namespace

TreePotential::TreePotential(int depth) : depth_(depth) {
    check_depth(depth);
    values_.assign(offset(depth + 1), 0.0);
}

TreePotential TreePotential::from_labels(int depth, const std::map<std::string, double>& values) {
    TreePotential t(depth);
    for (const auto& [label, v] : values) {
        if (static_cast<int>(label.size()) > depth)
            throw ValidationError("tree label '" + label + "' deeper than depth " + std::to_string(depth));
        std::size_t idx = 0;
        for (char c : label) {
            if (c != '0' && c != '1') throw ValidationError("tree label '" + label + "' is not a binary string");
            idx = 2 * idx + static_cast<std::size_t>(c - '0');
        }
        if (!std::isfinite(v)) throw ValidationError("tree value at '" + label + "' is not finite");
        t.set(static_cast<int>(label.size()), idx, v);
    }
    return t;
}

TreePotential TreePotential::random(int depth, std::uint64_t seed, double lo, double hi) {
    if (!(hi >= lo)) throw ValidationError("random tree: need lo <= hi");
    TreePotential t(depth);
    std::mt19937_64 gen(seed);
    for (auto& v : t.values_) v = lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return t;
}

double TreePotential::at(int level, std::size_t index) const {
    if (level < 0 || level > depth_ || index >= (std::size_t{1} << level))
        throw DomainError("tree vertex out of range");
    return values_[offset(level) + index];
}

void TreePotential::set(int level, std::size_t index, double value) {
    if (level < 0 || level > depth_ || index >= (std::size_t{1} << level))
        throw DomainError("tree vertex out of range");
    values_[offset(level) + index] = value;
}

double TreePotential::at(const std::string& label) const {
    if (static_cast<int>(label.size()) > depth_) return 0.0;
    std::size_t idx = 0;
    for (char c : label) {
        if (c != '0' && c != '1') throw ValidationError("tree label '" + label + "' is not a binary string");
        idx = 2 * idx + static_cast<std::size_t>(c - '0');
    }
    return at(static_cast<int>(label.size()), idx);
}

std::string TreePotential::label(int level, std::size_t index) {
    std::string s(static_cast<std::size_t>(level), '0');
    for (int b = level - 1; b >= 0; --b, index >>= 1) s[static_cast<std::size_t>(b)] = (index & 1) ? '1' : '0';
    return s;
}

TreePotential TreePotential::subtree(int level, std::size_t index) const {
    if (level == depth_ + 1) return TreePotential(0);
    if (level < 0 || level > depth_ || index >= (std::size_t{1} << level))
        throw DomainError("subtree vertex out of range");
    TreePotential t(depth_ - level);
    for (int d = 0; d <= t.depth_; ++d)
        for (std::size_t j = 0; j < (std::size_t{1} << d); ++j) t.set(d, j, at(level + d, (index << d) + j));
    return t;
}

TreePotential TreePotential::with_children_swapped(int level, std::size_t index) const {
    if (level < 0 || level > depth_ || index >= (std::size_t{1} << level))
        throw DomainError("swap vertex out of range");
    TreePotential t = *this;
    for (int d = 1; level + d <= depth_; ++d) {
        const std::size_t half = std::size_t{1} << (d - 1);
        const std::size_t base = (index << d);
        for (std::size_t j = 0; j < half; ++j) {
            t.set(level + d, base + j, at(level + d, base + half + j));
            t.set(level + d, base + half + j, at(level + d, base + j));
        }
    }
    return t;
}

double TreePotential::weighted_square_mass() const {
    double total = 0.0;
    for (int n = 0; n <= depth_; ++n) {
        double s = 0.0;
        for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) s += at(n, i) * at(n, i);
        total += std::ldexp(s, -n);
    }
    return total;
}

bool TreePotential::is_zero() const {
    for (double v : values_)
        if (v != 0.0) return false;
    return true;
}

std::map<std::string, double> TreePotential::labels() const {
    std::map<std::string, double> out;
    for (int n = 0; n <= depth_; ++n)
        for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) out[label(n, i)] = at(n, i);
    return out;
}

C m_free(C z) {
    const C s = std::sqrt(z * z - 8.0);
    const C r1 = (-z + s) / 4.0, r2 = (-z - s) / 4.0;
    if (z.imag() == 0.0 && std::fabs(z.real()) < kBandEdge)
        return {-z.real() / 4.0, std::sqrt(8.0 - z.real() * z.real()) / 4.0};
    return r1.imag() >= r2.imag() ? r1 : r2;
}

C green_root(const TreePotential& tree, C z) {
    if (!(z.imag() > 0.0)) throw DomainError("green_root: Im z must be positive");
    return fold_green(tree, z, m_free(z));
}

C green_root_boundary(const TreePotential& tree, double lambda) {
    if (!(std::fabs(lambda) < kBandEdge)) throw DomainError("green_root_boundary: lambda outside the band");
    return fold_green(tree, C(lambda, 0.0), m_free(C(lambda, 0.0)));
}

double free_density(double lambda) {
    if (!(std::fabs(lambda) < kBandEdge)) return 0.0;
    return std::sqrt(8.0 - lambda * lambda) / (4.0 * std::numbers::pi);
}

DensityEstimate spectral_density_root(const TreePotential& tree, double lambda,
                                      const std::vector<double>& schedule) {
    if (!(std::fabs(lambda) < kBandEdge)) throw DomainError("spectral_density_root: lambda outside the band");
    if (schedule.empty()) throw ValidationError("spectral_density_root: empty epsilon schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i)
        if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] < schedule[i - 1])))
            throw ValidationError("spectral_density_root: schedule must be positive and decreasing");

    DensityEstimate est;
    const std::size_t n = schedule.size();
    for (double eps : schedule)
        est.samples.push_back(green_root(tree, C(lambda, eps)).imag() / std::numbers::pi);

    // Neville at eps = 0.
    std::vector<double> p = est.samples;
    double previous_top = p.back();
    for (std::size_t m = 1; m < n; ++m) {
        if (m + 1 == n) previous_top = p[n - 1];
        for (std::size_t i = n - 1; i >= m; --i) {
            const double xi = schedule[i], xj = schedule[i - m];
            p[i] = (xj * p[i] - xi * p[i - 1]) / (xj - xi);
        }
    }
    est.value = p.back();
    est.error = n > 1 ? std::fabs(p.back() - previous_top) : std::fabs(est.samples.back());
    for (std::size_t i = 2; i < n; ++i) {
        const double d1 = est.samples[i - 1] - est.samples[i - 2];
        const double d2 = est.samples[i] - est.samples[i - 1];
        if (std::fabs(d2) > std::fabs(d1) || d1 * d2 < 0.0) est.flagged = true;
    }
    return est;
}

EntropyResult root_entropy(const TreePotential& tree, const EntropyConfig& cfg) {
    if (cfg.quadrature_nodes < 32) throw ValidationError("root_entropy: need at least 32 quadrature nodes");
    const auto rule = quad::chebyshev_u_probability(static_cast<std::size_t>(cfg.quadrature_nodes));
    const std::size_t n = rule.nodes.size();
    std::vector<double> terms(n, 0.0);
    std::vector<char> excluded(n, 0), flagged(n, 0);
    for_each_index(n, cfg.exec, [&](std::size_t i) {
        const double lambda = kBandEdge * rule.nodes[i];
        double density;
        if (cfg.boundary == BoundaryMode::exact) {
            density = green_root_boundary(tree, lambda).imag() / std::numbers::pi;
        } else {
            const auto est = spectral_density_root(tree, lambda, cfg.epsilon_schedule);
            density = est.value;
            flagged[i] = est.flagged;
        }
        const double rho = density / free_density(lambda);
        if (!(rho > 0.0) || !std::isfinite(rho)) {
            excluded[i] = 1;
            return;
        }
        terms[i] = rule.weights[i] * std::log(rho);
    });
    EntropyResult r;
    for (std::size_t i = 0; i < n; ++i) {
        r.value += terms[i];
        if (excluded[i]) r.excluded_nodes.push_back(kBandEdge * rule.nodes[i]);
        if (flagged[i]) r.flagged = true;
    }
    return r;
}

double pearson_rhs(const TreePotential& tree) {
    const int R = tree.depth();
    std::vector<double> below(std::size_t{1} << (R + 1), 1.0);
    for (int level = R; level >= 0; --level) {
        const std::size_t width = std::size_t{1} << level;
        std::vector<double> here(width);
        for (std::size_t i = 0; i < width; ++i) {
            const double v = tree.at(level, i);
            here[i] = std::exp(-0.25 * v * v) * 0.5 * (below[2 * i] + below[2 * i + 1]);
        }
        below = std::move(here);
    }
    return below[0];
}

EntropyReport verify_pearson(const TreePotential& tree, const EntropyConfig& cfg) {
    EntropyReport rep;
    const auto s = root_entropy(tree, cfg);
    rep.s_root = s.value;
    rep.excluded_nodes = s.excluded_nodes;
    rep.flagged = s.flagged;
    rep.rhs = pearson_rhs(tree);
    rep.margin = rep.s_root - std::log(rep.rhs);
    rep.jensen_bound = -0.25 * tree.weighted_square_mass();
    rep.jensen_margin = rep.s_root - rep.jensen_bound;
    rep.epsilon_schedule = cfg.epsilon_schedule;
    rep.quadrature_nodes = cfg.quadrature_nodes;
    rep.boundary = cfg.boundary;
    return rep;
}

StepCheck step_inequality_check(const TreePotential& tree, int level, std::size_t index, const EntropyConfig& cfg) {
    StepCheck c;
    const auto sv = root_entropy(tree.subtree(level, index), cfg);
    const auto s0 = root_entropy(tree.subtree(level + 1, 2 * index), cfg);
    const auto s1 = root_entropy(tree.subtree(level + 1, 2 * index + 1), cfg);
    c.s_vertex = sv.value;
    c.s_child0 = s0.value;
    c.s_child1 = s1.value;
    c.flagged = sv.flagged || s0.flagged || s1.flagged;
    const double v = tree.at(level, index);
    c.margin = c.s_vertex - std::log(0.5 * (std::exp(c.s_child0) + std::exp(c.s_child1))) + 0.25 * v * v;
    return c;
}

}  // namespace spectra
