#include "spectra/serialize.hpp"

#include <cmath>

#include "spectra/errors.hpp"

namespace spectra {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

json bump_json(const BumpProfile& b) { return {{"width", b.width}, {"amplitude", b.amplitude}}; }

const json& field(const json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key))
        throw ValidationError(std::string(where) + ": missing field '" + key + "'");
    return j.at(key);
}

double real(const json& j, const char* key, const char* where) {
    const json& v = field(j, key, where);
    if (!v.is_number()) throw ValidationError(std::string(where) + ": '" + key + "' must be a number");
    return v.get<double>();
}

double real_or(const json& j, const char* key, double fallback, const char* where) {
    return j.is_object() && j.contains(key) ? real(j, key, where) : fallback;
}

std::vector<double> reals(const json& j, const char* key, const char* where) {
    const json& v = field(j, key, where);
    if (!v.is_array()) throw ValidationError(std::string(where) + ": '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ValidationError(std::string(where) + ": '" + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

BumpProfile bump_from(const json& p, const char* where) {
    BumpProfile b;
    if (p.contains("bump")) {
        b.width = real_or(p.at("bump"), "width", 1.0, where);
        b.amplitude = real_or(p.at("bump"), "amplitude", 1.0, where);
    }
    return b;
}

}  // namespace

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Potential& v) {
    json params = std::visit(
        overloaded{
            [](const ZeroParams&) { return json::object(); },
            [](const SquareWellParams& p) {
                return json{{"depth", p.depth}, {"left", p.left}, {"right", p.right}};
            },
            [](const WignerVonNeumannParams&) { return json::object(); },
            [](const PearsonParams& p) {
                return json{{"amplitudes", numbers(p.amplitudes)},
                            {"centers", numbers(p.centers)},
                            {"bump", bump_json(p.bump)},
                            {"amplitude_decay_exponent", number(p.amplitude_decay_exponent)},
                            {"square_summable", p.square_summable},
                            {"center_ratios", numbers(p.center_ratios)}};
            },
            [](const RandomDecayParams& p) {
                return json{{"alpha", p.alpha},
                            {"seed", p.seed},
                            {"bump", bump_json(p.bump)},
                            {"horizon_n", p.horizon_n},
                            {"amplitudes", numbers(p.amplitudes)}};
            },
            [](const PowerLawParams& p) { return json{{"amplitude", p.amplitude}, {"exponent", p.exponent}}; },
            [](const TabulatedParams& p) {
                json jumps = json::array();
                for (const auto& jp : p.jumps)
                    jumps.push_back({{"index", jp.index}, {"value", jp.value}, {"slope", jp.slope}});
                return json{{"grid", numbers(p.grid)},
                            {"values", numbers(p.values)},
                            {"slopes", numbers(p.slopes)},
                            {"jumps", jumps}};
            },
        },
        v.params());
    return json{{"kind", std::string(to_string(v.kind()))}, {"params", params}, {"support_bound", number(v.support_bound())}};
}

Potential potential_from_json(const json& j) {
    const char* where = "potential";
    const json& kind_j = field(j, "kind", where);
    if (!kind_j.is_string()) throw ValidationError("potential: 'kind' must be a string");
    const json params = j.contains("params") ? j.at("params") : json::object();
    switch (potential_kind_from_string(kind_j.get<std::string>())) {
        case PotentialKind::zero: return Potential::zero();
        case PotentialKind::square_well:
            return Potential::square_well(real(params, "depth", where), real_or(params, "left", 0.0, where),
                                          real(params, "right", where));
        case PotentialKind::wigner_von_neumann: return Potential::wigner_von_neumann();
        case PotentialKind::pearson_sparse:
            return Potential::pearson_sparse(reals(params, "amplitudes", where), reals(params, "centers", where),
                                             bump_from(params, where));
        case PotentialKind::random_decay: {
            const json& seed = field(params, "seed", where);
            if (!seed.is_number_integer() || seed.get<long long>() < 0)
                throw ValidationError("potential: 'seed' must be a nonnegative integer");
            const json& n = field(params, "horizon_n", where);
            if (!n.is_number_integer()) throw ValidationError("potential: 'horizon_n' must be an integer");
            return Potential::random_decay(real(params, "alpha", where), seed.get<std::uint64_t>(),
                                           bump_from(params, where), n.get<int>());
        }
        case PotentialKind::power_law:
            return Potential::power_law(real(params, "amplitude", where), real(params, "exponent", where));
        case PotentialKind::tabulated: {
            std::vector<TabulatedParams::Jump> jumps;
            if (params.contains("jumps"))
                for (const auto& jp : params.at("jumps"))
                    jumps.push_back({jp.at("index").get<std::size_t>(), real(jp, "value", where), real(jp, "slope", where)});
            return Potential::tabulated(reals(params, "grid", where), reals(params, "values", where),
                                        params.contains("slopes") ? reals(params, "slopes", where) : std::vector<double>{},
                                        std::move(jumps));
        }
    }
    throw ValidationError("potential: unsupported kind");
}

json to_json(const TreePotential& t) {
    json values = json::object();
    for (const auto& [label, v] : t.labels()) values[label] = v;
    return json{{"depth", t.depth()}, {"values", values}};
}

TreePotential tree_from_json(const json& j) {
    const json& d = field(j, "depth", "tree");
    if (!d.is_number_integer()) throw ValidationError("tree: 'depth' must be an integer");
    std::map<std::string, double> values;
    if (j.contains("values")) {
        if (!j.at("values").is_object()) throw ValidationError("tree: 'values' must be an object");
        for (const auto& [label, v] : j.at("values").items()) {
            if (!v.is_number()) throw ValidationError("tree: value at '" + label + "' must be a number");
            values[label] = v.get<double>();
        }
    }
    return TreePotential::from_labels(d.get<int>(), values);
}

json to_json(const SumRuleReport& r) {
    json warnings = r.bound.warnings;
    return json{{"lhs", number(r.lhs_integral)},
                {"tail_estimate", number(r.tail_estimate)},
                {"low_k_estimate", number(r.low_k_estimate)},
                {"eig_sum", number(r.eigenvalue_sum)},
                {"rhs", number(r.rhs)},
                {"residual", number(r.residual)},
                {"error_bar", number(r.error_bar)},
                {"k_max", number(r.k_max)},
                {"k_min", number(r.k_min)},
                {"k_evaluations", r.k_evaluations},
                {"bound_states", numbers(r.bound.energies)},
                {"bound_state_warnings", warnings}};
}

json to_json(const EntropyReport& r) {
    return json{{"s_O", number(r.s_root)},
                {"rhs", number(r.rhs)},
                {"margin", number(r.margin)},
                {"jensen_bound", number(r.jensen_bound)},
                {"jensen_margin", number(r.jensen_margin)},
                {"epsilon_schedule", numbers(r.epsilon_schedule)},
                {"quadrature_nodes", r.quadrature_nodes},
                {"boundary", r.boundary == BoundaryMode::exact ? "exact" : "extrapolated"},
                {"excluded_nodes", numbers(r.excluded_nodes)},
                {"flagged", r.flagged}};
}

json to_json(const WkbReport& r) {
    return json{{"k", r.k},
                {"horizon", r.horizon},
                {"previous_decade_spread", number(r.previous_decade_spread)},
                {"final_decade_spread", number(r.final_decade_spread)},
                {"decreasing", r.decreasing},
                {"resonance_suspected", r.resonance_suspected}};
}

json to_json(const DecayReport& r) {
    return json{{"max_deviation", number(r.max_deviation)},
                {"tail_R2_integral", number(r.tail_R2_integral)},
                {"decade_edges", numbers(r.decade_edges)},
                {"decade_max_deviation", numbers(r.decade_max_deviation)}};
}

}  // namespace spectra
