#include "spectra/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spectra/csv.hpp"
#include "spectra/errors.hpp"
#include "spectra/sweep.hpp"

namespace spectra {

namespace {

namespace fs = std::filesystem;

// Parameter record that remembers which keys were read, so that typos in
// a config are reported instead of silently ignored.
class Params {
public:
    Params(const json& j, std::string where) : j_(j.is_null() ? json::object() : j), where_(std::move(where)) {
        if (!j_.is_object()) throw ValidationError(where_ + " must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) throw ValidationError(where_ + ": missing '" + key + "'");
        return j_.at(key);
    }

    double real(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ValidationError(where_ + ": missing '" + key + "'");
        }
        const json& v = raw(key);
        if (!v.is_number()) throw ValidationError(where_ + ": '" + key + "' must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ValidationError(where_ + ": '" + key + "' must be finite");
        return x;
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double x = real(key, fallback);
        if (!(x > 0.0)) throw ValidationError(where_ + ": '" + key + "' must be positive");
        return x;
    }

    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ValidationError(where_ + ": missing '" + key + "'");
        }
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ValidationError(where_ + ": '" + key + "' must be an integer");
        return v.get<long long>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ValidationError(where_ + ": '" + key + "' must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_string()) throw ValidationError(where_ + ": '" + key + "' must be a string");
        return v.get<std::string>();
    }

    std::vector<double> reals(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ValidationError(where_ + ": missing '" + key + "'");
        }
        const json& v = raw(key);
        if (!v.is_array()) throw ValidationError(where_ + ": '" + key + "' must be an array");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number() || !std::isfinite(x.get<double>()))
                throw ValidationError(where_ + ": '" + key + "' must hold finite numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!used_.count(key)) throw ValidationError(where_ + ": unknown parameter '" + key + "'");
    }

private:
    json j_;
    std::string where_;
    std::set<std::string> used_;
};

ode::Tolerance tolerances(const json& config) {
    ode::Tolerance tol;
    if (!config.contains("tolerances")) return tol;
    Params p(config.at("tolerances"), "tolerances");
    tol.rtol = p.positive("rtol", tol.rtol);
    tol.atol = p.positive("atol", tol.atol);
    p.finish();
    return tol;
}

std::uint64_t base_seed(const json& config) {
    if (!config.contains("seed")) return 0;
    const json& s = config.at("seed");
    if (!s.is_number_integer() || s.get<long long>() < 0) throw ValidationError("seed must be a nonnegative integer");
    return s.get<std::uint64_t>();
}

std::string label_of(Growth g) { return std::string(to_string(g)); }

std::vector<double> k_values(Params& p) {
    std::vector<double> ks;
    if (p.has("k_values")) {
        ks = p.reals("k_values");
    } else {
        const double lo = p.real("k_min"), hi = p.real("k_max"), step = p.positive("k_step");
        if (!(hi >= lo)) throw ValidationError("k_max must be >= k_min");
        const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
        for (long i = 0; i <= n; ++i) ks.push_back(lo + static_cast<double>(i) * step);
    }
    if (ks.empty()) throw ValidationError("empty k grid");
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (!(ks[i] > 0.0)) throw ValidationError("k values must be positive");
        if (i > 0 && !(ks[i] > ks[i - 1])) throw ValidationError("k values must increase");
    }
    return ks;
}

std::function<double(double)> h_from(const json& j) {
    Params p(j, "h");
    const std::string kind = p.string("kind", "");
    std::function<double(double)> h;
    if (kind == "constant") {
        const double c = p.real("value");
        h = [c](double) { return c; };
    } else if (kind == "log") {
        const double shift = p.real("shift", 2.0);
        if (!(shift >= 1.0)) throw ValidationError("h: log shift must be >= 1");
        h = [shift](double x) { return std::log(shift + x); };
    } else if (kind == "power") {
        const double scale = p.real("scale", 1.0), e = p.real("exponent");
        h = [scale, e](double x) { return scale * std::pow(1.0 + x, e); };
    } else {
        throw ValidationError("h: kind must be constant, log or power");
    }
    p.finish();
    return h;
}

ConstructionConfig construction_from(Params& p, const ode::Tolerance& tol) {
    ConstructionConfig c;
    c.h = h_from(p.raw("h"));
    c.momenta = p.reals("momenta");
    if (p.has("anchors")) {
        const json& a = p.raw("anchors");
        if (a.is_string()) {
            if (a.get<std::string>() != "auto") throw ValidationError("anchors must be \"auto\" or an array");
        } else {
            c.anchors = a.get<std::vector<double>>();
        }
    }
    c.anchor_candidates = p.reals("anchor_candidates", std::vector<double>{});
    c.horizon = p.positive("horizon", 1e4);
    c.cross_budget = p.has("cross_budget") && p.raw("cross_budget").is_null() ? INFINITY : p.positive("cross_budget", 1.0);
    c.theta0 = p.real("theta0", c.theta0);
    c.grid_step = p.real("grid_step", 0.0);
    c.enforce_growth_cap = p.boolean("enforce_growth_cap", false);
    c.tol = tol;
    validate_construction(c);
    return c;
}

std::string csv_text(const std::function<void(std::ostream&)>& body) {
    std::ostringstream os;
    body(os);
    return os.str();
}

// ---- experiments -----------------------------------------------------------

RunOutput embedded_scan_run(const json& config) {
    Params p(config.value("parameters", json::object()), "parameters");
    const auto tol = tolerances(config);
    const auto ks = k_values(p);
    ScanConfig sc;
    sc.integrator.tol = tol;
    sc.horizon = p.positive("horizon", 1e4);
    const auto window = p.reals("window", std::vector<double>{1e2, sc.horizon});
    if (window.size() != 2) throw ValidationError("window must be [lo, hi]");
    sc.window = {window[0], window[1]};
    if (!(sc.window.lo > 0.0 && sc.window.hi > sc.window.lo && sc.window.hi <= sc.horizon))
        throw ValidationError("window must satisfy 0 < lo < hi <= horizon");
    if (std::log10(sc.window.hi / sc.window.lo) < 1.0 - 1e-12) throw ValidationError("window shorter than a decade");
    sc.subordinate_horizon = p.real("subordinate_horizon", 10.0 * sc.horizon);
    if (!(sc.subordinate_horizon >= sc.horizon)) throw ValidationError("subordinate_horizon must be >= horizon");

    Potential v;
    json construction = nullptr;
    if (p.has("construct")) {
        Params cp(p.raw("construct"), "parameters.construct");
        const auto cfg = construction_from(cp, tol);
        cp.finish();
        p.finish();
        const auto res = build_resonant_potential(cfg);
        v = res.potential;
        construction = json{{"anchors", res.anchors}, {"momenta", cfg.momenta}};
    } else {
        v = potential_from_json(p.raw("potential"));
        p.finish();
    }

    const auto scan = embedded_scan(v, ks, sc);
    RunOutput out;
    out.files["scan.csv"] = csv_text([&](std::ostream& os) {
        auto meta = csv::tolerance_meta(tol);
        meta.push_back({"horizon", csv::format(sc.horizon)});
        meta.push_back({"window", csv::format(sc.window.lo) + ":" + csv::format(sc.window.hi)});
        csv::Writer w(os, meta, {"k", "forward_slope", "subordinate_slope", "label"});
        for (const auto& r : scan.rows)
            w.row({csv::format(r.k), csv::format(r.forward_slope), csv::format(r.subordinate_slope), label_of(r.label)});
    });
    double min_slope = INFINITY, min_k = 0.0;
    for (const auto& r : scan.rows)
        if (r.subordinate_slope < min_slope) min_slope = r.subordinate_slope, min_k = r.k;
    out.summary = json{{"rows", scan.rows.size()},
                       {"decaying_momenta", scan.decaying_momenta},
                       {"decaying_energy_sum", scan.decaying_energy_sum},
                       {"min_subordinate_slope", number(min_slope)},
                       {"min_subordinate_slope_k", min_k}};
    if (!construction.is_null()) out.summary["construction"] = construction;
    out.resolved = json{{"k_values", ks},
                        {"horizon", sc.horizon},
                        {"window", {sc.window.lo, sc.window.hi}},
                        {"subordinate_horizon", sc.subordinate_horizon},
                        {"theta0", sc.theta0},
                        {"steps_per_period", sc.integrator.steps_per_period},
                        {"rtol", tol.rtol},
                        {"atol", tol.atol},
                        {"slope_thresholds", {-kGrowthThreshold, kGrowthThreshold}},
                        {"potential", construction.is_null() ? to_json(v) : json("constructed")}};
    return out;
}

RunOutput construct_run(const json& config) {
    Params p(config.value("parameters", json::object()), "parameters");
    const auto tol = tolerances(config);
    const auto cfg = construction_from(p, tol);
    const long long stride = p.integer("output_stride", 20);
    if (stride < 1) throw ValidationError("output_stride must be >= 1");
    p.finish();

    const auto res = build_resonant_potential(cfg);
    RunOutput out;
    const auto& g = res.grid;
    const std::size_t step = static_cast<std::size_t>(stride);
    auto keep = [&](std::size_t i) { return i % step == 0 || i + 1 == g.size(); };
    out.files["potential.csv"] = csv_text([&](std::ostream& os) {
        auto meta = csv::tolerance_meta(tol);
        meta.push_back({"output_stride", std::to_string(stride)});
        csv::Writer w(os, meta, {"x", "V"});
        for (std::size_t i = 0; i < g.size(); ++i)
            if (keep(i)) w.row({g[i], res.potential.eval(g[i])});
    });
    json decay = json::array();
    for (std::size_t j = 0; j < res.traces.size(); ++j) {
        const auto& tr = res.traces[j];
        out.files["trace_" + std::to_string(j) + ".csv"] = csv_text([&](std::ostream& os) {
            auto meta = csv::tolerance_meta(tol);
            meta.insert(meta.begin(), {"k", csv::format(tr.k)});
            meta.push_back({"output_stride", std::to_string(stride)});
            csv::Writer w(os, meta, {"x", "theta", "log_R2", "decay_target"});
            for (std::size_t i = 0; i < g.size(); ++i)
                if (keep(i)) w.row({g[i], tr.theta[i], tr.log_R2[i], res.decay_targets[j][i]});
        });
        json d = to_json(verify_decay(res, j));
        d["k"] = tr.k;
        decay.push_back(d);
    }
    json trials = json::array();
    for (const auto& c : res.anchor_choices) {
        json t = json::array();
        for (const auto& tr : c.trials)
            t.push_back({{"candidate", tr.candidate}, {"max_cross", tr.max_cross}, {"accepted", tr.accepted}});
        trials.push_back(t);
    }
    json cross = json::array();
    for (std::size_t n = 0; n < res.cross_sup.size(); ++n)
        for (std::size_t j = 0; j < n; ++j) cross.push_back({{"j", j}, {"n", n}, {"sup", res.cross_sup[n][j]}});
    out.summary = json{{"momenta", cfg.momenta},
                       {"anchors", res.anchors},
                       {"anchor_policy", cfg.anchors.empty() ? "auto" : "manual"},
                       {"anchor_trials", trials},
                       {"cross_budget", number(res.cross_budget)},
                       {"cross_integrals", cross},
                       {"within_budget", res.within_budget},
                       {"verification", "horizon-limited"},
                       {"horizon", cfg.horizon},
                       {"grid_points", g.size()},
                       {"theta0", res.theta0},
                       {"growth_cap_ratio", res.growth_cap_ratio},
                       {"sum_energies", res.sum_energies},
                       {"decay", decay}};
    out.resolved = json{{"momenta", cfg.momenta},
                        {"anchors", res.anchors},
                        {"anchor_candidates", cfg.anchor_candidates.empty() ? default_anchor_candidates(cfg.horizon)
                                                                            : cfg.anchor_candidates},
                        {"horizon", cfg.horizon},
                        {"cross_budget", number(cfg.cross_budget)},
                        {"theta0", cfg.theta0},
                        {"grid_step", res.grid.size() > 1 ? res.grid[1] - res.grid[0] : 0.0},
                        {"enforce_growth_cap", cfg.enforce_growth_cap},
                        {"output_stride", stride},
                        {"rtol", tol.rtol},
                        {"atol", tol.atol}};
    return out;
}

RunOutput sumrule_run(const json& config) {
    Params p(config.value("parameters", json::object()), "parameters");
    SumRuleConfig sc;
    const auto tol = tolerances(config);
    if (config.contains("tolerances")) sc.jost.tol = tol;
    const auto v = potential_from_json(p.raw("potential"));
    sc.k_min = p.positive("k_min", sc.k_min);
    sc.k_max = p.real("k_max", 0.0);
    sc.nodes_per_panel = static_cast<int>(p.integer("nodes_per_panel", sc.nodes_per_panel));
    sc.panel_width = p.real("panel_width", 0.0);
    p.finish();
    if (!std::isfinite(v.support_bound())) throw ValidationError("sumrule needs a compactly supported potential");

    const auto rep = sum_rule_residual(v, sc);
    RunOutput out;
    // Re-evaluate the Jost data on a coarse diagnostic grid for the CSV.
    std::vector<double> ks;
    for (int i = 1; i <= 400; ++i) ks.push_back(rep.k_max * i / 400.0);
    const auto data = jost_coefficients(v, ks, sc.jost);
    out.files["scattering.csv"] = csv_text([&](std::ostream& os) { csv::write_scattering(os, data, sc.jost); });
    out.files["sumrule.json"] = to_json(rep).dump(2) + "\n";
    out.summary = to_json(rep);
    out.summary["relative_residual"] = rep.rhs != 0.0 ? number(rep.residual / rep.rhs) : json(0.0);
    out.resolved = json{{"potential", to_json(v)},
                        {"k_min", sc.k_min},
                        {"k_max", rep.k_max},
                        {"nodes_per_panel", sc.nodes_per_panel},
                        {"panel_width", sc.panel_width},
                        {"jost_rtol", sc.jost.tol.rtol},
                        {"jost_atol", sc.jost.tol.atol},
                        {"steps_per_period", sc.jost.steps_per_period},
                        {"bound_state_grid_points", sc.bound.grid_points},
                        {"bound_state_energy_tol", sc.bound.energy_tol},
                        {"csv_k_grid", "400 uniform points on (0, k_max]"}};
    return out;
}

RunOutput wkb_run(const json& config) {
    Params p(config.value("parameters", json::object()), "parameters");
    WkbConfig wc;
    if (config.contains("tolerances")) wc.tol = tolerances(config);
    const auto v = potential_from_json(p.raw("potential"));
    const auto ks = p.reals("k");
    const double X = p.positive("horizon", 1e4);
    wc.points_per_decade = static_cast<int>(p.integer("points_per_decade", wc.points_per_decade));
    p.finish();
    for (double k : ks)
        if (!(k > 0.0)) throw ValidationError("wkb: k must be positive");
    if (!(X >= 100.0 * std::max(1.0, v.support_onset())))
        throw ValidationError("wkb: horizon must lie two decades beyond the support onset");

    std::vector<WkbReport> reps(ks.size());
    for_each_index(ks.size(), Execution::parallel, [&](std::size_t i) { reps[i] = wkb_compare(v, ks[i], X, wc); });
    RunOutput out;
    json rows = json::array();
    for (std::size_t i = 0; i < ks.size(); ++i) {
        out.files["wkb_" + std::to_string(i) + ".csv"] = csv_text([&](std::ostream& os) { csv::write_wkb(os, reps[i], wc); });
        rows.push_back(to_json(reps[i]));
    }
    out.summary = json{{"reports", rows}};
    out.resolved = json{{"potential", to_json(v)},
                        {"k", ks},
                        {"horizon", X},
                        {"points_per_decade", wc.points_per_decade},
                        {"steps_per_period", wc.steps_per_period},
                        {"rtol", wc.tol.rtol},
                        {"atol", wc.tol.atol}};
    return out;
}

RunOutput sparse_random_run(const json& config) {
    Params p(config.value("parameters", json::object()), "parameters");
    EnsembleConfig ec;
    if (config.contains("tolerances")) ec.integrator.tol = tolerances(config);
    const auto alphas = p.reals("alphas", std::vector<double>{1.0, 0.25});
    const long long count = p.integer("seeds", 20);
    ec.k = p.positive("k", 1.0);
    ec.horizon_n = static_cast<int>(p.integer("horizon_n", 10000));
    if (p.has("bump")) {
        Params b(p.raw("bump"), "parameters.bump");
        ec.bump.width = b.positive("width", 1.0);
        ec.bump.amplitude = b.real("amplitude", 3.0);
        b.finish();
    }
    const double sup_bound = p.real("sup_log_R_bound", 1.0);
    const double growth = p.real("growth_threshold", 10.0);
    p.finish();
    if (count < 1) throw ValidationError("seeds must be >= 1");
    if (ec.horizon_n < 1) throw ValidationError("horizon_n must be >= 1");
    for (double a : alphas)
        if (!(a > 0.0)) throw ValidationError("alphas must be positive");

    const std::uint64_t base = base_seed(config);
    std::vector<std::uint64_t> seeds;
    for (long long i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));

    RunOutput out;
    std::ostringstream os;
    auto meta = csv::tolerance_meta(ec.integrator.tol);
    meta.insert(meta.begin(), {"k", csv::format(ec.k)});
    meta.push_back({"horizon_n", std::to_string(ec.horizon_n)});
    csv::Writer w(os, meta, {"alpha", "seed", "final_log_R2", "sup_log_R"});
    json per_alpha = json::array();
    for (double a : alphas) {
        ec.alpha = a;
        const auto rows = random_ensemble(seeds, ec);
        int bounded = 0, grown = 0;
        for (const auto& r : rows) {
            w.row({csv::format(a), std::to_string(r.seed), csv::format(r.final_log_R2), csv::format(r.sup_log_R)});
            bounded += r.sup_log_R <= sup_bound;
            grown += r.final_log_R2 > growth;
        }
        per_alpha.push_back({{"alpha", a},
                             {"seeds", rows.size()},
                             {"sup_log_R_within_bound", bounded},
                             {"final_log_R2_above_threshold", grown}});
    }
    out.files["ensemble.csv"] = os.str();
    out.summary = json{{"sup_log_R_bound", sup_bound}, {"growth_threshold", growth}, {"alphas", per_alpha}};
    out.resolved = json{{"alphas", alphas},
                        {"seeds", seeds},
                        {"k", ec.k},
                        {"horizon_n", ec.horizon_n},
                        {"bump", {{"width", ec.bump.width}, {"amplitude", ec.bump.amplitude}}},
                        {"theta0", ec.theta0},
                        {"steps_per_period", ec.integrator.steps_per_period},
                        {"rtol", ec.integrator.tol.rtol},
                        {"atol", ec.integrator.tol.atol}};
    return out;
}

RunOutput bethe_run(const json& config) {
    Params p(config.value("parameters", json::object()), "parameters");
    EntropyConfig ec;
    ec.quadrature_nodes = static_cast<int>(p.integer("quadrature_nodes", ec.quadrature_nodes));
    ec.epsilon_schedule = p.reals("epsilon_schedule", ec.epsilon_schedule);
    const std::string boundary = p.string("boundary", "exact");
    if (boundary == "exact") ec.boundary = BoundaryMode::exact;
    else if (boundary == "extrapolated") ec.boundary = BoundaryMode::extrapolated;
    else throw ValidationError("boundary must be exact or extrapolated");
    const bool steps = p.boolean("step_checks", true);
    const auto lambdas = p.reals("density_points", std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0});

    std::vector<TreePotential> trees;
    std::vector<std::uint64_t> tree_seeds;
    if (p.has("tree")) {
        trees.push_back(tree_from_json(p.raw("tree")));
        tree_seeds.push_back(0);
    } else {
        const long long count = p.integer("trees", 100);
        const long long max_depth = p.integer("max_depth", 6);
        const auto range = p.reals("value_range", std::vector<double>{-1.0, 1.0});
        if (count < 1) throw ValidationError("trees must be >= 1");
        if (max_depth < 0 || max_depth > 16) throw ValidationError("max_depth must lie in [0, 16]");
        if (range.size() != 2 || !(range[1] >= range[0])) throw ValidationError("value_range must be [lo, hi]");
        const std::uint64_t base = base_seed(config);
        for (long long i = 0; i < count; ++i) {
            const std::uint64_t s = base + static_cast<std::uint64_t>(i);
            trees.push_back(TreePotential::random(static_cast<int>(i % (max_depth + 1)), s, range[0], range[1]));
            tree_seeds.push_back(s);
        }
    }
    p.finish();
    if (ec.quadrature_nodes < 32) throw ValidationError("quadrature_nodes must be >= 32");
    for (double l : lambdas)
        if (!(std::fabs(l) < kBandEdge)) throw ValidationError("density_points must lie inside (-2 sqrt 2, 2 sqrt 2)");
    for (std::size_t i = 0; i < ec.epsilon_schedule.size(); ++i)
        if (!(ec.epsilon_schedule[i] > 0.0) || (i && !(ec.epsilon_schedule[i] < ec.epsilon_schedule[i - 1])))
            throw ValidationError("epsilon_schedule must be positive and decreasing");

    const auto reports = verify_pearson_many(trees, ec);
    RunOutput out;
    double min_margin = INFINITY, min_jensen = INFINITY, min_step = INFINITY;
    {
        std::ostringstream os;
        csv::Writer w(os, {{"quadrature_nodes", std::to_string(ec.quadrature_nodes)}, {"boundary", boundary}},
                      {"tree", "seed", "depth", "s_O", "rhs", "margin", "jensen_margin", "excluded_nodes"});
        for (std::size_t i = 0; i < trees.size(); ++i) {
            const auto& r = reports[i];
            w.row({std::to_string(i), std::to_string(tree_seeds[i]), std::to_string(trees[i].depth()),
                   csv::format(r.s_root), csv::format(r.rhs), csv::format(r.margin), csv::format(r.jensen_margin),
                   std::to_string(r.excluded_nodes.size())});
            min_margin = std::min(min_margin, r.margin);
            min_jensen = std::min(min_jensen, r.jensen_margin);
        }
        out.files["trees.csv"] = os.str();
    }
    std::size_t step_count = 0;
    if (steps) {
        struct Job {
            std::size_t tree;
            int level;
            std::size_t index;
        };
        std::vector<Job> jobs;
        for (std::size_t t = 0; t < trees.size(); ++t)
            for (int l = 0; l <= trees[t].depth(); ++l)
                for (std::size_t i = 0; i < (std::size_t{1} << l); ++i) jobs.push_back({t, l, i});
        std::vector<StepCheck> checks(jobs.size());
        EntropyConfig inner = ec;
        inner.exec = Execution::serial;
        for_each_index(jobs.size(), Execution::parallel, [&](std::size_t j) {
            checks[j] = step_inequality_check(trees[jobs[j].tree], jobs[j].level, jobs[j].index, inner);
        });
        std::ostringstream os;
        csv::Writer w(os, {{"quadrature_nodes", std::to_string(ec.quadrature_nodes)}, {"boundary", boundary}},
                      {"tree", "vertex", "margin", "s_vertex", "s_child0", "s_child1"});
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            const auto& c = checks[j];
            w.row({std::to_string(jobs[j].tree), "\"" + TreePotential::label(jobs[j].level, jobs[j].index) + "\"",
                   csv::format(c.margin), csv::format(c.s_vertex), csv::format(c.s_child0), csv::format(c.s_child1)});
            min_step = std::min(min_step, c.margin);
        }
        step_count = jobs.size();
        out.files["steps.csv"] = os.str();
    }
    {
        std::ostringstream os;
        csv::Writer w(os, {{"epsilon_schedule", std::to_string(ec.epsilon_schedule.size()) + " values"}},
                      {"lambda", "density", "error", "flagged", "free_density"});
        const TreePotential& t = trees.front();
        for (double l : lambdas) {
            const auto est = spectral_density_root(t, l, ec.epsilon_schedule);
            w.row({csv::format(l), csv::format(est.value), csv::format(est.error), est.flagged ? "1" : "0",
                   csv::format(free_density(l))});
        }
        out.files["density.csv"] = os.str();
    }
    out.summary = json{{"trees", trees.size()},
                       {"min_margin", number(min_margin)},
                       {"min_jensen_margin", number(min_jensen)},
                       {"step_checks", step_count},
                       {"min_step_margin", number(min_step)},
                       {"quadrature_nodes", ec.quadrature_nodes},
                       {"boundary", boundary},
                       {"epsilon_schedule", ec.epsilon_schedule}};
    out.resolved = json{{"tree_seeds", tree_seeds},
                        {"quadrature_nodes", ec.quadrature_nodes},
                        {"epsilon_schedule", ec.epsilon_schedule},
                        {"boundary", boundary},
                        {"density_points", lambdas},
                        {"step_checks", steps}};
    return out;
}

bool is_nonempty_dir(const fs::path& p) {
    std::error_code ec;
    if (!fs::exists(p, ec)) return false;
    if (!fs::is_directory(p, ec)) return true;
    return fs::directory_iterator(p, ec) != fs::directory_iterator();
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"embedded-scan", "construct", "sumrule",
                                                "wkb", "sparse-random-transition", "bethe-verify"};
    return names;
}

std::string describe_outputs() {
    return "Every run writes manifest.json (config echo, version, threads, wall time),\n"
           "summary.json, and the CSVs below. CSV files start with '# key=value' lines.\n"
           "  embedded-scan             scan.csv: k, forward_slope, subordinate_slope, label\n"
           "  construct                 potential.csv: x, V\n"
           "                            trace_<j>.csv: x, theta, log_R2, decay_target\n"
           "  sumrule                   scattering.csv: k, re_a, im_a, re_b, im_b, log_abs_a\n"
           "                            sumrule.json: lhs, tail_estimate, eig_sum, rhs, residual, k_max, k_min\n"
           "  wkb                       wkb_<i>.csv: x, phase, amp_residual, phase_residual\n"
           "  sparse-random-transition  ensemble.csv: alpha, seed, final_log_R2, sup_log_R\n"
           "  bethe-verify              trees.csv: tree, seed, depth, s_O, rhs, margin, jensen_margin, excluded_nodes\n"
           "                            steps.csv: tree, vertex, margin, s_vertex, s_child0, s_child1\n"
           "                            density.csv: lambda, density, error, flagged, free_density\n"
           "Precedence: command-line flags override the config file fields\n"
           "output_dir, seed and threads.\n";
}

json effective_config(const std::string& experiment, json config, const Overrides& o) {
    if (!config.is_object()) throw ValidationError("config must be a JSON object");
    if (config.contains("experiment")) {
        if (!config.at("experiment").is_string() || config.at("experiment").get<std::string>() != experiment)
            throw ValidationError("config experiment does not match '" + experiment + "'");
    }
    config["experiment"] = experiment;
    if (o.out) config["output_dir"] = o.out->string();
    if (o.seed) config["seed"] = *o.seed;
    if (o.threads) config["threads"] = *o.threads;
    static const std::set<std::string> known{"experiment", "parameters", "seed", "output_dir", "threads", "tolerances"};
    for (const auto& [key, value] : config.items())
        if (!known.count(key)) throw ValidationError("unknown config field '" + key + "'");
    return config;
}

RunOutput execute(const std::string& experiment, const json& config) {
    if (experiment == "embedded-scan") return embedded_scan_run(config);
    if (experiment == "construct") return construct_run(config);
    if (experiment == "sumrule") return sumrule_run(config);
    if (experiment == "wkb") return wkb_run(config);
    if (experiment == "sparse-random-transition") return sparse_random_run(config);
    if (experiment == "bethe-verify") return bethe_run(config);
    throw ValidationError("unknown experiment '" + experiment + "'");
}

int run(const std::string& experiment, const fs::path& config_path, const Overrides& o, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    json config;
    fs::path out_dir;
    try {
        std::ifstream in(config_path);
        if (!in) throw ValidationError("cannot read config " + config_path.string());
        try {
            config = json::parse(in);
        } catch (const json::exception& e) {
            throw ValidationError(std::string("config is not valid JSON: ") + e.what());
        }
        config = effective_config(experiment, std::move(config), o);
        if (!config.contains("output_dir") || !config.at("output_dir").is_string())
            throw ValidationError("no output directory: set output_dir or pass --out");
        out_dir = config.at("output_dir").get<std::string>();
        if (is_nonempty_dir(out_dir))
            throw ValidationError("output directory " + out_dir.string() + " exists and is not empty");
        if (config.contains("threads")) {
            const json& t = config.at("threads");
            if (!t.is_number_integer() || t.get<long long>() < 1) throw ValidationError("threads must be >= 1");
            set_thread_count(t.get<int>());
        }
    } catch (const std::exception& e) {
        err << "spectra-lab: " << e.what() << '\n';
        return kExitValidation;
    }

    RunOutput result;
    try {
        result = execute(experiment, config);
    } catch (const ValidationError& e) {
        err << "spectra-lab: invalid config: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "spectra-lab: invalid config: " << e.what() << '\n';
        return kExitValidation;
    } catch (const json::exception& e) {
        err << "spectra-lab: invalid config: " << e.what() << '\n';
        return kExitValidation;
    } catch (const AnchorSelectionError& e) {
        err << "spectra-lab: numerical failure: " << e.what() << '\n';
        for (const auto& t : e.trials()) err << "  anchor " << t.candidate << " max cross " << t.max_cross << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "spectra-lab: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }

    try {
        fs::create_directories(out_dir);
        json files = json::array();
        for (const auto& [name, text] : result.files) {
            std::ofstream f(out_dir / name, std::ios::binary);
            f << text;
            if (!f) throw std::runtime_error("failed writing " + (out_dir / name).string());
            files.push_back(name);
        }
        std::ofstream(out_dir / "summary.json", std::ios::binary) << result.summary.dump(2) << '\n';
        files.push_back("summary.json");
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json manifest{{"experiment", experiment},
                      {"version", kVersion},
                      {"compiler", __VERSION__},
                      {"threads", thread_count()},
                      {"wall_time_seconds", wall},
                      {"config", config},
                      {"resolved", result.resolved},
                      {"files", files}};
        std::ofstream m(out_dir / "manifest.json", std::ios::binary);
        m << manifest.dump(2) << '\n';
        if (!m) throw std::runtime_error("failed writing manifest");
    } catch (const std::exception& e) {
        err << "spectra-lab: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace spectra
