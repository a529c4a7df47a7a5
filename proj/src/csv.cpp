#include "spectra/csv.hpp"

#include <cmath>
#include <cstdio>

#include "spectra/errors.hpp"

namespace spectra::csv {

std::string format(double v) {
    if (v == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Writer::Writer(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& meta,
               const std::vector<std::string>& columns)
    : out_(out), width_(columns.size()) {
    for (const auto& [k, v] : meta) out_ << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void Writer::row(std::initializer_list<double> values) {
    if (values.size() != width_) throw ValidationError("csv row width mismatch");
    std::size_t i = 0;
    for (double v : values) out_ << (i++ ? "," : "") << format(v);
    out_ << '\n';
}

void Writer::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw ValidationError("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
}

std::vector<std::pair<std::string, std::string>> tolerance_meta(const ode::Tolerance& tol) {
    return {{"rtol", format(tol.rtol)}, {"atol", format(tol.atol)}};
}

void write_prufer(std::ostream& out, const PruferTrace& trace) {
    auto meta = tolerance_meta(trace.tol);
    meta.insert(meta.begin(), {"k", format(trace.k)});
    Writer w(out, meta, {"x", "theta", "log_R2"});
    for (std::size_t i = 0; i < trace.grid.size(); ++i) w.row({trace.grid[i], trace.theta[i], trace.log_R2[i]});
}

void write_solution(std::ostream& out, const SolutionTrace& trace) {
    auto meta = tolerance_meta(trace.tol);
    meta.insert(meta.begin(), {"E", format(trace.energy)});
    Writer w(out, meta, {"x", "u", "u_prime"});
    for (std::size_t i = 0; i < trace.grid.size(); ++i) w.row({trace.grid[i], trace.u[i], trace.u_prime[i]});
}

void write_scattering(std::ostream& out, const ScatteringData& d, const JostConfig& cfg) {
    Writer w(out, tolerance_meta(cfg.tol), {"k", "re_a", "im_a", "re_b", "im_b", "log_abs_a"});
    for (std::size_t i = 0; i < d.k_grid.size(); ++i)
        w.row({d.k_grid[i], d.a[i].real(), d.a[i].imag(), d.b[i].real(), d.b[i].imag(), d.log_abs_a[i]});
}

void write_wkb(std::ostream& out, const WkbReport& r, const WkbConfig& cfg) {
    auto meta = tolerance_meta(cfg.tol);
    meta.insert(meta.begin(), {"k", format(r.k)});
    meta.push_back({"horizon", format(r.horizon)});
    Writer w(out, meta, {"x", "phase", "amp_residual", "phase_residual"});
    for (std::size_t i = 0; i < r.grid.size(); ++i)
        w.row({r.grid[i], r.phase[i], r.amplitude_residual[i], r.phase_residual[i]});
}

}  // namespace spectra::csv
