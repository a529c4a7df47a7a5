#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "spectra/prufer.hpp"
#include "spectra/scattering.hpp"
#include "spectra/wkb.hpp"

namespace spectra::csv {

/// Numbers are written with 17 significant digits so that files round-trip
/// and compare byte for byte across runs.
std::string format(double v);

class Writer {
public:
    /// `meta` becomes leading "# key=value" lines, then the column header.
    Writer(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& meta,
           const std::vector<std::string>& columns);

    void row(std::initializer_list<double> values);
    void row(const std::vector<std::string>& cells);

private:
    std::ostream& out_;
    std::size_t width_;
};

std::vector<std::pair<std::string, std::string>> tolerance_meta(const ode::Tolerance& tol);

void write_prufer(std::ostream& out, const PruferTrace& trace);
void write_solution(std::ostream& out, const SolutionTrace& trace);
void write_scattering(std::ostream& out, const ScatteringData& data, const JostConfig& cfg);
void write_wkb(std::ostream& out, const WkbReport& report, const WkbConfig& cfg);

}  // namespace spectra::csv
