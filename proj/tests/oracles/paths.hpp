#pragma once

#include <cmath>

#include "spectra/bethe.hpp"

namespace oracle {

// Average over all 2^(R+1) forward paths of exp(-sum V^2 / 4); vertices
// below the depth carry V = 0 so only the first R + 1 steps matter.
inline double path_expectation(const spectra::TreePotential& t) {
    const int R = t.depth();
    const std::size_t paths = std::size_t{1} << R;
    double sum = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
        double phi = 0.0;
        for (int n = 0; n <= R; ++n) {
            const double v = t.at(n, p >> (R - n));
            phi += v * v;
        }
        sum += std::exp(-0.25 * phi);
    }
    return sum / static_cast<double>(paths);
}

}  // namespace oracle
