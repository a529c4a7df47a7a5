#pragma once

#include <json.hpp>

#include "spectra/bethe.hpp"
#include "spectra/construct.hpp"
#include "spectra/potential.hpp"
#include "spectra/scattering.hpp"
#include "spectra/wkb.hpp"

namespace spectra {

using json = nlohmann::ordered_json;

/// Non-finite numbers become null.
json number(double v);

/// {kind, params, support_bound}; the tabulated kind stores grid and values
/// as parallel arrays.
json to_json(const Potential& v);

/// Accepts {kind, params}; derived fields in params are ignored.
Potential potential_from_json(const json& j);

/// {depth, values: {label: value}}.
json to_json(const TreePotential& t);
TreePotential tree_from_json(const json& j);

json to_json(const SumRuleReport& r);
json to_json(const EntropyReport& r);
json to_json(const WkbReport& r);  // summary only, no arrays
json to_json(const DecayReport& r);

}  // namespace spectra
