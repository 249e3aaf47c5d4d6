// JSON encodings of distributions, weightings, losses and ambiguity sets.
#pragma once

#include <string>

#include "json.hpp"
#include "wdro/dro.hpp"
#include "wdro/empirical.hpp"
#include "wdro/weights.hpp"

namespace wdro::io {

using nlohmann::json;

/// {"atoms": [...], "masses": [...]}
json to_json(const DiscreteDistribution1D& d);
DiscreteDistribution1D distribution_from_json(const json& j);

/// {"T", "p", "w", "N_eff", "D_p"}
json to_json(const WeightVector& w, double p);
WeightVector weights_from_json(const json& j);

/// {"pieces": [[a, b], ...]} or {"newsvendor": {"x", "c_u", "c_o"}}
PiecewiseAffineLoss loss_from_json(const json& j);
json to_json(const PiecewiseAffineLoss& loss);

/// {"kind": "weighted-ball", "center": {...}, "eps", "p", "support": [lo, hi]}
/// {"kind": "intersection", "points": [...], "radii": [...], "p", "support": [lo, hi]}
AmbiguitySpec spec_from_json(const json& j);
json to_json(const AmbiguitySpec& spec);

/// Parses a JSON document, throwing std::invalid_argument with the parser's
/// message on malformed input.
json parse(const std::string& text);
json read_file(const std::string& path);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

}  // namespace wdro::io
