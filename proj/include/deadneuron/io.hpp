#pragma once

#include "deadneuron/arrangement.hpp"
#include "deadneuron/core.hpp"
#include "deadneuron/experiments.hpp"
#include "deadneuron/network.hpp"
#include "deadneuron/stability.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace deadneuron {

// Malformed or shape-inconsistent input text.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON records. Numbers are written with enough digits to reparse to the
// same double (17 significant digits suffice), so dump/parse round-trips are
// bit exact. Non-finite margins serialize as null.
//
//   arrangement: {"dim": n, "hyperplanes": [{"normal": [...], "offset": r}, ...]}
//   parameters:  {"arch": [n0, ...], "layers": [{"W": [[...], ...], "b": [...]}, ...]}
//   verdict:     {"stable": b, "marginal": b, "margin": x,
//                 "regions_checked": k, "unbounded_regions": u}
std::string to_json(const CoorientedArrangement<double>& arr);
CoorientedArrangement<double> arrangement_from_json(const std::string& text);

std::string to_json(const NetworkParams& params);
NetworkParams params_from_json(const std::string& text);

std::string to_json(const StabilityVerdict& verdict);

// Estimate tables. CSV header is fixed:
//   n0,n1,mode,samples,hits,marginal_discards,p_hat,ci_low,ci_high,theory,seed
// Floats carry 10 significant digits; the theory column is empty (JSON: null)
// for cells without a closed form. The JSON form is an array of objects with
// the same fields.
std::string to_csv(const std::vector<EstimateReport>& rows);
std::string to_json(const std::vector<EstimateReport>& rows);

// Line chart of p_hat against n1 - n0 with one vertical bar per cell for the
// confidence interval and a dashed horizontal reference at 1/4^{n0+1}. All
// cells must share n0. Output is a standalone SVG document.
std::string sweep_svg(const std::vector<EstimateReport>& cells);

}  // namespace deadneuron
