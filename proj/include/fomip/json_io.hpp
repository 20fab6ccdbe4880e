#pragma once

#include <json.hpp>

#include "fomip/bpc.hpp"
#include "fomip/grounder.hpp"

namespace fomip {

// Stable field order and 9-significant-digit floats, so identical runs
// dump byte-identical reports. Schema is versioned via "schema": 1.
nlohmann::ordered_json report_to_json(const SolveReport& rep, bool include_trace = false);
nlohmann::ordered_json ground_to_json(const GroundProblem& gp);

}  // namespace fomip
