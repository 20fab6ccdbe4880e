#pragma once

#include <iosfwd>
#include <string>

#include "fomip/grounder.hpp"

namespace fomip {

// LP-format column name: functor_arg1_..._argN (the format forbids
// parentheses and commas).
std::string mangle(const Atom& a);

// Writes the grounded instance in CPLEX-style LP format: objective,
// rows c1..cn (a range row splits into ci and ci_r), a Bounds section,
// a General section listing the integer columns. Throws
// Error(NameCollision) if two atoms mangle to the same name.
void export_lp(const GroundProblem& gp, std::ostream& os);

}  // namespace fomip
