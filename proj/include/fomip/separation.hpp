#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "fomip/grounder.hpp"
#include "fomip/model.hpp"

namespace fomip {

// Value of a constraint's linear expression at x. Atoms missing from x
// read as 0.0: an un-created variable rests at its default lower bound.
double activity(const std::map<Atom, double>& x, const LinCons& c);

// max(lb - act, act - ub, 0) over the finite bounds.
double violation(double act, const LinCons& c);

// true iff act < lb - threshold or act > ub + threshold.
bool violates_bounds(double act, const LinCons& c, double threshold);

struct SeparationOptions {
  double threshold = 1e-6;
  std::size_t max_cuts = 0;  // 0 = return all
};

struct SeparationResult {
  // sorted by violation descending, ties in canonical constraint order
  std::vector<std::pair<LinCons, double>> cuts;
  std::size_t candidates_enumerated = 0;
  std::size_t candidates_pruned = 0;
};

// Pure generate-and-test: instantiate every ground constraint and keep
// the violated ones.
SeparationResult separate_naive(const Model& m, const std::map<Atom, double>& x,
                                const SeparationOptions& opts = {});

// Same cut set, but body generators are reordered so constraint terms
// ground early, and a branch is abandoned as soon as its partial
// activity plus the best possible remaining contribution can no longer
// violate either bound.
SeparationResult separate_guided(const Model& m, const std::map<Atom, double>& x,
                                 const SeparationOptions& opts = {});

// The generator reordering used by separate_guided, exposed for tests:
// moves each term's binding literals next to each other, first term's
// generators first, leaving test literals to run as soon as bound.
std::vector<Literal> reorder_for_guided(const ConstraintRule& rule);

}  // namespace fomip
