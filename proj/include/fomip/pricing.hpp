#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "fomip/grounder.hpp"
#include "fomip/lp.hpp"
#include "fomip/model.hpp"

namespace fomip {

// (row index, coefficient) pairs for one atom across the active rows.
std::vector<std::pair<int, double>> column_of(const Atom& atom,
                                              const std::vector<LinCons>& active);

struct PricingOptions {
  double threshold = 1e-6;  // an atom must beat -threshold to be priced
};

struct PricingResult {
  // sorted by reduced cost ascending, ties in canonical atom order
  std::vector<std::pair<Atom, double>> priced;
  bool proof_complete = true;
  std::size_t candidates_enumerated = 0;
  std::size_t candidates_pruned = 0;
};

// Enumerates every ground variable outside `restricted` and returns
// those with reduced cost below -threshold.
PricingResult price_naive(const Model& m, const std::set<Atom>& restricted,
                          const LpSolution& sol, const std::vector<LinCons>& active,
                          const PricingOptions& opts = {});

// Same priced set; skips whole variable families whose reduced cost
// provably cannot go below -threshold, using the family's smallest
// possible objective and the duals' best possible row contributions.
PricingResult price_guided(const Model& m, const std::set<Atom>& restricted,
                           const LpSolution& sol, const std::vector<LinCons>& active,
                           const PricingOptions& opts = {});

}  // namespace fomip
