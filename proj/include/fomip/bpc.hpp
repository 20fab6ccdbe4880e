#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fomip/grounder.hpp"
#include "fomip/lp.hpp"
#include "fomip/model.hpp"

namespace fomip {

enum class SolveStatus { Optimal, Infeasible };

struct SolveStats {
  long nodes = 0;
  long lp_solves = 0;
  long cuts_added = 0;
  long atoms_priced = 0;
  long sep_enumerated = 0;
  long sep_pruned = 0;
  long price_enumerated = 0;
  long price_pruned = 0;
  long atoms_created = 0;     // columns in the final restricted set
  long rows_activated = 0;    // rows ever added to the LP
};

struct NodeTrace {
  int id = 0;
  int parent = -1;
  double bound = 0.0;
  std::string action;  // fathomed / infeasible / integral / branched
  std::string branch_atom;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  std::map<Atom, double> assignment;  // nonzero atoms only, integers snapped
  SolveStats stats;
  std::vector<NodeTrace> node_trace;  // filled when options.trace
};

struct BpcOptions {
  enum class Separator { Naive, Guided };
  enum class Pricer { Naive, Guided, Off };

  Separator separator = Separator::Guided;
  Pricer pricer = Pricer::Guided;

  double violation_threshold = 1e-6;
  double pricing_threshold = 1e-6;
  double feas_tol = 1e-6;
  double int_tol = 1e-6;

  int max_nodes = 10000;
  int max_rounds_per_node = 1000;
  std::size_t max_cuts_per_round = 0;  // 0 = all

  std::size_t max_ground_atoms = 500000;
  std::size_t max_ground_rows = 500000;

  bool trace = false;
  std::uint64_t seed = 0;  // reserved for randomized tie-breaks (none by default)
};

// A branch-and-bound node. extra_bounds carries every branching
// decision on the path from the root, each one tightening its parent.
struct Node {
  int id = 0;
  int parent = -1;
  std::map<Atom, std::pair<double, double>> extra_bounds;
  double lp_bound = 0.0;
  enum class Status { Open, Fathomed, Branched, Integral } status = Status::Open;
};

// Floor/ceil split on the most-fractional integer atom (ties broken by
// canonical atom order). Throws Error(NoFractionalVariable) when every
// integer atom is integral within int_tol.
std::pair<Node, Node> branch(const Node& node, const std::map<Atom, double>& x,
                             const std::map<Atom, VarInfo>& infos, double int_tol = 1e-6);

// Full grounding up front, then plain branch-and-bound (no pricing, no
// lazy separation). Throws Error(GroundSizeExceeded) past the limits.
SolveReport solve_ground(const Model& m, const BpcOptions& opts = {});

// Branch-price-and-cut: per node, separate until quiet, then price,
// until a full pass adds nothing; then fathom, accept, or branch.
// Throws IterationLimitError when a cap is hit.
SolveReport solve_bpc(const Model& m, const BpcOptions& opts = {});

// Exhaustive assignment enumeration; the independent optimality oracle.
// Requires integer atoms with bounds inside [-2, 2] and at most 2^24
// total assignments.
SolveReport solve_enum(const Model& m);

// State of the root node after its cut/price loop went quiet; lets
// callers check the pricing completeness certificate.
struct RootRelaxation {
  bool feasible = false;
  double objective = 0.0;
  std::set<Atom> restricted;
  std::vector<LinCons> active;
  bool pricing_complete = false;
  // objective after every LP solve in the loop, for monotonicity checks
  std::vector<std::pair<std::string, double>> trace;  // phase name, objective
};

RootRelaxation root_relaxation(const Model& m, const BpcOptions& opts = {});

// True iff x (missing atoms read as 0) satisfies every constraint
// within tol; on failure *violated names one offending row.
bool assignment_feasible(const std::vector<LinCons>& rows, const std::map<Atom, double>& x,
                         double tol, const LinCons** violated = nullptr);

}  // namespace fomip
