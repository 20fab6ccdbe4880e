#include "fomip/bpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fomip/errors.hpp"
#include "fomip/pricing.hpp"
#include "fomip/separation.hpp"

namespace fomip {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBigM = 1e6;
const char* kArtLo = "_art_lo";
const char* kArtHi = "_art_hi";

bool is_artificial(const Atom& a) { return !a.functor.empty() && a.functor[0] == '_'; }

double snap_integer(double v, double tol) {
  double r = std::round(v);
  return std::abs(v - r) <= tol ? r : v;
}

double fractionality(double v) {
  return std::abs(v - std::round(v));
}

std::optional<Atom> most_fractional(const std::map<Atom, double>& x,
                                    const std::map<Atom, VarInfo>& infos, double tol) {
  std::optional<Atom> best;
  double best_frac = tol;
  for (const auto& [atom, v] : x) {
    auto it = infos.find(atom);
    if (it == infos.end() || it->second.vartype != VarType::Integer) continue;
    double f = fractionality(v);
    if (f > best_frac) {
      best_frac = f;
      best = atom;
    }
  }
  return best;
}

// Shared tree search: "full" mode carries every column and row from the
// start; lazy mode grows them through separation and pricing.
class TreeSearch {
public:
  TreeSearch(const Model& m, const BpcOptions& opts, bool full)
      : m_(m), opts_(opts), full_(full) {}

  SolveReport run() {
    initialize();

    Node root;
    root.id = next_id_++;
    root.lp_bound = -kInf;
    nodes_[root.id] = root;
    open_.insert({-kInf, root.id});

    while (!open_.empty()) {
      if (stats_.nodes >= opts_.max_nodes) limit_error("node limit reached");
      auto [bound, id] = *open_.begin();
      open_.erase(open_.begin());
      Node& node = nodes_[id];
      ++stats_.nodes;
      processing_bound_ = bound;
      // best-bound order: the popped bound is the global lower bound
      trace(node, "picked", "");

      if (incumbent_ && bound >= incumbent_->second - opts_.feas_tol) {
        node.status = Node::Status::Fathomed;
        trace(node, "fathomed", "");
        processing_bound_ = kInf;
        continue;
      }
      process(node);
      processing_bound_ = kInf;
    }

    return report();
  }

  RootRelaxation root_only() {
    initialize();
    Node root;
    root.id = next_id_++;
    root.lp_bound = -kInf;

    RootRelaxation out;
    LpSolution sol;
    QuiesceOutcome q = quiesce(root, sol, &out.trace);
    out.pricing_complete = pricing_complete_;
    out.restricted = restricted_;
    out.active = active_;
    if (q == QuiesceOutcome::Feasible && artificial_mass(sol.primal) <= opts_.feas_tol) {
      out.feasible = true;
      out.objective = real_objective(sol);
    }
    return out;
  }

private:
  enum class QuiesceOutcome { Feasible, Infeasible };

  void initialize() {
    bool need_all = full_ || opts_.pricer == BpcOptions::Pricer::Off;
    // Pricing treats a missing atom as resting at zero, which is only
    // its lower bound when lb = 0. Anything else joins the initial
    // restricted problem.
    bool may_rest_off_zero = m_.defaults.lb != 0 || m_.defaults.ub < 0;
    for (const auto& r : m_.lb_rules) may_rest_off_zero = may_rest_off_zero || r.value != 0;
    for (const auto& r : m_.ub_rules) may_rest_off_zero = may_rest_off_zero || r.value < 0;

    if (need_all || may_rest_off_zero) {
      std::vector<Atom> all = ground_variables(m_);
      if (all.size() > opts_.max_ground_atoms)
        throw Error(Errc::GroundSizeExceeded, "grounded variable count exceeds the limit");
      for (const auto& a : all) {
        const VarInfo& info = info_of(a);
        if (need_all || info.lb != 0 || info.ub < 0) restricted_.insert(a);
      }
    }
    if (full_) {
      active_ = ground_constraints(m_);
      if (active_.size() > opts_.max_ground_rows)
        throw Error(Errc::GroundSizeExceeded, "grounded constraint count exceeds the limit");
      active_set_.insert(active_.begin(), active_.end());
    }
    stats_.rows_activated = static_cast<long>(active_.size());
  }

  const VarInfo& info_of(const Atom& a) {
    auto it = infos_.find(a);
    if (it == infos_.end()) it = infos_.emplace(a, atom_info(m_, a)).first;
    return it->second;
  }

  // node LP over the restricted columns and active rows; nullopt when
  // the node's branching bounds are contradictory
  std::optional<LpProblem> build_lp(const Node& node) {
    LpProblem lp;
    for (const auto& a : restricted_) {
      const VarInfo& info = info_of(a);
      double lo = info.lb, hi = info.ub;
      auto eb = node.extra_bounds.find(a);
      if (eb != node.extra_bounds.end()) {
        lo = std::max(lo, eb->second.first);
        hi = std::min(hi, eb->second.second);
      }
      if (lo > hi + 1e-12) return std::nullopt;
      lp.atoms.push_back(a);
      lp.bounds[a] = {lo, std::max(lo, hi)};
      if (info.objective != 0.0) lp.objective[a] = info.objective;
    }
    bool bigm = !full_;
    for (std::size_t i = 0; i < active_.size(); ++i) {
      const LinCons& row = active_[i];
      std::vector<LinTerm> terms;
      for (const auto& t : row.terms)
        if (restricted_.count(t.atom)) terms.push_back(t);
      if (bigm) {
        // artificial slack pair keeps the restricted master feasible
        if (row.lb.is_finite()) {
          Atom art{kArtLo, {std::to_string(i)}};
          terms.push_back(LinTerm{1.0, art});
          lp.atoms.push_back(art);
          lp.bounds[art] = {0.0, kInf};
          lp.objective[art] = kBigM;
        }
        if (row.ub.is_finite()) {
          Atom art{kArtHi, {std::to_string(i)}};
          terms.push_back(LinTerm{-1.0, art});
          lp.atoms.push_back(art);
          lp.bounds[art] = {0.0, kInf};
          lp.objective[art] = kBigM;
        }
      }
      lp.constraints.push_back(normalize_lincons(row.lb, std::move(terms), row.ub));
    }
    return lp;
  }

  static std::map<Atom, double> strip_artificials(const std::map<Atom, double>& primal) {
    std::map<Atom, double> x;
    for (const auto& [a, v] : primal)
      if (!is_artificial(a)) x.emplace(a, v);
    return x;
  }

  double artificial_mass(const std::map<Atom, double>& primal) const {
    double mass = 0.0;
    for (const auto& [a, v] : primal)
      if (is_artificial(a)) mass += std::abs(v);
    return mass;
  }

  // Node bound without the big-M penalty terms. Still a valid lower
  // bound: the penalized optimum minus its penalty part under-estimates
  // the true restricted optimum, and the two coincide once the
  // artificials are at zero.
  double real_objective(const LpSolution& sol) {
    double v = 0.0;
    for (const auto& [a, val] : sol.primal) {
      if (is_artificial(a) || val == 0.0) continue;
      v += info_of(a).objective * val;
    }
    return v;
  }

  // separate until quiet, then price; repeat until a full pass adds
  // nothing new
  QuiesceOutcome quiesce(Node& node, LpSolution& out_sol,
                         std::vector<std::pair<std::string, double>>* trace = nullptr) {
    pricing_complete_ = false;
    int rounds = 0;
    while (true) {
      if (++rounds > opts_.max_rounds_per_node) limit_error("cut/price round limit reached");
      auto lp = build_lp(node);
      if (!lp) return QuiesceOutcome::Infeasible;
      LpSolution sol = solve_lp(*lp);
      ++stats_.lp_solves;
      if (sol.status == LpStatus::Unbounded)
        throw Error(Errc::NumericalFailure, "node LP is unbounded");
      if (sol.status == LpStatus::Infeasible) return QuiesceOutcome::Infeasible;
      if (trace) trace->emplace_back("lp", sol.objective_value);

      std::map<Atom, double> x = strip_artificials(sol.primal);
      SeparationOptions sep_opts{opts_.violation_threshold, opts_.max_cuts_per_round};
      SeparationResult sep = opts_.separator == BpcOptions::Separator::Naive
                                 ? separate_naive(m_, x, sep_opts)
                                 : separate_guided(m_, x, sep_opts);
      stats_.sep_enumerated += static_cast<long>(sep.candidates_enumerated);
      stats_.sep_pruned += static_cast<long>(sep.candidates_pruned);
      std::size_t added = 0;
      for (auto& [cut, viol] : sep.cuts) {
        check_declared(cut);
        if (active_set_.insert(cut).second) {
          active_.push_back(cut);
          ++added;
        }
      }
      if (added > 0) {
        stats_.cuts_added += static_cast<long>(added);
        stats_.rows_activated += static_cast<long>(added);
        if (trace) trace->emplace_back("cuts", static_cast<double>(added));
        continue;
      }

      if (full_ || opts_.pricer == BpcOptions::Pricer::Off) {
        pricing_complete_ = full_ || opts_.pricer == BpcOptions::Pricer::Off;
        out_sol = std::move(sol);
        return QuiesceOutcome::Feasible;
      }

      PricingOptions price_opts{opts_.pricing_threshold};
      PricingResult priced = opts_.pricer == BpcOptions::Pricer::Naive
                                 ? price_naive(m_, restricted_, sol, active_, price_opts)
                                 : price_guided(m_, restricted_, sol, active_, price_opts);
      stats_.price_enumerated += static_cast<long>(priced.candidates_enumerated);
      stats_.price_pruned += static_cast<long>(priced.candidates_pruned);
      if (!priced.priced.empty()) {
        for (const auto& [atom, rc] : priced.priced) restricted_.insert(atom);
        stats_.atoms_priced += static_cast<long>(priced.priced.size());
        if (trace) trace->emplace_back("priced", static_cast<double>(priced.priced.size()));
        continue;
      }
      pricing_complete_ = priced.proof_complete;
      out_sol = std::move(sol);
      return QuiesceOutcome::Feasible;
    }
  }

  void process(Node& node) {
    while (true) {
      LpSolution sol;
      if (quiesce(node, sol) == QuiesceOutcome::Infeasible) {
        node.status = Node::Status::Fathomed;
        trace(node, "infeasible", "");
        return;
      }
      // big-M columns above zero mean the node has no true feasible point
      if (!full_ && artificial_mass(sol.primal) > opts_.feas_tol) {
        node.status = Node::Status::Fathomed;
        trace(node, "infeasible", "");
        return;
      }
      node.lp_bound = real_objective(sol);
      if (incumbent_ && node.lp_bound >= incumbent_->second - opts_.feas_tol) {
        node.status = Node::Status::Fathomed;
        trace(node, "fathomed", "");
        return;
      }

      std::map<Atom, double> x = strip_artificials(sol.primal);
      std::map<Atom, VarInfo> frac_infos;
      for (const auto& [a, v] : x) frac_infos.emplace(a, info_of(a));
      auto frac = most_fractional(x, frac_infos, opts_.int_tol);
      if (!frac) {
        if (accept_incumbent(x)) {
          node.status = Node::Status::Integral;
          trace(node, "integral", "");
          return;
        }
        continue;  // a lazily found violated row re-entered the loop
      }

      Node left, right;
      std::tie(left, right) = branch(node, x, frac_infos, opts_.int_tol);
      left.id = next_id_++;
      right.id = next_id_++;
      left.lp_bound = right.lp_bound = node.lp_bound;
      node.status = Node::Status::Branched;
      trace(node, "branched", frac->str());
      nodes_[left.id] = left;
      nodes_[right.id] = right;
      open_.insert({left.lp_bound, left.id});
      open_.insert({right.lp_bound, right.id});
      return;
    }
  }

  // Integral points are re-validated against the full ground row set;
  // lazily activated rows are only a subset.
  bool accept_incumbent(const std::map<Atom, double>& x) {
    std::map<Atom, double> snapped;
    double value = 0.0;
    for (const auto& [a, v] : x) {
      const VarInfo& info = info_of(a);
      double sv = info.vartype == VarType::Integer ? snap_integer(v, opts_.int_tol) : v;
      snapped[a] = sv;
      value += info.objective * sv;
    }
    ensure_full_rows();
    std::size_t added = 0;
    for (const auto& row : full_rows_) {
      double act = activity(snapped, row);
      if (violates_bounds(act, row, opts_.feas_tol)) {
        if (active_set_.insert(row).second) {
          active_.push_back(row);
          ++added;
        }
      }
    }
    if (added > 0) {
      stats_.cuts_added += static_cast<long>(added);
      stats_.rows_activated += static_cast<long>(added);
      return false;
    }
    if (!incumbent_ || value < incumbent_->second - 1e-12) {
      incumbent_ = {snapped, value};
    }
    return true;
  }

  void ensure_full_rows() {
    if (have_full_rows_) return;
    full_rows_ = full_ ? active_ : ground_constraints(m_);
    have_full_rows_ = true;
  }

  // Lazily separated rows must still respect the variable/atom
  // bijection: a row over an underived atom is a model error, the same
  // one full grounding reports.
  void check_declared(const LinCons& cut) {
    if (!have_declared_) {
      auto all = ground_variables(m_);
      declared_.insert(all.begin(), all.end());
      have_declared_ = true;
    }
    for (const auto& t : cut.terms)
      if (!declared_.count(t.atom))
        throw Error(Errc::GroundAtomNotDeclared,
                    "constraint instantiates " + t.atom.str() +
                        ", which no variable rule derives");
  }

  void limit_error(const std::string& what) {
    // proven bound: the node in flight plus everything still open
    double bound = processing_bound_;
    if (!open_.empty()) bound = std::min(bound, open_.begin()->first);
    if (bound == kInf && incumbent_) bound = incumbent_->second;
    throw IterationLimitError(what, bound, incumbent_.has_value(),
                              incumbent_ ? incumbent_->second : 0.0);
  }

  void trace(const Node& node, const std::string& action, const std::string& atom) {
    if (!opts_.trace) return;
    trace_.push_back(NodeTrace{node.id, node.parent, node.lp_bound, action, atom});
  }

  SolveReport report() {
    SolveReport rep;
    rep.stats = stats_;
    rep.stats.atoms_created = static_cast<long>(restricted_.size());
    rep.node_trace = std::move(trace_);
    if (!incumbent_) {
      rep.status = SolveStatus::Infeasible;
      rep.objective = kInf;
      rep.bound = kInf;
      rep.gap = 0.0;
      return rep;
    }
    rep.status = SolveStatus::Optimal;
    rep.objective = incumbent_->second;
    rep.bound = incumbent_->second;  // tree exhausted: bound meets incumbent
    rep.gap = 0.0;
    for (const auto& [a, v] : incumbent_->first)
      if (v != 0.0) rep.assignment.emplace(a, v);
    return rep;
  }

  const Model& m_;
  BpcOptions opts_;
  bool full_;

  std::set<Atom> restricted_;
  std::vector<LinCons> active_;
  std::set<LinCons> active_set_;
  std::map<Atom, VarInfo> infos_;
  std::vector<LinCons> full_rows_;
  bool have_full_rows_ = false;
  std::set<Atom> declared_;
  bool have_declared_ = false;

  std::map<int, Node> nodes_;
  std::set<std::pair<double, int>> open_;  // best bound first
  std::optional<std::pair<std::map<Atom, double>, double>> incumbent_;

  SolveStats stats_;
  std::vector<NodeTrace> trace_;
  int next_id_ = 0;
  bool pricing_complete_ = false;
  double processing_bound_ = kInf;
};

}  // namespace

std::pair<Node, Node> branch(const Node& node, const std::map<Atom, double>& x,
                             const std::map<Atom, VarInfo>& infos, double int_tol) {
  auto frac = most_fractional(x, infos, int_tol);
  if (!frac)
    throw Error(Errc::NoFractionalVariable, "no fractional integer variable to branch on");
  double v = x.at(*frac);

  Node left, right;
  left.parent = right.parent = node.id;
  left.extra_bounds = node.extra_bounds;
  right.extra_bounds = node.extra_bounds;
  left.status = right.status = Node::Status::Open;

  auto tighten = [](Node& n, const Atom& a, double lo, double hi) {
    auto it = n.extra_bounds.find(a);
    if (it == n.extra_bounds.end()) {
      n.extra_bounds[a] = {lo, hi};
    } else {
      it->second.first = std::max(it->second.first, lo);
      it->second.second = std::min(it->second.second, hi);
    }
  };
  tighten(left, *frac, -kInf, std::floor(v));
  tighten(right, *frac, std::ceil(v), kInf);
  return {left, right};
}

SolveReport solve_ground(const Model& m, const BpcOptions& opts) {
  TreeSearch search(m, opts, /*full=*/true);
  return search.run();
}

SolveReport solve_bpc(const Model& m, const BpcOptions& opts) {
  TreeSearch search(m, opts, /*full=*/false);
  return search.run();
}

RootRelaxation root_relaxation(const Model& m, const BpcOptions& opts) {
  TreeSearch search(m, opts, /*full=*/false);
  return search.root_only();
}

bool assignment_feasible(const std::vector<LinCons>& rows, const std::map<Atom, double>& x,
                         double tol, const LinCons** violated) {
  for (const auto& row : rows) {
    double act = activity(x, row);
    if (violates_bounds(act, row, tol)) {
      if (violated) *violated = &row;
      return false;
    }
  }
  return true;
}

SolveReport solve_enum(const Model& m) {
  GroundProblem gp = ground_problem(m);

  // canonical atom order for the odometer: lexicographic (functor, args)
  std::vector<Atom> atoms = gp.atoms;
  std::sort(atoms.begin(), atoms.end());

  std::vector<long> lo(atoms.size()), hi(atoms.size());
  double assignments = 1.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const VarInfo& info = gp.infos.at(atoms[i]);
    if (info.vartype != VarType::Integer)
      throw Error(Errc::BadConfig, "solve_enum requires integer variables only");
    if (info.lb < -2.0 - 1e-9 || info.ub > 2.0 + 1e-9)
      throw Error(Errc::BadConfig, "solve_enum requires bounds within [-2, 2]");
    lo[i] = static_cast<long>(std::ceil(info.lb - 1e-9));
    hi[i] = static_cast<long>(std::floor(info.ub + 1e-9));
    assignments *= static_cast<double>(hi[i] - lo[i] + 1);
    if (assignments > double(1 << 24))
      throw Error(Errc::EnumSizeExceeded, "assignment space exceeds 2^24");
  }

  SolveReport rep;
  std::vector<long> value(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) value[i] = lo[i];

  std::map<Atom, double> x;
  bool found = false;
  double best = kInf;
  std::map<Atom, double> best_x;

  while (true) {
    x.clear();
    double obj = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      x[atoms[i]] = static_cast<double>(value[i]);
      obj += gp.infos.at(atoms[i]).objective * static_cast<double>(value[i]);
    }
    if (assignment_feasible(gp.constraints, x, 1e-6)) {
      // strict improvement keeps the lexicographically smallest optimum
      if (!found || obj < best - 1e-12) {
        found = true;
        best = obj;
        best_x = x;
      }
    }
    // odometer: the last atom varies fastest, so enumeration order is
    // lexicographic in the canonical atom order
    std::size_t k = atoms.size();
    while (k > 0 && value[k - 1] == hi[k - 1]) --k;
    if (k == 0) break;
    ++value[k - 1];
    for (std::size_t j = k; j < atoms.size(); ++j) value[j] = lo[j];
  }

  if (!found) {
    rep.status = SolveStatus::Infeasible;
    rep.objective = kInf;
    rep.bound = kInf;
    return rep;
  }
  rep.status = SolveStatus::Optimal;
  rep.objective = best;
  rep.bound = best;
  rep.gap = 0.0;
  for (const auto& [a, v] : best_x)
    if (v != 0.0) rep.assignment.emplace(a, v);
  return rep;
}

}  // namespace fomip
