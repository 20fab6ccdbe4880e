#include "fomip/pricing.hpp"

#include <algorithm>
#include <map>

namespace fomip {

std::vector<std::pair<int, double>> column_of(const Atom& atom,
                                              const std::vector<LinCons>& active) {
  std::vector<std::pair<int, double>> col;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const auto& terms = active[i].terms;
    auto it = std::lower_bound(terms.begin(), terms.end(), atom,
                               [](const LinTerm& t, const Atom& a) { return t.atom < a; });
    if (it != terms.end() && it->atom == atom)
      col.emplace_back(static_cast<int>(i), it->coef);
  }
  return col;
}

namespace {

void sort_priced(PricingResult& res) {
  std::sort(res.priced.begin(), res.priced.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
}

// Examine one candidate atom; returns its reduced cost contribution to
// the result.
void examine(const Model& m, const Atom& atom, const LpSolution& sol,
             const std::vector<LinCons>& active, const PricingOptions& opts,
             PricingResult& res) {
  VarInfo info = atom_info(m, atom);
  auto col = column_of(atom, active);
  double rc = reduced_cost(sol, info.objective, col);
  ++res.candidates_enumerated;
  if (rc < -opts.threshold) res.priced.emplace_back(atom, rc);
}

}  // namespace

PricingResult price_naive(const Model& m, const std::set<Atom>& restricted,
                          const LpSolution& sol, const std::vector<LinCons>& active,
                          const PricingOptions& opts) {
  PricingResult res;
  std::set<Atom> examined;
  for (const auto& rule : m.variable_rules) {
    BodyPlan plan = BodyPlan::build(m, rule.body);
    enumerate_bindings(m, plan, [&](const Binding& b) {
      Atom atom = instantiate(rule.head, plan, b);
      if (restricted.count(atom) || !examined.insert(atom).second) return true;
      examine(m, atom, sol, active, opts, res);
      return true;
    });
  }
  sort_priced(res);
  return res;
}

PricingResult price_guided(const Model& m, const std::set<Atom>& restricted,
                           const LpSolution& sol, const std::vector<LinCons>& active,
                           const PricingOptions& opts) {
  PricingResult res;

  // best possible dual contribution per functor: sum over rows of the
  // largest y_i * coef this functor can collect in that row (or 0 when
  // the atom does not appear in the row)
  std::map<std::string, double> max_dual_contrib;
  for (std::size_t i = 0; i < active.size() && i < sol.duals.size(); ++i) {
    double y = sol.duals[i];
    std::map<std::string, double> row_best;
    for (const auto& t : active[i].terms) {
      double contrib = y * t.coef;
      auto [it, inserted] = row_best.emplace(t.atom.functor, contrib);
      if (!inserted) it->second = std::max(it->second, contrib);
    }
    for (const auto& [functor, best] : row_best)
      if (best > 0.0) max_dual_contrib[functor] += best;
  }

  // smallest objective coefficient any atom of a functor can have
  auto min_objective = [&](const std::string& functor) {
    double lo = m.defaults.objective;
    for (const auto& r : m.objective_rules)
      if (r.pattern.functor == functor) lo = std::min(lo, r.value);
    return lo;
  };

  std::map<std::string, bool> prune_cache;
  auto family_prunable = [&](const std::string& functor) {
    auto it = prune_cache.find(functor);
    if (it != prune_cache.end()) return it->second;
    auto cit = max_dual_contrib.find(functor);
    double rc_floor = min_objective(functor) - (cit == max_dual_contrib.end() ? 0.0 : cit->second);
    bool prunable = rc_floor >= -opts.threshold;
    prune_cache.emplace(functor, prunable);
    return prunable;
  };

  std::set<Atom> examined;
  for (const auto& rule : m.variable_rules) {
    if (family_prunable(rule.head.functor)) {
      ++res.candidates_pruned;
      continue;
    }
    BodyPlan plan = BodyPlan::build(m, rule.body);
    enumerate_bindings(m, plan, [&](const Binding& b) {
      Atom atom = instantiate(rule.head, plan, b);
      if (restricted.count(atom) || !examined.insert(atom).second) return true;
      examine(m, atom, sol, active, opts, res);
      return true;
    });
  }
  sort_priced(res);
  return res;
}

}  // namespace fomip
