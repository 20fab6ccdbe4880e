#include "fomip/separation.hpp"

#include <algorithm>
#include <set>

namespace fomip {

double activity(const std::map<Atom, double>& x, const LinCons& c) {
  double act = 0.0;
  for (const auto& t : c.terms) {
    auto it = x.find(t.atom);
    if (it != x.end()) act += t.coef * it->second;
  }
  return act;
}

double violation(double act, const LinCons& c) {
  double v = 0.0;
  if (c.lb.is_finite()) v = std::max(v, c.lb.value - act);
  if (c.ub.is_finite()) v = std::max(v, act - c.ub.value);
  return v;
}

bool violates_bounds(double act, const LinCons& c, double threshold) {
  if (c.lb.is_finite() && act < c.lb.value - threshold) return true;
  if (c.ub.is_finite() && act > c.ub.value + threshold) return true;
  return false;
}

namespace {

struct CutCollector {
  std::set<LinCons> seen;
  std::vector<std::pair<LinCons, double>> cuts;

  void add(LinCons c, double viol) {
    if (seen.insert(c).second) cuts.emplace_back(std::move(c), viol);
  }

  void finish(SeparationResult& out, const SeparationOptions& opts) {
    std::sort(cuts.begin(), cuts.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (opts.max_cuts > 0 && cuts.size() > opts.max_cuts) cuts.resize(opts.max_cuts);
    out.cuts = std::move(cuts);
  }
};

LinCons instantiate_row(const ConstraintRule& rule, const BodyPlan& plan, const Binding& b) {
  std::vector<LinTerm> terms;
  terms.reserve(rule.terms.size());
  for (const auto& t : rule.terms) terms.push_back(LinTerm{t.coef, instantiate(t.atom, plan, b)});
  return normalize_lincons(rule.lb, std::move(terms), rule.ub);
}

// Per-functor range of values an instantiated term can read from x,
// with 0 included for atoms x does not mention.
struct ValueExtremes {
  std::map<std::string, std::pair<double, double>> by_functor;

  explicit ValueExtremes(const std::map<Atom, double>& x) {
    for (const auto& [atom, v] : x) {
      auto [it, inserted] = by_functor.emplace(atom.functor, std::make_pair(0.0, 0.0));
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
  }

  std::pair<double, double> of(const std::string& functor) const {
    auto it = by_functor.find(functor);
    return it == by_functor.end() ? std::make_pair(0.0, 0.0) : it->second;
  }
};

}  // namespace

std::vector<Literal> reorder_for_guided(const ConstraintRule& rule) {
  // generator literal per variable = its first positive domain literal
  std::vector<const Literal*> generators;
  std::vector<std::string> gen_vars;
  for (const auto& lit : rule.body) {
    if (lit.kind != Literal::Kind::Domain || lit.negated || !lit.arg.is_var()) continue;
    if (std::find(gen_vars.begin(), gen_vars.end(), lit.arg.text) != gen_vars.end()) continue;
    gen_vars.push_back(lit.arg.text);
    generators.push_back(&lit);
  }

  // ground the template terms cheapest-first
  std::vector<std::size_t> term_order(rule.terms.size());
  for (std::size_t i = 0; i < term_order.size(); ++i) term_order[i] = i;
  auto distinct_vars = [&](std::size_t ti) {
    std::set<std::string> vs;
    for (const auto& a : rule.terms[ti].atom.args)
      if (a.is_var()) vs.insert(a.text);
    return vs.size();
  };
  std::stable_sort(term_order.begin(), term_order.end(),
                   [&](std::size_t a, std::size_t b) { return distinct_vars(a) < distinct_vars(b); });

  std::vector<Literal> out;
  std::set<std::string> emitted;
  auto emit_var = [&](const std::string& v) {
    if (emitted.count(v)) return;
    for (std::size_t g = 0; g < gen_vars.size(); ++g) {
      if (gen_vars[g] == v) {
        out.push_back(*generators[g]);
        emitted.insert(v);
        return;
      }
    }
    // no generator: the safety check rejected this rule already
  };
  for (std::size_t ti : term_order)
    for (const auto& a : rule.terms[ti].atom.args)
      if (a.is_var()) emit_var(a.text);
  for (const auto& v : gen_vars) emit_var(v);

  for (const auto& lit : rule.body) {
    bool is_gen = false;
    for (const auto* g : generators)
      if (g == &lit) is_gen = true;
    if (!is_gen) out.push_back(lit);
  }
  return out;
}

SeparationResult separate_naive(const Model& m, const std::map<Atom, double>& x,
                                const SeparationOptions& opts) {
  SeparationResult res;
  CutCollector collector;
  for (const auto& rule : m.constraint_rules) {
    BodyPlan plan = BodyPlan::build(m, rule.body);
    enumerate_bindings(m, plan, [&](const Binding& b) {
      ++res.candidates_enumerated;
      LinCons c = instantiate_row(rule, plan, b);
      double act = activity(x, c);
      if (violates_bounds(act, c, opts.threshold)) collector.add(std::move(c), violation(act, c));
      return true;
    });
  }
  collector.finish(res, opts);
  return res;
}

SeparationResult separate_guided(const Model& m, const std::map<Atom, double>& x,
                                 const SeparationOptions& opts) {
  SeparationResult res;
  CutCollector collector;
  ValueExtremes extremes(x);

  for (const auto& rule : m.constraint_rules) {
    std::vector<Literal> body = reorder_for_guided(rule);
    BodyPlan plan = BodyPlan::build(m, body);
    std::size_t nsteps = plan.steps().size();

    // step depth after which each term is fully ground
    std::vector<std::size_t> ready_depth(rule.terms.size(), 0);
    for (std::size_t ti = 0; ti < rule.terms.size(); ++ti) {
      for (const auto& a : rule.terms[ti].atom.args) {
        if (!a.is_var()) continue;
        int slot = plan.slot_of(a.text);
        if (slot >= 0)
          ready_depth[ti] = std::max(ready_depth[ti], static_cast<std::size_t>(slot) + 1);
      }
    }

    // optimistic bounds on the contribution of terms not yet ground
    std::vector<double> min_rest(nsteps + 1, 0.0), max_rest(nsteps + 1, 0.0);
    for (std::size_t ti = 0; ti < rule.terms.size(); ++ti) {
      auto [lo, hi] = extremes.of(rule.terms[ti].atom.functor);
      double c = rule.terms[ti].coef;
      double tmin = std::min(c * lo, c * hi), tmax = std::max(c * lo, c * hi);
      for (std::size_t d = 0; d < ready_depth[ti]; ++d) {
        min_rest[d] += tmin;
        max_rest[d] += tmax;
      }
    }

    std::vector<double> partial(nsteps + 1, 0.0);
    // terms with no variables contribute before any step binds
    for (std::size_t ti = 0; ti < rule.terms.size(); ++ti) {
      if (ready_depth[ti] != 0) continue;
      Atom a;
      a.functor = rule.terms[ti].atom.functor;
      for (const auto& t : rule.terms[ti].atom.args) a.args.push_back(t.text);
      auto it = x.find(a);
      partial[0] += rule.terms[ti].coef * (it == x.end() ? 0.0 : it->second);
    }

    auto cannot_violate = [&](double part, std::size_t depth) {
      bool lb_possible =
          rule.lb.is_finite() && part + min_rest[depth] < rule.lb.value - opts.threshold;
      bool ub_possible =
          rule.ub.is_finite() && part + max_rest[depth] > rule.ub.value + opts.threshold;
      return !lb_possible && !ub_possible;
    };

    enumerate_bindings(
        m, plan,
        [&](const Binding& b) {
          ++res.candidates_enumerated;
          // the running template sum equals the normalized row's activity
          double act = partial[nsteps];
          bool viol = (rule.lb.is_finite() && act < rule.lb.value - opts.threshold) ||
                      (rule.ub.is_finite() && act > rule.ub.value + opts.threshold);
          if (viol) {
            LinCons c = instantiate_row(rule, plan, b);
            collector.add(std::move(c), violation(act, c));
          }
          return true;
        },
        [&](const Binding& b, std::size_t depth) {
          std::size_t k = depth + 1;
          double part = partial[k - 1];
          for (std::size_t ti = 0; ti < rule.terms.size(); ++ti) {
            if (ready_depth[ti] != k) continue;
            Atom a = instantiate(rule.terms[ti].atom, plan, b);
            auto it = x.find(a);
            part += rule.terms[ti].coef * (it == x.end() ? 0.0 : it->second);
          }
          partial[k] = part;
          if (k < nsteps && cannot_violate(part, k)) {
            ++res.candidates_pruned;
            return false;
          }
          return true;
        });
  }
  collector.finish(res, opts);
  return res;
}

}  // namespace fomip
