#include "fomip/grounder.hpp"

#include <algorithm>
#include <cassert>

#include "fomip/errors.hpp"

namespace fomip {
namespace {

int find_or_add(std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<int>(it - names.begin());
  names.push_back(name);
  return static_cast<int>(names.size()) - 1;
}

}  // namespace

BodyPlan BodyPlan::build(const Model& m, const std::vector<Literal>& body) {
  BodyPlan plan;
  // The first positive domain literal naming a fresh variable is that
  // variable's generator; everything else becomes a test.
  std::vector<bool> is_generator(body.size(), false);
  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto& lit = body[i];
    if (lit.kind != Literal::Kind::Domain || lit.negated || !lit.arg.is_var()) continue;
    int before = static_cast<int>(plan.var_names_.size());
    int slot = find_or_add(plan.var_names_, lit.arg.text);
    if (slot >= before) {
      plan.steps_.push_back(Step{slot, lit.domain});
      is_generator[i] = true;
    }
  }

  plan.tests_.resize(plan.steps_.size() + 1);
  // slot index == step index by construction
  auto depth_of_var = [&](const std::string& v) -> int {
    int slot = plan.slot_of(v);
    return slot < 0 ? 0 : slot + 1;
  };

  for (std::size_t i = 0; i < body.size(); ++i) {
    if (is_generator[i]) continue;
    const auto& lit = body[i];
    int depth = 0;
    Test test{&lit, ""};
    if (lit.kind == Literal::Kind::Domain) {
      if (lit.arg.is_var()) depth = depth_of_var(lit.arg.text);
    } else {
      if (lit.lhs.is_var()) depth = std::max(depth, depth_of_var(lit.lhs.text));
      if (lit.rhs.is_var()) depth = std::max(depth, depth_of_var(lit.rhs.text));
      if (lit.op == CmpOp::Lt || lit.op == CmpOp::Le) {
        // ranking domain: a var side's generator domain, else the first
        // domain holding both constants
        auto var_domain = [&](const Term& t) -> std::string {
          if (!t.is_var()) return "";
          int slot = plan.slot_of(t.text);
          if (slot < 0) return "";
          for (const auto& s : plan.steps_)
            if (s.slot == slot) return s.domain;
          return "";
        };
        test.rank_domain = var_domain(lit.lhs);
        if (test.rank_domain.empty()) test.rank_domain = var_domain(lit.rhs);
        if (test.rank_domain.empty()) {
          for (const auto& [name, consts] : m.domains) {
            bool l = std::find(consts.begin(), consts.end(), lit.lhs.text) != consts.end();
            bool r = std::find(consts.begin(), consts.end(), lit.rhs.text) != consts.end();
            if (l && r) {
              test.rank_domain = name;
              break;
            }
          }
        }
      }
    }
    plan.tests_[static_cast<std::size_t>(depth)].push_back(test);
  }
  return plan;
}

int BodyPlan::slot_of(const std::string& var) const {
  auto it = std::find(var_names_.begin(), var_names_.end(), var);
  return it == var_names_.end() ? -1 : static_cast<int>(it - var_names_.begin());
}

namespace {

const std::string& resolve(const Term& t, const BodyPlan& plan, const Binding& b) {
  static const std::string unbound;
  if (!t.is_var()) return t.text;
  int slot = plan.slot_of(t.text);
  assert(slot >= 0 && "unbound variable in a validated rule");
  if (slot < 0) return unbound;
  return b[static_cast<std::size_t>(slot)];
}

bool eval_test(const Model& m, const BodyPlan::Test& t, const BodyPlan& plan, const Binding& b) {
  const Literal& lit = *t.lit;
  bool value = false;
  if (lit.kind == Literal::Kind::Domain) {
    value = m.domain_has(lit.domain, resolve(lit.arg, plan, b));
  } else {
    const std::string& l = resolve(lit.lhs, plan, b);
    const std::string& r = resolve(lit.rhs, plan, b);
    switch (lit.op) {
      case CmpOp::Eq: value = (l == r); break;
      case CmpOp::Ne: value = (l != r); break;
      case CmpOp::Lt:
      case CmpOp::Le: {
        int lr = m.domain_rank(t.rank_domain, l);
        int rr = m.domain_rank(t.rank_domain, r);
        if (lr < 0 || rr < 0) return lit.negated;  // incomparable: fail the positive test
        value = lit.op == CmpOp::Lt ? lr < rr : lr <= rr;
        break;
      }
    }
  }
  return lit.negated ? !value : value;
}

bool eval_tests(const Model& m, const BodyPlan& plan, std::size_t depth, const Binding& b) {
  for (const auto& t : plan.tests_at(depth))
    if (!eval_test(m, t, plan, b)) return false;
  return true;
}

bool recurse(const Model& m, const BodyPlan& plan, Binding& b, std::size_t depth,
             const std::function<bool(const Binding&)>& on_complete,
             const std::function<bool(const Binding&, std::size_t)>& on_enter) {
  if (depth == plan.steps().size()) return on_complete(b);
  const auto& step = plan.steps()[depth];
  const auto* consts = m.domain(step.domain);
  if (!consts) return true;  // unknown domain: empty relation
  for (const auto& c : *consts) {
    b[static_cast<std::size_t>(step.slot)] = c;
    if (!eval_tests(m, plan, depth + 1, b)) continue;
    if (on_enter && !on_enter(b, depth)) continue;
    if (!recurse(m, plan, b, depth + 1, on_complete, on_enter)) return false;
  }
  return true;
}

}  // namespace

void enumerate_bindings(const Model& m, const BodyPlan& plan,
                        const std::function<bool(const Binding&)>& on_complete,
                        const std::function<bool(const Binding&, std::size_t)>& on_enter) {
  Binding b(plan.var_names().size());
  if (!eval_tests(m, plan, 0, b)) return;
  recurse(m, plan, b, 0, on_complete, on_enter);
}

Atom instantiate(const AtomPattern& pat, const BodyPlan& plan, const Binding& b) {
  Atom a;
  a.functor = pat.functor;
  a.args.reserve(pat.args.size());
  for (const auto& t : pat.args) a.args.push_back(resolve(t, plan, b));
  return a;
}

std::vector<std::map<std::string, std::string>> substitutions(
    const Model& m, const std::vector<Literal>& body) {
  BodyPlan plan = BodyPlan::build(m, body);
  std::vector<std::map<std::string, std::string>> out;
  enumerate_bindings(m, plan, [&](const Binding& b) {
    std::map<std::string, std::string> sub;
    for (std::size_t i = 0; i < plan.var_names().size(); ++i) sub[plan.var_names()[i]] = b[i];
    out.push_back(std::move(sub));
    return true;
  });
  return out;
}

std::vector<Atom> ground_variables(const Model& m) {
  std::vector<Atom> out;
  std::set<Atom> seen;
  for (const auto& rule : m.variable_rules) {
    BodyPlan plan = BodyPlan::build(m, rule.body);
    enumerate_bindings(m, plan, [&](const Binding& b) {
      Atom a = instantiate(rule.head, plan, b);
      if (seen.insert(a).second) out.push_back(std::move(a));
      return true;
    });
  }
  return out;
}

std::vector<LinCons> ground_constraints(const Model& m) {
  std::vector<Atom> atoms = ground_variables(m);
  std::set<Atom> declared(atoms.begin(), atoms.end());

  std::vector<LinCons> out;
  std::set<LinCons> seen;
  for (const auto& rule : m.constraint_rules) {
    BodyPlan plan = BodyPlan::build(m, rule.body);
    enumerate_bindings(m, plan, [&](const Binding& b) {
      std::vector<LinTerm> terms;
      terms.reserve(rule.terms.size());
      for (const auto& t : rule.terms)
        terms.push_back(LinTerm{t.coef, instantiate(t.atom, plan, b)});
      LinCons c = normalize_lincons(rule.lb, std::move(terms), rule.ub);
      for (const auto& term : c.terms)
        if (!declared.count(term.atom))
          throw Error(Errc::GroundAtomNotDeclared,
                      "constraint instantiates " + term.atom.str() +
                          ", which no variable rule derives");
      if (seen.insert(c).second) out.push_back(std::move(c));
      return true;
    });
  }
  return out;
}

GroundProblem ground_problem(const Model& m) {
  GroundProblem gp;
  gp.atoms = ground_variables(m);
  for (const auto& a : gp.atoms) gp.infos.emplace(a, atom_info(m, a));
  gp.constraints = ground_constraints(m);
  return gp;
}

}  // namespace fomip
