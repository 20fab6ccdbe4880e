#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fomip/model.hpp"

namespace fomip {

// Compiled form of a rule body: positive domain literals become
// enumeration steps in written order; every other literal runs as a
// test at the earliest point its variables are bound.
class BodyPlan {
public:
  struct Step {
    int slot;           // variable slot bound by this step
    std::string domain;
  };

  struct Test {
    const Literal* lit;
    // domain whose declaration order ranks < and <= operands
    std::string rank_domain;
  };

  static BodyPlan build(const Model& m, const std::vector<Literal>& body);

  int slot_of(const std::string& var) const;  // -1 if unknown
  const std::vector<Step>& steps() const { return steps_; }
  const std::vector<std::string>& var_names() const { return var_names_; }

  // tests to run once `depth` steps are bound (index 0 = ground tests)
  const std::vector<Test>& tests_at(std::size_t depth) const { return tests_[depth]; }

private:
  std::vector<std::string> var_names_;  // slot -> name
  std::vector<Step> steps_;
  std::vector<std::vector<Test>> tests_;  // size steps_+1
};

// Binding: constant per slot, aligned with plan.var_names().
using Binding = std::vector<std::string>;

// on_complete: full binding; return false to stop the whole enumeration.
// on_enter: called after each step binds (depth = step index); return
// false to prune that branch. Bindings are yielded in lexicographic
// order of the enumeration steps.
void enumerate_bindings(
    const Model& m, const BodyPlan& plan,
    const std::function<bool(const Binding&)>& on_complete,
    const std::function<bool(const Binding&, std::size_t depth)>& on_enter = nullptr);

Atom instantiate(const AtomPattern& pat, const BodyPlan& plan, const Binding& b);

// All satisfying assignments of a body, as var->constant maps, in
// enumeration order. Mostly a test convenience over enumerate_bindings.
std::vector<std::map<std::string, std::string>> substitutions(
    const Model& m, const std::vector<Literal>& body);

struct GroundProblem {
  std::vector<Atom> atoms;             // canonical: rule order, then binding order
  std::map<Atom, VarInfo> infos;
  std::vector<LinCons> constraints;    // normalized, duplicates removed
};

std::vector<Atom> ground_variables(const Model& m);
std::vector<LinCons> ground_constraints(const Model& m);
GroundProblem ground_problem(const Model& m);

}  // namespace fomip
