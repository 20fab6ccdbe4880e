#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fomip/atom.hpp"

namespace fomip {

// Logic variables are capitalized identifiers, constants lowercase.
enum class TermKind { Var, Const };

struct Term {
  TermKind kind = TermKind::Const;
  std::string text;

  static Term var(std::string name) { return Term{TermKind::Var, std::move(name)}; }
  static Term constant(std::string name) { return Term{TermKind::Const, std::move(name)}; }

  bool is_var() const { return kind == TermKind::Var; }

  auto operator<=>(const Term&) const = default;
};

// functor(t1,...,tn) where the ti may still contain logic variables.
struct AtomPattern {
  std::string functor;
  std::vector<Term> args;

  bool operator==(const AtomPattern&) const = default;
};

enum class CmpOp { Eq, Ne, Lt, Le };

// A body literal: either a domain-membership test/generator d(t) or a
// comparison t1 op t2, possibly under `not`.
struct Literal {
  enum class Kind { Domain, Cmp } kind = Kind::Domain;
  bool negated = false;

  // Kind::Domain
  std::string domain;
  Term arg;

  // Kind::Cmp
  CmpOp op = CmpOp::Eq;
  Term lhs, rhs;

  bool operator==(const Literal&) const = default;
};

struct VarRule {
  AtomPattern head;
  std::vector<Literal> body;

  bool operator==(const VarRule&) const = default;
};

struct LinTermTemplate {
  double coef = 1.0;
  AtomPattern atom;

  bool operator==(const LinTermTemplate&) const = default;
};

struct ConstraintRule {
  Bound lb;
  std::vector<LinTermTemplate> terms;
  Bound ub;
  std::vector<Literal> body;

  bool operator==(const ConstraintRule&) const = default;
};

// objective/lb/ub rules: first pattern match in declaration order wins.
struct ValueRule {
  AtomPattern pattern;
  double value = 0.0;

  bool operator==(const ValueRule&) const = default;
};

struct VartypeRule {
  AtomPattern pattern;
  VarType value = VarType::Integer;

  bool operator==(const VartypeRule&) const = default;
};

struct Defaults {
  double objective = 0.0;
  double lb = 0.0;
  double ub = 1.0;
  VarType vartype = VarType::Integer;

  bool operator==(const Defaults&) const = default;
};

struct Model {
  // Declaration order matters: domain constant order defines <, and
  // rule order defines the canonical grounding order.
  std::vector<std::pair<std::string, std::vector<std::string>>> domains;
  std::vector<VarRule> variable_rules;
  std::vector<ConstraintRule> constraint_rules;
  std::vector<ValueRule> objective_rules;
  std::vector<ValueRule> lb_rules;
  std::vector<ValueRule> ub_rules;
  std::vector<VartypeRule> vartype_rules;
  Defaults defaults;

  // functor -> per-argument domain names, derived from the var rules.
  std::map<std::string, std::vector<std::string>> signatures;

  bool operator==(const Model&) const = default;

  const std::vector<std::string>* domain(const std::string& name) const;
  bool domain_has(const std::string& name, const std::string& constant) const;
  // Position of `constant` in the declared order of `name`, or -1.
  int domain_rank(const std::string& name, const std::string& constant) const;
};

// Binds pattern variables against a ground atom; repeated variables
// must match equal constants. Returns false on mismatch.
bool match_pattern(const AtomPattern& pat, const Atom& atom);

// Objective coefficient, bounds and type for one atom: first matching
// rule of each family in declaration order, else the defaults.
// Throws UnknownFunctor / InvalidVarBounds.
VarInfo atom_info(const Model& m, const Atom& atom);

}  // namespace fomip
