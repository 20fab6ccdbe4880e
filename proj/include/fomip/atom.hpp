#pragma once

#include <compare>
#include <iosfwd>
#include <string>
#include <vector>

namespace fomip {

// A ground first-order term functor(c1,...,cn). Every atom is exactly
// one MIP variable; structural equality is variable identity.
struct Atom {
  std::string functor;
  std::vector<std::string> args;

  auto operator<=>(const Atom&) const = default;

  std::string str() const;
};

std::ostream& operator<<(std::ostream& os, const Atom& a);

enum class BoundKind { NegInf, Finite, PosInf };

// One side of a linear constraint. NegInf is legal only as a lower
// bound, PosInf only as an upper bound.
struct Bound {
  BoundKind kind = BoundKind::Finite;
  double value = 0.0;

  static Bound finite(double v) { return Bound{BoundKind::Finite, v}; }
  static Bound neg_inf() { return Bound{BoundKind::NegInf, 0.0}; }
  static Bound pos_inf() { return Bound{BoundKind::PosInf, 0.0}; }

  bool is_finite() const { return kind == BoundKind::Finite; }

  auto operator<=>(const Bound&) const = default;
};

struct LinTerm {
  double coef = 0.0;
  Atom atom;

  auto operator<=>(const LinTerm&) const = default;
};

// lb <= sum(coef_k * atom_k) <= ub. After normalize_lincons the terms
// are sorted by atom, each atom appears once, no coefficient is zero,
// and at least one bound is finite.
struct LinCons {
  Bound lb;
  std::vector<LinTerm> terms;
  Bound ub;

  auto operator<=>(const LinCons&) const = default;

  std::string str() const;
};

std::ostream& operator<<(std::ostream& os, const LinCons& c);

// Merges duplicate atoms, drops zero coefficients, sorts terms into
// canonical (functor, args) order. Throws Error on illegal bounds.
LinCons normalize_lincons(Bound lb, std::vector<LinTerm> terms, Bound ub);

// Checks all LinCons invariants; used by debug builds after every
// construction and by tests directly.
bool lincons_valid(const LinCons& c, std::string* why = nullptr);

enum class VarType { Integer, Continuous };

struct VarInfo {
  double objective = 0.0;
  double lb = 0.0;
  double ub = 1.0;
  VarType vartype = VarType::Integer;

  bool operator==(const VarInfo&) const = default;
};

}  // namespace fomip
