#include "fomip/atom.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "fomip/errors.hpp"
#include "fomip/util.hpp"

namespace fomip {

std::string Atom::str() const {
  std::string s = functor;
  s += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) s += ',';
    s += args[i];
  }
  s += ')';
  return s;
}

std::ostream& operator<<(std::ostream& os, const Atom& a) { return os << a.str(); }

std::string LinCons::str() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const LinCons& c) {
  if (c.lb.is_finite())
    os << format_double(c.lb.value);
  else
    os << "-inf";
  os << " <= ";
  if (c.terms.empty()) os << "0";
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    if (i > 0) os << " + ";
    os << format_double(c.terms[i].coef) << "*" << c.terms[i].atom;
  }
  os << " <= ";
  if (c.ub.is_finite())
    os << format_double(c.ub.value);
  else
    os << "inf";
  return os;
}

LinCons normalize_lincons(Bound lb, std::vector<LinTerm> terms, Bound ub) {
  if (!lb.is_finite() && !ub.is_finite())
    throw Error(Errc::BothBoundsAbsent, "constraint has no finite bound");
  if (lb.kind == BoundKind::PosInf)
    throw Error(Errc::InvalidBound, "PosInf is not a legal lower bound");
  if (ub.kind == BoundKind::NegInf)
    throw Error(Errc::InvalidBound, "NegInf is not a legal upper bound");
  if (lb.is_finite() && !std::isfinite(lb.value))
    throw Error(Errc::InvalidBound, "non-finite lower bound value");
  if (ub.is_finite() && !std::isfinite(ub.value))
    throw Error(Errc::InvalidBound, "non-finite upper bound value");
  if (lb.is_finite() && ub.is_finite() && lb.value > ub.value)
    throw Error(Errc::LbExceedsUb, "lower bound exceeds upper bound");

  std::map<Atom, double> merged;
  for (auto& t : terms) {
    if (!std::isfinite(t.coef))
      throw Error(Errc::InvalidBound, "non-finite coefficient on " + t.atom.str());
    merged[t.atom] += t.coef;
  }
  LinCons out;
  out.lb = lb;
  out.ub = ub;
  out.terms.reserve(merged.size());
  for (auto& [atom, coef] : merged) {
    if (coef == 0.0) continue;
    out.terms.push_back(LinTerm{coef, atom});
  }
#ifndef NDEBUG
  std::string why;
  assert(lincons_valid(out, &why) && "normalize_lincons produced an invalid constraint");
#endif
  return out;
}

bool lincons_valid(const LinCons& c, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (c.lb.kind == BoundKind::PosInf) return fail("lb is PosInf");
  if (c.ub.kind == BoundKind::NegInf) return fail("ub is NegInf");
  if (!c.lb.is_finite() && !c.ub.is_finite()) return fail("both bounds absent");
  if (c.lb.is_finite() && c.ub.is_finite() && c.lb.value > c.ub.value)
    return fail("lb exceeds ub");
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    if (c.terms[i].coef == 0.0 || !std::isfinite(c.terms[i].coef))
      return fail("zero or non-finite coefficient");
    if (i > 0 && !(c.terms[i - 1].atom < c.terms[i].atom))
      return fail("terms not in canonical order or duplicate atom");
  }
  return true;
}

}  // namespace fomip
