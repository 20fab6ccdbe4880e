#include "fomip/lp_export.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include "fomip/errors.hpp"
#include "fomip/util.hpp"

namespace fomip {
namespace {

void write_expr(std::ostream& os, const std::vector<LinTerm>& terms,
                const std::map<Atom, std::string>& names) {
  if (terms.empty()) {
    os << "0 " << names.begin()->second;
    return;
  }
  bool first = true;
  for (const auto& t : terms) {
    double c = t.coef;
    if (first) {
      if (c < 0) os << "- ";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    os << format_double(std::abs(c)) << " " << names.at(t.atom);
  }
}

}  // namespace

std::string mangle(const Atom& a) {
  std::string s = a.functor;
  for (const auto& arg : a.args) {
    s += '_';
    s += arg;
  }
  return s;
}

void export_lp(const GroundProblem& gp, std::ostream& os) {
  std::map<Atom, std::string> names;
  std::map<std::string, Atom> reverse;
  for (const auto& a : gp.atoms) {
    std::string n = mangle(a);
    auto [it, inserted] = reverse.emplace(n, a);
    if (!inserted)
      throw Error(Errc::NameCollision, "atoms " + it->second.str() + " and " + a.str() +
                                           " both mangle to '" + n + "'");
    names.emplace(a, std::move(n));
  }

  os << "\\ fomip model export\n";
  os << "Minimize\n obj:";
  bool any = false;
  for (const auto& a : gp.atoms) {
    double c = gp.infos.at(a).objective;
    if (c == 0.0) continue;
    os << (c < 0 ? " - " : " + ") << format_double(std::abs(c)) << " " << names.at(a);
    any = true;
  }
  if (!any) os << " 0" << (gp.atoms.empty() ? "" : " " + names.at(gp.atoms.front()));
  os << "\n";

  os << "Subject To\n";
  for (std::size_t i = 0; i < gp.constraints.size(); ++i) {
    const LinCons& c = gp.constraints[i];
    std::string name = "c" + std::to_string(i + 1);
    if (c.terms.empty() && gp.atoms.empty()) continue;
    if (c.lb.is_finite() && c.ub.is_finite() && c.lb.value == c.ub.value) {
      os << " " << name << ": ";
      write_expr(os, c.terms, names);
      os << " = " << format_double(c.lb.value) << "\n";
      continue;
    }
    if (c.lb.is_finite()) {
      os << " " << name << ": ";
      write_expr(os, c.terms, names);
      os << " >= " << format_double(c.lb.value) << "\n";
    }
    if (c.ub.is_finite()) {
      os << " " << (c.lb.is_finite() ? name + "_r" : name) << ": ";
      write_expr(os, c.terms, names);
      os << " <= " << format_double(c.ub.value) << "\n";
    }
  }

  os << "Bounds\n";
  for (const auto& a : gp.atoms) {
    const VarInfo& info = gp.infos.at(a);
    os << " " << format_double(info.lb) << " <= " << names.at(a) << " <= "
       << format_double(info.ub) << "\n";
  }

  bool any_int = false;
  for (const auto& a : gp.atoms)
    if (gp.infos.at(a).vartype == VarType::Integer) any_int = true;
  if (any_int) {
    os << "General\n";
    for (const auto& a : gp.atoms)
      if (gp.infos.at(a).vartype == VarType::Integer) os << " " << names.at(a) << "\n";
  }
  os << "End\n";
}

}  // namespace fomip
