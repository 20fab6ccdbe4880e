#include "fomip/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fomip/errors.hpp"

namespace fomip {

const std::vector<std::string>* Model::domain(const std::string& name) const {
  for (auto& [dname, consts] : domains)
    if (dname == name) return &consts;
  return nullptr;
}

bool Model::domain_has(const std::string& name, const std::string& constant) const {
  return domain_rank(name, constant) >= 0;
}

int Model::domain_rank(const std::string& name, const std::string& constant) const {
  const auto* consts = domain(name);
  if (!consts) return -1;
  auto it = std::find(consts->begin(), consts->end(), constant);
  return it == consts->end() ? -1 : static_cast<int>(it - consts->begin());
}

bool match_pattern(const AtomPattern& pat, const Atom& atom) {
  if (pat.functor != atom.functor || pat.args.size() != atom.args.size()) return false;
  std::map<std::string, std::string> binding;
  for (std::size_t i = 0; i < pat.args.size(); ++i) {
    const Term& t = pat.args[i];
    if (t.is_var()) {
      auto [it, inserted] = binding.emplace(t.text, atom.args[i]);
      if (!inserted && it->second != atom.args[i]) return false;
    } else if (t.text != atom.args[i]) {
      return false;
    }
  }
  return true;
}

VarInfo atom_info(const Model& m, const Atom& atom) {
  auto sig = m.signatures.find(atom.functor);
  if (sig == m.signatures.end())
    throw Error(Errc::UnknownFunctor, "unknown functor '" + atom.functor + "'");

  VarInfo info;
  info.objective = m.defaults.objective;
  info.lb = m.defaults.lb;
  info.ub = m.defaults.ub;
  info.vartype = m.defaults.vartype;

  for (const auto& r : m.objective_rules)
    if (match_pattern(r.pattern, atom)) {
      info.objective = r.value;
      break;
    }
  for (const auto& r : m.lb_rules)
    if (match_pattern(r.pattern, atom)) {
      info.lb = r.value;
      break;
    }
  for (const auto& r : m.ub_rules)
    if (match_pattern(r.pattern, atom)) {
      info.ub = r.value;
      break;
    }
  for (const auto& r : m.vartype_rules)
    if (match_pattern(r.pattern, atom)) {
      info.vartype = r.value;
      break;
    }

  if (info.lb > info.ub)
    throw Error(Errc::InvalidVarBounds,
                "variable " + atom.str() + " has lb > ub");
  if (info.vartype == VarType::Integer &&
      std::ceil(info.lb - 1e-9) > std::floor(info.ub + 1e-9))
    throw Error(Errc::InvalidVarBounds,
                "integer variable " + atom.str() + " has no integer in its bounds");
  return info;
}

}  // namespace fomip
