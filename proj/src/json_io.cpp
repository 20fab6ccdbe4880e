#include "fomip/json_io.hpp"

#include <cmath>

#include "fomip/util.hpp"

namespace fomip {
namespace {

using json = nlohmann::ordered_json;

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round9(v);
}

json bound_json(const Bound& b) {
  if (!b.is_finite()) return nullptr;
  return round9(b.value);
}

json lincons_json(const LinCons& c) {
  json row;
  row["lb"] = bound_json(c.lb);
  json terms = json::array();
  for (const auto& t : c.terms) {
    json term;
    term["coef"] = round9(t.coef);
    term["atom"] = t.atom.str();
    terms.push_back(std::move(term));
  }
  row["terms"] = std::move(terms);
  row["ub"] = bound_json(c.ub);
  return row;
}

}  // namespace

json report_to_json(const SolveReport& rep, bool include_trace) {
  json j;
  j["schema"] = 1;
  j["status"] = rep.status == SolveStatus::Optimal ? "optimal" : "infeasible";
  j["objective"] = num(rep.objective);
  j["bound"] = num(rep.bound);
  j["gap"] = num(rep.gap);
  json assignment = json::object();
  for (const auto& [atom, v] : rep.assignment) assignment[atom.str()] = round9(v);
  j["assignment"] = std::move(assignment);
  json stats;
  stats["nodes"] = rep.stats.nodes;
  stats["lp_solves"] = rep.stats.lp_solves;
  stats["cuts_added"] = rep.stats.cuts_added;
  stats["atoms_priced"] = rep.stats.atoms_priced;
  stats["atoms_created"] = rep.stats.atoms_created;
  stats["rows_activated"] = rep.stats.rows_activated;
  stats["sep_enumerated"] = rep.stats.sep_enumerated;
  stats["sep_pruned"] = rep.stats.sep_pruned;
  stats["price_enumerated"] = rep.stats.price_enumerated;
  stats["price_pruned"] = rep.stats.price_pruned;
  j["stats"] = std::move(stats);
  if (include_trace) {
    json trace = json::array();
    for (const auto& t : rep.node_trace) {
      json entry;
      entry["id"] = t.id;
      entry["parent"] = t.parent;
      entry["bound"] = num(t.bound);
      entry["action"] = t.action;
      if (!t.branch_atom.empty()) entry["branch_atom"] = t.branch_atom;
      trace.push_back(std::move(entry));
    }
    j["nodes"] = std::move(trace);
  }
  return j;
}

json ground_to_json(const GroundProblem& gp) {
  json j;
  j["schema"] = 1;
  json atoms = json::array();
  for (const auto& a : gp.atoms) {
    const VarInfo& info = gp.infos.at(a);
    json entry;
    entry["atom"] = a.str();
    entry["objective"] = round9(info.objective);
    entry["lb"] = round9(info.lb);
    entry["ub"] = round9(info.ub);
    entry["vartype"] = info.vartype == VarType::Integer ? "int" : "cont";
    atoms.push_back(std::move(entry));
  }
  j["atoms"] = std::move(atoms);
  json rows = json::array();
  for (const auto& c : gp.constraints) rows.push_back(lincons_json(c));
  j["constraints"] = std::move(rows);
  return j;
}

}  // namespace fomip
