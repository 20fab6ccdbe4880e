#pragma once

// Shared test fixtures: independent oracles (exhaustive substitution
// enumeration, vertex-enumeration LP solving) and seeded random
// instance generators. The oracles deliberately avoid the production
// code paths they are used to check.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fomip/grounder.hpp"
#include "fomip/lp.hpp"
#include "fomip/model.hpp"
#include "fomip/parser.hpp"

namespace fomip::test {

// Throws on any error diagnostic; the test harness reports the message.
inline Model parse_ok(const std::string& text) {
  ParseResult res = parse_model(SourceModel{text, "<test>"});
  if (!res.model.has_value()) {
    std::string msg = "model failed to parse:";
    for (const auto& d : res.diagnostics) msg += "\n  " + format_diagnostic("<test>", d);
    throw std::runtime_error(msg);
  }
  return *res.model;
}

inline std::string protein_text() {
  return R"(
domain protein = {p1, p2};
domain location_id = {l1, l2};
var location(protein, location_id);
var interaction(protein, protein);
objective interaction(P1, P2) = -1.0;
constraint 1.0 <= 1.0*location(P1, L1) + 1.0*interaction(P1, P2) <= inf
    :- protein(P1), protein(P2), P1 != P2, location_id(L1);
default { objective = 0.0; lb = 0.0; ub = 1.0; vartype = int; }
)";
}

// Fractional LP vertex at x = (0.5, 0.5, 0.5): forces branching.
inline std::string odd_cycle_text() {
  return R"(
domain node = {a, b, c};
var v(node);
objective v(N) = -1.0;
constraint -inf <= 1.0*v(A) + 1.0*v(B) <= 1.0 :- node(A), node(B), A < B;
default { objective = 0.0; lb = 0.0; ub = 1.0; vartype = int; }
)";
}

// 2n ground atoms and n cap rows, but only `support` index positions
// carry a payoff: the optimum touches 2*support atoms.
inline std::string sparse_text(int n, int support) {
  std::ostringstream os;
  os << "domain idx = {";
  for (int i = 0; i < n; ++i) os << (i ? ", " : "") << "i" << i;
  os << "};\n";
  os << "var x(idx);\nvar z(idx);\n";
  for (int i = 0; i < support; ++i) {
    os << "objective x(i" << i << ") = -1.0;\n";
    os << "objective z(i" << i << ") = -0.6;\n";
  }
  os << "constraint -inf <= 1.0*x(I) + 1.0*z(I) <= 1.0 :- idx(I);\n";
  os << "default { objective = 0.0; lb = 0.0; ub = 1.0; vartype = int; }\n";
  return os.str();
}

// ------------------------------------------------------------------
// Exhaustive substitution oracle: assign every rule variable every
// constant of every domain, then filter by evaluating each literal on
// the ground tuple. No join ordering, no binder analysis.
// ------------------------------------------------------------------

using Substitution = std::map<std::string, std::string>;

inline std::string oracle_resolve(const Term& t, const Substitution& sub) {
  return t.is_var() ? sub.at(t.text) : t.text;
}

inline bool oracle_eval(const Model& m, const Literal& lit, const Substitution& sub) {
  bool value = false;
  if (lit.kind == Literal::Kind::Domain) {
    value = m.domain_has(lit.domain, oracle_resolve(lit.arg, sub));
  } else {
    std::string l = oracle_resolve(lit.lhs, sub);
    std::string r = oracle_resolve(lit.rhs, sub);
    switch (lit.op) {
      case CmpOp::Eq: value = l == r; break;
      case CmpOp::Ne: value = l != r; break;
      case CmpOp::Lt:
      case CmpOp::Le: {
        value = false;
        for (const auto& [name, consts] : m.domains) {
          auto li = std::find(consts.begin(), consts.end(), l);
          auto ri = std::find(consts.begin(), consts.end(), r);
          if (li != consts.end() && ri != consts.end()) {
            value = lit.op == CmpOp::Lt ? li < ri : li <= ri;
            break;
          }
        }
        break;
      }
    }
  }
  return lit.negated ? !value : value;
}

inline std::set<std::string> oracle_rule_vars(const std::vector<Term>& head,
                                              const std::vector<Literal>& body) {
  std::set<std::string> vars;
  auto add = [&](const Term& t) {
    if (t.is_var()) vars.insert(t.text);
  };
  for (const auto& t : head) add(t);
  for (const auto& lit : body) {
    if (lit.kind == Literal::Kind::Domain) {
      add(lit.arg);
    } else {
      add(lit.lhs);
      add(lit.rhs);
    }
  }
  return vars;
}

inline std::vector<Substitution> oracle_substitutions(const Model& m,
                                                      const std::vector<Term>& head,
                                                      const std::vector<Literal>& body) {
  std::set<std::string> var_set = oracle_rule_vars(head, body);
  std::vector<std::string> vars(var_set.begin(), var_set.end());
  std::vector<std::string> universe;
  for (const auto& [name, consts] : m.domains)
    for (const auto& c : consts) universe.push_back(c);
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());

  std::vector<Substitution> out;
  if (vars.empty()) {
    Substitution sub;
    bool ok = true;
    for (const auto& lit : body) ok = ok && oracle_eval(m, lit, sub);
    if (ok) out.push_back(sub);
    return out;
  }
  std::vector<std::size_t> idx(vars.size(), 0);
  if (universe.empty()) return out;
  while (true) {
    Substitution sub;
    for (std::size_t i = 0; i < vars.size(); ++i) sub[vars[i]] = universe[idx[i]];
    bool ok = true;
    for (const auto& lit : body) ok = ok && oracle_eval(m, lit, sub);
    if (ok) out.push_back(std::move(sub));
    std::size_t k = vars.size();
    while (k > 0 && idx[k - 1] + 1 == universe.size()) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < vars.size(); ++j) idx[j] = 0;
  }
  return out;
}

inline Atom oracle_instantiate(const AtomPattern& pat, const Substitution& sub) {
  Atom a;
  a.functor = pat.functor;
  for (const auto& t : pat.args) a.args.push_back(oracle_resolve(t, sub));
  return a;
}

inline std::set<Atom> oracle_ground_atoms(const Model& m) {
  std::set<Atom> out;
  for (const auto& rule : m.variable_rules)
    for (const auto& sub : oracle_substitutions(m, rule.head.args, rule.body))
      out.insert(oracle_instantiate(rule.head, sub));
  return out;
}

inline std::set<LinCons> oracle_ground_rows(const Model& m) {
  std::set<LinCons> out;
  for (const auto& rule : m.constraint_rules) {
    std::vector<Term> head;
    for (const auto& t : rule.terms)
      head.insert(head.end(), t.atom.args.begin(), t.atom.args.end());
    for (const auto& sub : oracle_substitutions(m, head, rule.body)) {
      std::vector<LinTerm> terms;
      for (const auto& t : rule.terms)
        terms.push_back(LinTerm{t.coef, oracle_instantiate(t.atom, sub)});
      out.insert(normalize_lincons(rule.lb, std::move(terms), rule.ub));
    }
  }
  return out;
}

// ------------------------------------------------------------------
// Vertex enumeration LP oracle: every optimum of a feasible LP with
// finite variable bounds sits at an intersection of n active
// conditions. Enumerate all candidate intersections, filter by
// feasibility, take the best. Requires every variable bound finite.
// ------------------------------------------------------------------

struct OracleLpResult {
  bool feasible = false;
  double objective = 0.0;
};

// Solves A z = b by Gaussian elimination; false if singular.
inline bool oracle_solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                                std::vector<double>& out) {
  std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-9) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = b[i] / a[i][i];
  return true;
}

inline OracleLpResult vertex_oracle(const LpProblem& p, double tol = 1e-6) {
  std::size_t n = p.atoms.size();
  struct Condition {
    std::vector<double> row;
    double rhs;
  };
  std::vector<Condition> conds;
  auto coef_row = [&](const LinCons& c) {
    std::vector<double> row(n, 0.0);
    for (const auto& t : c.terms)
      for (std::size_t j = 0; j < n; ++j)
        if (p.atoms[j] == t.atom) row[j] = t.coef;
    return row;
  };
  for (const auto& c : p.constraints) {
    if (c.lb.is_finite()) conds.push_back({coef_row(c), c.lb.value});
    if (c.ub.is_finite()) conds.push_back({coef_row(c), c.ub.value});
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    conds.push_back({e, p.bounds.at(p.atoms[j]).first});
    e[j] = 1.0;
    conds.push_back({std::move(e), p.bounds.at(p.atoms[j]).second});
  }

  auto objective_at = [&](const std::vector<double>& x) {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      auto it = p.objective.find(p.atoms[j]);
      if (it != p.objective.end()) v += it->second * x[j];
    }
    return v;
  };
  auto feasible_point = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) {
      auto [lo, hi] = p.bounds.at(p.atoms[j]);
      if (x[j] < lo - tol || x[j] > hi + tol) return false;
    }
    for (const auto& c : p.constraints) {
      double act = 0.0;
      for (const auto& t : c.terms)
        for (std::size_t j = 0; j < n; ++j)
          if (p.atoms[j] == t.atom) act += t.coef * x[j];
      if (c.lb.is_finite() && act < c.lb.value - tol) return false;
      if (c.ub.is_finite() && act > c.ub.value + tol) return false;
    }
    return true;
  };

  OracleLpResult best;
  std::vector<std::size_t> pick(n);
  // enumerate all n-subsets of conditions
  std::vector<std::size_t> comb(n);
  for (std::size_t i = 0; i < n; ++i) comb[i] = i;
  if (n == 0 || conds.size() < n) return best;
  while (true) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t i : comb) {
      a.push_back(conds[i].row);
      b.push_back(conds[i].rhs);
    }
    std::vector<double> x;
    if (oracle_solve_linear(std::move(a), std::move(b), x) && feasible_point(x)) {
      double obj = objective_at(x);
      if (!best.feasible || obj < best.objective) {
        best.feasible = true;
        best.objective = obj;
      }
    }
    // next combination
    std::size_t k = n;
    while (k > 0 && comb[k - 1] == conds.size() - n + k - 1) --k;
    if (k == 0) break;
    ++comb[k - 1];
    for (std::size_t j = k; j < n; ++j) comb[j] = comb[j - 1] + 1;
  }
  return best;
}

// ------------------------------------------------------------------
// Seeded random instances
// ------------------------------------------------------------------

// Feasible by construction: row bounds straddle the activity of a
// random integer anchor point.
inline LpProblem random_feasible_lp(std::mt19937& rng, std::size_t max_atoms = 8,
                                    std::size_t max_rows = 8) {
  std::uniform_int_distribution<int> natoms(1, static_cast<int>(max_atoms));
  std::uniform_int_distribution<int> nrows(0, static_cast<int>(max_rows));
  std::uniform_int_distribution<int> ub(1, 3);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> slackr(0, 5);
  std::uniform_int_distribution<int> shape(0, 2);

  LpProblem p;
  std::size_t n = static_cast<std::size_t>(natoms(rng));
  std::vector<double> anchor(n);
  for (std::size_t j = 0; j < n; ++j) {
    Atom a{"x", {"v" + std::to_string(j)}};
    double hi = ub(rng);
    p.atoms.push_back(a);
    p.bounds[a] = {0.0, hi};
    p.objective[a] = coef(rng);
    anchor[j] = std::uniform_int_distribution<int>(0, static_cast<int>(hi))(rng);
  }
  std::size_t m = static_cast<std::size_t>(nrows(rng));
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<LinTerm> terms;
    double act = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      int c = coef(rng);
      if (c == 0) continue;
      terms.push_back(LinTerm{static_cast<double>(c), p.atoms[j]});
      act += c * anchor[j];
    }
    if (terms.empty()) continue;
    int s = shape(rng);
    Bound lo = Bound::neg_inf(), hi = Bound::pos_inf();
    if (s == 0 || s == 2) lo = Bound::finite(act - slackr(rng));
    if (s == 1 || s == 2) hi = Bound::finite(act + slackr(rng));
    p.constraints.push_back(normalize_lincons(lo, std::move(terms), hi));
  }
  return p;
}

// Possibly infeasible: bounds picked without an anchor.
inline LpProblem random_lp(std::mt19937& rng, std::size_t max_atoms = 4,
                           std::size_t max_rows = 5) {
  std::uniform_int_distribution<int> natoms(1, static_cast<int>(max_atoms));
  std::uniform_int_distribution<int> nrows(0, static_cast<int>(max_rows));
  std::uniform_int_distribution<int> ubd(1, 3);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> rhs(-6, 6);
  std::uniform_int_distribution<int> shape(0, 2);

  LpProblem p;
  std::size_t n = static_cast<std::size_t>(natoms(rng));
  for (std::size_t j = 0; j < n; ++j) {
    Atom a{"x", {"v" + std::to_string(j)}};
    p.atoms.push_back(a);
    p.bounds[a] = {0.0, static_cast<double>(ubd(rng))};
    p.objective[a] = coef(rng);
  }
  std::size_t m = static_cast<std::size_t>(nrows(rng));
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<LinTerm> terms;
    for (std::size_t j = 0; j < n; ++j) {
      int c = coef(rng);
      if (c != 0) terms.push_back(LinTerm{static_cast<double>(c), p.atoms[j]});
    }
    if (terms.empty()) continue;
    int s = shape(rng);
    int a = rhs(rng), b = rhs(rng);
    Bound lo = Bound::neg_inf(), hi = Bound::pos_inf();
    if (s == 0) lo = Bound::finite(a);
    if (s == 1) hi = Bound::finite(a);
    if (s == 2) {
      lo = Bound::finite(std::min(a, b));
      hi = Bound::finite(std::max(a, b));
    }
    p.constraints.push_back(normalize_lincons(lo, std::move(terms), hi));
  }
  return p;
}

// Random model text over 1-2 domains and 2-3 variable families, with
// random objective rules and up to 3 first-order constraints. Ground
// size stays small enough for solve_enum.
inline std::string random_model_text(std::mt19937& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> d3(0, 2);

  while (true) {
    std::ostringstream os;
    int ndom = 1 + coin(rng);
    std::vector<std::pair<std::string, int>> doms;
    for (int d = 0; d < ndom; ++d) {
      int sz = 2 + d3(rng) % 2;  // 2..3 constants
      std::string name = "d" + std::to_string(d);
      os << "domain " << name << " = {";
      for (int c = 0; c < sz; ++c) os << (c ? ", " : "") << name << "c" << c;
      os << "};\n";
      doms.emplace_back(name, sz);
    }

    int nfam = 2 + coin(rng);
    std::vector<std::pair<std::string, std::vector<int>>> fams;  // name, domain idx per arg
    long total_atoms = 0;
    for (int f = 0; f < nfam; ++f) {
      int arity = 1 + coin(rng);
      std::string name = "f" + std::to_string(f);
      std::vector<int> sig;
      long count = 1;
      os << "var " << name << "(";
      for (int a = 0; a < arity; ++a) {
        int di = d3(rng) % ndom;
        sig.push_back(di);
        count *= doms[static_cast<std::size_t>(di)].second;
        os << (a ? ", " : "") << doms[static_cast<std::size_t>(di)].first;
      }
      os << ");\n";
      fams.emplace_back(name, sig);
      total_atoms += count;
    }
    if (total_atoms > 16 || total_atoms < 2) continue;

    std::uniform_int_distribution<int> objv(-3, 3);
    for (const auto& [name, sig] : fams) {
      if (coin(rng) == 0) continue;
      os << "objective " << name << "(";
      for (std::size_t a = 0; a < sig.size(); ++a) os << (a ? ", " : "") << "P" << a;
      os << ") = " << objv(rng) << ";\n";
    }

    std::uniform_int_distribution<int> nconsd(1, 3);
    int ncons = nconsd(rng);
    long ground_rows = 0;
    for (int c = 0; c < ncons; ++c) {
      // body: one variable per domain used, plus an optional filter
      int nvars = 1 + d3(rng) % 2;
      std::vector<std::pair<std::string, int>> vars;  // name, domain idx
      std::string body;
      long rows = 1;
      for (int v = 0; v < nvars; ++v) {
        int di = d3(rng) % ndom;
        std::string vn = "V" + std::to_string(v);
        vars.emplace_back(vn, di);
        body += (v ? ", " : "") + doms[static_cast<std::size_t>(di)].first + "(" + vn + ")";
        rows *= doms[static_cast<std::size_t>(di)].second;
      }
      if (vars.size() == 2 && vars[0].second == vars[1].second && coin(rng) == 0)
        body += ", " + vars[0].first + " != " + vars[1].first;

      int nterms = 1 + d3(rng);
      std::uniform_int_distribution<int> coefd(-3, 3);
      std::string expr;
      int terms_written = 0;
      for (int t = 0; t < nterms; ++t) {
        const auto& fam = fams[static_cast<std::size_t>(d3(rng) % nfam)];
        std::string pat = fam.first + "(";
        for (std::size_t a = 0; a < fam.second.size(); ++a) {
          int need = fam.second[a];
          std::string arg;
          for (const auto& [vn, di] : vars)
            if (di == need && coin(rng) == 0) {
              arg = vn;
              break;
            }
          if (arg.empty()) {
            // any constant of the right domain
            int ci = d3(rng) % doms[static_cast<std::size_t>(need)].second;
            arg = doms[static_cast<std::size_t>(need)].first + "c" + std::to_string(ci);
          }
          pat += (a ? ", " : "") + arg;
        }
        pat += ")";
        int cf = coefd(rng);
        if (cf == 0) cf = 1;
        expr += (terms_written ? " + " : "") + std::to_string(cf) + "*" + pat;
        ++terms_written;
      }
      ground_rows += rows;

      std::uniform_int_distribution<int> bnd(-2, 2);
      int s = d3(rng);
      std::string lo = "-inf", hi = "inf";
      if (s == 0) lo = std::to_string(bnd(rng));
      if (s == 1) hi = std::to_string(bnd(rng));
      if (s == 2) {
        int a = bnd(rng), b = bnd(rng);
        lo = std::to_string(std::min(a, b));
        hi = std::to_string(std::max(a, b));
      }
      os << "constraint " << lo << " <= " << expr << " <= " << hi << " :- " << body << ";\n";
    }
    if (ground_rows > 40) continue;

    os << "default { objective = 0; lb = 0; ub = 1; vartype = int; }\n";
    return os.str();
  }
}

// Variant with integer bounds drawn from [-2, 2] instead of binary.
inline std::string random_model_text_wide(std::mt19937& rng) {
  std::string base = random_model_text(rng);
  Model m = parse_ok(base);
  std::uniform_int_distribution<int> lo(-2, 0), hi(0, 2);
  std::ostringstream os;
  for (const auto& [functor, sig] : m.signatures) {
    if (rng() % 2) continue;
    std::string pattern = functor + "(";
    for (std::size_t a = 0; a < sig.size(); ++a) pattern += (a ? ", P" : "P") + std::to_string(a);
    pattern += ")";
    os << "lb " << pattern << " = " << lo(rng) << ";\n";
    os << "ub " << pattern << " = " << hi(rng) << ";\n";
  }
  auto pos = base.find("default {");
  return base.substr(0, pos) + os.str() + base.substr(pos);
}

// Variant marking some families continuous; only ground/bpc can agree
// on these (the enumeration oracle is integer-only).
inline std::string random_model_text_mixed(std::mt19937& rng) {
  std::string base = random_model_text(rng);
  Model m = parse_ok(base);
  std::ostringstream os;
  bool any = false;
  for (const auto& [functor, sig] : m.signatures) {
    if (rng() % 2) continue;
    any = true;
    std::string pattern = functor + "(";
    for (std::size_t a = 0; a < sig.size(); ++a) pattern += (a ? ", P" : "P") + std::to_string(a);
    pattern += ")";
    os << "vartype " << pattern << " = cont;\n";
  }
  if (!any) return base;
  auto pos = base.find("default {");
  return base.substr(0, pos) + os.str() + base.substr(pos);
}

inline LpProblem lp_from_ground(const GroundProblem& gp,
                                const std::vector<LinCons>* rows = nullptr) {
  LpProblem p;
  p.atoms = gp.atoms;
  for (const auto& a : gp.atoms) {
    const VarInfo& info = gp.infos.at(a);
    p.bounds[a] = {info.lb, info.ub};
    if (info.objective != 0.0) p.objective[a] = info.objective;
  }
  p.constraints = rows ? *rows : gp.constraints;
  return p;
}

inline std::map<Atom, double> random_point(std::mt19937& rng, const std::vector<Atom>& atoms) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<Atom, double> x;
  for (const auto& a : atoms) x[a] = u(rng);
  return x;
}

}  // namespace fomip::test
