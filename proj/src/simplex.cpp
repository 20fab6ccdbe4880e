#include "fomip/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fomip/errors.hpp"

namespace fomip {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Column layout: [0, n) structurals, [n, n+m) row slacks, [n+m, n+2m)
// artificials. Every row reads  a.x - s_i + sigma_i * r_i = 0  with the
// slack bounded by the row's bounds, so the artificials double as the
// columns of B^-1 and give the duals at the end.
class Simplex {
public:
  Simplex(const LpProblem& p, const LpTolerances& tol) : p_(p), tol_(tol) {
    n_ = p.atoms.size();
    m_ = p.constraints.size();
    total_ = n_ + 2 * m_;
    lower_.assign(total_, 0.0);
    upper_.assign(total_, 0.0);
    cost_.assign(total_, 0.0);

    for (std::size_t j = 0; j < n_; ++j) {
      col_index_.emplace(p.atoms[j], static_cast<int>(j));
      auto bit = p.bounds.find(p.atoms[j]);
      lower_[j] = bit == p.bounds.end() ? -kInf : bit->second.first;
      upper_[j] = bit == p.bounds.end() ? kInf : bit->second.second;
      auto oit = p.objective.find(p.atoms[j]);
      real_cost_.push_back(oit == p.objective.end() ? 0.0 : oit->second);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const LinCons& c = p.constraints[i];
      lower_[n_ + i] = c.lb.is_finite() ? c.lb.value : -kInf;
      upper_[n_ + i] = c.ub.is_finite() ? c.ub.value : kInf;
      lower_[n_ + m_ + i] = 0.0;
      upper_[n_ + m_ + i] = kInf;
    }
  }

  LpSolution run() {
    build_tableau();
    if (!phase1()) return extract(LpStatus::Infeasible);
    set_phase2_costs();
    LpStatus st = optimize();
    return extract(st);
  }

private:
  // --- setup -----------------------------------------------------------

  void build_tableau() {
    tab_.assign(m_ * total_, 0.0);
    // nonbasic structurals rest at a finite bound (lower preferred)
    at_upper_.assign(total_, false);
    basic_.assign(total_, false);
    for (std::size_t j = 0; j < total_; ++j) {
      if (std::isfinite(lower_[j])) {
        at_upper_[j] = false;
      } else if (std::isfinite(upper_[j])) {
        at_upper_[j] = true;
      }
    }

    std::vector<double> activity(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const LinCons& c = p_.constraints[i];
      for (const auto& t : c.terms) {
        auto it = col_index_.find(t.atom);
        if (it == col_index_.end())
          throw Error(Errc::BadConfig,
                      "constraint references atom " + t.atom.str() + " with no column");
        auto j = static_cast<std::size_t>(it->second);
        tab_[i * total_ + j] = t.coef;
        activity[i] += t.coef * rest_value(j);
      }
      tab_[i * total_ + n_ + i] = -1.0;
    }

    basis_.resize(m_);
    sigma_.assign(m_, 1.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double lo = lower_[n_ + i], hi = upper_[n_ + i];
      double act = activity[i];
      std::size_t slack = n_ + i, art = n_ + m_ + i;
      if (act >= lo - tol_.feasibility && act <= hi + tol_.feasibility) {
        // row already satisfied by the resting point: slack basic,
        // artificial fixed at zero (sigma stays +1: the raw equation
        // coefficient, which is what the dual extraction divides by)
        basis_[i] = static_cast<int>(slack);
        upper_[art] = 0.0;
        tab_[i * total_ + art] = 1.0;
        scale_row(i, -1.0);
      } else if (act < lo) {
        // slack rests at its lower bound; artificial absorbs lo - act
        at_upper_[slack] = false;
        sigma_[i] = 1.0;
        basis_[i] = static_cast<int>(art);
        tab_[i * total_ + art] = 1.0;
      } else {
        at_upper_[slack] = true;
        sigma_[i] = -1.0;
        basis_[i] = static_cast<int>(art);
        tab_[i * total_ + art] = -1.0;
        scale_row(i, -1.0);
      }
      basic_[static_cast<std::size_t>(basis_[i])] = true;
    }
    recompute_basic_values();
  }

  void scale_row(std::size_t i, double f) {
    double* row = &tab_[i * total_];
    for (std::size_t j = 0; j < total_; ++j) row[j] *= f;
  }

  double rest_value(std::size_t j) const {
    if (basic_[j]) return 0.0;  // callers use xb_ for basic columns
    if (at_upper_[j]) return std::isfinite(upper_[j]) ? upper_[j] : 0.0;
    return std::isfinite(lower_[j]) ? lower_[j] : 0.0;
  }

  void recompute_basic_values() {
    xb_.assign(m_, 0.0);
    for (std::size_t j = 0; j < total_; ++j) {
      if (basic_[j]) continue;
      double v = rest_value(j);
      if (v == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) xb_[i] -= tab_[i * total_ + j] * v;
    }
  }

  // --- phases ----------------------------------------------------------

  bool phase1() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    double infeas = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      std::size_t art = n_ + m_ + i;
      if (upper_[art] > 0.0) cost_[art] = 1.0;
      if (basis_[i] == static_cast<int>(art)) infeas += xb_[i];
    }
    if (infeas <= tol_.feasibility) {
      freeze_artificials();
      return true;
    }
    LpStatus st = optimize();
    if (st != LpStatus::Optimal)
      throw Error(Errc::NumericalFailure, "phase 1 did not terminate at an optimum");
    double resid = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= static_cast<int>(n_ + m_)) resid += std::abs(xb_[i]);
    for (std::size_t j = n_ + m_; j < total_; ++j)
      if (!basic_[j] && at_upper_[j] && std::isfinite(upper_[j])) resid += upper_[j];
    if (resid > tol_.feasibility) return false;
    freeze_artificials();
    return true;
  }

  void freeze_artificials() {
    for (std::size_t j = n_ + m_; j < total_; ++j) {
      upper_[j] = 0.0;
      if (!basic_[j]) at_upper_[j] = false;
    }
  }

  void set_phase2_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = real_cost_[j];
  }

  LpStatus optimize() {
    degenerate_run_ = 0;
    bland_ = false;
    std::size_t budget = 2000 + 200 * (m_ + total_);
    for (std::size_t iter = 0; iter < budget; ++iter) {
      if ((iter & 63) == 63) recompute_basic_values();
      int q = price();
      if (q < 0) return LpStatus::Optimal;
      if (!step(static_cast<std::size_t>(q))) return LpStatus::Unbounded;
    }
    throw Error(Errc::NumericalFailure, "simplex iteration budget exhausted");
  }

  // entering column: Dantzig by default, Bland after a degeneracy stall
  int price() {
    std::vector<double> cb(m_);
    for (std::size_t i = 0; i < m_; ++i) cb[i] = cost_[static_cast<std::size_t>(basis_[i])];
    int best = -1;
    double best_score = tol_.reduced_cost;
    for (std::size_t j = 0; j < total_; ++j) {
      if (basic_[j]) continue;
      if (lower_[j] == upper_[j]) continue;  // fixed
      double d = cost_[j];
      for (std::size_t i = 0; i < m_; ++i) {
        double a = tab_[i * total_ + j];
        if (a != 0.0) d -= cb[i] * a;
      }
      bool eligible = at_upper_[j] ? d > tol_.reduced_cost : d < -tol_.reduced_cost;
      // free column resting at zero can move either way
      if (!at_upper_[j] && !std::isfinite(lower_[j]))
        eligible = std::abs(d) > tol_.reduced_cost;
      if (!eligible) continue;
      if (bland_) return static_cast<int>(j);
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        best = static_cast<int>(j);
        dq_ = d;
      }
    }
    return best;
  }

  double reduced_cost_of(std::size_t j) const {
    double d = cost_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      double a = tab_[i * total_ + j];
      if (a != 0.0) d -= cost_[static_cast<std::size_t>(basis_[i])] * a;
    }
    return d;
  }

  // one ratio test + pivot or bound flip; false means unbounded ray
  bool step(std::size_t q) {
    double d = bland_ ? reduced_cost_of(q) : dq_;
    // direction of improvement for a minimization
    double t;
    if (!at_upper_[q] && !std::isfinite(lower_[q]))
      t = d < 0 ? 1.0 : -1.0;
    else
      t = at_upper_[q] ? -1.0 : 1.0;

    double limit = kInf;
    if (std::isfinite(lower_[q]) && std::isfinite(upper_[q])) limit = upper_[q] - lower_[q];
    int leave = -1;
    double leave_alpha = 0.0;
    bool leave_to_upper = false;

    for (std::size_t i = 0; i < m_; ++i) {
      double alpha = tab_[i * total_ + q] * t;
      if (std::abs(alpha) <= tol_.pivot) continue;
      std::size_t bj = static_cast<std::size_t>(basis_[i]);
      double ratio;
      bool to_upper;
      if (alpha > 0) {  // basic value falls toward its lower bound
        if (!std::isfinite(lower_[bj])) continue;
        ratio = (xb_[i] - lower_[bj]) / alpha;
        to_upper = false;
      } else {  // basic value rises toward its upper bound
        if (!std::isfinite(upper_[bj])) continue;
        ratio = (upper_[bj] - xb_[i]) / (-alpha);
        to_upper = true;
      }
      if (ratio < 0) ratio = 0;
      if (ratio < limit - 1e-12 ||
          (ratio < limit + 1e-12 && leave >= 0 &&
           tie_break(i, static_cast<std::size_t>(leave), alpha, leave_alpha))) {
        limit = ratio;
        leave = static_cast<int>(i);
        leave_alpha = alpha;
        leave_to_upper = to_upper;
      }
    }

    if (!std::isfinite(limit)) return false;  // unbounded

    if (limit <= tol_.pivot)
      ++degenerate_run_;
    else
      degenerate_run_ = 0;
    if (degenerate_run_ > tol_.bland_after_degenerate) bland_ = true;

    double start = rest_value(q);
    if (leave < 0) {
      // bound flip: q jumps to its opposite bound, basis unchanged
      double delta = t * limit;
      for (std::size_t i = 0; i < m_; ++i) xb_[i] -= tab_[i * total_ + q] * delta;
      at_upper_[q] = !at_upper_[q];
      return true;
    }

    std::size_t r = static_cast<std::size_t>(leave);
    std::size_t p = static_cast<std::size_t>(basis_[r]);
    double delta = t * limit;
    for (std::size_t i = 0; i < m_; ++i)
      if (i != r) xb_[i] -= tab_[i * total_ + q] * delta;

    // leaving variable rests at the bound it hit
    basic_[p] = false;
    at_upper_[p] = leave_to_upper;
    basic_[q] = true;
    basis_[r] = static_cast<int>(q);
    xb_[r] = start + delta;

    pivot(r, q);
    return true;
  }

  // prefer the largest |alpha| among tied rows; under Bland, the
  // smallest leaving variable index
  bool tie_break(std::size_t cand, std::size_t incumbent, double ca, double ia) const {
    if (bland_) return basis_[cand] < basis_[incumbent];
    return std::abs(ca) > std::abs(ia);
  }

  void pivot(std::size_t r, std::size_t q) {
    double piv = tab_[r * total_ + q];
    double inv = 1.0 / piv;
    double* prow = &tab_[r * total_];
    for (std::size_t j = 0; j < total_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double f = tab_[i * total_ + q];
      if (f == 0.0) continue;
      double* row = &tab_[i * total_];
      for (std::size_t j = 0; j < total_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
  }

  // --- extraction ------------------------------------------------------

  LpSolution extract(LpStatus st) {
    LpSolution sol;
    sol.status = st;
    if (st != LpStatus::Optimal) return sol;

    recompute_basic_values();
    std::vector<double> value(total_);
    for (std::size_t j = 0; j < total_; ++j) value[j] = rest_value(j);
    for (std::size_t i = 0; i < m_; ++i) value[static_cast<std::size_t>(basis_[i])] = xb_[i];

    for (std::size_t j = 0; j < n_; ++j) {
      sol.primal[p_.atoms[j]] = value[j];
      sol.objective_value += real_cost_[j] * value[j];
    }
    // duals from the artificial columns: T_art = sigma * B^-1 e_i
    std::vector<double> cb(m_);
    for (std::size_t i = 0; i < m_; ++i) cb[i] = cost_[static_cast<std::size_t>(basis_[i])];
    sol.duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double y = 0.0;
      for (std::size_t k = 0; k < m_; ++k) {
        double a = tab_[k * total_ + n_ + m_ + i];
        if (a != 0.0) y += cb[k] * a;
      }
      sol.duals[i] = y / sigma_[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (basic_[j]) {
        sol.reduced_costs[p_.atoms[j]] = 0.0;
      } else {
        double d = cost_[j];
        for (std::size_t i = 0; i < m_; ++i) {
          double a = tab_[i * total_ + j];
          if (a != 0.0) d -= cb[i] * a;
        }
        sol.reduced_costs[p_.atoms[j]] = d;
      }
    }
    return sol;
  }

  const LpProblem& p_;
  LpTolerances tol_;
  std::size_t n_ = 0, m_ = 0, total_ = 0;

  std::vector<double> lower_, upper_, cost_, real_cost_;
  std::vector<double> tab_;  // m x total, row-major
  std::vector<double> xb_;
  std::vector<int> basis_;
  std::vector<double> sigma_;
  std::vector<bool> basic_, at_upper_;
  std::map<Atom, int> col_index_;

  double dq_ = 0.0;
  int degenerate_run_ = 0;
  bool bland_ = false;
};

}  // namespace

LpSolution solve_lp(const LpProblem& p, const LpTolerances& tol) {
  for (const auto& [atom, b] : p.bounds)
    if (b.first > b.second) {
      LpSolution sol;
      sol.status = LpStatus::Infeasible;
      return sol;
    }
  Simplex s(p, tol);
  return s.run();
}

double reduced_cost(const LpSolution& sol, double objective_coef,
                    const std::vector<std::pair<int, double>>& column) {
  double rc = objective_coef;
  for (const auto& [row, coef] : column) {
    if (row >= 0 && static_cast<std::size_t>(row) < sol.duals.size())
      rc -= sol.duals[static_cast<std::size_t>(row)] * coef;
  }
  return rc;
}

}  // namespace fomip
