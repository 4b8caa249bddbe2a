#pragma once

#include <map>
#include <optional>
#include <vector>

#include "qsolve/budget.hpp"
#include "qsolve/simplex.hpp"

namespace qsolve {

struct LiaResult {
  bool sat = false;
  std::map<VarId, Rational> model;  // when sat
  std::vector<size_t> core;         // literal indices, when unsat
  uint64_t nodes_used = 0;          // elimination work, for caller budgets
};

/// Decision procedure for conjunctions of linear integer literals. Runs
/// the rational relaxation first; when the relaxed optimum is not
/// integral it falls back to variable elimination over tightened
/// nonstrict bounds with divisibility side constraints.
class LiaDecide {
 public:
  static LiaResult check(const std::vector<Literal>& lits, uint64_t node_budget = 2'000'000,
                         std::chrono::steady_clock::time_point deadline =
                             std::chrono::steady_clock::time_point::max()) {
    // relaxation; also the only source of small conflict cores
    SimplexResult rel = Simplex::check(lits);
    if (!rel.sat) {
      LiaResult r;
      r.core = rel.core;
      r.nodes_used = rel.pivots;
      return r;
    }
    bool integral = true;
    for (const auto& [v, val] : rel.model)
      if (!val.delta.is_zero() || !val.finite.is_integer()) integral = false;
    if (integral) {
      LiaResult r;
      r.sat = true;
      for (const auto& [v, val] : rel.model) r.model.emplace(v, val.finite);
      r.nodes_used = rel.pivots;
      return r;
    }

    LiaDecide d(node_budget, deadline);
    std::vector<Ineq> ineqs;
    std::vector<Eq> eqs;
    for (size_t i = 0; i < lits.size(); ++i) d.add(lits[i], ineqs, eqs);
    // recover equalities that arrive as <=/>= pairs, they eliminate a
    // variable each instead of feeding the branching below
    for (size_t i = 0; i < ineqs.size(); ++i) {
      for (size_t j = i + 1; j < ineqs.size(); ++j) {
        if (ineqs[i].t == ineqs[j].t.scaled(Rational(-1))) {
          eqs.push_back({ineqs[i].t});
          ineqs.erase(ineqs.begin() + j);
          ineqs.erase(ineqs.begin() + i);
          --i;
          break;
        }
      }
    }
    std::map<VarId, Rational> model;
    if (d.eliminate(ineqs, {}, eqs, model)) {
      LiaResult r;
      r.sat = true;
      r.model = std::move(model);
      r.nodes_used = node_budget - d.budget_ + rel.pivots;
      return r;
    }
    // elimination yields no small certificate; block the whole conjunction
    LiaResult r;
    for (size_t i = 0; i < lits.size(); ++i) r.core.push_back(i);
    r.nodes_used = node_budget - d.budget_ + rel.pivots;
    return r;
  }

 private:
  LiaDecide(uint64_t budget, std::chrono::steady_clock::time_point deadline)
      : budget_(budget), deadline_(deadline) {}

  struct Ineq {
    LinearTerm t;  // t >= 0, integer coefficients
  };
  struct Div {
    Rational m;    // positive integer modulus
    LinearTerm t;  // m divides t
  };
  struct Eq {
    LinearTerm t;  // t = 0, integer coefficients
  };

  /// Turn a literal into tightened t >= 0 rows with integer coefficients.
  void add(const Literal& lit, std::vector<Ineq>& out, std::vector<Eq>& eqs) {
    if (lit.negated) throw sort_error("negated equality reached the integer solver");
    auto push = [&](LinearTerm t, bool strict) {
      Rational g = t.content();
      if (!g.is_zero()) t = t.scaled(Rational(1) / g);
      // make integral
      Rational den(1);
      for (const auto& [v, c] : t.coeffs()) den = Rational::lcm(den, Rational(mpq_class(c.den())));
      den = Rational::lcm(den, Rational(mpq_class(t.constant().den())));
      t = t.scaled(den);
      if (strict) t.add_constant(Rational(-1));
      else if (!t.constant().is_integer()) {
        LinearTerm u = t;
        u.add_constant(-t.constant());
        u.add_constant(t.constant().floor());
        t = u;
      }
      out.push_back({std::move(t)});
    };
    switch (lit.rel) {
      case Relation::GEQ: push(lit.lhs, false); break;
      case Relation::GT: push(lit.lhs, true); break;
      case Relation::LEQ: push(lit.lhs.scaled(Rational(-1)), false); break;
      case Relation::LT: push(lit.lhs.scaled(Rational(-1)), true); break;
      case Relation::EQ: {
        LinearTerm t = lit.lhs;
        Rational den(1);
        for (const auto& [v, c] : t.coeffs()) den = Rational::lcm(den, Rational(mpq_class(c.den())));
        den = Rational::lcm(den, Rational(mpq_class(t.constant().den())));
        eqs.push_back({t.scaled(den)});
        break;
      }
    }
  }

  static std::optional<VarId> pick_var(const std::vector<Ineq>& ineqs,
                                       const std::vector<Div>& divs) {
    // fewest occurrences first: auxiliary variables from rounding
    // encodings touch few rows, eliminating them keeps branching shallow
    std::map<VarId, size_t> uses;
    for (const auto& q : ineqs)
      for (const auto& [v, c] : q.t.coeffs()) ++uses[v];
    for (const auto& d : divs)
      for (const auto& [v, c] : d.t.coeffs()) ++uses[v];
    std::optional<VarId> best;
    size_t best_uses = 0;
    for (const auto& [v, n] : uses)
      if (!best || n < best_uses) {
        best = v;
        best_uses = n;
      }
    return best;
  }

  static Rational eval(const LinearTerm& t, const std::map<VarId, Rational>& m) {
    Rational r = t.constant();
    for (const auto& [v, c] : t.coeffs()) {
      auto it = m.find(v);
      r += c * (it == m.end() ? Rational(0) : it->second);
    }
    return r;
  }

  bool eliminate(std::vector<Ineq> ineqs, std::vector<Div> divs, std::vector<Eq> eqs,
                 std::map<VarId, Rational>& model) {
    if (budget_-- == 0) throw resource_error("integer elimination budget exhausted");
    if ((++nodes_ & 255) == 0 && std::chrono::steady_clock::now() > deadline_)
      throw resource_error("time budget exhausted");

    // equalities go first: each one removes a variable by substitution,
    // so the branching below never sees them
    struct Pending {
      VarId x;
      Rational c;    // positive; c*x = -r
      LinearTerm r;
    };
    std::vector<Pending> pending;
    while (!eqs.empty()) {
      Eq eq = eqs.back();
      eqs.pop_back();
      Rational g = eq.t.var_content();
      if (g.is_zero()) {
        if (!eq.t.constant().is_zero()) return false;
        continue;
      }
      if (!g.divides(eq.t.constant())) return false;
      eq.t = eq.t.scaled(Rational(1) / g);
      // prefer a unit coefficient so no scaling is needed
      VarId x = 0;
      Rational c;
      for (const auto& [v, k] : eq.t.coeffs())
        if (c.is_zero() || k.abs() < c) {
          x = v;
          c = k.abs();
          if (c == Rational(1)) break;
        }
      if (eq.t.coeff(x).is_negative()) eq.t = eq.t.scaled(Rational(-1));
      LinearTerm r = eq.t.subst(x, LinearTerm(Rational(0)));  // c*x + r = 0
      auto fold = [&](LinearTerm t, Rational* modulus) {
        Rational k = t.coeff(x);
        if (k.is_zero()) return t;
        LinearTerm s = t.subst(x, LinearTerm(Rational(0)));
        if (modulus) *modulus *= c;
        return s.scaled(c) + r.scaled(-k);
      };
      for (auto& q : ineqs) q.t = fold(q.t, nullptr);
      for (auto& d : divs) d.t = fold(d.t, &d.m);
      for (auto& e2 : eqs) e2.t = fold(e2.t, nullptr);
      if (c > Rational(1)) divs.push_back({c, r});
      pending.push_back({x, c, std::move(r)});
    }
    std::vector<std::pair<VarId, Rational>> fixed;
    auto finish = [&] {
      for (const auto& [v, val] : fixed) model[v] = val;
      for (auto it = pending.rbegin(); it != pending.rend(); ++it)
        model[it->x] = -eval(it->r, model) / it->c;
      return true;
    };

    // constant propagation to a fixpoint: drop ground rows, tighten
    // integer intervals from single-variable rows, substitute pinned vars
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto it = ineqs.begin(); it != ineqs.end();) {
        if (it->t.is_constant()) {
          if (it->t.constant().is_negative()) return false;
          it = ineqs.erase(it);
        } else {
          ++it;
        }
      }
      for (auto it = divs.begin(); it != divs.end();) {
        if (it->t.is_constant()) {
          if (!it->m.divides(it->t.constant())) return false;
          it = divs.erase(it);
        } else {
          ++it;
        }
      }
      std::map<VarId, std::pair<std::optional<Rational>, std::optional<Rational>>> iv;
      for (const auto& q : ineqs) {
        if (q.t.coeffs().size() != 1) continue;
        const auto& [v, c] = *q.t.coeffs().begin();
        Rational b = -q.t.constant() / c;  // c*x + k >= 0
        if (c.is_positive()) {
          b = b.ceil();
          auto& lo = iv[v].first;
          if (!lo || b > *lo) lo = b;
        } else {
          b = b.floor();
          auto& up = iv[v].second;
          if (!up || b < *up) up = b;
        }
      }
      for (const auto& [v, b] : iv) {
        if (!b.first || !b.second) continue;
        if (*b.first > *b.second) return false;
        if (*b.first == *b.second) {
          LinearTerm cst(*b.first);
          for (auto& q : ineqs) q.t = q.t.subst(v, cst);
          for (auto& d : divs) d.t = d.t.subst(v, cst);
          fixed.emplace_back(v, *b.first);
          changed = true;
        }
      }
    }
    // prune: the rational relaxation of the remaining rows must hold
    if (!ineqs.empty()) {
      std::vector<Literal> relax;
      relax.reserve(ineqs.size());
      for (const auto& q : ineqs) relax.emplace_back(q.t, Relation::GEQ);
      SimplexResult rel = Simplex::check(relax);
      uint64_t cost = rel.pivots;
      budget_ = cost >= budget_ ? 0 : budget_ - cost;
      if (!rel.sat) return false;
    }

    auto xv = pick_var(ineqs, divs);
    if (!xv) return finish();
    VarId x = *xv;

    // scale every row mentioning x so its coefficient is +-L, then read
    // them as constraints on y = L*x with L | y
    Rational L(1);
    for (const auto& q : ineqs) {
      Rational c = q.t.coeff(x);
      if (!c.is_zero()) L = Rational::lcm(L, c.abs());
    }
    for (const auto& d : divs) {
      Rational c = d.t.coeff(x);
      if (!c.is_zero()) L = Rational::lcm(L, c.abs());
    }
    std::vector<LinearTerm> lowers, uppers;  // y >= l, y <= u (y excluded)
    std::vector<Ineq> rest;
    for (const auto& q : ineqs) {
      Rational c = q.t.coeff(x);
      if (c.is_zero()) {
        rest.push_back(q);
        continue;
      }
      LinearTerm s = q.t.subst(x, LinearTerm(Rational(0))).scaled(L / c.abs());
      if (c.is_positive()) lowers.push_back(s.scaled(Rational(-1)));  // y + s >= 0
      else uppers.push_back(s);                                       // -y + s >= 0
    }
    std::vector<Div> drest;
    std::vector<Div> dwithy;
    for (const auto& d : divs) {
      Rational c = d.t.coeff(x);
      if (c.is_zero()) {
        drest.push_back(d);
        continue;
      }
      Rational k = L / c.abs();
      LinearTerm t = d.t.scaled(c.is_positive() ? k : -k);  // coeff of x now +L
      dwithy.push_back({d.m * k, t.subst(x, LinearTerm(Rational(0)))});  // m' | y + s'
    }
    dwithy.push_back({L, LinearTerm(Rational(0))});  // L | y
    Rational D(1);
    for (const auto& d : dwithy) D = Rational::lcm(D, d.m);

    if (!lowers.empty()) {
      for (const auto& l : lowers) {
        for (Rational j(0); j < D; j += Rational(1)) {
          LinearTerm y = l;
          y.add_constant(j);
          if (try_branch(y, rest, lowers, uppers, drest, dwithy, model)) {
            Rational yv = eval(y, model);
            model[x] = yv / L;
            return finish();
          }
          if (budget_ == 0) throw resource_error("integer elimination budget exhausted");
        }
      }
      return false;
    }
    // no lower bounds: uppers are satisfiable for y small enough, so only
    // the periodic part constrains the residue of y
    for (Rational j(0); j < D; j += Rational(1)) {
      std::vector<Ineq> sub = rest;
      std::vector<Div> dsub = drest;
      for (const auto& d : dwithy) {
        LinearTerm t = d.t;
        t.add_constant(j);
        dsub.push_back({d.m, t});
      }
      std::map<VarId, Rational> m2 = model;
      if (eliminate(sub, dsub, {}, m2)) {
        // back-compute y: largest value <= all uppers with y = j (mod D)
        Rational y = j;
        for (const auto& u : uppers) {
          Rational uv = eval(u, m2);
          if (y > uv) y = y - D * ((y - uv) / D).ceil();
        }
        m2[x] = y / L;
        model = std::move(m2);
        return finish();
      }
    }
    return false;
  }

  bool try_branch(const LinearTerm& y, const std::vector<Ineq>& rest,
                  const std::vector<LinearTerm>& lowers, const std::vector<LinearTerm>& uppers,
                  const std::vector<Div>& drest, const std::vector<Div>& dwithy,
                  std::map<VarId, Rational>& model) {
    std::vector<Ineq> sub = rest;
    for (const auto& l : lowers) sub.push_back({y - l});                       // y >= l
    for (const auto& u : uppers) sub.push_back({u - y});                       // y <= u
    std::vector<Div> dsub = drest;
    for (const auto& d : dwithy) dsub.push_back({d.m, d.t + y});
    std::map<VarId, Rational> m2 = model;
    if (!eliminate(sub, dsub, {}, m2)) return false;
    model = std::move(m2);
    return true;
  }

  uint64_t budget_;
  uint64_t nodes_ = 0;
  std::chrono::steady_clock::time_point deadline_;
};

}  // namespace qsolve
