#pragma once

// Brute-force oracles used only by the test suite: a Fourier-Motzkin
// satisfiability check for real conjunctions and grid enumeration for
// integer problems and formula equivalence. Slow on purpose; trusted
// because each is a few dozen lines.

#include <optional>
#include <random>
#include <set>
#include <vector>

#include "qsolve/ground.hpp"

namespace qsolve::oracles {

/// Fourier-Motzkin satisfiability for a conjunction of real literals.
/// Equalities are split into the two inequalities first.
inline bool fm_sat(std::vector<Literal> lits) {
  struct Row {
    LinearTerm t;  // t >= 0, or t > 0 when strict
    bool strict;
  };
  std::vector<Row> rows;
  for (const auto& l : lits) {
    if (l.rel == Relation::EQ) {
      if (l.negated) {
        // t != 0: try both strict sides, recursing once per disequality
        Literal lt(l.lhs, Relation::LT);
        Literal gt(l.lhs, Relation::GT);
        std::vector<Literal> a = lits, b = lits;
        for (auto* v : {&a, &b})
          v->erase(std::remove_if(v->begin(), v->end(),
                                  [&](const Literal& x) { return x == l; }),
                   v->end());
        a.push_back(lt);
        b.push_back(gt);
        return fm_sat(a) || fm_sat(b);
      }
      rows.push_back({l.lhs, false});
      rows.push_back({l.lhs.scaled(Rational(-1)), false});
      continue;
    }
    switch (l.rel) {
      case Relation::GEQ: rows.push_back({l.lhs, false}); break;
      case Relation::GT: rows.push_back({l.lhs, true}); break;
      case Relation::LEQ: rows.push_back({l.lhs.scaled(Rational(-1)), false}); break;
      case Relation::LT: rows.push_back({l.lhs.scaled(Rational(-1)), true}); break;
      default: break;
    }
  }
  while (true) {
    std::optional<VarId> pick;
    for (const auto& r : rows)
      if (!r.t.coeffs().empty()) {
        pick = r.t.coeffs().begin()->first;
        break;
      }
    if (!pick) break;
    VarId x = *pick;
    std::vector<Row> pos, neg, rest;
    for (const auto& r : rows) {
      Rational c = r.t.coeff(x);
      if (c.is_zero()) rest.push_back(r);
      else if (c.is_positive()) pos.push_back(r);
      else neg.push_back(r);
    }
    rows = rest;
    for (const auto& p : pos)
      for (const auto& n : neg) {
        Rational cp = p.t.coeff(x), cn = -n.t.coeff(x);
        Row r;
        r.t = p.t.scaled(cn) + n.t.scaled(cp);
        r.strict = p.strict || n.strict;
        rows.push_back(r);
      }
  }
  for (const auto& r : rows) {
    const Rational& c = r.t.constant();
    if (r.strict ? !c.is_positive() : c.is_negative()) return false;
  }
  return true;
}

/// Grid enumeration for integer conjunctions: every variable ranges over
/// [lo, hi]; returns a model when one exists on the grid.
inline std::optional<Model> grid_int_model(const std::vector<Literal>& lits, long lo = -8,
                                           long hi = 8) {
  std::set<VarId> vs;
  for (const auto& l : lits)
    for (const auto& [v, c] : l.lhs.coeffs()) vs.insert(v);
  std::vector<VarId> vars(vs.begin(), vs.end());
  Model m;
  auto holds = [&] {
    for (const auto& l : lits)
      if (!m.eval_literal(l)) return false;
    return true;
  };
  std::vector<long> cur(vars.size(), lo);
  while (true) {
    for (size_t i = 0; i < vars.size(); ++i) m.values[vars[i]] = Rational(cur[i]);
    if (holds()) return m;
    size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (cur[i] < hi) {
        ++cur[i];
        break;
      }
      cur[i] = lo;
    }
    if (i == vars.size()) return std::nullopt;
    if (vars.empty()) return std::nullopt;
  }
}

/// Quantifier-free formula equivalence on a grid. Integer logics use the
/// integer points of [lo, hi]; real logics additionally use half-integer
/// points to catch strict/nonstrict boundary differences.
inline bool grid_equivalent(const FormulaPtr& a, const FormulaPtr& b, Sort sort, long lo = -4,
                            long hi = 4) {
  std::set<VarId> vs;
  collect_free_vars(a, vs);
  collect_free_vars(b, vs);
  std::vector<VarId> vars(vs.begin(), vs.end());
  long steps = sort == Sort::Real ? 2 * (hi - lo) : hi - lo;
  Rational step = sort == Sort::Real ? Rational(1, 2) : Rational(1);
  std::vector<long> cur(vars.size(), 0);
  Model m;
  while (true) {
    for (size_t i = 0; i < vars.size(); ++i)
      m.values[vars[i]] = Rational(lo) + Rational(cur[i]) * step;
    if (m.eval(a) != m.eval(b)) return false;
    size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (cur[i] < steps) {
        ++cur[i];
        break;
      }
      cur[i] = 0;
    }
    if (i == vars.size()) return true;
    if (vars.empty()) return true;
  }
}

/// Deterministic random literal / conjunction / formula generators shared
/// by the differential suites.
struct Gen {
  std::mt19937 rng;
  explicit Gen(uint32_t seed) : rng(seed) {}

  long pick(long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(rng);
  }

  LinearTerm term(const std::vector<VarId>& vars, long cmax = 3) {
    LinearTerm t;
    for (VarId v : vars)
      if (pick(0, 2) != 0) t.add(v, Rational(pick(-cmax, cmax)));
    t.add_constant(Rational(pick(-cmax, cmax)));
    return t;
  }

  Literal literal(const std::vector<VarId>& vars, bool allow_eq = true) {
    static const Relation rels[] = {Relation::LT, Relation::GT, Relation::LEQ,
                                    Relation::GEQ, Relation::EQ};
    Relation r = rels[pick(0, allow_eq ? 4 : 3)];
    bool neg = r == Relation::EQ && pick(0, 1) == 1;
    return Literal(term(vars), r, neg);
  }

  std::vector<Literal> conjunction(const std::vector<VarId>& vars, size_t n) {
    std::vector<Literal> out;
    for (size_t i = 0; i < n; ++i) out.push_back(literal(vars));
    return out;
  }

  /// Random quantifier-free body in NNF over atoms on the given vars.
  FormulaPtr body(const std::vector<VarId>& vars, Sort sort, size_t atoms) {
    std::vector<FormulaPtr> leaves;
    for (size_t i = 0; i < atoms; ++i) leaves.push_back(mk_atom(literal(vars), sort));
    while (leaves.size() > 1) {
      size_t k = static_cast<size_t>(pick(2, std::min<long>(3, (long)leaves.size())));
      std::vector<FormulaPtr> ks(leaves.end() - k, leaves.end());
      leaves.resize(leaves.size() - k);
      leaves.push_back(pick(0, 1) ? mk_and(std::move(ks)) : mk_or(std::move(ks)));
    }
    return leaves.empty() ? mk_true() : leaves[0];
  }
};

}  // namespace qsolve::oracles
