#pragma once

#include <cassert>
#include <optional>
#include <vector>

#include "qsolve/ground.hpp"

namespace qsolve {

struct shape_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LraMode { Simple, LwDelta, FrMid, LwInf, FrInf };

struct Selection {
  std::vector<VarId> vars;
  std::vector<VirtualTerm> terms;  // one per variable, mutually independent
  std::vector<VirtualTerm> raw;    // per-step terms, may mention later vars

  /// Simultaneous substitution (coefficient 1 per entry); real terms only.
  Substitution as_substitution() const {
    Substitution s;
    for (size_t i = 0; i < vars.size(); ++i) s.add(vars[i], terms[i]);
    return s;
  }
};

/// Fold literals mentioning the infinite distinguished variable: with a
/// positive coefficient the literal behaves like +inf REL t and is
/// decided by the relation alone.
inline FormulaPtr normalize_inf_literal(Literal l, Sort sort) {
  Rational c = l.lhs.coeff(kInfVar);
  if (c.is_zero()) return mk_atom(l, sort);
  if (l.rel == Relation::EQ) throw sort_error("equality literal over the infinite element");
  Relation rel = c.is_positive() ? l.rel : flip(l.rel);
  // inf + t REL 0 for arbitrarily large inf
  bool holds = rel == Relation::GT || rel == Relation::GEQ;
  return holds ? mk_true() : mk_false();
}

/// Eliminate the infinitesimal from a literal it is solved in:
/// delta REL t with delta-free t becomes a plain sign condition on t.
inline FormulaPtr normalize_delta_literal(Literal l, Sort sort) {
  Rational c = l.lhs.coeff(kDeltaVar);
  if (c.is_zero()) return mk_atom(l, sort);
  if (l.rel == Relation::EQ) throw sort_error("equality literal over the infinitesimal");
  LinearTerm t = l.lhs.subst(kDeltaVar, LinearTerm(Rational(0))).scaled(Rational(-1) / c);
  Relation rel = c.is_positive() ? l.rel : flip(l.rel);
  // delta REL t:  delta < t and delta <= t hold iff 0 < t;
  //               delta > t and delta >= t hold iff 0 >= t
  LinearTerm lhs = t;  // lhs REL' 0 forms below use t - 0
  switch (rel) {
    case Relation::LT:
    case Relation::LEQ:
      return mk_atom(Literal(t, Relation::GT), sort);
    case Relation::GT:
    case Relation::GEQ:
      return mk_atom(Literal(t, Relation::LEQ), sort);
    default:
      break;
  }
  throw sort_error("unreachable");
}

inline FormulaPtr normalize_real(const FormulaPtr& f, Sort sort) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      FormulaPtr g = normalize_inf_literal(f->atom, sort);
      if (g->kind != Formula::Kind::Atom) return g;
      return normalize_delta_literal(g->atom, sort);
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids) ks.push_back(normalize_real(k, sort));
      return f->kind == Formula::Kind::And ? mk_and(std::move(ks)) : mk_or(std::move(ks));
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return mk_quant(f->kind, f->binders, normalize_real(f->body, sort));
    default:
      return f;
  }
}

/// Fold only the infinite element, keeping the infinitesimal. Used after
/// each recursive substitution step so later bounds stay finite terms.
inline FormulaPtr normalize_inf(const FormulaPtr& f, Sort sort) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      return normalize_inf_literal(f->atom, sort);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids) ks.push_back(normalize_inf(k, sort));
      return f->kind == Formula::Kind::And ? mk_and(std::move(ks)) : mk_or(std::move(ks));
    }
    default:
      return f;
  }
}

namespace detail {

struct RealBounds {
  // bounds on e as virtual values under the model, with their terms
  std::optional<ExtendedValue> best_lower, best_upper;
  ExtendedValue lower_raw, upper_raw;  // unadjusted values of the chosen bounds
  LinearTerm lower_term, upper_term;
  bool lower_strict = false, upper_strict = false;
  int n = 0, m = 0;  // lower / upper counts

  void offer(const Model& I, const SolvedLiteral& s) {
    ExtendedValue v = I.eval_term(s.bound);
    if (s.is_lower()) {
      ++n;
      ExtendedValue key = v + ExtendedValue(Rational(0), s.is_strict() ? Rational(1) : Rational(0));
      if (!best_lower || key > *best_lower ||
          (key == *best_lower && s.is_strict() && !lower_strict)) {
        best_lower = key;
        lower_raw = v;
        lower_term = s.bound;
        lower_strict = s.is_strict();
      }
    } else {
      ++m;
      ExtendedValue key = v + ExtendedValue(Rational(0), s.is_strict() ? Rational(-1) : Rational(0));
      if (!best_upper || key < *best_upper ||
          (key == *best_upper && s.is_strict() && !upper_strict)) {
        best_upper = key;
        upper_raw = v;
        upper_term = s.bound;
        upper_strict = s.is_strict();
      }
    }
  }

  /// Delta step for a strict bound. Bound terms may carry the
  /// infinitesimal from earlier substitution steps; when the finite gap
  /// to the opposite bound is zero, a full step of 1 would leave the
  /// feasible interval, so step halfway through the delta gap instead.
  Rational strict_step(bool lower_side) const {
    if (lower_side ? m == 0 : n == 0) return Rational(1);
    ExtendedValue gap = upper_raw + lower_raw.scaled(Rational(-1));
    assert(gap.is_finite());
    if (gap.finite.is_positive()) return Rational(1);
    assert(gap.finite.is_zero() && gap.delta.is_positive() &&
           "a satisfied strict bound leaves a nonempty interval");
    return gap.delta * Rational(1, 2);
  }
};

inline RealBounds real_bounds(const Model& I, const FormulaPtr& psi, VarId e) {
  std::vector<Literal> atoms;
  collect_atoms(psi, atoms);
  RealBounds b;
  for (const auto& a : atoms) {
    Literal l = I.eval_literal(a) ? a : a.negate();
    auto s = solve_for(l, e, Sort::Real);
    if (!s) continue;
    b.offer(I, *s);
  }
  return b;
}

inline VirtualTerm pick_real(const RealBounds& b, LraMode mode, bool prefer_lower) {
  VirtualTerm t;
  bool has_l = b.n > 0, has_u = b.m > 0;
  switch (mode) {
    case LraMode::Simple:
      throw shape_error("pick_real does not handle the restricted selector");
    case LraMode::LwDelta:
      if (has_l && (prefer_lower || !has_u)) {
        t.base = b.lower_term;
        if (b.lower_strict) t.delta_coeff = b.strict_step(true);
      } else if (has_u) {
        t.base = b.upper_term;
        if (b.upper_strict) t.delta_coeff = -b.strict_step(false);
      }
      return t;  // zero when no bounds
    case LraMode::FrMid:
      if (has_l && has_u) {
        t.base = (b.lower_term + b.upper_term).scaled(Rational(1, 2));
      } else if (has_l) {
        t.base = b.lower_term;
        t.base.add_constant(Rational(1));
      } else if (has_u) {
        t.base = b.upper_term;
        t.base.add_constant(Rational(-1));
      }
      return t;
    case LraMode::LwInf:
      if (!has_u && !has_l) {
        t.infinite = 1;
      } else if (!has_u) {
        t.infinite = 1;
      } else if (!has_l) {
        t.infinite = -1;
      } else if (prefer_lower) {
        t.base = b.lower_term;
        if (b.lower_strict) t.delta_coeff = b.strict_step(true);
      } else {
        t.base = b.upper_term;
        if (b.upper_strict) t.delta_coeff = -b.strict_step(false);
      }
      return t;
    case LraMode::FrInf:
      if (has_l && has_u) {
        t.base = (b.lower_term + b.upper_term).scaled(Rational(1, 2));
      } else if (!has_u) {
        t.infinite = 1;
      } else {
        t.infinite = -1;
      }
      return t;
  }
  return t;
}

}  // namespace detail

/// Restricted selector for bound-shaped conjunctions: the body must be a
/// conjunction of literals that are either free of e or direct bounds on
/// it; returns the maximal lower bound when one exists, otherwise the
/// minimal upper bound.
inline Selection select_simple_lra(const Model& I, const FormulaPtr& psi,
                                   const std::vector<VarId>& es) {
  Selection sel;
  if (es.size() != 1)
    throw shape_error("restricted selector handles a single universal variable");
  VarId e = es[0];
  std::vector<FormulaPtr> conj;
  if (psi->kind == Formula::Kind::And) conj = psi->kids;
  else conj.push_back(psi);
  detail::RealBounds b;
  for (const auto& k : conj) {
    if (k->kind != Formula::Kind::Atom)
      throw shape_error("restricted selector requires a conjunction of literals");
    auto s = solve_for(k->atom, e, Sort::Real);
    if (!s)
      throw shape_error("restricted selector requires every literal to bound the variable");
    if (s->is_strict())
      throw shape_error("restricted selector requires strict bounds in the body");
    b.offer(I, *s);
  }
  if (b.n == 0 && b.m == 0)
    throw shape_error("restricted selector requires at least one bound");
  VirtualTerm t;
  t.base = b.n > 0 ? b.lower_term : b.upper_term;
  sel.vars.push_back(e);
  sel.terms.push_back(t);
  sel.raw.push_back(t);
  return sel;
}

/// Model-guided term selection for real variables: one virtual term per
/// variable, chosen from the bounds the current model satisfies, with
/// the remaining body and earlier terms rewritten before each step.
inline Selection select_lra(const Model& I, const FormulaPtr& psi, const std::vector<VarId>& es,
                            LraMode mode, bool prefer_lower) {
  if (mode == LraMode::Simple) return select_simple_lra(I, psi, es);
  Selection sel;
  FormulaPtr cur = psi;
  assert(I.eval(cur) && "selection requires a model of the body");
  for (VarId e : es) {
    detail::RealBounds b = detail::real_bounds(I, cur, e);
    VirtualTerm t = detail::pick_real(b, mode, prefer_lower);
    // bounds of later steps may already carry the infinitesimal from
    // earlier substitutions; keep it in the dedicated field
    Rational bd = t.base.coeff(kDeltaVar);
    if (!bd.is_zero()) {
      t.delta_coeff += bd;
      t.base = t.base.subst(kDeltaVar, LinearTerm(Rational(0)));
    }
    Substitution step;
    step.add(e, t);
    for (auto& prev : sel.terms) {
      LinearTerm nb = step.apply(prev.base);
      // keep the virtual components in their dedicated fields
      Rational dc = nb.coeff(kDeltaVar);
      if (!dc.is_zero()) {
        prev.delta_coeff += dc;
        nb = nb.subst(kDeltaVar, LinearTerm(Rational(0)));
      }
      Rational ic = nb.coeff(kInfVar);
      if (!ic.is_zero()) {
        prev.infinite = ic.sign();
        nb = nb.subst(kInfVar, LinearTerm(Rational(0)));
      }
      prev.base = nb;
    }
    sel.vars.push_back(e);
    sel.terms.push_back(t);
    sel.raw.push_back(t);
    cur = normalize_inf(apply_subst(cur, step, Sort::Real), Sort::Real);
    assert(I.eval(cur) && "substitution must preserve the model");
  }
  return sel;
}

}  // namespace qsolve
