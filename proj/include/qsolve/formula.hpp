#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "qsolve/extended.hpp"

namespace qsolve {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// NNF-oriented boolean AST over linear atoms. Not is only produced
/// around guard variables; atom negation is folded into the literal.
struct Formula {
  enum class Kind { True, False, Atom, Guard, Not, And, Or, Forall, Exists };

  Kind kind = Kind::True;
  Literal atom;                 // Atom
  VarId guard = 0;              // Guard
  std::vector<FormulaPtr> kids; // And / Or / Not (one child)
  std::vector<VarId> binders;   // Forall / Exists
  FormulaPtr body;              // Forall / Exists

  bool is_true() const { return kind == Kind::True; }
  bool is_false() const { return kind == Kind::False; }
};

inline FormulaPtr mk_true() {
  static FormulaPtr t = std::make_shared<Formula>(Formula{Formula::Kind::True});
  return t;
}
inline FormulaPtr mk_false() {
  static FormulaPtr f = std::make_shared<Formula>(Formula{Formula::Kind::False});
  return f;
}

/// Builds an atom, folding ground (variable-free) literals to a constant.
inline FormulaPtr mk_atom(Literal lit, Sort sort) {
  if (lit.lhs.is_constant() && !lit.lhs.has_var(kDeltaVar) && !lit.lhs.has_var(kInfVar)) {
    ExtendedValue v(lit.lhs.constant());
    bool holds = lit.rel == Relation::EQ ? (v.satisfies(Relation::EQ) != lit.negated)
                                         : v.satisfies(lit.rel);
    return holds ? mk_true() : mk_false();
  }
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->atom = lit.canonical(sort);
  return f;
}

inline FormulaPtr mk_guard(VarId g, bool positive = true) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Guard;
  f->guard = g;
  if (positive) return f;
  auto n = std::make_shared<Formula>();
  n->kind = Formula::Kind::Not;
  n->kids.push_back(f);
  return n;
}

inline FormulaPtr mk_and(std::vector<FormulaPtr> kids) {
  std::vector<FormulaPtr> flat;
  for (auto& k : kids) {
    if (k->is_true()) continue;
    if (k->is_false()) return mk_false();
    if (k->kind == Formula::Kind::And)
      flat.insert(flat.end(), k->kids.begin(), k->kids.end());
    else
      flat.push_back(k);
  }
  if (flat.empty()) return mk_true();
  if (flat.size() == 1) return flat[0];
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::And;
  f->kids = std::move(flat);
  return f;
}

inline FormulaPtr mk_or(std::vector<FormulaPtr> kids) {
  std::vector<FormulaPtr> flat;
  for (auto& k : kids) {
    if (k->is_false()) continue;
    if (k->is_true()) return mk_true();
    if (k->kind == Formula::Kind::Or)
      flat.insert(flat.end(), k->kids.begin(), k->kids.end());
    else
      flat.push_back(k);
  }
  if (flat.empty()) return mk_false();
  if (flat.size() == 1) return flat[0];
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Or;
  f->kids = std::move(flat);
  return f;
}

inline FormulaPtr mk_quant(Formula::Kind kind, std::vector<VarId> binders, FormulaPtr body) {
  if (body->is_true() || body->is_false()) return body;
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->binders = std::move(binders);
  f->body = std::move(body);
  return f;
}

/// Negation with immediate push-down (the result is in NNF if the input
/// was). Guard negation stays as a Not node.
inline FormulaPtr negate(const FormulaPtr& f, Sort sort) {
  switch (f->kind) {
    case Formula::Kind::True: return mk_false();
    case Formula::Kind::False: return mk_true();
    case Formula::Kind::Atom: return mk_atom(f->atom.negate(), sort);
    case Formula::Kind::Guard: {
      auto n = std::make_shared<Formula>();
      n->kind = Formula::Kind::Not;
      n->kids.push_back(f);
      return n;
    }
    case Formula::Kind::Not: return f->kids[0];
    case Formula::Kind::And: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids) ks.push_back(negate(k, sort));
      return mk_or(std::move(ks));
    }
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids) ks.push_back(negate(k, sort));
      return mk_and(std::move(ks));
    }
    case Formula::Kind::Forall:
      return mk_quant(Formula::Kind::Exists, f->binders, negate(f->body, sort));
    case Formula::Kind::Exists:
      return mk_quant(Formula::Kind::Forall, f->binders, negate(f->body, sort));
  }
  return f;
}

inline FormulaPtr to_nnf(const FormulaPtr& f, Sort sort) {
  switch (f->kind) {
    case Formula::Kind::Not: {
      const FormulaPtr& c = f->kids[0];
      if (c->kind == Formula::Kind::Guard) return f;
      return negate(to_nnf(c, sort), sort);
    }
    case Formula::Kind::And: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids) ks.push_back(to_nnf(k, sort));
      return mk_and(std::move(ks));
    }
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids) ks.push_back(to_nnf(k, sort));
      return mk_or(std::move(ks));
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return mk_quant(f->kind, f->binders, to_nnf(f->body, sort));
    default:
      return f;
  }
}

/// t = 0  becomes  0 <= t and 0 >= t; a negated equality becomes the
/// disjunction of the strict forms. Input must be in NNF.
inline FormulaPtr eliminate_equalities(const FormulaPtr& f, Sort sort) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      if (f->atom.rel != Relation::EQ) return f;
      const LinearTerm& t = f->atom.lhs;
      if (!f->atom.negated)
        return mk_and({mk_atom(Literal(t, Relation::LEQ), sort),
                       mk_atom(Literal(t, Relation::GEQ), sort)});
      return mk_or({mk_atom(Literal(t, Relation::LT), sort),
                    mk_atom(Literal(t, Relation::GT), sort)});
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids) ks.push_back(eliminate_equalities(k, sort));
      return f->kind == Formula::Kind::And ? mk_and(std::move(ks)) : mk_or(std::move(ks));
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return mk_quant(f->kind, f->binders, eliminate_equalities(f->body, sort));
    default:
      return f;
  }
}

/// Plain variable substitution over atoms (capture-free: all binders are
/// globally distinct ids).
inline FormulaPtr subst_var(const FormulaPtr& f, VarId v, const LinearTerm& t, Sort sort) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      if (!f->atom.lhs.has_var(v)) return f;
      Literal l = f->atom;
      l.lhs = l.lhs.subst(v, t);
      return mk_atom(l, sort);
    }
    case Formula::Kind::Not:
      return negate(subst_var(f->kids[0], v, t, sort), sort);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids) ks.push_back(subst_var(k, v, t, sort));
      return f->kind == Formula::Kind::And ? mk_and(std::move(ks)) : mk_or(std::move(ks));
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return mk_quant(f->kind, f->binders, subst_var(f->body, v, t, sort));
    default:
      return f;
  }
}

/// Substitution (possibly with coefficients / virtual parts) over all
/// atoms of a quantifier-free formula.
inline FormulaPtr apply_subst(const FormulaPtr& f, const Substitution& sigma, Sort sort) {
  if (sigma.empty()) return f;
  switch (f->kind) {
    case Formula::Kind::Atom:
      return mk_atom(sigma.apply(f->atom), sort);
    case Formula::Kind::Not:
      return f;  // guard negation; guards carry no arithmetic variables
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids) ks.push_back(apply_subst(k, sigma, sort));
      return f->kind == Formula::Kind::And ? mk_and(std::move(ks)) : mk_or(std::move(ks));
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return mk_quant(f->kind, f->binders, apply_subst(f->body, sigma, sort));
    default:
      return f;
  }
}

inline void collect_atoms(const FormulaPtr& f, std::vector<Literal>& out,
                          std::vector<VarId>* guards = nullptr) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      if (std::find(out.begin(), out.end(), f->atom) == out.end()) out.push_back(f->atom);
      break;
    }
    case Formula::Kind::Guard:
      if (guards && std::find(guards->begin(), guards->end(), f->guard) == guards->end())
        guards->push_back(f->guard);
      break;
    case Formula::Kind::Not:
      collect_atoms(f->kids[0], out, guards);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      for (auto& k : f->kids) collect_atoms(k, out, guards);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      collect_atoms(f->body, out, guards);
      break;
    default:
      break;
  }
}

inline void collect_free_vars(const FormulaPtr& f, std::set<VarId>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (auto& [v, c] : f->atom.lhs.coeffs())
        if (v >= kFirstUserVar) out.insert(v);
      break;
    case Formula::Kind::Not:
      collect_free_vars(f->kids[0], out);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      for (auto& k : f->kids) collect_free_vars(k, out);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      std::set<VarId> inner;
      collect_free_vars(f->body, inner);
      for (VarId b : f->binders) inner.erase(b);
      out.insert(inner.begin(), inner.end());
      break;
    }
    default:
      break;
  }
}

inline bool has_quantifier(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return true;
    case Formula::Kind::Not:
    case Formula::Kind::And:
    case Formula::Kind::Or:
      for (auto& k : f->kids)
        if (has_quantifier(k)) return true;
      return false;
    default:
      return false;
  }
}

/// Three-valued evaluation against partial atom/guard truth maps.
/// Unknown atoms make the result unknown unless the connective is
/// already decided.
enum class Truth { False, True, Unknown };

inline Truth eval_partial(const FormulaPtr& f,
                          const std::function<Truth(const Literal&)>& atom_val,
                          const std::function<Truth(VarId)>& guard_val) {
  switch (f->kind) {
    case Formula::Kind::True: return Truth::True;
    case Formula::Kind::False: return Truth::False;
    case Formula::Kind::Atom: return atom_val(f->atom);
    case Formula::Kind::Guard: return guard_val(f->guard);
    case Formula::Kind::Not: {
      Truth t = eval_partial(f->kids[0], atom_val, guard_val);
      if (t == Truth::Unknown) return t;
      return t == Truth::True ? Truth::False : Truth::True;
    }
    case Formula::Kind::And: {
      bool unknown = false;
      for (auto& k : f->kids) {
        Truth t = eval_partial(k, atom_val, guard_val);
        if (t == Truth::False) return Truth::False;
        if (t == Truth::Unknown) unknown = true;
      }
      return unknown ? Truth::Unknown : Truth::True;
    }
    case Formula::Kind::Or: {
      bool unknown = false;
      for (auto& k : f->kids) {
        Truth t = eval_partial(k, atom_val, guard_val);
        if (t == Truth::True) return Truth::True;
        if (t == Truth::Unknown) unknown = true;
      }
      return unknown ? Truth::Unknown : Truth::False;
    }
    default:
      return Truth::Unknown;  // quantifiers are not evaluated here
  }
}

inline std::string formula_str(const FormulaPtr& f, const VarTable& vt) {
  switch (f->kind) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::Atom: return "(" + f->atom.str(vt) + ")";
    case Formula::Kind::Guard: return vt.name(f->guard);
    case Formula::Kind::Not: return "!" + formula_str(f->kids[0], vt);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::string sep = f->kind == Formula::Kind::And ? " & " : " | ";
      std::string s = "(";
      for (size_t i = 0; i < f->kids.size(); ++i) {
        if (i) s += sep;
        s += formula_str(f->kids[i], vt);
      }
      return s + ")";
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      std::string s = f->kind == Formula::Kind::Forall ? "(forall" : "(exists";
      for (VarId b : f->binders) s += " " + vt.name(b);
      return s + ". " + formula_str(f->body, vt) + ")";
    }
  }
  return "?";
}

/// Structural equality.
inline bool formula_eq(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return true;
    case Formula::Kind::Atom:
      return a->atom == b->atom;
    case Formula::Kind::Guard:
      return a->guard == b->guard;
    case Formula::Kind::Not:
      return formula_eq(a->kids[0], b->kids[0]);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      if (a->kids.size() != b->kids.size()) return false;
      for (size_t i = 0; i < a->kids.size(); ++i)
        if (!formula_eq(a->kids[i], b->kids[i])) return false;
      return true;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return a->binders == b->binders && formula_eq(a->body, b->body);
  }
  return false;
}

}  // namespace qsolve
