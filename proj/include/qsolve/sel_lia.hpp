#pragma once

#include <cassert>
#include <optional>
#include <vector>

#include "qsolve/sel_lra.hpp"

namespace qsolve {

struct LiaOptions {
  bool prefer_lower = true;
  bool reduce_theta = false;
};

namespace detail {

struct IntBound {
  Rational coeff;    // positive integer c in c*e >= l / c*e <= u
  LinearTerm bound;  // nonstrict after tightening
  bool lower = false;
};

/// Bounds on e from the atoms of psi as oriented by the model; strict
/// relations are tightened by one since both sides are integral.
inline std::vector<IntBound> int_bounds(const Model& I, const FormulaPtr& psi, VarId e) {
  std::vector<Literal> atoms;
  collect_atoms(psi, atoms);
  std::vector<IntBound> out;
  for (const auto& a : atoms) {
    Literal l = I.eval_literal(a) ? a : a.negate();
    auto s = solve_for(l, e, Sort::Int);
    if (!s) continue;
    IntBound b;
    b.coeff = s->coeff;
    b.bound = s->bound;
    b.lower = s->is_lower();
    if (s->is_strict()) b.bound.add_constant(b.lower ? Rational(1) : Rational(-1));
    out.push_back(b);
  }
  return out;
}

}  // namespace detail

/// Model-guided term selection for integer variables. Each step picks
/// the tightest bound the model satisfies and a residue correction, so
/// the resulting numerators divide out evenly against the final modulus.
inline Selection select_lia(const Model& I, const FormulaPtr& psi, const std::vector<VarId>& es,
                            const LiaOptions& opt = {}) {
  Selection sel;
  std::vector<LinearTerm> nums;
  std::vector<char> pols;
  Rational theta(1);
  FormulaPtr cur = psi;
  assert(I.eval(cur) && "selection requires a model of the body");
  for (VarId e : es) {
    auto bounds = detail::int_bounds(I, cur, e);
    // best lower maximizes l/c, best upper minimizes u/c
    std::optional<detail::IntBound> lo, up;
    std::optional<Rational> lo_val, up_val;
    for (const auto& b : bounds) {
      Rational v = I.eval_term(b.bound).finite / b.coeff;
      if (b.lower) {
        if (!lo || v > *lo_val) {
          lo = b;
          lo_val = v;
        }
      } else if (!up || v < *up_val) {
        up = b;
        up_val = v;
      }
    }
    Rational c(1);
    LinearTerm t;
    char pol = '+';
    Rational ev = I.value(e);
    if (lo && (opt.prefer_lower || !up)) {
      c = lo->coeff;
      Rational slack = c * ev - I.eval_term(lo->bound).finite;
      assert(!slack.is_negative() && slack.is_integer() &&
             "model must satisfy the selected bound");
      Rational rho = slack.mod(theta * c);
      t = lo->bound;
      t.add_constant(rho);
      pol = '+';
    } else if (up) {
      c = up->coeff;
      Rational slack = I.eval_term(up->bound).finite - c * ev;
      assert(!slack.is_negative() && slack.is_integer() &&
             "model must satisfy the selected bound");
      Rational rho = slack.mod(theta * c);
      t = up->bound;
      t.add_constant(-rho);
      pol = '-';
    } else {
      t = LinearTerm(ev.mod(theta));
      pol = '+';
    }
    assert((theta * c).divides(c * ev - I.eval_term(t).finite) &&
           "selected term must agree with the model modulo theta*c");

    Substitution step;
    step.add_with_coeff(c, e, VirtualTerm(t));
    // numerators track the growing modulus: entries mentioning e fold the
    // coefficient in through the substitution, the rest scale directly
    for (auto& n : nums) n = n.has_var(e) ? step.apply(n) : n.scaled(c);
    nums.push_back(t.scaled(theta));
    pols.push_back(pol);
    sel.vars.push_back(e);
    theta *= c;
    cur = apply_subst(cur, step, Sort::Int);
    assert(I.eval(cur) && "substitution must preserve the model");
  }

  if (opt.reduce_theta && theta > Rational(1)) {
    // divide numerators and modulus by a common factor; the rounded
    // quotients are unchanged since the rational values are
    Rational g = theta;
    for (const auto& n : nums) g = Rational::gcd(g, n.content());
    if (g > Rational(1)) {
      theta = theta / g;
      for (auto& n : nums) n = n.scaled(Rational(1) / g);
    }
  }

  for (size_t i = 0; i < nums.size(); ++i) {
    VirtualTerm vt(nums[i]);
    vt.div_by = theta;
    vt.polarity = pols[i];
    sel.terms.push_back(vt);
  }
  return sel;
}

}  // namespace qsolve
