#pragma once

#include <cassert>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "qsolve/sel_lia.hpp"
#include "qsolve/sel_lra.hpp"

namespace qsolve {

enum class Status { Sat, Unsat, Unknown };

struct SolverOptions {
  LraMode mode = LraMode::LwDelta;
  bool prefer_lower = true;
  bool reduce_theta = false;
  uint64_t budget = 10'000;  // instantiation budget
  uint64_t node_budget = 200'000'000;  // boolean/theory search work
  uint32_t time_budget_ms = 0;         // wall clock per solve call, 0 for none
  bool trace = false;
  std::ostream* trace_out = nullptr;
  bool check_model = false;
  bool eager = false;
  bool strict_nested = false;
  bool prune_implicant = false;
};

struct SolverStats {
  uint64_t iterations = 0;
  uint64_t instances = 0;
  uint64_t ground_checks = 0;
};

struct Instantiation {
  std::string quant;
  std::vector<VirtualTerm> terms;
  Rational theta{1};
  FormulaPtr formula;     // the instance body, before guarding
  size_t gamma_index = 0; // position of the guarded clause in gamma
};

struct Verdict {
  Status status = Status::Unknown;
  Model model;               // Sat
  std::vector<size_t> core;  // Unsat: indices into instantiations()
  std::string reason;        // Unknown
};

/// Instantiation-based solver for quantified linear arithmetic over one
/// sort. Quantified subformulas are abstracted by guard pairs; instances
/// are generated lazily from countermodels, or exhaustively in eager
/// mode.
class Solver {
 public:
  // the node budget caps boolean/theory search work, independently of
  // the (much smaller) instantiation budget in the options
  Solver(VarTable& vt, Sort sort, SolverOptions opt = {})
      : vt_(vt), sort_(sort), opt_(opt), budget_(opt.node_budget) {}

  Verdict solve_one_alternation(const FormulaPtr& phi) { return solve({phi}); }

  const std::vector<Instantiation>& instantiations() const { return instantiations_; }
  const SolverStats& stats() const { return stats_; }

  Verdict solve(const std::vector<FormulaPtr>& assertions) {
    if (opt_.time_budget_ms > 0)
      budget_.deadline =
          std::chrono::steady_clock::now() + std::chrono::milliseconds(opt_.time_budget_ms);
    try {
      return run(assertions);
    } catch (const resource_error& e) {
      Verdict v;
      v.status = Status::Unknown;
      v.reason = e.what();
      return v;
    }
  }

 private:
  struct Record {
    std::string name;
    std::vector<VarId> binders;
    FormulaPtr body;         // psi in (forall binders. psi), unpurified
    VarId a = 0, b = 0;      // guards: a stands for the formula, b for its negation
    std::vector<VarId> es;   // witnesses for the negation
    FormulaPtr body_e;       // psi[binders -> es], unpurified
    FormulaPtr neg_body_pure;  // purified negation, as asserted under b
    int depth = 0;
    std::vector<std::vector<VirtualTerm>> seen;
    bool exhausted = false;  // eager mode: full closure already added
  };

  Verdict run(const std::vector<FormulaPtr>& assertions) {
    for (const auto& f : assertions) push_gamma(purify(preprocess(f), 0));

    while (true) {
      stats_.iterations++;
      GroundResult g = ground_check(false);
      if (!g.sat) return make_unsat();

      bool added = false;
      // records can be created while instantiating, so index loop
      for (size_t ri = 0; ri < records_.size(); ++ri) {
        bool a = guard_true(g.model, records_[ri].a);
        bool b = guard_true(g.model, records_[ri].b);
        if (!a || !b) continue;
        if (opt_.eager) {
          if (!records_[ri].exhausted) {
            add_eager_closure(ri);
            records_[ri].exhausted = true;
            added = true;
          }
          continue;
        }
        if (instantiate_from_model(ri, g.model)) added = true;
      }
      if (!added) return make_sat(g.model, assertions);
    }
  }

  FormulaPtr preprocess(const FormulaPtr& f) {
    return eliminate_equalities(to_nnf(f, sort_), sort_);
  }

  void push_gamma(const FormulaPtr& f) { gamma_.push_back(f); }

  static bool guard_true(const Model& m, VarId g) {
    auto it = m.bools.find(g);
    return it != m.bools.end() && it->second;
  }

  GroundResult ground_check(bool minimize) {
    stats_.ground_checks++;
    std::set<VarId> prefer;
    for (const auto& r : records_) prefer.insert(r.b);
    GroundSolver gs(sort_, &budget_, std::move(prefer));
    return gs.check(gamma_, minimize);
  }

  /// Replace each maximal quantified subformula by its guard: the
  /// universal by the positive guard, the (negation-normal) existential
  /// by the negative guard of the corresponding universal.
  FormulaPtr purify(const FormulaPtr& f, int depth) {
    switch (f->kind) {
      case Formula::Kind::Forall: {
        size_t ri = make_record(f->binders, f->body, depth);
        return mk_guard(records_[ri].a);
      }
      case Formula::Kind::Exists: {
        size_t ri = make_record(f->binders, negate(f->body, sort_), depth);
        return mk_guard(records_[ri].b);
      }
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        std::vector<FormulaPtr> ks;
        for (auto& k : f->kids) ks.push_back(purify(k, depth));
        return f->kind == Formula::Kind::And ? mk_and(std::move(ks)) : mk_or(std::move(ks));
      }
      default:
        return f;
    }
  }

  size_t make_record(const std::vector<VarId>& binders, const FormulaPtr& body, int depth) {
    if (depth > 0 && opt_.strict_nested)
      throw resource_error("nested quantifier rejected in strict mode");
    Record r;
    r.name = "q" + std::to_string(records_.size() + 1);
    r.binders = binders;
    r.body = body;
    r.depth = depth;
    uint64_t tag = records_.size() + 1;
    r.a = vt_.fresh("A" + std::to_string(tag) + "_", Sort::Real, VarKind::Guard);
    r.b = vt_.fresh("B" + std::to_string(tag) + "_", Sort::Real, VarKind::Guard);
    FormulaPtr be = body;
    for (VarId x : binders) {
      VarId e = vt_.fresh("e", sort_, VarKind::SkolemE);
      r.es.push_back(e);
      be = subst_var(be, x, LinearTerm::var(e), sort_);
    }
    r.body_e = be;
    records_.push_back(r);
    size_t ri = records_.size() - 1;
    // guard axioms: one of the two sides holds, and the negative side
    // comes with its witnessed negation
    FormulaPtr neg = purify(negate(be, sort_), depth + 1);
    records_[ri].neg_body_pure = neg;
    push_gamma(mk_or({mk_guard(records_[ri].a), mk_guard(records_[ri].b)}));
    push_gamma(mk_or({mk_guard(records_[ri].b, false), neg}));
    return ri;
  }

  bool instantiate_from_model(size_t ri, const Model& I) {
    Record& r = records_[ri];
    FormulaPtr sel_body = guard_free(r.neg_body_pure, I);
    assert(I.eval(sel_body) && "the negative guard must come with a countermodel");
    Selection sel;
    if (sort_ == Sort::Real) {
      LraMode mode = opt_.mode;
      if (mode == LraMode::Simple) {
        // the restricted selector only covers one shape; outside it we
        // fall back to the general delta-based selection
        try {
          sel = select_lra(I, sel_body, r.es, mode, opt_.prefer_lower);
          return add_instance(ri, sel.terms, &I, &sel.raw);
        } catch (const shape_error&) {
          mode = LraMode::LwDelta;
        }
      }
      sel = select_lra(I, sel_body, r.es, mode, opt_.prefer_lower);
    } else {
      LiaOptions lo;
      lo.prefer_lower = opt_.prefer_lower;
      lo.reduce_theta = opt_.reduce_theta;
      sel = select_lia(I, sel_body, r.es, lo);
    }
    return add_instance(ri, sel.terms, &I, &sel.raw);
  }

  /// Guards inside the selection body are evaluated away under the model;
  /// term selection only reasons about arithmetic literals.
  FormulaPtr guard_free(const FormulaPtr& f, const Model& I) {
    switch (f->kind) {
      case Formula::Kind::Guard:
        return guard_true(I, f->guard) ? mk_true() : mk_false();
      case Formula::Kind::Not:
        return negate(guard_free(f->kids[0], I), sort_);
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        std::vector<FormulaPtr> ks;
        for (auto& k : f->kids) ks.push_back(guard_free(k, I));
        return f->kind == Formula::Kind::And ? mk_and(std::move(ks)) : mk_or(std::move(ks));
      }
      default:
        return f;
    }
  }

  bool add_instance(size_t ri, const std::vector<VirtualTerm>& terms, const Model* I,
                    const std::vector<VirtualTerm>* raw_terms = nullptr) {
    for (const auto& s : records_[ri].seen)
      if (s == terms) {
        assert(I == nullptr && "model-guided selection must not repeat a tuple");
        return false;
      }
    records_[ri].seen.push_back(terms);
    if (stats_.instances >= opt_.budget) throw resource_error("budget");
    // copy: purify below may grow records_ and invalidate references
    Record r = records_[ri];

    Rational theta(1);
    for (const auto& t : terms)
      if (t.div_by > theta) theta = t.div_by;

    FormulaPtr inst;
    if (sort_ == Sort::Real) {
      // virtual substitution is applied one variable at a time, infinite
      // parts normalized between steps: infinities of distinct variables
      // are independent limits and must never meet arithmetically
      const std::vector<VirtualTerm>& sub =
          raw_terms && !raw_terms->empty() ? *raw_terms : terms;
      FormulaPtr raw = r.body_e;
      for (size_t i = 0; i < sub.size(); ++i) {
        Substitution step;
        step.add(r.es[i], sub[i]);
        raw = apply_subst(raw, step, sort_);
        raw = normalize_inf(raw, sort_);
      }
      inst = normalize_real(raw, sort_);
      bool virt = false;
      for (const auto& t : terms) virt = virt || t.has_real_virtual();
      if (virt && has_quantifier(inst))
        throw resource_error("nested-virtual");
      if (I && !has_quantifier(raw)) {
        // the countermodel falsifies the instance, before and after the
        // virtual parts are normalized away
        assert(!I->eval(guard_free(raw, *I)) && "instance must refute its countermodel");
        assert(!I->eval(guard_free(inst, *I)) && "normalization must preserve truth");
      }
    } else {
      inst = build_int_instance(r, terms, theta, I);
    }
    inst = eliminate_equalities(inst, sort_);
    FormulaPtr guarded = mk_or({mk_guard(r.a, false), purify(inst, r.depth + 1)});

    Instantiation rec;
    rec.quant = r.name;
    rec.terms = terms;
    rec.theta = theta;
    rec.formula = inst;
    rec.gamma_index = gamma_.size();
    push_gamma(guarded);
    if (opt_.trace && opt_.trace_out) {
      std::string ts = "(";
      for (size_t i = 0; i < terms.size(); ++i) {
        if (i) ts += ", ";
        ts += terms[i].str(vt_);
      }
      ts += ")";
      (*opt_.trace_out) << "[" << stats_.iterations << "] quant=" << r.name << " terms=" << ts
                        << " theta=" << theta.str() << " instance=" << formula_str(inst, vt_)
                        << "\n";
    }
    instantiations_.push_back(std::move(rec));
    stats_.instances++;
    return true;
  }

  /// phi[t div theta] with the rounded quotients named by fresh integer
  /// variables: theta*d = t + m (rounding up) or t - m (rounding down)
  /// with 0 <= m < theta.
  FormulaPtr build_int_instance(const Record& r, const std::vector<VirtualTerm>& terms,
                                const Rational& theta, const Model* I) {
    std::vector<FormulaPtr> conj;
    FormulaPtr body = r.body_e;
    Model ext;
    if (I) ext = *I;
    for (size_t i = 0; i < terms.size(); ++i) {
      const VirtualTerm& t = terms[i];
      if (theta == Rational(1)) {
        body = subst_var(body, r.es[i], t.base, sort_);
        continue;
      }
      VarId d = vt_.fresh("d", Sort::Int, VarKind::FreshD);
      VarId m = vt_.fresh("m", Sort::Int, VarKind::FreshM);
      body = subst_var(body, r.es[i], LinearTerm::var(d), sort_);
      // theta*d - t -+ m = 0
      LinearTerm eq = LinearTerm::var(d, theta) - t.base;
      eq = eq + LinearTerm::var(m, Rational(t.polarity == '+' ? -1 : 1));
      conj.push_back(mk_atom(Literal(eq, Relation::EQ), sort_));
      conj.push_back(mk_atom(Literal(LinearTerm::var(m), Relation::GEQ), sort_));
      LinearTerm ub = LinearTerm::var(m);
      ub.add_constant(-theta);
      conj.push_back(mk_atom(Literal(ub, Relation::LT), sort_));
      if (I) {
        Rational tv = ext.eval_term(t.base).finite;
        Rational dv = t.polarity == '+' ? (tv / theta).ceil() : (tv / theta).floor();
        ext.values[d] = dv;
        ext.values[m] = (theta * dv - tv).abs();
        assert(ext.values[m] >= Rational(0) && ext.values[m] < theta &&
               "rounding remainder must stay below the modulus");
      }
    }
    conj.push_back(body);
    FormulaPtr inst = mk_and(std::move(conj));
    if (I) {
      assert(!ext.eval(guard_free(body, ext)) &&
             "instance must refute its countermodel at the rounded point");
    }
    return inst;
  }

  // --- eager closure ---------------------------------------------------

  void add_eager_closure(size_t ri) {
    if (records_[ri].depth > 0 || has_quantifier(records_[ri].body_e))
      throw resource_error("eager mode supports a single quantifier alternation");
    std::vector<std::vector<VirtualTerm>> tuples;
    if (sort_ == Sort::Real) {
      std::vector<VirtualTerm> acc;
      enum_real(records_[ri].body_e, records_[ri].es, 0, acc, tuples);
    } else {
      std::vector<LinearTerm> nums;
      std::vector<char> pols;
      enum_int(records_[ri].body_e, records_[ri].es, 0, Rational(1), nums, pols, tuples);
    }
    size_t since_check = 0;
    for (const auto& tup : tuples) {
      if (add_instance(ri, tup, nullptr)) {
        if (++since_check >= 25) {
          since_check = 0;
          GroundResult g = ground_check(false);
          if (!g.sat) return;  // the main loop re-checks and reports
        }
      }
    }
  }

  std::vector<SolvedLiteral> all_bounds(const FormulaPtr& f, VarId e) {
    std::vector<Literal> atoms;
    collect_atoms(f, atoms);
    std::vector<SolvedLiteral> out;
    for (const auto& a : atoms) {
      for (const Literal& l : {a, a.negate()}) {
        auto s = solve_for(l, e, sort_);
        if (s) out.push_back(*s);
      }
    }
    return out;
  }

  void enum_real(const FormulaPtr& psi, const std::vector<VarId>& es, size_t i,
                 std::vector<VirtualTerm>& acc, std::vector<std::vector<VirtualTerm>>& out) {
    budget_.tick();
    if (i == es.size()) {
      out.push_back(acc);
      return;
    }
    std::vector<VirtualTerm> cands;
    auto bounds = all_bounds(psi, es[i]);
    bool fr = opt_.mode == LraMode::FrMid || opt_.mode == LraMode::FrInf;
    if (fr) {
      for (const auto& l : bounds) {
        if (!l.is_lower()) continue;
        for (const auto& u : bounds) {
          if (!u.is_upper()) continue;
          VirtualTerm t((l.bound + u.bound).scaled(Rational(1, 2)));
          cands.push_back(t);
        }
      }
      if (opt_.mode == LraMode::FrMid) {
        for (const auto& b : bounds) {
          VirtualTerm t(b.bound);
          t.base.add_constant(Rational(b.is_lower() ? 1 : -1));
          cands.push_back(t);
        }
        cands.push_back(VirtualTerm(LinearTerm()));
      } else {
        VirtualTerm pi, ni;
        pi.infinite = 1;
        ni.infinite = -1;
        cands.push_back(pi);
        cands.push_back(ni);
      }
    } else {
      for (const auto& b : bounds) {
        VirtualTerm t(b.bound);
        if (b.is_strict()) t.delta_coeff = Rational(b.is_lower() ? 1 : -1);
        cands.push_back(t);
      }
      if (opt_.mode == LraMode::LwInf) {
        VirtualTerm pi, ni;
        pi.infinite = 1;
        ni.infinite = -1;
        cands.push_back(pi);
        cands.push_back(ni);
      } else {
        cands.push_back(VirtualTerm(LinearTerm()));
      }
    }
    for (const auto& c : cands) {
      Substitution step;
      step.add(es[i], c);
      std::vector<VirtualTerm> acc2 = acc;
      for (auto& prev : acc2) {
        LinearTerm nb = step.apply(prev.base);
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
      acc2.push_back(c);
      FormulaPtr next = normalize_inf(apply_subst(psi, step, sort_), sort_);
      enum_real(next, es, i + 1, acc2, out);
    }
  }

  void enum_int(const FormulaPtr& psi, const std::vector<VarId>& es, size_t i,
                const Rational& theta, std::vector<LinearTerm>& nums, std::vector<char>& pols,
                std::vector<std::vector<VirtualTerm>>& out) {
    budget_.tick();
    if (i == es.size()) {
      std::vector<VirtualTerm> tup;
      for (size_t j = 0; j < nums.size(); ++j) {
        VirtualTerm t(nums[j]);
        t.div_by = theta;
        t.polarity = pols[j];
        tup.push_back(t);
      }
      out.push_back(tup);
      return;
    }
    auto bounds = all_bounds(psi, es[i]);
    struct Cand {
      Rational c;
      LinearTerm t;
      char pol;
    };
    std::vector<Cand> cands;
    for (auto b : bounds) {
      if (b.is_strict()) b.bound.add_constant(Rational(b.is_lower() ? 1 : -1));
      Rational period = theta * b.coeff;
      for (Rational rho(0); rho < period; rho += Rational(1)) {
        LinearTerm t = b.bound;
        t.add_constant(b.is_lower() ? rho : -rho);
        cands.push_back({b.coeff, t, b.is_lower() ? '+' : '-'});
      }
    }
    for (Rational rho(0); rho < theta; rho += Rational(1))
      cands.push_back({Rational(1), LinearTerm(rho), '+'});
    for (const auto& c : cands) {
      budget_.tick();
      Substitution step;
      step.add_with_coeff(c.c, es[i], VirtualTerm(c.t));
      std::vector<LinearTerm> nums2;
      for (const auto& n : nums) nums2.push_back(n.has_var(es[i]) ? step.apply(n) : n.scaled(c.c));
      nums2.push_back(c.t.scaled(theta));
      std::vector<char> pols2 = pols;
      pols2.push_back(c.pol);
      FormulaPtr next = apply_subst(psi, step, sort_);
      enum_int(next, es, i + 1, theta * c.c, nums2, pols2, out);
    }
  }

  // --- verdict construction --------------------------------------------

  Verdict make_unsat() {
    GroundResult g = ground_check(true);
    assert(!g.sat);
    Verdict v;
    v.status = Status::Unsat;
    std::map<size_t, size_t> by_gamma;
    for (size_t i = 0; i < instantiations_.size(); ++i)
      by_gamma[instantiations_[i].gamma_index] = i;
    for (size_t gi : g.core) {
      auto it = by_gamma.find(gi);
      if (it != by_gamma.end()) v.core.push_back(it->second);
    }
    // re-check: the reported core together with the non-instance part of
    // gamma must stay unsatisfiable
    std::vector<FormulaPtr> check;
    for (size_t gi = 0; gi < gamma_.size(); ++gi)
      if (!by_gamma.count(gi)) check.push_back(gamma_[gi]);
    for (size_t ii : v.core) check.push_back(gamma_[instantiations_[ii].gamma_index]);
    GroundSolver gs(sort_, &budget_);
    GroundResult rc = gs.check(check, false);
    assert(!rc.sat && "unsat core must re-check");
    (void)rc;
    return v;
  }

  Verdict make_sat(const Model& m, const std::vector<FormulaPtr>& assertions) {
    Verdict v;
    v.status = Status::Sat;
    for (const auto& [var, val] : m.values)
      if (vt_.kind(var) == VarKind::SkolemK) v.model.values.emplace(var, val);
    if (opt_.check_model) {
      for (const auto& f : assertions) {
        if (!model_satisfies(preprocess(f), v.model))
          throw resource_error("model validation failed");
      }
    }
    return v;
  }

  /// Recursive model check: quantifiers are decided by a fresh solver on
  /// the grounded body.
  bool model_satisfies(const FormulaPtr& f, const Model& m) {
    switch (f->kind) {
      case Formula::Kind::True: return true;
      case Formula::Kind::False: return false;
      case Formula::Kind::Atom: return m.eval_literal(f->atom);
      case Formula::Kind::Not: return !model_satisfies(f->kids[0], m);
      case Formula::Kind::And:
        for (auto& k : f->kids)
          if (!model_satisfies(k, m)) return false;
        return true;
      case Formula::Kind::Or:
        for (auto& k : f->kids)
          if (model_satisfies(k, m)) return true;
        return false;
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        // ground the free variables, then ask a sub-solver
        std::set<VarId> free;
        collect_free_vars(f, free);
        FormulaPtr q = f;
        for (VarId var : free)
          q = subst_var(q, var, LinearTerm(m.value(var)), sort_);
        SolverOptions sub = opt_;
        sub.trace = false;
        sub.check_model = false;
        Solver inner(vt_, sort_, sub);
        FormulaPtr goal = q->kind == Formula::Kind::Forall ? negate(q, sort_) : q;
        Verdict res = inner.solve({goal});
        budget_.tick();
        if (res.status == Status::Unknown) throw resource_error("model check inconclusive");
        bool inner_sat = res.status == Status::Sat;
        return q->kind == Formula::Kind::Forall ? !inner_sat : inner_sat;
      }
      default:
        return false;
    }
  }

  VarTable& vt_;
  Sort sort_;
  SolverOptions opt_;
  Budget budget_;
  std::vector<FormulaPtr> gamma_;
  std::vector<Record> records_;
  std::vector<Instantiation> instantiations_;
  SolverStats stats_;
};

}  // namespace qsolve
