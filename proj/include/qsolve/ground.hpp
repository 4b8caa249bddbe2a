#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "qsolve/budget.hpp"
#include "qsolve/formula.hpp"
#include "qsolve/lia_decide.hpp"
#include "qsolve/simplex.hpp"

namespace qsolve {

/// Concrete interpretation: rational values for arithmetic variables,
/// truth values for guard variables. Terms are evaluated over the
/// extension with the two distinguished variables, so virtual terms can
/// be checked symbolically.
struct Model {
  std::map<VarId, Rational> values;
  std::map<VarId, bool> bools;

  Rational value(VarId v) const {
    auto it = values.find(v);
    return it == values.end() ? Rational(0) : it->second;
  }

  ExtendedValue eval_term(const LinearTerm& t) const {
    ExtendedValue r(t.constant());
    for (const auto& [v, c] : t.coeffs()) {
      if (v == kDeltaVar) r = r + ExtendedValue(Rational(0), c);
      else if (v == kInfVar) r = r + ExtendedValue::inf(c.sign());
      else r = r + ExtendedValue(value(v) * c);
    }
    return r;
  }

  bool eval_literal(const Literal& l) const {
    ExtendedValue v = eval_term(l.lhs);
    if (l.rel == Relation::EQ) return v.satisfies(Relation::EQ) != l.negated;
    return v.satisfies(l.rel);
  }

  /// Full evaluation; guards default to false when unassigned.
  bool eval(const FormulaPtr& f) const {
    Truth t = eval_partial(
        f, [&](const Literal& l) { return eval_literal(l) ? Truth::True : Truth::False; },
        [&](VarId g) {
          auto it = bools.find(g);
          return (it != bools.end() && it->second) ? Truth::True : Truth::False;
        });
    return t == Truth::True;
  }
};


struct AtomAssignment {
  std::vector<Literal> atoms;
  std::vector<VarId> guards;
  std::vector<std::optional<bool>> atom_val;
  std::vector<std::optional<bool>> guard_val;

  std::optional<bool> lookup_atom(const Literal& l) const {
    for (size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i] == l) return atom_val[i];
    return std::nullopt;
  }
  std::optional<bool> lookup_guard(VarId g) const {
    for (size_t i = 0; i < guards.size(); ++i)
      if (guards[i] == g) return guard_val[i];
    return std::nullopt;
  }
};

struct GroundResult {
  bool sat = false;
  Model model;                 // when sat
  AtomAssignment assignment;   // when sat
  std::vector<size_t> core;    // input indices, when unsat
};

/// Satisfiability of a set of quantifier-free NNF formulas over one
/// arithmetic sort plus free guard variables. Boolean search is a
/// backtracking enumeration with theory-conflict blocking clauses;
/// unsat answers carry a deletion-minimized core of input indices.
class GroundSolver {
 public:
  GroundSolver(Sort sort, Budget* budget, std::set<VarId> prefer_true_guards = {})
      : sort_(sort), budget_(budget), prefer_(std::move(prefer_true_guards)) {}

  GroundResult check(const std::vector<FormulaPtr>& gamma, bool minimize = true) {
    GroundResult r = check_once(gamma);
    if (r.sat || !minimize || gamma.size() <= 1) return r;
    // deletion-based core minimization
    std::vector<size_t> keep(r.core);
    for (size_t k = keep.size(); k-- > 0;) {
      std::vector<FormulaPtr> sub;
      std::vector<size_t> subidx;
      for (size_t j = 0; j < keep.size(); ++j) {
        if (j == k) continue;
        sub.push_back(gamma[keep[j]]);
        subidx.push_back(keep[j]);
      }
      GroundResult rr = check_once(sub);
      if (!rr.sat) {
        std::vector<size_t> next;
        for (size_t c : rr.core) next.push_back(subidx[c]);
        keep = std::move(next);
        if (k > keep.size()) k = keep.size();
      }
    }
    r.core = std::move(keep);
    return r;
  }

 private:
  GroundResult check_once(const std::vector<FormulaPtr>& gamma) {
    AtomAssignment as;
    for (const auto& f : gamma) collect_atoms(f, as.atoms, &as.guards);
    for (const auto& a : as.atoms) {
      assert(!a.lhs.has_var(kDeltaVar) && !a.lhs.has_var(kInfVar) &&
             "virtual terms must be normalized away before ground solving");
      (void)a;
    }
    as.atom_val.assign(as.atoms.size(), std::nullopt);
    as.guard_val.assign(as.guards.size(), std::nullopt);
    blocking_.clear();
    atom_idx_.clear();
    guard_idx_.clear();
    for (const auto& f : gamma) index_nodes(f, as);

    while (true) {
      for (auto& v : as.atom_val) v = std::nullopt;
      for (auto& v : as.guard_val) v = std::nullopt;
      if (!search(gamma, as)) {
        GroundResult r;
        for (size_t i = 0; i < gamma.size(); ++i) r.core.push_back(i);
        return r;
      }
      // drop don't-care atoms first: the theory conjunction stays small
      // and so do the conflict cores derived from it
      for (size_t i = 0; i < as.atoms.size(); ++i) {
        if (!as.atom_val[i]) continue;
        auto saved = as.atom_val[i];
        as.atom_val[i] = std::nullopt;
        bool needed = false;
        for (const auto& f : gamma)
          if (eval_indexed(f.get(), as) != Truth::True) {
            needed = true;
            break;
          }
        if (needed) as.atom_val[i] = saved;
      }
      // theory check of the asserted atoms
      std::vector<Literal> lits;
      std::vector<size_t> src;
      for (size_t i = 0; i < as.atoms.size(); ++i) {
        if (!as.atom_val[i]) continue;
        lits.push_back(*as.atom_val[i] ? as.atoms[i] : as.atoms[i].negate());
        src.push_back(i);
      }
      if (sort_ == Sort::Real) {
        SimplexResult sr = Simplex::check(lits);
        budget_->tick(sr.pivots + 1);  // charge theory work
        if (sr.sat) return make_sat(as, lits, sr.model);
        block(src, sr.core, as);
      } else {
        // cap the inner budget by what remains, so one call cannot run
        // past the shared limit before its cost is charged
        LiaResult lr = LiaDecide::check(lits, std::min<uint64_t>(2'000'000, budget_->remaining),
                                        budget_->deadline);
        budget_->tick(lr.nodes_used + 1);  // charge elimination work
        if (lr.sat) {
          std::map<VarId, ExtendedValue> m;
          for (const auto& [v, val] : lr.model) m.emplace(v, ExtendedValue(val));
          return make_sat(as, lits, m);
        }
        if (lr.core.size() == lits.size()) minimize_lia_core(lits, lr.core);
        block(src, lr.core, as);
      }
    }
  }

  /// Whole-conjunction integer cores prune only one assignment each, so
  /// an exponential enumeration would follow. Shrink them by deletion;
  /// a literal stays when removing it makes the rest satisfiable or too
  /// expensive to decide.
  void minimize_lia_core(const std::vector<Literal>& lits, std::vector<size_t>& core) {
    std::vector<size_t> keep = core;
    for (size_t k = keep.size(); k-- > 0;) {
      budget_->tick(64);
      std::vector<Literal> sub;
      std::vector<size_t> subidx;
      for (size_t j = 0; j < keep.size(); ++j) {
        if (j == k) continue;
        sub.push_back(lits[keep[j]]);
        subidx.push_back(keep[j]);
      }
      try {
        LiaResult rr = LiaDecide::check(sub, std::min<uint64_t>(50'000, budget_->remaining),
                                          budget_->deadline);
        budget_->tick(rr.nodes_used + 1);
        if (!rr.sat) {
          std::vector<size_t> next;
          for (size_t c : rr.core) next.push_back(subidx[c]);
          keep = std::move(next);
          if (k > keep.size()) k = keep.size();
        }
      } catch (const resource_error&) {
        // undecided within the smaller budget: keep the literal
      }
    }
    core = std::move(keep);
  }

  void block(const std::vector<size_t>& src, const std::vector<size_t>& core,
             AtomAssignment& as) {
    std::vector<std::pair<size_t, bool>> clause;
    for (size_t c : core) clause.emplace_back(src[c], !*as.atom_val[src[c]]);
    blocking_.push_back(std::move(clause));
  }

  GroundResult make_sat(const AtomAssignment& as, const std::vector<Literal>& lits,
                        const std::map<VarId, ExtendedValue>& tmodel) {
    GroundResult r;
    r.sat = true;
    r.assignment = as;
    r.model = concretize(lits, tmodel);
    for (size_t i = 0; i < as.guards.size(); ++i)
      if (as.guard_val[i]) r.model.bools.emplace(as.guards[i], *as.guard_val[i]);
    return r;
  }

  /// Replace the infinitesimal component of the theory model by a small
  /// concrete rational that keeps every asserted literal satisfied.
  static Model concretize(const std::vector<Literal>& lits,
                          const std::map<VarId, ExtendedValue>& tmodel) {
    Rational eps(1);
    for (const auto& l : lits) {
      // value of lhs is a + b*eps; find the largest step that keeps the sign
      Rational a(0), b(0);
      a += l.lhs.constant();
      for (const auto& [v, c] : l.lhs.coeffs()) {
        auto it = tmodel.find(v);
        if (it == tmodel.end()) continue;
        a += it->second.finite * c;
        b += it->second.delta * c;
      }
      if (b.is_zero() || a.is_zero()) continue;
      if (a.sign() != b.sign()) {
        Rational lim = (-a / b) / Rational(2);
        if (lim < eps) eps = lim;
      }
    }
    Model m;
    for (const auto& [v, val] : tmodel) m.values[v] = val.finite + val.delta * eps;
    return m;
  }

  /// One-time map from shared formula nodes to atom/guard slots so the
  /// search loop below never compares literals structurally.
  void index_nodes(const FormulaPtr& f, const AtomAssignment& as) {
    switch (f->kind) {
      case Formula::Kind::Atom: {
        if (atom_idx_.count(f.get())) return;
        for (size_t i = 0; i < as.atoms.size(); ++i)
          if (as.atoms[i] == f->atom) {
            atom_idx_.emplace(f.get(), i);
            return;
          }
        return;
      }
      case Formula::Kind::Guard: {
        if (guard_idx_.count(f.get())) return;
        for (size_t i = 0; i < as.guards.size(); ++i)
          if (as.guards[i] == f->guard) {
            guard_idx_.emplace(f.get(), i);
            return;
          }
        return;
      }
      default:
        for (const auto& k : f->kids) index_nodes(k, as);
    }
  }

  Truth eval_indexed(const Formula* f, const AtomAssignment& as) const {
    switch (f->kind) {
      case Formula::Kind::True: return Truth::True;
      case Formula::Kind::False: return Truth::False;
      case Formula::Kind::Atom: {
        const auto& v = as.atom_val[atom_idx_.at(f)];
        if (!v) return Truth::Unknown;
        return *v ? Truth::True : Truth::False;
      }
      case Formula::Kind::Guard: {
        const auto& v = as.guard_val[guard_idx_.at(f)];
        if (!v) return Truth::Unknown;
        return *v ? Truth::True : Truth::False;
      }
      case Formula::Kind::Not: {
        Truth t = eval_indexed(f->kids[0].get(), as);
        if (t == Truth::Unknown) return t;
        return t == Truth::True ? Truth::False : Truth::True;
      }
      case Formula::Kind::And: {
        bool unknown = false;
        for (const auto& k : f->kids) {
          Truth t = eval_indexed(k.get(), as);
          if (t == Truth::False) return Truth::False;
          if (t == Truth::Unknown) unknown = true;
        }
        return unknown ? Truth::Unknown : Truth::True;
      }
      case Formula::Kind::Or: {
        bool unknown = false;
        for (const auto& k : f->kids) {
          Truth t = eval_indexed(k.get(), as);
          if (t == Truth::True) return Truth::True;
          if (t == Truth::Unknown) unknown = true;
        }
        return unknown ? Truth::Unknown : Truth::False;
      }
      default:
        return Truth::Unknown;
    }
  }

  bool search(const std::vector<FormulaPtr>& gamma, AtomAssignment& as) {
    budget_->tick();
    bool all_true = true;
    for (const auto& f : gamma) {
      Truth t = eval_indexed(f.get(), as);
      if (t == Truth::False) return false;
      if (t == Truth::Unknown) all_true = false;
    }
    for (const auto& cl : blocking_) {
      bool sat = false, open = false;
      for (const auto& [i, want] : cl) {
        if (!as.atom_val[i]) open = true;
        else if (*as.atom_val[i] == want) sat = true;
      }
      if (!sat && !open) return false;
      if (!sat) all_true = false;
    }
    if (all_true) return true;

    // decision: preferred guards first, asserted positively
    for (size_t i = 0; i < as.guards.size(); ++i) {
      if (as.guard_val[i] || !prefer_.count(as.guards[i])) continue;
      as.guard_val[i] = true;
      if (search(gamma, as)) return true;
      as.guard_val[i] = false;
      if (search(gamma, as)) return true;
      as.guard_val[i] = std::nullopt;
      return false;
    }
    for (size_t i = 0; i < as.guards.size(); ++i) {
      if (as.guard_val[i]) continue;
      for (bool v : {true, false}) {
        as.guard_val[i] = v;
        if (search(gamma, as)) return true;
      }
      as.guard_val[i] = std::nullopt;
      return false;
    }
    for (size_t i = 0; i < as.atoms.size(); ++i) {
      if (as.atom_val[i]) continue;
      for (bool v : {true, false}) {
        as.atom_val[i] = v;
        if (search(gamma, as)) return true;
      }
      as.atom_val[i] = std::nullopt;
      return false;
    }
    return false;  // everything assigned but something still unknown
  }

  Sort sort_;
  Budget* budget_;
  std::set<VarId> prefer_;
  std::vector<std::vector<std::pair<size_t, bool>>> blocking_;
  std::unordered_map<const Formula*, size_t> atom_idx_;
  std::unordered_map<const Formula*, size_t> guard_idx_;
};

/// Literals asserted true by the assignment that make f true; with
/// pruning, literals whose removal keeps f true are dropped greedily.
inline std::vector<Literal> extract_implicant(const FormulaPtr& f, const AtomAssignment& as,
                                              bool prune = false) {
  std::vector<Literal> used;
  std::vector<const Literal*> base;
  std::vector<bool> vals;
  for (size_t i = 0; i < as.atoms.size(); ++i) {
    if (!as.atom_val[i]) continue;
    base.push_back(&as.atoms[i]);
    vals.push_back(*as.atom_val[i]);
  }
  std::vector<bool> keep(base.size(), true);
  auto eval_with = [&](const std::vector<bool>& kept) {
    auto atom_val = [&](const Literal& l) {
      for (size_t i = 0; i < base.size(); ++i)
        if (kept[i] && *base[i] == l) return vals[i] ? Truth::True : Truth::False;
      return Truth::Unknown;
    };
    auto guard_val = [&](VarId g) {
      auto v = as.lookup_guard(g);
      if (!v) return Truth::Unknown;
      return *v ? Truth::True : Truth::False;
    };
    return eval_partial(f, atom_val, guard_val);
  };
  if (prune) {
    for (size_t i = 0; i < base.size(); ++i) {
      keep[i] = false;
      if (eval_with(keep) != Truth::True) keep[i] = true;
    }
  }
  for (size_t i = 0; i < base.size(); ++i) {
    if (!keep[i]) continue;
    used.push_back(vals[i] ? *base[i] : base[i]->negate());
  }
  return used;
}

}  // namespace qsolve
