#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qsolve/cegqi.hpp"

namespace qsolve {

/// One branch of a guarded-term solution; the last case of a tree has no
/// condition and acts as the default.
struct SynthesisCase {
  FormulaPtr cond;                  // null for the default case
  std::vector<VirtualTerm> values;  // one per synthesized output
};

struct SynthesisResult {
  bool success = false;
  std::vector<SynthesisCase> cases;  // evaluated first to last
  bool symbolic = false;             // some value carries delta / div parts
  bool verified = false;
  std::string reason;
};

/// Extract a guarded-term solution for outputs ys of the conjecture
/// forall xs exists ys. body. The negated conjecture is solved by
/// instantiation; an unsat verdict turns the core terms, in reverse
/// acquisition order, into a conditional tree which is then verified by
/// substitution and a validity check.
inline SynthesisResult extract_synthesis_solution(VarTable& vt, Sort sort,
                                                  const FormulaPtr& body,
                                                  const std::vector<VarId>& ys,
                                                  SolverOptions opt = {},
                                                  bool allow_symbolic = false) {
  SynthesisResult res;
  Solver solver(vt, sort, opt);
  FormulaPtr goal = mk_quant(Formula::Kind::Forall, ys, negate(body, sort));
  Verdict v = solver.solve_one_alternation(goal);
  if (v.status == Status::Sat) {
    res.reason = "specification is unrealizable: its negation is satisfiable";
    return res;
  }
  if (v.status == Status::Unknown) {
    res.reason = "solver inconclusive: " + v.reason;
    return res;
  }
  std::vector<size_t> core = v.core;
  std::sort(core.begin(), core.end());
  if (core.empty()) {
    res.reason = "empty core: specification holds vacuously";
    return res;
  }

  const auto& insts = solver.instantiations();
  std::vector<std::vector<VirtualTerm>> tuples;
  for (size_t i : core) tuples.push_back(insts[i].terms);
  for (const auto& tup : tuples)
    for (const auto& t : tup)
      if (!t.is_plain()) res.symbolic = true;
  if (res.symbolic && !allow_symbolic) {
    res.reason = "solution terms carry virtual parts; rerun with a fraction-based selector "
                 "or allow symbolic output";
    return res;
  }
  bool divs = false;
  for (const auto& tup : tuples)
    for (const auto& t : tup)
      if (t.div_by != Rational(1)) divs = true;

  auto subst_tuple = [&](const std::vector<VirtualTerm>& tup) {
    Substitution sigma;
    for (size_t j = 0; j < ys.size(); ++j) sigma.add(ys[j], tup[j]);
    return normalize_real(apply_subst(body, sigma, sort), sort);
  };

  // cases come out innermost-first: the first acquired tuple is the
  // default, later tuples wrap it with their own condition
  std::vector<SynthesisCase> chain;
  chain.push_back({nullptr, tuples[0]});
  for (size_t i = 1; i < tuples.size(); ++i) {
    if (divs) break;  // conditions over div terms need auxiliary variables
    chain.push_back({subst_tuple(tuples[i]), tuples[i]});
  }
  std::reverse(chain.begin(), chain.end());
  res.cases = std::move(chain);
  if (divs && tuples.size() > 1) {
    res.reason = "multi-branch solution over rounded terms is reported unverified";
    res.success = true;
    return res;
  }

  // verification: substitute the tree back and check validity
  FormulaPtr phi = subst_tuple(tuples[0]);
  for (size_t i = 1; i < tuples.size() && !divs; ++i) {
    FormulaPtr c = subst_tuple(tuples[i]);
    phi = mk_or({c, mk_and({negate(c, sort), phi})});
  }
  SolverOptions vo = opt;
  vo.trace = false;
  Solver verifier(vt, sort, vo);
  Verdict check = verifier.solve({negate(phi, sort)});
  if (check.status == Status::Unsat) {
    res.verified = true;
    res.success = true;
  } else {
    res.reason = "extracted tree failed the validity re-check";
  }
  return res;
}

inline std::string synthesis_tree_str(const SynthesisResult& r, size_t output,
                                      const VarTable& vt) {
  std::string s;
  size_t depth = 0;
  for (size_t i = 0; i < r.cases.size(); ++i) {
    const auto& c = r.cases[i];
    if (c.cond) {
      s += "ite(" + formula_str(c.cond, vt) + ", " + c.values[output].str(vt) + ", ";
      ++depth;
    } else {
      s += c.values[output].str(vt);
    }
  }
  s += std::string(depth, ')');
  return s;
}

}  // namespace qsolve
