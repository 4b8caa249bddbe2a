#include <catch2/catch_amalgamated.hpp>

#include "qsolve/synthesis.hpp"

using namespace qsolve;

namespace {

FormulaPtr atom(LinearTerm t, Relation r) { return mk_atom(Literal(std::move(t), r), Sort::Real); }

// evaluate an extracted guarded-term tree at a point
Rational run_tree(const SynthesisResult& r, Model m) {
  for (const auto& c : r.cases) {
    if (!c.cond || m.eval(c.cond)) {
      const VirtualTerm& t = c.values[0];
      REQUIRE(t.is_plain());
      return m.eval_term(t.base).finite;
    }
  }
  FAIL("tree has no default case");
  return Rational(0);
}

}  // namespace

TEST_CASE("max of two inputs") {
  VarTable vt;
  VarId x1 = vt.declare("x1", Sort::Real);
  VarId x2 = vt.declare("x2", Sort::Real);
  VarId y = vt.declare("y", Sort::Real);
  // y >= x1, y >= x2, and y is one of them
  FormulaPtr spec = mk_and(
      {atom(LinearTerm::var(y) - LinearTerm::var(x1), Relation::GEQ),
       atom(LinearTerm::var(y) - LinearTerm::var(x2), Relation::GEQ),
       mk_or({mk_atom(Literal(LinearTerm::var(y) - LinearTerm::var(x1), Relation::EQ),
                      Sort::Real),
              mk_atom(Literal(LinearTerm::var(y) - LinearTerm::var(x2), Relation::EQ),
                      Sort::Real)})});
  SynthesisResult r = extract_synthesis_solution(vt, Sort::Real, spec, {y});
  REQUIRE(r.success);
  REQUIRE(r.verified);
  REQUIRE_FALSE(r.symbolic);
  REQUIRE(r.cases.size() >= 2);
  for (long a = -3; a <= 3; a += 3)
    for (long b = -3; b <= 3; b += 2) {
      Model m;
      m.values[x1] = Rational(a);
      m.values[x2] = Rational(b);
      CHECK(run_tree(r, m) == Rational(std::max(a, b)));
    }
}

TEST_CASE("clamp at zero") {
  VarTable vt;
  VarId x = vt.declare("x", Sort::Real);
  VarId y = vt.declare("y", Sort::Real);
  // y = max(x, 0)
  FormulaPtr spec = mk_and(
      {atom(LinearTerm::var(y), Relation::GEQ),
       atom(LinearTerm::var(y) - LinearTerm::var(x), Relation::GEQ),
       mk_or({mk_atom(Literal(LinearTerm::var(y) - LinearTerm::var(x), Relation::EQ),
                      Sort::Real),
              mk_atom(Literal(LinearTerm::var(y), Relation::EQ), Sort::Real)})});
  SynthesisResult r = extract_synthesis_solution(vt, Sort::Real, spec, {y});
  REQUIRE(r.success);
  REQUIRE(r.verified);
  for (long a = -4; a <= 4; ++a) {
    Model m;
    m.values[x] = Rational(a);
    CHECK(run_tree(r, m) == Rational(std::max(a, 0L)));
  }
}

TEST_CASE("unrealizable specifications are rejected") {
  VarTable vt;
  VarId x = vt.declare("x", Sort::Real);
  VarId y = vt.declare("y", Sort::Real);
  // y > x and y < x has no solution
  FormulaPtr spec = mk_and({atom(LinearTerm::var(y) - LinearTerm::var(x), Relation::GT),
                            atom(LinearTerm::var(y) - LinearTerm::var(x), Relation::LT)});
  SynthesisResult r = extract_synthesis_solution(vt, Sort::Real, spec, {y});
  CHECK_FALSE(r.success);
  CHECK_FALSE(r.reason.empty());
}

TEST_CASE("strict specifications surface their virtual parts") {
  VarTable vt;
  VarId x = vt.declare("x", Sort::Real);
  VarId y = vt.declare("y", Sort::Real);
  // any y strictly above x; the witness needs the infinitesimal
  FormulaPtr spec = atom(LinearTerm::var(y) - LinearTerm::var(x), Relation::GT);
  SynthesisResult plain = extract_synthesis_solution(vt, Sort::Real, spec, {y});
  CHECK_FALSE(plain.success);
  SolverOptions fr;
  fr.mode = LraMode::FrMid;
  SynthesisResult mid = extract_synthesis_solution(vt, Sort::Real, spec, {y}, fr);
  // the fraction selector offsets by one instead and stays plain
  CHECK(mid.success);
  CHECK(mid.verified);
}
