#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace qsolve;

namespace {

GroundResult run(Sort sort, const std::vector<FormulaPtr>& gamma) {
  Budget b(100'000'000);
  GroundSolver gs(sort, &b);
  return gs.check(gamma);
}

}  // namespace

TEST_CASE("real conjunctions against fourier motzkin") {
  VarTable vt;
  std::vector<VarId> vars;
  for (int i = 0; i < 3; ++i) vars.push_back(vt.declare("r" + std::to_string(i), Sort::Real));
  oracles::Gen g(101);
  int sat_seen = 0, unsat_seen = 0;
  for (int it = 0; it < 1000; ++it) {
    auto lits = g.conjunction(vars, static_cast<size_t>(g.pick(1, 5)));
    std::vector<FormulaPtr> gamma;
    for (const auto& l : lits)
      gamma.push_back(eliminate_equalities(mk_atom(l, Sort::Real), Sort::Real));
    GroundResult r = run(Sort::Real, gamma);
    bool expect = oracles::fm_sat(lits);
    REQUIRE(r.sat == expect);
    if (r.sat) {
      ++sat_seen;
      for (const auto& l : lits) REQUIRE(r.model.eval_literal(l));
    } else {
      ++unsat_seen;
      // the core alone must still be unsat
      std::vector<Literal> sub;
      for (size_t i : r.core) sub.push_back(lits[i]);
      REQUIRE_FALSE(oracles::fm_sat(sub));
    }
  }
  CHECK(sat_seen > 100);
  CHECK(unsat_seen > 100);
}

TEST_CASE("integer conjunctions against grid enumeration") {
  VarTable vt;
  std::vector<VarId> vars;
  for (int i = 0; i < 3; ++i) vars.push_back(vt.declare("n" + std::to_string(i), Sort::Int));
  oracles::Gen g(202);
  int sat_seen = 0, unsat_seen = 0;
  for (int it = 0; it < 1000; ++it) {
    auto lits = g.conjunction(vars, static_cast<size_t>(g.pick(1, 5)));
    // box the variables so the grid oracle is complete
    for (VarId v : vars) {
      lits.push_back(Literal(LinearTerm::var(v) - LinearTerm(Rational(8)), Relation::LEQ));
      lits.push_back(Literal(LinearTerm::var(v) + LinearTerm(Rational(8)), Relation::GEQ));
    }
    std::vector<FormulaPtr> gamma;
    for (const auto& l : lits)
      gamma.push_back(eliminate_equalities(mk_atom(l, Sort::Int), Sort::Int));
    GroundResult r = run(Sort::Int, gamma);
    bool expect = oracles::grid_int_model(lits).has_value();
    REQUIRE(r.sat == expect);
    if (r.sat) {
      ++sat_seen;
      for (const auto& l : lits) REQUIRE(r.model.eval_literal(l));
      for (const auto& [v, val] : r.model.values) REQUIRE(val.is_integer());
    } else {
      ++unsat_seen;
    }
  }
  CHECK(sat_seen > 100);
  CHECK(unsat_seen > 100);
}

TEST_CASE("boolean structure and guards") {
  VarTable vt;
  VarId x = vt.declare("x", Sort::Real);
  VarId g = vt.declare("g", Sort::Real, VarKind::Guard);
  FormulaPtr xpos = mk_atom(Literal(LinearTerm::var(x), Relation::GT), Sort::Real);
  FormulaPtr xneg = mk_atom(Literal(LinearTerm::var(x), Relation::LT), Sort::Real);

  // (g or x>0) and (not g or x<0) is satisfiable either way
  GroundResult r = run(Sort::Real, {mk_or({mk_guard(g), xpos}),
                                    mk_or({mk_guard(g, false), xneg})});
  REQUIRE(r.sat);

  // forcing both sides of x is not
  r = run(Sort::Real, {xpos, xneg});
  REQUIRE_FALSE(r.sat);
  REQUIRE(r.core.size() == 2);

  // preferred guards come out true when free
  Budget b(1'000'000);
  GroundSolver gs(Sort::Real, &b, {g});
  r = gs.check({mk_or({mk_guard(g), xpos})});
  REQUIRE(r.sat);
  auto tv = r.assignment.lookup_guard(g);
  REQUIRE(tv);
  CHECK(*tv);
}

TEST_CASE("cores are minimal on a chain") {
  VarTable vt;
  VarId x = vt.declare("x", Sort::Real);
  // x>5 together with x<3; padding constraints are irrelevant
  std::vector<FormulaPtr> gamma;
  for (int i = 0; i < 6; ++i)
    gamma.push_back(mk_atom(
        Literal(LinearTerm::var(x) + LinearTerm(Rational(100 + i)), Relation::GT), Sort::Real));
  gamma.push_back(mk_atom(Literal(LinearTerm::var(x) - LinearTerm(Rational(5)), Relation::GT),
                          Sort::Real));
  gamma.push_back(mk_atom(Literal(LinearTerm::var(x) - LinearTerm(Rational(3)), Relation::LT),
                          Sort::Real));
  GroundResult r = run(Sort::Real, gamma);
  REQUIRE_FALSE(r.sat);
  REQUIRE(r.core == std::vector<size_t>({6, 7}));
}

TEST_CASE("budget exhaustion raises resource_error") {
  VarTable vt;
  std::vector<FormulaPtr> gamma;
  for (int i = 0; i < 30; ++i) {
    VarId v = vt.declare("b" + std::to_string(i), Sort::Real);
    gamma.push_back(mk_or(
        {mk_atom(Literal(LinearTerm::var(v), Relation::GT), Sort::Real),
         mk_atom(Literal(LinearTerm::var(v), Relation::LT), Sort::Real)}));
  }
  Budget b(10);
  GroundSolver gs(Sort::Real, &b);
  CHECK_THROWS_AS(gs.check(gamma), resource_error);
}
