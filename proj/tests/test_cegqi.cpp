#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qsolve/cegqi.hpp"
#include "qsolve/parser.hpp"

using namespace qsolve;

namespace {

Verdict solve_text(const std::string& src, SolverOptions opt = {}) {
  VarTable vt;
  Parser p(vt);
  ParsedProblem prob = p.parse(src);
  Solver s(vt, prob.logic, opt);
  return s.solve(prob.assertions);
}

const std::vector<LraMode> kAllModes = {LraMode::Simple, LraMode::LwDelta, LraMode::FrMid,
                                        LraMode::LwInf, LraMode::FrInf};

}  // namespace

TEST_CASE("bounded universals over the reals") {
  // exists a forall x (x < a or x > a - 1): sat
  std::string sat_src =
      "(set-logic LRA)(declare-const a Real)"
      "(assert (forall ((x Real)) (or (< x a) (> x (- a 1)))))";
  // exists a forall x (x < a): unsat, nothing exceeds every real
  std::string unsat_src =
      "(set-logic LRA)(declare-const a Real)"
      "(assert (forall ((x Real)) (< x a)))";
  for (LraMode m : kAllModes) {
    SolverOptions opt;
    opt.mode = m;
    for (bool lower : {true, false}) {
      opt.prefer_lower = lower;
      CHECK(solve_text(sat_src, opt).status == Status::Sat);
      CHECK(solve_text(unsat_src, opt).status == Status::Unsat);
    }
  }
}

TEST_CASE("two universal variables need independent limits") {
  // forall x y (x <= y) has no witness-free escape: unsat
  std::string src =
      "(set-logic LRA)(declare-const a Real)"
      "(assert (forall ((x Real) (y Real)) (<= x y)))";
  for (LraMode m : kAllModes) {
    SolverOptions opt;
    opt.mode = m;
    CHECK(solve_text(src, opt).status == Status::Unsat);
  }
}

TEST_CASE("sat models verify by substitution") {
  std::string src =
      "(set-logic LRA)(declare-const a Real)(declare-const b Real)"
      "(assert (< a b))"
      "(assert (forall ((x Real)) (or (< x b) (> x a))))";
  SolverOptions opt;
  opt.check_model = true;  // internal re-verification of the witness
  Verdict v = solve_text(src, opt);
  REQUIRE(v.status == Status::Sat);
  CHECK(v.model.value(0) == Rational(0));  // no virtual parts leak out
}

TEST_CASE("unsat cores point at refuting instances") {
  std::string src =
      "(set-logic LRA)(declare-const a Real)"
      "(assert (forall ((x Real)) (< x a)))";
  VarTable vt;
  Parser p(vt);
  ParsedProblem prob = p.parse(src);
  Solver s(vt, prob.logic, {});
  Verdict v = s.solve(prob.assertions);
  REQUIRE(v.status == Status::Unsat);
  REQUIRE_FALSE(v.core.empty());
  for (size_t i : v.core) REQUIRE(i < s.instantiations().size());
}

TEST_CASE("integer divisibility instances") {
  // the congruence constraints force three residue classes
  std::string src =
      "(set-logic LIA)(declare-const a Int)"
      "(assert (forall ((x Int) (y Int))"
      " (or (not (= (+ (* 3 x) y) a)) (> 0 y) (> y 2))))";
  VarTable vt;
  Parser p(vt);
  ParsedProblem prob = p.parse(src);
  Solver s(vt, prob.logic, {});
  Verdict v = s.solve(prob.assertions);
  CHECK(v.status == Status::Unsat);
  CHECK(s.instantiations().size() == 3);
}

TEST_CASE("nested quantification") {
  std::string src =
      "(set-logic LIA)(declare-const a Int)"
      "(assert (forall ((x Int)) (not (forall ((y Int)) (> x y)))))";
  CHECK(solve_text(src).status == Status::Sat);
  SolverOptions strict;
  strict.strict_nested = true;
  CHECK(solve_text(src, strict).status == Status::Unknown);
}

TEST_CASE("budget exhaustion is reported as unknown") {
  std::string src =
      "(set-logic LRA)(declare-const a Real)"
      "(assert (forall ((x Real) (y Real)) (<= x y)))";
  SolverOptions opt;
  opt.budget = 0;
  Verdict v = solve_text(src, opt);
  CHECK(v.status == Status::Unknown);
  CHECK_FALSE(v.reason.empty());
}

TEST_CASE("lazy and eager closures agree on random sentences") {
  for (Sort sort : {Sort::Real, Sort::Int}) {
    oracles::Gen g(sort == Sort::Real ? 1301u : 1302u);
    int decided = 0;
    for (int it = 0; it < 500; ++it) {
      VarTable vt;
      std::vector<VarId> consts, xs;
      for (int i = 0; i < 2; ++i) consts.push_back(vt.declare("c" + std::to_string(i), sort));
      long nx = g.pick(1, 3);
      for (long i = 0; i < nx; ++i)
        xs.push_back(vt.declare("x" + std::to_string(i), sort));
      std::vector<VarId> all = consts;
      all.insert(all.end(), xs.begin(), xs.end());
      FormulaPtr body = g.body(all, sort, static_cast<size_t>(g.pick(1, 6)));
      FormulaPtr phi = mk_quant(Formula::Kind::Forall, xs, body);

      SolverOptions lazy;
      lazy.node_budget = 5'000'000;
      Solver sl(vt, sort, lazy);
      Verdict vl = sl.solve({phi});

      SolverOptions eager;
      eager.eager = true;
      eager.node_budget = 5'000'000;
      Solver se(vt, sort, eager);
      Verdict ve = se.solve({phi});

      if (vl.status != Status::Unknown && ve.status != Status::Unknown) {
        REQUIRE(vl.status == ve.status);
        ++decided;
      }
      // the lazy loop never needs more rounds than the closure has members
      REQUIRE(sl.stats().iterations <= se.stats().instances + 1);
    }
    REQUIRE(decided >= 450);
  }
}
