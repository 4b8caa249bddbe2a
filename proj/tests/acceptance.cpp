// Acceptance gate: one line per criterion, nonzero exit on any failure.
// Usage: acceptance <benchmark-dir>

#include <cassert>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "qsolve/parser.hpp"
#include "qsolve/synthesis.hpp"

namespace fs = std::filesystem;
using namespace qsolve;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  Verdict verdict;
  std::vector<std::string> tuples;  // "terms=... theta=N" per instantiation
  SolverStats stats;
};

Run run_file(const fs::path& path, SolverOptions opt) {
  VarTable vt;
  Parser p(vt);
  ParsedProblem prob = p.parse(read_file(path));
  std::ostringstream trace;
  opt.trace = true;
  opt.trace_out = &trace;
  Solver s(vt, prob.logic, opt);
  Run r;
  r.verdict = s.solve(prob.assertions);
  r.stats = s.stats();
  std::istringstream lines(trace.str());
  std::string line;
  while (std::getline(lines, line)) {
    size_t a = line.find("terms=");
    size_t b = line.find(" instance=");
    if (a != std::string::npos && b != std::string::npos)
      r.tuples.push_back(line.substr(a, b - a));
  }
  return r;
}

bool same_multiset(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

// ---------------------------------------------------------------- criterion 1

bool criterion1(const fs::path& dir) {
  struct Case {
    const char* file;
    LraMode mode;
    Status want;
    std::vector<std::string> tuples;  // empty means: do not check
  };
  // expected instantiation tuples for the fully worked runs; integer
  // tuples are checked in the solver's canonical div form, where the
  // residue corrections appear pre-multiplied by the modulus
  const std::vector<Case> cases = {
      {"lra_between.smt2", LraMode::Simple, Status::Sat, {"terms=(b) theta=1"}},
      {"lra_between.smt2", LraMode::LwDelta, Status::Sat, {"terms=(b) theta=1"}},
      {"lra_no_max.smt2", LraMode::Simple, Status::Unsat,
       {"terms=(a) theta=1", "terms=(b) theta=1"}},
      {"lra_no_max.smt2", LraMode::LwDelta, Status::Unsat,
       {"terms=(a) theta=1", "terms=(b) theta=1"}},
      {"lra_nonstrict.smt2", LraMode::LwDelta, Status::Unsat,
       {"terms=(a + delta) theta=1", "terms=(b + delta) theta=1"}},
      {"lra_two_vars.smt2", LraMode::LwDelta, Status::Unsat,
       {"terms=(1/2*a + 1/2*b, 1/2*a - 1/2*b) theta=1"}},
      {"lra_boolean.smt2", LraMode::LwDelta, Status::Unsat,
       {"terms=(a + b) theta=1", "terms=(b) theta=1"}},
      {"lra_unbounded.smt2", LraMode::LwDelta, Status::Unsat,
       {"terms=(0 + delta, 0) theta=1"}},
      {"lra_delta_pair.smt2", LraMode::LwDelta, Status::Unsat,
       {"terms=(0 + delta, 0 + 3*delta) theta=1"}},
      {"lia_coeffs.smt2", LraMode::LwDelta, Status::Unsat,
       {"terms=((6*a) div+ 12, (-2*a + 4*b) div+ 12) theta=12"}},
      {"lia_residues.smt2", LraMode::LwDelta, Status::Unsat,
       {"terms=((a) div+ 3, (0) div+ 3) theta=3",
        "terms=((a - 1) div+ 3, (3) div+ 3) theta=3",
        "terms=((a - 2) div+ 3, (6) div+ 3) theta=3"}},
      {"nested_no_max.smt2", LraMode::LwDelta, Status::Sat, {}},
  };
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (const auto& c : cases) {
    SolverOptions opt;
    opt.mode = c.mode;
    Run r = run_file(dir / c.file, opt);
    if (r.verdict.status != c.want) {
      std::cout << "  " << c.file << ": wrong verdict\n";
      ok = false;
      continue;
    }
    if (!c.tuples.empty() && !same_multiset(r.tuples, c.tuples)) {
      std::cout << "  " << c.file << ": instantiation tuples differ:\n";
      for (const auto& t : r.tuples) std::cout << "    got " << t << "\n";
      ok = false;
    }
  }
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0).count();
  if (ms > 1000) {
    std::cout << "  worked runs took " << ms << " ms, over the 1 s budget\n";
    ok = false;
  }
  return ok;
}

// ---------------------------------------------------------------- criterion 3

bool criterion3() {
  for (Sort sort : {Sort::Real, Sort::Int}) {
    oracles::Gen g(sort == Sort::Real ? 9101u : 9102u);
    int disagreements = 0, decided = 0;
    for (int it = 0; it < 500; ++it) {
      VarTable vt;
      std::vector<VarId> all, xs;
      for (int i = 0; i < 2; ++i) all.push_back(vt.declare("c" + std::to_string(i), sort));
      long nx = g.pick(1, 3);
      for (long i = 0; i < nx; ++i) {
        VarId x = vt.declare("x" + std::to_string(i), sort);
        all.push_back(x);
        xs.push_back(x);
      }
      FormulaPtr phi = mk_quant(Formula::Kind::Forall, xs,
                                g.body(all, sort, static_cast<size_t>(g.pick(1, 6))));
      SolverOptions lazy;
      lazy.node_budget = 5'000'000;
      Solver sl(vt, sort, lazy);
      Verdict vl = sl.solve({phi});
      SolverOptions eager = lazy;
      eager.eager = true;
      Solver se(vt, sort, eager);
      Verdict ve = se.solve({phi});
      if (vl.status == Status::Unknown || ve.status == Status::Unknown) continue;
      ++decided;
      if (vl.status != ve.status) ++disagreements;
    }
    std::cout << "  " << (sort == Sort::Real ? "real" : "int") << ": " << decided
              << "/500 decided, " << disagreements << " disagreements\n";
    if (disagreements != 0 || decided < 400) return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 4

bool criterion4() {
  {  // reals against Fourier-Motzkin
    VarTable vt;
    std::vector<VarId> vars;
    for (int i = 0; i < 3; ++i) vars.push_back(vt.declare("r" + std::to_string(i), Sort::Real));
    oracles::Gen g(9201);
    for (int it = 0; it < 1000; ++it) {
      auto lits = g.conjunction(vars, static_cast<size_t>(g.pick(1, 5)));
      std::vector<FormulaPtr> gamma;
      for (const auto& l : lits)
        gamma.push_back(eliminate_equalities(mk_atom(l, Sort::Real), Sort::Real));
      Budget b(100'000'000);
      GroundSolver gs(Sort::Real, &b);
      if (gs.check(gamma).sat != oracles::fm_sat(lits)) {
        std::cout << "  real disagreement at iteration " << it << "\n";
        return false;
      }
    }
  }
  {  // integers against grid enumeration over [-8, 8]
    VarTable vt;
    std::vector<VarId> vars;
    for (int i = 0; i < 3; ++i) vars.push_back(vt.declare("n" + std::to_string(i), Sort::Int));
    oracles::Gen g(9202);
    for (int it = 0; it < 1000; ++it) {
      auto lits = g.conjunction(vars, static_cast<size_t>(g.pick(1, 5)));
      for (VarId v : vars) {
        lits.push_back(Literal(LinearTerm::var(v) - LinearTerm(Rational(8)), Relation::LEQ));
        lits.push_back(Literal(LinearTerm::var(v) + LinearTerm(Rational(8)), Relation::GEQ));
      }
      std::vector<FormulaPtr> gamma;
      for (const auto& l : lits)
        gamma.push_back(eliminate_equalities(mk_atom(l, Sort::Int), Sort::Int));
      Budget b(100'000'000);
      GroundSolver gs(Sort::Int, &b);
      if (gs.check(gamma).sat != oracles::grid_int_model(lits).has_value()) {
        std::cout << "  int disagreement at iteration " << it << "\n";
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 5

bool criterion5(const fs::path& dir) {
  const std::vector<LraMode> modes = {LraMode::Simple, LraMode::LwDelta, LraMode::FrMid,
                                      LraMode::LwInf, LraMode::FrInf};
  bool ok = true;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".smt2") continue;
    VarTable vt;
    Parser p(vt);
    ParsedProblem prob = p.parse(read_file(e.path()));
    bool nested = false;
    for (const auto& f : prob.assertions)
      if (f->body && has_quantifier(f->body)) nested = true;
    std::optional<Status> base;
    for (LraMode m : modes) {
      bool inf_mode = m == LraMode::LwInf || m == LraMode::FrInf;
      if (nested && inf_mode) continue;  // exempt by design on nested inputs
      for (bool lower : {true, false}) {
        SolverOptions opt;
        opt.mode = m;
        opt.prefer_lower = lower;
        Run r = run_file(e.path(), opt);
        if (!base) base = r.verdict.status;
        if (r.verdict.status != *base) {
          std::cout << "  " << e.path().filename().string()
                    << ": verdict differs for mode " << static_cast<int>(m)
                    << (lower ? " lower" : " upper") << "\n";
          ok = false;
        }
      }
    }
  }
  return ok;
}

// ---------------------------------------------------------------- criterion 6

bool criterion6(const fs::path& dir) {
  bool ok = true;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".smt2") continue;
    VarTable vt;
    Parser p(vt);
    ParsedProblem prob = p.parse(read_file(e.path()));
    SolverOptions opt;
    opt.check_model = true;  // internal substitution re-check on sat
    Solver s(vt, prob.logic, opt);
    Verdict v = s.solve(prob.assertions);
    if (v.status == Status::Sat) {
      // every assertion must hold after substituting the witness values,
      // checked by an independent solver instance on the closed problem
      Substitution sigma;
      for (VarId c : prob.declared) sigma.add(c, VirtualTerm(LinearTerm(v.model.value(c))));
      std::vector<FormulaPtr> closed;
      for (const auto& f : prob.assertions)
        closed.push_back(apply_subst(f, sigma, prob.logic));
      Solver rec(vt, prob.logic, {});
      if (rec.solve(closed).status != Status::Sat) {
        std::cout << "  " << e.path().filename().string() << ": model failed re-check\n";
        ok = false;
      }
    } else if (v.status == Status::Unsat) {
      // the core instances alone, with the ground assertions, are unsat
      std::vector<FormulaPtr> gamma;
      for (const auto& f : prob.assertions)
        if (!has_quantifier(f)) gamma.push_back(to_nnf(f, prob.logic));
      for (size_t i : v.core) gamma.push_back(s.instantiations()[i].formula);
      Budget b(100'000'000);
      GroundSolver gs(prob.logic, &b);
      if (gs.check(gamma).sat) {
        std::cout << "  " << e.path().filename().string() << ": core is not refuting\n";
        ok = false;
      }
    } else {
      std::cout << "  " << e.path().filename().string() << ": unknown verdict\n";
      ok = false;
    }
  }
  return ok;
}

// ---------------------------------------------------------------- criterion 7

bool criterion7() {
  auto atom = [](LinearTerm t, Relation r) {
    return mk_atom(Literal(std::move(t), r), Sort::Real);
  };
  bool ok = true;
  {  // max of two inputs
    VarTable vt;
    VarId x1 = vt.declare("x1", Sort::Real);
    VarId x2 = vt.declare("x2", Sort::Real);
    VarId y = vt.declare("y", Sort::Real);
    FormulaPtr spec = mk_and(
        {atom(LinearTerm::var(y) - LinearTerm::var(x1), Relation::GEQ),
         atom(LinearTerm::var(y) - LinearTerm::var(x2), Relation::GEQ),
         mk_or({mk_atom(Literal(LinearTerm::var(y) - LinearTerm::var(x1), Relation::EQ),
                        Sort::Real),
                mk_atom(Literal(LinearTerm::var(y) - LinearTerm::var(x2), Relation::EQ),
                        Sort::Real)})});
    SynthesisResult r = extract_synthesis_solution(vt, Sort::Real, spec, {y});
    if (!r.success || !r.verified) {
      std::cout << "  max-of-two: " << r.reason << "\n";
      ok = false;
    }
  }
  {  // clamp at zero
    VarTable vt;
    VarId x = vt.declare("x", Sort::Real);
    VarId y = vt.declare("y", Sort::Real);
    FormulaPtr spec = mk_and(
        {atom(LinearTerm::var(y), Relation::GEQ),
         atom(LinearTerm::var(y) - LinearTerm::var(x), Relation::GEQ),
         mk_or({mk_atom(Literal(LinearTerm::var(y) - LinearTerm::var(x), Relation::EQ),
                        Sort::Real),
                mk_atom(Literal(LinearTerm::var(y), Relation::EQ), Sort::Real)})});
    SynthesisResult r = extract_synthesis_solution(vt, Sort::Real, spec, {y});
    if (!r.success || !r.verified) {
      std::cout << "  clamp-at-zero: " << r.reason << "\n";
      ok = false;
    }
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("benchmarks");
  bool asserts_on = false;
  assert((asserts_on = true));
  if (!asserts_on) {
    std::cout << "runtime checks compiled out; rebuild without NDEBUG\n";
    return 1;
  }

  struct Item {
    const char* desc;
    bool ok;
  };
  std::vector<Item> items;
  items.push_back({"worked-run reproduction (verdicts and instance tuples)",
                   criterion1(dir)});
  // the lemma-level assertions live inside the library; every criterion
  // below exercises them, and reaching the summary means none fired
  bool c3 = criterion3();
  bool c4 = criterion4();
  bool c5 = criterion5(dir);
  bool c6 = criterion6(dir);
  bool c7 = criterion7();
  items.push_back({"lemma-level runtime assertions never fired", true});
  items.push_back({"lazy/eager verdict equivalence on random sentences", c3});
  items.push_back({"ground differential against brute-force oracles", c4});
  items.push_back({"verdict stability across selectors and bound preferences", c5});
  items.push_back({"sat witnesses and unsat cores re-verify", c6});
  items.push_back({"synthesis extraction for the derived specifications", c7});

  int rc = 0;
  for (size_t i = 0; i < items.size(); ++i) {
    std::cout << "criterion " << (i + 1) << ": " << items[i].desc << ": "
              << (items[i].ok ? "pass" : "FAIL") << "\n";
    if (!items[i].ok) rc = 1;
  }
  return rc;
}
