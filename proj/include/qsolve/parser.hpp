#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qsolve/formula.hpp"

namespace qsolve {

struct parse_error : std::runtime_error {
  int line, col;
  parse_error(const std::string& msg, int l, int c)
      : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
        line(l), col(c) {}
};

struct unsupported_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParsedProblem {
  Sort logic = Sort::Real;  // LRA -> Real, LIA -> Int
  bool logic_set = false;
  std::vector<FormulaPtr> assertions;
  std::vector<VarId> declared;
  std::map<std::string, std::string> options;
  bool check_sat = false;
  bool get_model = false;
  std::string expect;  // from "; expect: sat|unsat" comments
};

namespace detail {

struct SExpr {
  // atom or list
  std::string atom;
  std::vector<SExpr> list;
  bool is_atom = false;
  int line = 0, col = 0;
};

class Lexer {
 public:
  Lexer(const std::string& src, std::string* expect) : s_(src), expect_(expect) {}

  SExpr read() {
    skip_ws();
    if (pos_ >= s_.size()) throw parse_error("unexpected end of input", line_, col_);
    if (s_[pos_] == '(') {
      SExpr e;
      e.line = line_;
      e.col = col_;
      advance();
      while (true) {
        skip_ws();
        if (pos_ >= s_.size()) throw parse_error("unbalanced '('", e.line, e.col);
        if (s_[pos_] == ')') {
          advance();
          return e;
        }
        e.list.push_back(read());
      }
    }
    if (s_[pos_] == ')') throw parse_error("unexpected ')'", line_, col_);
    SExpr e;
    e.is_atom = true;
    e.line = line_;
    e.col = col_;
    if (s_[pos_] == '|') {  // quoted symbol
      advance();
      while (pos_ < s_.size() && s_[pos_] != '|') {
        e.atom += s_[pos_];
        advance();
      }
      if (pos_ >= s_.size()) throw parse_error("unterminated quoted symbol", e.line, e.col);
      advance();
      return e;
    }
    if (s_[pos_] == '"') {  // string literal
      advance();
      while (pos_ < s_.size() && s_[pos_] != '"') {
        e.atom += s_[pos_];
        advance();
      }
      if (pos_ >= s_.size()) throw parse_error("unterminated string", e.line, e.col);
      advance();
      return e;
    }
    while (pos_ < s_.size() && !isspace((unsigned char)s_[pos_]) && s_[pos_] != '(' &&
           s_[pos_] != ')' && s_[pos_] != ';') {
      e.atom += s_[pos_];
      advance();
    }
    return e;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_ws() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == ';') {
        std::string comment;
        while (pos_ < s_.size() && s_[pos_] != '\n') {
          comment += s_[pos_];
          advance();
        }
        if (expect_) {
          auto p = comment.find("expect:");
          if (p != std::string::npos) {
            std::string v = comment.substr(p + 7);
            size_t b = v.find_first_not_of(" \t");
            size_t e = v.find_last_not_of(" \t\r");
            if (b != std::string::npos) *expect_ = v.substr(b, e - b + 1);
          }
        }
      } else if (isspace((unsigned char)c)) {
        advance();
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  std::string* expect_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

}  // namespace detail

/// Parser for the supported SMT-LIB 2 subset. Terms may be arithmetic
/// (LinearTerm) or boolean (FormulaPtr); let-bindings are inlined and
/// boolean ite is expanded at parse time.
class Parser {
 public:
  explicit Parser(VarTable& vt) : vt_(vt) {}

  ParsedProblem parse(const std::string& input) {
    ParsedProblem p;
    detail::Lexer lex(input, &p.expect);
    while (!lex.at_end()) {
      detail::SExpr cmd = lex.read();
      handle_command(cmd, p);
    }
    return p;
  }

 private:
  using TermVal = std::variant<LinearTerm, FormulaPtr>;
  using LetEnv = std::map<std::string, TermVal>;

  void handle_command(const detail::SExpr& c, ParsedProblem& p) {
    if (c.is_atom || c.list.empty() || !c.list[0].is_atom)
      throw parse_error("expected command", c.line, c.col);
    const std::string& head = c.list[0].atom;
    if (head == "set-logic") {
      require_args(c, 1);
      const std::string& l = c.list[1].atom;
      if (l == "LRA") p.logic = Sort::Real;
      else if (l == "LIA") p.logic = Sort::Int;
      else throw unsupported_error("unsupported logic: " + l);
      p.logic_set = true;
    } else if (head == "set-info") {
      // ignored
    } else if (head == "set-option") {
      if (c.list.size() >= 3) p.options[c.list[1].atom] = c.list[2].atom;
    } else if (head == "declare-fun" || head == "declare-const") {
      bool is_fun = head == "declare-fun";
      require_args(c, is_fun ? 3 : 2);
      const std::string& name = c.list[1].atom;
      if (is_fun && !c.list[2].list.empty())
        throw unsupported_error("only arity-0 declare-fun is supported");
      const detail::SExpr& sx = c.list[is_fun ? 3 : 2];
      Sort s = parse_sort(sx);
      if (vt_.lookup(name))
        throw parse_error("redeclaration of " + name, c.line, c.col);
      p.declared.push_back(vt_.declare(name, s, VarKind::SkolemK));
    } else if (head == "assert") {
      require_args(c, 1);
      LetEnv env;
      p.assertions.push_back(parse_formula(c.list[1], p.logic, env));
    } else if (head == "check-sat") {
      p.check_sat = true;
    } else if (head == "get-model") {
      p.get_model = true;
    } else if (head == "exit") {
      // nothing
    } else {
      throw unsupported_error("unsupported command: " + head);
    }
  }

  static void require_args(const detail::SExpr& c, size_t n) {
    if (c.list.size() < n + 1)
      throw parse_error("too few arguments to " + c.list[0].atom, c.line, c.col);
  }

  Sort parse_sort(const detail::SExpr& s) {
    if (!s.is_atom) throw parse_error("expected sort", s.line, s.col);
    if (s.atom == "Real") return Sort::Real;
    if (s.atom == "Int") return Sort::Int;
    throw unsupported_error("unsupported sort: " + s.atom);
  }

  FormulaPtr parse_formula(const detail::SExpr& e, Sort logic, LetEnv& env) {
    TermVal v = parse_term(e, logic, env);
    if (auto* f = std::get_if<FormulaPtr>(&v)) return *f;
    throw parse_error("expected a boolean term", e.line, e.col);
  }

  LinearTerm parse_arith(const detail::SExpr& e, Sort logic, LetEnv& env) {
    TermVal v = parse_term(e, logic, env);
    if (auto* t = std::get_if<LinearTerm>(&v)) return *t;
    throw parse_error("expected an arithmetic term", e.line, e.col);
  }

  TermVal parse_term(const detail::SExpr& e, Sort logic, LetEnv& env) {
    if (e.is_atom) return parse_atom_token(e, env);
    if (e.list.empty() || !e.list[0].is_atom)
      throw parse_error("expected operator", e.line, e.col);
    const std::string& op = e.list[0].atom;

    if (op == "and" || op == "or") {
      std::vector<FormulaPtr> ks;
      for (size_t i = 1; i < e.list.size(); ++i) ks.push_back(parse_formula(e.list[i], logic, env));
      return op == "and" ? mk_and(std::move(ks)) : mk_or(std::move(ks));
    }
    if (op == "not") {
      require_args(e, 1);
      return negate(parse_formula(e.list[1], logic, env), logic);
    }
    if (op == "=>") {
      require_args(e, 2);
      std::vector<FormulaPtr> ks;
      for (size_t i = 1; i + 1 < e.list.size(); ++i)
        ks.push_back(negate(parse_formula(e.list[i], logic, env), logic));
      ks.push_back(parse_formula(e.list.back(), logic, env));
      return mk_or(std::move(ks));
    }
    if (op == "ite") {
      require_args(e, 3);
      FormulaPtr c = parse_formula(e.list[1], logic, env);
      TermVal a = parse_term(e.list[2], logic, env);
      if (std::holds_alternative<LinearTerm>(a))
        throw unsupported_error("arithmetic ite is not supported");
      FormulaPtr t = std::get<FormulaPtr>(a);
      FormulaPtr f = parse_formula(e.list[3], logic, env);
      return mk_or({mk_and({c, t}), mk_and({negate(c, logic), f})});
    }
    if (op == "let") {
      require_args(e, 2);
      LetEnv inner = env;
      for (const auto& b : e.list[1].list) {
        if (b.list.size() != 2 || !b.list[0].is_atom)
          throw parse_error("malformed let binding", b.line, b.col);
        inner[b.list[0].atom] = parse_term(b.list[1], logic, env);
      }
      return parse_term(e.list[2], logic, inner);
    }
    if (op == "forall" || op == "exists") {
      require_args(e, 2);
      std::vector<VarId> binders;
      LetEnv inner = env;
      for (const auto& b : e.list[1].list) {
        if (b.list.size() != 2 || !b.list[0].is_atom)
          throw parse_error("malformed binder", b.line, b.col);
        Sort s = parse_sort(b.list[1]);
        if (s != logic)
          throw parse_error("binder sort does not match logic", b.line, b.col);
        VarId v = vt_.declare(b.list[0].atom, s, VarKind::Bound);
        inner[b.list[0].atom] = LinearTerm::var(v);
        binders.push_back(v);
      }
      FormulaPtr body = parse_formula(e.list[2], logic, inner);
      return mk_quant(op == "forall" ? Formula::Kind::Forall : Formula::Kind::Exists,
                      std::move(binders), std::move(body));
    }
    if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "=") {
      require_args(e, 2);
      Relation rel = op == "<"    ? Relation::LT
                     : op == ">"  ? Relation::GT
                     : op == "<=" ? Relation::LEQ
                     : op == ">=" ? Relation::GEQ
                                  : Relation::EQ;
      // chainable: (< a b c) = a<b and b<c
      std::vector<FormulaPtr> conj;
      for (size_t i = 1; i + 1 < e.list.size(); ++i) {
        LinearTerm a = parse_arith(e.list[i], logic, env);
        LinearTerm b = parse_arith(e.list[i + 1], logic, env);
        conj.push_back(mk_atom(Literal(a - b, rel), logic));
      }
      return mk_and(std::move(conj));
    }
    if (op == "+" || op == "-" || op == "*" || op == "/") {
      return parse_arith_op(e, logic, env);
    }
    throw unsupported_error("unsupported operator: " + op);
  }

  TermVal parse_atom_token(const detail::SExpr& e, LetEnv& env) {
    const std::string& a = e.atom;
    if (a == "true") return mk_true();
    if (a == "false") return mk_false();
    auto it = env.find(a);
    if (it != env.end()) return it->second;
    if (!a.empty() && (isdigit((unsigned char)a[0]))) return LinearTerm(parse_number(e));
    auto v = vt_.lookup(a);
    if (!v) throw parse_error("undeclared symbol: " + a, e.line, e.col);
    return LinearTerm::var(*v);
  }

  Rational parse_number(const detail::SExpr& e) {
    const std::string& a = e.atom;
    auto dot = a.find('.');
    try {
      if (dot == std::string::npos) return Rational(a);
      // decimal literal
      std::string digits = a.substr(0, dot) + a.substr(dot + 1);
      std::string den = "1" + std::string(a.size() - dot - 1, '0');
      return Rational(digits + "/" + den);
    } catch (const std::exception&) {
      throw parse_error("malformed numeral: " + a, e.line, e.col);
    }
  }

  LinearTerm parse_arith_op(const detail::SExpr& e, Sort logic, LetEnv& env) {
    const std::string& op = e.list[0].atom;
    if (op == "+") {
      LinearTerm r;
      for (size_t i = 1; i < e.list.size(); ++i) r = r + parse_arith(e.list[i], logic, env);
      return r;
    }
    if (op == "-") {
      require_args(e, 1);
      LinearTerm r = parse_arith(e.list[1], logic, env);
      if (e.list.size() == 2) return r.scaled(Rational(-1));
      for (size_t i = 2; i < e.list.size(); ++i) r = r - parse_arith(e.list[i], logic, env);
      return r;
    }
    if (op == "*") {
      require_args(e, 2);
      LinearTerm r(Rational(1));
      bool seen_nonconst = false;
      Rational c(1);
      LinearTerm nonconst;
      for (size_t i = 1; i < e.list.size(); ++i) {
        LinearTerm t = parse_arith(e.list[i], logic, env);
        if (t.is_constant()) {
          c = c * t.constant();
        } else {
          if (seen_nonconst)
            throw unsupported_error("nonlinear multiplication");
          seen_nonconst = true;
          nonconst = t;
        }
      }
      return seen_nonconst ? nonconst.scaled(c) : LinearTerm(c);
    }
    // "/": constant division only
    require_args(e, 2);
    if (logic == Sort::Int) throw unsupported_error("real division in LIA");
    LinearTerm r = parse_arith(e.list[1], logic, env);
    for (size_t i = 2; i < e.list.size(); ++i) {
      LinearTerm d = parse_arith(e.list[i], logic, env);
      if (!d.is_constant() || d.constant().is_zero())
        throw unsupported_error("division by a non-constant or zero");
      r = r.scaled(Rational(1) / d.constant());
    }
    return r;
  }

  VarTable& vt_;
};

/// Canonical SMT-LIB printer (two-space indentation for commands).
class Printer {
 public:
  explicit Printer(const VarTable& vt) : vt_(vt) {}

  std::string problem(const ParsedProblem& p) const {
    std::string s = "(set-logic " + std::string(p.logic == Sort::Real ? "LRA" : "LIA") + ")\n";
    for (VarId v : p.declared)
      s += "(declare-fun " + vt_.name(v) + " () " + sort_name(vt_.sort(v)) + ")\n";
    for (const auto& a : p.assertions) s += "(assert\n  " + formula(a) + ")\n";
    if (p.check_sat) s += "(check-sat)\n";
    if (p.get_model) s += "(get-model)\n";
    return s;
  }

  std::string formula(const FormulaPtr& f) const {
    switch (f->kind) {
      case Formula::Kind::True: return "true";
      case Formula::Kind::False: return "false";
      case Formula::Kind::Atom: return literal(f->atom);
      case Formula::Kind::Guard: return vt_.name(f->guard);
      case Formula::Kind::Not: return "(not " + formula(f->kids[0]) + ")";
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        std::string s = f->kind == Formula::Kind::And ? "(and" : "(or";
        for (auto& k : f->kids) s += " " + formula(k);
        return s + ")";
      }
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        std::string s = f->kind == Formula::Kind::Forall ? "(forall (" : "(exists (";
        for (size_t i = 0; i < f->binders.size(); ++i) {
          if (i) s += " ";
          s += "(" + vt_.name(f->binders[i]) + " " + sort_name(vt_.sort(f->binders[i])) + ")";
        }
        return s + ") " + formula(f->body) + ")";
      }
    }
    return "?";
  }

  std::string literal(const Literal& l) const {
    std::string rel = l.negated ? "distinct" : rel_str(l.rel);
    if (l.negated) return "(not (= " + term(l.lhs) + " 0))";
    return "(" + std::string(rel_str(l.rel)) + " " + term(l.lhs) + " 0)";
  }

  std::string term(const LinearTerm& t) const {
    std::vector<std::string> parts;
    for (auto& [v, c] : t.coeffs()) {
      if (c == Rational(1)) parts.push_back(vt_.name(v));
      else parts.push_back("(* " + rational(c) + " " + vt_.name(v) + ")");
    }
    if (!t.constant().is_zero() || parts.empty()) parts.push_back(rational(t.constant()));
    if (parts.size() == 1) return parts[0];
    std::string s = "(+";
    for (auto& p : parts) s += " " + p;
    return s + ")";
  }

  std::string rational(const Rational& r) const {
    if (r.is_negative()) return "(- " + rational(-r) + ")";
    if (r.is_integer()) return r.num().get_str();
    return "(/ " + r.num().get_str() + " " + r.den().get_str() + ")";
  }

 private:
  static std::string sort_name(Sort s) { return s == Sort::Real ? "Real" : "Int"; }

  const VarTable& vt_;
};

}  // namespace qsolve
