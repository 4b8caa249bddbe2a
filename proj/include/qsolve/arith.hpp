#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsolve/rational.hpp"

namespace qsolve {

enum class Sort { Real, Int };

enum class VarKind { Bound, SkolemK, SkolemE, FreshD, FreshM, Guard };

using VarId = uint32_t;

/// Distinguished variables standing for the infinitesimal delta and the
/// arbitrarily-large positive value. They never appear in user input; the
/// normalizer removes them from every instance before it reaches the
/// ground solver.
inline constexpr VarId kDeltaVar = 0;
inline constexpr VarId kInfVar = 1;
inline constexpr VarId kFirstUserVar = 2;

struct VarInfo {
  std::string name;
  Sort sort = Sort::Real;
  VarKind kind = VarKind::Bound;
};

/// Owns variable identities for one solver context. Ids are dense and
/// stable; fresh names use the reserved '!' prefix so they cannot collide
/// with user symbols.
class VarTable {
 public:
  VarTable() {
    vars_.push_back({"!delta", Sort::Real, VarKind::Bound});
    vars_.push_back({"!inf", Sort::Real, VarKind::Bound});
  }

  VarId declare(std::string name, Sort sort, VarKind kind = VarKind::Bound) {
    vars_.push_back({std::move(name), sort, kind});
    return static_cast<VarId>(vars_.size() - 1);
  }

  VarId fresh(const std::string& prefix, Sort sort, VarKind kind) {
    return declare("!" + prefix + std::to_string(counter_++), sort, kind);
  }

  const VarInfo& info(VarId v) const { return vars_.at(v); }
  const std::string& name(VarId v) const { return vars_.at(v).name; }
  Sort sort(VarId v) const { return vars_.at(v).sort; }
  VarKind kind(VarId v) const { return vars_.at(v).kind; }
  size_t size() const { return vars_.size(); }

  std::optional<VarId> lookup(const std::string& name) const {
    for (VarId i = kFirstUserVar; i < vars_.size(); ++i)
      if (vars_[i].name == name) return i;
    return std::nullopt;
  }

 private:
  std::vector<VarInfo> vars_;
  uint64_t counter_ = 1;
};

/// Affine combination of variables plus a constant. Canonical: no zero
/// coefficients; equality is map equality.
class LinearTerm {
 public:
  LinearTerm() = default;
  explicit LinearTerm(Rational c) : constant_(std::move(c)) {}
  static LinearTerm var(VarId v, Rational coeff = Rational(1)) {
    LinearTerm t;
    t.add(v, coeff);
    return t;
  }

  const std::map<VarId, Rational>& coeffs() const { return coeffs_; }
  const Rational& constant() const { return constant_; }

  Rational coeff(VarId v) const {
    auto it = coeffs_.find(v);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }
  bool has_var(VarId v) const { return coeffs_.count(v) != 0; }
  bool is_constant() const { return coeffs_.empty(); }

  void add(VarId v, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = coeffs_.try_emplace(v, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) coeffs_.erase(it);
    }
  }
  void add_constant(const Rational& c) { constant_ += c; }

  LinearTerm operator+(const LinearTerm& o) const {
    LinearTerm r = *this;
    for (const auto& [v, c] : o.coeffs_) r.add(v, c);
    r.constant_ += o.constant_;
    return r;
  }
  LinearTerm operator-(const LinearTerm& o) const { return *this + o.scaled(Rational(-1)); }
  LinearTerm scaled(const Rational& c) const {
    LinearTerm r;
    if (c.is_zero()) return r;
    for (const auto& [v, k] : coeffs_) r.coeffs_.emplace(v, k * c);
    r.constant_ = constant_ * c;
    return r;
  }

  /// Replace v by the given term.
  LinearTerm subst(VarId v, const LinearTerm& t) const {
    auto it = coeffs_.find(v);
    if (it == coeffs_.end()) return *this;
    Rational c = it->second;
    LinearTerm r = *this;
    r.coeffs_.erase(v);
    return r + t.scaled(c);
  }

  bool operator==(const LinearTerm& o) const {
    return constant_ == o.constant_ && coeffs_ == o.coeffs_;
  }
  bool operator!=(const LinearTerm& o) const { return !(*this == o); }

  /// gcd of all numerators over lcm of denominators; 0 for the zero term.
  /// Includes the constant.
  Rational content() const {
    Rational g(0);
    for (const auto& [v, c] : coeffs_) g = gcd_q(g, c);
    g = gcd_q(g, constant_);
    return g;
  }
  /// Content of the variable part only.
  Rational var_content() const {
    Rational g(0);
    for (const auto& [v, c] : coeffs_) g = gcd_q(g, c);
    return g;
  }

  bool all_integer() const {
    for (const auto& [v, c] : coeffs_)
      if (!c.is_integer()) return false;
    return constant_.is_integer();
  }

  std::string str(const VarTable& vt) const {
    if (coeffs_.empty()) return constant_.str();
    std::string s;
    bool first = true;
    for (const auto& [v, c] : coeffs_) {
      if (!first) s += c.is_negative() ? " - " : " + ";
      else if (c.is_negative()) s += "-";
      Rational a = c.abs();
      if (a != Rational(1)) s += a.str() + "*";
      s += vt.name(v);
      first = false;
    }
    if (!constant_.is_zero())
      s += (constant_.is_negative() ? " - " : " + ") + constant_.abs().str();
    return s;
  }

 private:
  // gcd extended to rationals: gcd(a/b, c/d) = gcd(a,c)/lcm(b,d).
  static Rational gcd_q(const Rational& a, const Rational& b) {
    if (a.is_zero()) return b.abs();
    if (b.is_zero()) return a.abs();
    mpz_class n, d;
    mpz_gcd(n.get_mpz_t(), a.num().get_mpz_t(), b.num().get_mpz_t());
    mpz_lcm(d.get_mpz_t(), a.den().get_mpz_t(), b.den().get_mpz_t());
    return Rational(mpq_class(n, d));
  }

  std::map<VarId, Rational> coeffs_;
  Rational constant_{0};
};

enum class Relation { LT, GT, LEQ, GEQ, EQ };

inline Relation negate(Relation r) {
  switch (r) {
    case Relation::LT: return Relation::GEQ;
    case Relation::GT: return Relation::LEQ;
    case Relation::LEQ: return Relation::GT;
    case Relation::GEQ: return Relation::LT;
    case Relation::EQ: break;
  }
  throw sort_error("cannot negate equality at the relation level");
}

/// Relation seen from the flipped side: t R 0  <=>  -t flip(R) 0.
inline Relation flip(Relation r) {
  switch (r) {
    case Relation::LT: return Relation::GT;
    case Relation::GT: return Relation::LT;
    case Relation::LEQ: return Relation::GEQ;
    case Relation::GEQ: return Relation::LEQ;
    case Relation::EQ: return Relation::EQ;
  }
  return r;
}

inline const char* rel_str(Relation r) {
  switch (r) {
    case Relation::LT: return "<";
    case Relation::GT: return ">";
    case Relation::LEQ: return "<=";
    case Relation::GEQ: return ">=";
    case Relation::EQ: return "=";
  }
  return "?";
}

/// Atomic constraint lhs REL 0. Negation is always folded into the
/// relation, except for EQ where it is kept until equality elimination.
struct Literal {
  LinearTerm lhs;
  Relation rel = Relation::EQ;
  bool negated = false;  // only meaningful with rel == EQ

  Literal() = default;
  Literal(LinearTerm t, Relation r, bool neg = false)
      : lhs(std::move(t)), rel(r), negated(neg) {
    if (negated && rel != Relation::EQ) {
      rel = qsolve::negate(rel);
      negated = false;
    }
  }

  Literal negate() const {
    if (rel == Relation::EQ) return Literal(lhs, rel, !negated);
    return Literal(lhs, qsolve::negate(rel));
  }

  /// Canonical form: integer literals get integer coefficients with
  /// overall gcd 1; real literals scale the coefficient of the smallest
  /// variable to +-1. Scaling is by a positive constant only.
  Literal canonical(Sort sort) const {
    Literal r = *this;
    if (r.lhs.coeffs().empty()) return r;
    Rational scale(1);
    if (sort == Sort::Int) {
      Rational g = r.lhs.var_content();
      if (!g.is_zero()) scale = Rational(1) / g;
      // keep the constant integral when possible: use full content if the
      // scaled constant would stay integral anyway
      LinearTerm cand = r.lhs.scaled(scale);
      if (!cand.constant().is_integer()) {
        // constant had a smaller denominator; scale by den as well
        scale = scale * Rational(mpq_class(cand.constant().den()));
      }
    } else {
      const Rational& lead = r.lhs.coeffs().begin()->second;
      scale = Rational(1) / lead.abs();
    }
    r.lhs = r.lhs.scaled(scale);
    return r;
  }

  bool operator==(const Literal& o) const {
    return rel == o.rel && negated == o.negated && lhs == o.lhs;
  }
  bool operator<(const Literal& o) const {
    if (rel != o.rel) return rel < o.rel;
    if (negated != o.negated) return negated < o.negated;
    if (lhs.constant() != o.lhs.constant()) return lhs.constant() < o.lhs.constant();
    auto a = lhs.coeffs().begin(), ae = lhs.coeffs().end();
    auto b = o.lhs.coeffs().begin(), be = o.lhs.coeffs().end();
    for (; a != ae && b != be; ++a, ++b) {
      if (a->first != b->first) return a->first < b->first;
      if (a->second != b->second) return a->second < b->second;
    }
    return (a == ae) && (b != be);
  }

  std::string str(const VarTable& vt) const {
    std::string s = lhs.str(vt);
    s += " ";
    s += negated ? "!=" : rel_str(rel);
    s += " 0";
    return s;
  }
};

/// Literal rewritten as c*x REL t with c > 0 and x not free in t.
struct SolvedLiteral {
  Rational coeff;  // 1 for Real sort
  VarId var = 0;
  Relation rel = Relation::EQ;
  LinearTerm bound;

  bool is_lower() const { return rel == Relation::GT || rel == Relation::GEQ; }
  bool is_upper() const { return rel == Relation::LT || rel == Relation::LEQ; }
  bool is_strict() const { return rel == Relation::LT || rel == Relation::GT; }
};

/// Solve a literal for x. Returns nullopt when x does not occur (the
/// caller routes such literals to M_c).
inline std::optional<SolvedLiteral> solve_for(const Literal& lit, VarId x, Sort sort) {
  Rational c = lit.lhs.coeff(x);
  if (c.is_zero()) return std::nullopt;
  if (lit.rel == Relation::EQ)
    throw sort_error("solve_for on equality literal; eliminate equalities first");
  // lhs = c*x + r REL 0  =>  c*x REL -r
  SolvedLiteral s;
  s.var = x;
  LinearTerm rest = lit.lhs;
  rest = rest.subst(x, LinearTerm(Rational(0)));
  s.bound = rest.scaled(Rational(-1));
  s.rel = lit.rel;
  if (c.is_negative()) {
    s.rel = flip(s.rel);
    c = -c;
    s.bound = s.bound.scaled(Rational(-1));
    // c*x REL -r with c<0: (-c)*x flip(REL) r
  }
  if (sort == Sort::Real) {
    s.bound = s.bound.scaled(Rational(1) / c);
    s.coeff = Rational(1);
  } else {
    // scale to integral coefficient
    if (!c.is_integer()) {
      Rational d(mpq_class(c.den()));
      c = c * d;
      s.bound = s.bound.scaled(d);
    }
    s.coeff = c;
  }
  return s;
}

}  // namespace qsolve
