#pragma once

#include <string>

#include "qsolve/arith.hpp"

namespace qsolve {

/// Value extended with an infinitesimal component and an infinite flag.
/// Ordering is lexicographic: infinite sign, then finite part, then the
/// delta coefficient.
struct ExtendedValue {
  Rational finite{0};
  Rational delta{0};
  int infinite = 0;  // -1, 0, +1

  ExtendedValue() = default;
  ExtendedValue(Rational f) : finite(std::move(f)) {}
  ExtendedValue(Rational f, Rational d) : finite(std::move(f)), delta(std::move(d)) {}
  static ExtendedValue inf(int sign) {
    ExtendedValue v;
    v.infinite = sign;
    return v;
  }

  bool is_finite() const { return infinite == 0; }

  ExtendedValue operator+(const ExtendedValue& o) const {
    ExtendedValue r;
    int s = infinite + o.infinite;  // opposite infinities cancel; callers avoid that
    r.infinite = s > 0 ? 1 : (s < 0 ? -1 : 0);
    r.finite = finite + o.finite;
    r.delta = delta + o.delta;
    return r;
  }
  ExtendedValue scaled(const Rational& c) const {
    ExtendedValue r;
    r.infinite = c.is_zero() ? 0 : (c.is_negative() ? -infinite : infinite);
    r.finite = finite * c;
    r.delta = delta * c;
    return r;
  }

  int compare(const ExtendedValue& o) const {
    if (infinite != o.infinite) return infinite < o.infinite ? -1 : 1;
    int c = finite.cmp(o.finite);
    if (c != 0) return c;
    return delta.cmp(o.delta);
  }
  bool operator==(const ExtendedValue& o) const { return compare(o) == 0; }
  bool operator<(const ExtendedValue& o) const { return compare(o) < 0; }
  bool operator<=(const ExtendedValue& o) const { return compare(o) <= 0; }
  bool operator>(const ExtendedValue& o) const { return compare(o) > 0; }
  bool operator>=(const ExtendedValue& o) const { return compare(o) >= 0; }

  /// Sign against zero respecting the given relation.
  bool satisfies(Relation rel) const {
    int c = compare(ExtendedValue());
    switch (rel) {
      case Relation::LT: return c < 0;
      case Relation::GT: return c > 0;
      case Relation::LEQ: return c <= 0;
      case Relation::GEQ: return c >= 0;
      case Relation::EQ: return c == 0;
    }
    return false;
  }

  std::string str() const {
    if (infinite > 0) return "+inf";
    if (infinite < 0) return "-inf";
    std::string s = finite.str();
    if (!delta.is_zero()) {
      s += delta.is_negative() ? " - " : " + ";
      Rational a = delta.abs();
      if (a != Rational(1)) s += a.str() + "*";
      s += "delta";
    }
    return s;
  }
};

/// Substitution term extended with delta / infinity (Real) or a pending
/// integer division by theta with a rounding polarity (Int).
struct VirtualTerm {
  LinearTerm base;
  Rational delta_coeff{0};   // Real only
  int infinite = 0;          // Real only
  Rational div_by{1};        // Int only; 1 means plain substitution
  char polarity = '+';       // Int only; meaningful when div_by > 1

  VirtualTerm() = default;
  explicit VirtualTerm(LinearTerm b) : base(std::move(b)) {}

  bool is_plain() const {
    return delta_coeff.is_zero() && infinite == 0 && div_by == Rational(1);
  }
  bool has_real_virtual() const { return !delta_coeff.is_zero() || infinite != 0; }

  /// The base with delta / infinity folded in as the distinguished
  /// variables, suitable for substitution into literals.
  LinearTerm as_term_with_sentinels() const {
    LinearTerm t = base;
    if (!delta_coeff.is_zero()) t.add(kDeltaVar, delta_coeff);
    if (infinite != 0) t.add(kInfVar, Rational(infinite));
    return t;
  }

  bool operator==(const VirtualTerm& o) const {
    return base == o.base && delta_coeff == o.delta_coeff && infinite == o.infinite &&
           div_by == o.div_by && (div_by == Rational(1) || polarity == o.polarity);
  }

  std::string str(const VarTable& vt) const {
    std::string s;
    if (infinite > 0) return "+inf";
    if (infinite < 0) return "-inf";
    s = base.str(vt);
    if (!delta_coeff.is_zero()) {
      s += delta_coeff.is_negative() ? " - " : " + ";
      Rational a = delta_coeff.abs();
      if (a != Rational(1)) s += a.str() + "*";
      s += "delta";
    }
    if (div_by != Rational(1)) {
      s = "(" + s + ") div" + polarity + " " + div_by.str();
    }
    return s;
  }
};

/// Ordered substitution; Real entries have coefficient 1, Int entries
/// c*e -> t scale literals mentioning e by c.
struct Substitution {
  struct Entry {
    Rational coeff{1};
    VarId var = 0;
    VirtualTerm term;
  };
  std::vector<Entry> entries;

  bool empty() const { return entries.empty(); }
  void add(VarId v, VirtualTerm t) { entries.push_back({Rational(1), v, std::move(t)}); }
  void add_with_coeff(Rational c, VarId v, VirtualTerm t) {
    entries.push_back({std::move(c), v, std::move(t)});
  }

  /// Apply to a literal in canonical lhs-REL-0 form. For coefficient
  /// entries {c*e -> t}, a literal d*e + s REL 0 becomes d*t + c*s REL 0.
  Literal apply(const Literal& lit) const {
    Literal r = lit;
    for (const auto& en : entries) {
      Rational d = r.lhs.coeff(en.var);
      if (d.is_zero()) continue;
      LinearTerm rest = r.lhs.subst(en.var, LinearTerm(Rational(0)));
      LinearTerm t = en.term.as_term_with_sentinels();
      r.lhs = t.scaled(d) + rest.scaled(en.coeff);
    }
    return r;
  }

  LinearTerm apply(const LinearTerm& t) const {
    LinearTerm r = t;
    for (const auto& en : entries) {
      Rational d = r.coeff(en.var);
      if (d.is_zero()) continue;
      LinearTerm rest = r.subst(en.var, LinearTerm(Rational(0)));
      r = en.term.as_term_with_sentinels().scaled(d) + rest.scaled(en.coeff);
    }
    return r;
  }
};

}  // namespace qsolve
