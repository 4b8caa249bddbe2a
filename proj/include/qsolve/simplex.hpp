#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "qsolve/extended.hpp"

namespace qsolve {

struct SimplexResult {
  bool sat = false;
  std::map<VarId, ExtendedValue> model;   // when sat
  std::vector<size_t> core;               // literal indices, when unsat
  uint64_t pivots = 0;                    // work done, for caller budgets
};

/// Exact simplex over delta-rationals for a conjunction of linear
/// literals. Strict bounds are encoded with an infinitesimal offset;
/// unsat answers carry a conflict core of input literal indices.
class Simplex {
 public:
  /// Literals are in lhs-REL-0 form; equalities are allowed and assert
  /// both bounds. Negated equalities are not (split them upstream).
  static SimplexResult check(const std::vector<Literal>& lits) {
    Simplex s;
    for (size_t i = 0; i < lits.size(); ++i) {
      if (auto r = s.assert_literal(lits[i], i)) return *r;
    }
    SimplexResult r = s.solve();
    r.pivots = s.pivots_;
    return r;
  }

 private:
  struct Bound {
    ExtendedValue value;
    size_t lit = 0;
  };

  // local variable indices: one per problem var or per distinct slack row
  struct Var {
    VarId external = 0;          // valid when !is_slack
    bool is_slack = false;
    std::optional<Bound> lower, upper;
    ExtendedValue beta;
    bool basic = false;
  };

  std::optional<SimplexResult> assert_literal(const Literal& lit, size_t idx) {
    if (lit.negated) throw sort_error("negated equality reached the simplex");
    const LinearTerm& t = lit.lhs;
    if (t.is_constant()) {
      if (ExtendedValue(t.constant()).satisfies(lit.rel)) return std::nullopt;
      SimplexResult r;
      r.core = {idx};
      return r;
    }
    ExtendedValue b(-t.constant());
    int x;
    if (t.coeffs().size() == 1 && t.coeffs().begin()->second == Rational(1)) {
      x = var_index(t.coeffs().begin()->first);
    } else {
      x = slack_for(t);
    }
    switch (lit.rel) {
      case Relation::LT: return assert_upper(x, b + ExtendedValue(Rational(0), Rational(-1)), idx);
      case Relation::LEQ: return assert_upper(x, b, idx);
      case Relation::GT: return assert_lower(x, b + ExtendedValue(Rational(0), Rational(1)), idx);
      case Relation::GEQ: return assert_lower(x, b, idx);
      case Relation::EQ: {
        if (auto r = assert_lower(x, b, idx)) return r;
        return assert_upper(x, b, idx);
      }
    }
    return std::nullopt;
  }

  int var_index(VarId v) {
    auto it = ext_index_.find(v);
    if (it != ext_index_.end()) return it->second;
    int i = (int)vars_.size();
    Var nv;
    nv.external = v;
    vars_.push_back(nv);
    ext_index_.emplace(v, i);
    return i;
  }

  /// Slack variable for the variable part of a term; rows with the same
  /// variable part share one slack, so opposing bounds meet early.
  int slack_for(const LinearTerm& t) {
    std::map<int, Rational> row;
    for (const auto& [v, c] : t.coeffs()) {
      int j = var_index(v);
      if (vars_[j].basic) {
        // expand through the existing row so the tableau stays over
        // nonbasic variables only
        for (const auto& [k, a] : rows_.at(j)) {
          Rational nc = row.count(k) ? row[k] + c * a : c * a;
          if (nc.is_zero()) row.erase(k);
          else row[k] = nc;
        }
      } else {
        Rational nc = row.count(j) ? row[j] + c : c;
        if (nc.is_zero()) row.erase(j);
        else row[j] = nc;
      }
    }
    for (const auto& [i, r] : rows_)
      if (vars_[i].is_slack && r == row) return i;
    int i = (int)vars_.size();
    Var nv;
    nv.is_slack = true;
    nv.basic = true;
    vars_.push_back(nv);
    rows_.emplace(i, std::move(row));
    recompute_basic(i);
    return i;
  }

  void recompute_basic(int x) {
    ExtendedValue v;
    for (const auto& [y, c] : rows_.at(x)) v = v + vars_[y].beta.scaled(c);
    vars_[x].beta = v;
  }

  std::optional<SimplexResult> assert_upper(int x, ExtendedValue v, size_t idx) {
    auto& var = vars_[x];
    if (var.upper && var.upper->value <= v) return std::nullopt;
    if (var.lower && v < var.lower->value) {
      SimplexResult r;
      r.core = {var.lower->lit, idx};
      return r;
    }
    var.upper = Bound{v, idx};
    if (!var.basic && var.beta > v) update(x, v);
    return std::nullopt;
  }

  std::optional<SimplexResult> assert_lower(int x, ExtendedValue v, size_t idx) {
    auto& var = vars_[x];
    if (var.lower && var.lower->value >= v) return std::nullopt;
    if (var.upper && v > var.upper->value) {
      SimplexResult r;
      r.core = {var.upper->lit, idx};
      return r;
    }
    var.lower = Bound{v, idx};
    if (!var.basic && var.beta < v) update(x, v);
    return std::nullopt;
  }

  void update(int x, const ExtendedValue& v) {
    ExtendedValue d = v + vars_[x].beta.scaled(Rational(-1));
    for (auto& [b, row] : rows_) {
      auto it = row.find(x);
      if (it != row.end()) vars_[b].beta = vars_[b].beta + d.scaled(it->second);
    }
    vars_[x].beta = v;
  }

  SimplexResult solve() {
    while (true) {
      int x = -1;
      bool below = false;
      for (int i = 0; i < (int)vars_.size(); ++i) {
        if (!vars_[i].basic) continue;
        if (vars_[i].lower && vars_[i].beta < vars_[i].lower->value) {
          x = i;
          below = true;
          break;
        }
        if (vars_[i].upper && vars_[i].beta > vars_[i].upper->value) {
          x = i;
          below = false;
          break;
        }
      }
      if (x < 0) return success();
      const auto& row = rows_.at(x);
      int y = -1;
      for (const auto& [j, a] : row) {  // Bland: smallest suitable index
        bool can_grow = !vars_[j].upper || vars_[j].beta < vars_[j].upper->value;
        bool can_shrink = !vars_[j].lower || vars_[j].beta > vars_[j].lower->value;
        bool ok = below ? (a.is_positive() ? can_grow : can_shrink)
                        : (a.is_positive() ? can_shrink : can_grow);
        if (ok) {
          y = j;
          break;
        }
      }
      if (y < 0) return conflict(x, below);
      pivot_and_update(x, y, below ? vars_[x].lower->value : vars_[x].upper->value);
    }
  }

  void pivot_and_update(int x, int y, const ExtendedValue& v) {
    ++pivots_;
    Rational a = rows_.at(x).at(y);
    ExtendedValue theta = (v + vars_[x].beta.scaled(Rational(-1))).scaled(Rational(1) / a);
    vars_[x].beta = v;
    vars_[y].beta = vars_[y].beta + theta;
    for (auto& [b, row] : rows_) {
      if (b == x) continue;
      auto it = row.find(y);
      if (it != row.end()) vars_[b].beta = vars_[b].beta + theta.scaled(it->second);
    }
    pivot(x, y);
  }

  /// x = ... + a*y + ...  becomes  y = x/a - (rest)/a, substituted into
  /// every other row.
  void pivot(int x, int y) {
    std::map<int, Rational> row = rows_.at(x);
    rows_.erase(x);
    Rational a = row.at(y);
    row.erase(y);
    std::map<int, Rational> yrow;
    yrow.emplace(x, Rational(1) / a);
    for (const auto& [j, c] : row) yrow.emplace(j, -c / a);
    for (auto& [b, r] : rows_) {
      auto it = r.find(y);
      if (it == r.end()) continue;
      Rational c = it->second;
      r.erase(it);
      for (const auto& [j, k] : yrow) {
        Rational nc = r.count(j) ? r[j] + c * k : c * k;
        if (nc.is_zero()) r.erase(j);
        else r[j] = nc;
      }
    }
    rows_.emplace(y, std::move(yrow));
    vars_[x].basic = false;
    vars_[y].basic = true;
  }

  SimplexResult conflict(int x, bool below) {
    SimplexResult r;
    std::set<size_t> core;
    core.insert(below ? vars_[x].lower->lit : vars_[x].upper->lit);
    for (const auto& [j, a] : rows_.at(x)) {
      bool use_upper = below ? a.is_positive() : a.is_negative();
      core.insert(use_upper ? vars_[j].upper->lit : vars_[j].lower->lit);
    }
    r.core.assign(core.begin(), core.end());
    return r;
  }

  SimplexResult success() {
    SimplexResult r;
    r.sat = true;
    for (const auto& v : vars_)
      if (!v.is_slack) r.model.emplace(v.external, v.beta);
    return r;
  }

  std::vector<Var> vars_;
  std::map<VarId, int> ext_index_;
  std::map<int, std::map<int, Rational>> rows_;  // basic -> row over nonbasic
  uint64_t pivots_ = 0;
};

}  // namespace qsolve
