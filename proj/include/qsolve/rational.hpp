#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qsolve {

struct arithmetic_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct sort_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact arbitrary-precision rational. Always canonical: positive
/// denominator, gcd(|num|, den) = 1, zero is 0/1.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}
  Rational(long n, long d) : v_(n, d) {
    if (d == 0) throw arithmetic_error("division by zero");
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& v) : v_(v) { v_.canonicalize(); }
  explicit Rational(const std::string& s) : v_(s) { v_.canonicalize(); }

  const mpq_class& raw() const { return v_; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  bool is_positive() const { return sgn(v_) > 0; }
  bool is_negative() const { return sgn(v_) < 0; }
  int sign() const { return sgn(v_); }

  Rational operator+(const Rational& o) const { return Rational(mpq_class(v_ + o.v_)); }
  Rational operator-(const Rational& o) const { return Rational(mpq_class(v_ - o.v_)); }
  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational operator*(const Rational& o) const { return Rational(mpq_class(v_ * o.v_)); }
  Rational operator/(const Rational& o) const {
    if (o.is_zero()) throw arithmetic_error("division by zero");
    return Rational(mpq_class(v_ / o.v_));
  }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }

  bool operator==(const Rational& o) const { return v_ == o.v_; }
  bool operator!=(const Rational& o) const { return v_ != o.v_; }
  bool operator<(const Rational& o) const { return v_ < o.v_; }
  bool operator<=(const Rational& o) const { return v_ <= o.v_; }
  bool operator>(const Rational& o) const { return v_ > o.v_; }
  bool operator>=(const Rational& o) const { return v_ >= o.v_; }

  int cmp(const Rational& o) const { return ::cmp(v_, o.v_); }

  /// Nonnegative remainder: result in [0, |m|). Integer operands only.
  Rational mod(const Rational& m) const {
    require_int(*this, m);
    if (m.is_zero()) throw arithmetic_error("mod by zero");
    mpz_class r;
    mpz_mod(r.get_mpz_t(), num().get_mpz_t(), m.num().get_mpz_t());
    return Rational(mpq_class(r));
  }

  /// True iff *this divides n (integers, *this nonzero).
  bool divides(const Rational& n) const {
    require_int(*this, n);
    if (is_zero()) throw arithmetic_error("divides by zero");
    return mpz_divisible_p(n.num().get_mpz_t(), num().get_mpz_t()) != 0;
  }

  Rational floor() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
    return Rational(mpq_class(q));
  }
  Rational ceil() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
    return Rational(mpq_class(q));
  }
  Rational abs() const { return is_negative() ? -*this : *this; }

  static Rational gcd(const Rational& a, const Rational& b) {
    require_int(a, b);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.num().get_mpz_t(), b.num().get_mpz_t());
    return Rational(mpq_class(g));
  }
  static Rational lcm(const Rational& a, const Rational& b) {
    require_int(a, b);
    mpz_class l;
    mpz_lcm(l.get_mpz_t(), a.num().get_mpz_t(), b.num().get_mpz_t());
    return Rational(mpq_class(l));
  }

  std::string str() const {
    if (is_integer()) return num().get_str();
    return num().get_str() + "/" + den().get_str();
  }

 private:
  static void require_int(const Rational& a, const Rational& b) {
    if (!a.is_integer() || !b.is_integer())
      throw sort_error("integer operation on non-integer rational");
  }

  mpq_class v_;
};

inline Rational operator*(long c, const Rational& r) { return Rational(c) * r; }

}  // namespace qsolve
