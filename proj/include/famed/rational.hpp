#pragma once

#include <gmp.h>

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>

namespace famed {

/// Arbitrary-precision integer, a thin RAII wrapper over GMP's mpz_t.
class Integer {
 public:
  Integer() { mpz_init(z_); }
  Integer(long v) { mpz_init_set_si(z_, v); }
  explicit Integer(const std::string& s) {
    if (mpz_init_set_str(z_, s.c_str(), 10) != 0) {
      mpz_clear(z_);
      throw std::invalid_argument("Integer: bad literal '" + s + "'");
    }
  }
  Integer(const Integer& o) { mpz_init_set(z_, o.z_); }
  Integer(Integer&& o) noexcept {
    mpz_init(z_);
    mpz_swap(z_, o.z_);
  }
  Integer& operator=(const Integer& o) {
    if (this != &o) mpz_set(z_, o.z_);
    return *this;
  }
  Integer& operator=(Integer&& o) noexcept {
    mpz_swap(z_, o.z_);
    return *this;
  }
  ~Integer() { mpz_clear(z_); }

  mpz_t& raw() { return z_; }
  const mpz_t& raw() const { return z_; }

  friend Integer operator+(const Integer& a, const Integer& b) {
    Integer r;
    mpz_add(r.z_, a.z_, b.z_);
    return r;
  }
  friend Integer operator-(const Integer& a, const Integer& b) {
    Integer r;
    mpz_sub(r.z_, a.z_, b.z_);
    return r;
  }
  friend Integer operator*(const Integer& a, const Integer& b) {
    Integer r;
    mpz_mul(r.z_, a.z_, b.z_);
    return r;
  }
  Integer operator-() const {
    Integer r;
    mpz_neg(r.z_, z_);
    return r;
  }
  Integer& operator+=(const Integer& o) {
    mpz_add(z_, z_, o.z_);
    return *this;
  }
  Integer& operator-=(const Integer& o) {
    mpz_sub(z_, z_, o.z_);
    return *this;
  }
  Integer& operator*=(const Integer& o) {
    mpz_mul(z_, z_, o.z_);
    return *this;
  }

  // Truncated quotient; exact division available separately.
  friend Integer operator/(const Integer& a, const Integer& b) {
    Integer r;
    mpz_tdiv_q(r.z_, a.z_, b.z_);
    return r;
  }
  friend Integer operator%(const Integer& a, const Integer& b) {
    Integer r;
    mpz_tdiv_r(r.z_, a.z_, b.z_);
    return r;
  }
  Integer div_exact(const Integer& b) const {
    Integer r;
    mpz_divexact(r.z_, z_, b.z_);
    return r;
  }
  bool divisible_by(const Integer& b) const { return mpz_divisible_p(z_, b.z_) != 0; }

  friend bool operator==(const Integer& a, const Integer& b) { return mpz_cmp(a.z_, b.z_) == 0; }
  friend bool operator!=(const Integer& a, const Integer& b) { return !(a == b); }
  friend bool operator<(const Integer& a, const Integer& b) { return mpz_cmp(a.z_, b.z_) < 0; }
  friend bool operator<=(const Integer& a, const Integer& b) { return mpz_cmp(a.z_, b.z_) <= 0; }
  friend bool operator>(const Integer& a, const Integer& b) { return mpz_cmp(a.z_, b.z_) > 0; }

  int sign() const { return mpz_sgn(z_); }
  bool is_zero() const { return mpz_sgn(z_) == 0; }
  Integer abs() const {
    Integer r;
    mpz_abs(r.z_, z_);
    return r;
  }

  static Integer gcd(const Integer& a, const Integer& b) {
    Integer r;
    mpz_gcd(r.z_, a.z_, b.z_);
    return r;
  }
  static Integer lcm(const Integer& a, const Integer& b) {
    Integer r;
    mpz_lcm(r.z_, a.z_, b.z_);
    return r;
  }
  /// g = gcd(a,b) together with s,t such that s*a + t*b = g.
  static Integer gcdext(const Integer& a, const Integer& b, Integer& s, Integer& t) {
    Integer g;
    mpz_gcdext(g.z_, s.raw(), t.raw(), a.z_, b.z_);
    return g;
  }

  long to_long() const {
    if (!mpz_fits_slong_p(z_)) throw std::overflow_error("Integer::to_long overflow");
    return mpz_get_si(z_);
  }
  double to_double() const { return mpz_get_d(z_); }

  std::string str() const {
    char* c = mpz_get_str(nullptr, 10, z_);
    std::string s(c);
    std::free(c);
    return s;
  }

 private:
  mpz_t z_;
};

/// Exact rational number over GMP's mpq_t, always kept in canonical form.
class Rational {
 public:
  Rational() { mpq_init(q_); }
  Rational(long v) {
    mpq_init(q_);
    mpq_set_si(q_, v, 1);
  }
  Rational(long num, long den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    mpq_init(q_);
    mpq_set_si(q_, num, den);
    mpq_canonicalize(q_);
  }
  Rational(const Integer& num, const Integer& den) {
    if (den.is_zero()) throw std::domain_error("Rational: zero denominator");
    mpq_init(q_);
    mpz_set(mpq_numref(q_), num.raw());
    mpz_set(mpq_denref(q_), den.raw());
    mpq_canonicalize(q_);
  }
  Rational(const Integer& num) {
    mpq_init(q_);
    mpz_set(mpq_numref(q_), num.raw());
  }
  /// Parses "p/q" or "p".
  explicit Rational(const std::string& s) {
    mpq_init(q_);
    if (mpq_set_str(q_, s.c_str(), 10) != 0 || mpz_sgn(mpq_denref(q_)) == 0) {
      mpq_clear(q_);
      throw std::invalid_argument("Rational: bad literal '" + s + "'");
    }
    mpq_canonicalize(q_);
  }
  Rational(const Rational& o) {
    mpq_init(q_);
    mpq_set(q_, o.q_);
  }
  Rational(Rational&& o) noexcept {
    mpq_init(q_);
    mpq_swap(q_, o.q_);
  }
  Rational& operator=(const Rational& o) {
    if (this != &o) mpq_set(q_, o.q_);
    return *this;
  }
  Rational& operator=(Rational&& o) noexcept {
    mpq_swap(q_, o.q_);
    return *this;
  }
  ~Rational() { mpq_clear(q_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    Rational r;
    mpq_add(r.q_, a.q_, b.q_);
    return r;
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    Rational r;
    mpq_sub(r.q_, a.q_, b.q_);
    return r;
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    Rational r;
    mpq_mul(r.q_, a.q_, b.q_);
    return r;
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    Rational r;
    mpq_div(r.q_, a.q_, b.q_);
    return r;
  }
  Rational operator-() const {
    Rational r;
    mpq_neg(r.q_, q_);
    return r;
  }
  Rational& operator+=(const Rational& o) {
    mpq_add(q_, q_, o.q_);
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    mpq_sub(q_, q_, o.q_);
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    mpq_mul(q_, q_, o.q_);
    return *this;
  }

  friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.q_, b.q_) != 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) > 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) >= 0; }

  int sign() const { return mpq_sgn(q_); }
  bool is_zero() const { return mpq_sgn(q_) == 0; }
  bool is_integer() const { return mpz_cmp_ui(mpq_denref(q_), 1) == 0; }
  Rational abs() const {
    Rational r;
    mpq_abs(r.q_, q_);
    return r;
  }
  Rational inverse() const {
    if (is_zero()) throw std::domain_error("Rational: inverse of zero");
    Rational r;
    mpq_inv(r.q_, q_);
    return r;
  }

  Integer num() const {
    Integer n;
    mpz_set(n.raw(), mpq_numref(q_));
    return n;
  }
  Integer den() const {
    Integer d;
    mpz_set(d.raw(), mpq_denref(q_));
    return d;
  }

  double to_double() const { return mpq_get_d(q_); }

  std::string str() const {
    char* c = mpq_get_str(nullptr, 10, q_);
    std::string s(c);
    std::free(c);
    return s;
  }

 private:
  mpq_t q_;
};

}  // namespace famed
