#pragma once

#include <cmath>

#include "uasd/bigint.hpp"

namespace uasd {

/// Exact rational with positive reduced denominator.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}  // NOLINT
  Rational(BigInt num, BigInt den = BigInt(1))
      : num_(std::move(num)), den_(std::move(den)) {
    if (den_.isZero()) throw DomainError("Rational with zero denominator");
    reduce();
  }

  static Rational beta(int a, int b) {  // B(a,b) for positive integers
    if (a < 1 || b < 1) throw DomainError("integer Beta needs a,b >= 1");
    return Rational(BigInt::factorial(a - 1) * BigInt::factorial(b - 1),
                    BigInt::factorial(a + b - 1));
  }

  bool isZero() const { return num_.isZero(); }
  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.isZero()) throw DomainError("Rational division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

  double toDouble() const {
    if (num_.isZero()) return 0.0;
    // scale so the quotient keeps ~70 significant bits
    int shift = 70 - (num_.bitLength() - den_.bitLength());
    if (shift > 0) {
      BigInt q = num_.shiftedLeft(shift) / den_;
      return q.toDouble() * std::pow(2.0, -shift);
    }
    BigInt q = num_ / den_.shiftedLeft(-shift);
    return q.toDouble() * std::pow(2.0, -shift);
  }

 private:
  void reduce() {
    if (den_.isNegative()) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_.isZero()) {
      den_ = BigInt(1);
      return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (!g.isOne()) {
      num_ = num_ / g;
      den_ = den_ / g;
    }
  }

  BigInt num_;
  BigInt den_;
};

}  // namespace uasd
