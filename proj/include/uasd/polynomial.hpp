#pragma once

#include <vector>

#include "uasd/rational.hpp"

namespace uasd {

/// Dense polynomial with exact rational coefficients, coeffs_[k] * x^k.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(Rational c) : coeffs_{std::move(c)} { trim(); }
  explicit Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
    trim();
  }

  static Polynomial monomial(int k, Rational c = Rational(1)) {
    std::vector<Rational> v(k + 1, Rational(0));
    v[k] = std::move(c);
    return Polynomial(std::move(v));
  }

  /// (1 + x)^k
  static Polynomial onePlusXPow(int k) {
    std::vector<Rational> v(k + 1, Rational(0));
    for (int i = 0; i <= k; ++i) v[i] = Rational(BigInt::binomial(k, i));
    return Polynomial(std::move(v));
  }

  bool isZero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  Rational coeff(int k) const {
    if (k < 0 || k > degree()) return Rational(0);
    return coeffs_[k];
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Rational> r(std::max(a.coeffs_.size(), b.coeffs_.size()),
                            Rational(0));
    for (size_t i = 0; i < a.coeffs_.size(); ++i) r[i] += a.coeffs_[i];
    for (size_t i = 0; i < b.coeffs_.size(); ++i) r[i] += b.coeffs_[i];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<Rational> r(std::max(a.coeffs_.size(), b.coeffs_.size()),
                            Rational(0));
    for (size_t i = 0; i < a.coeffs_.size(); ++i) r[i] += a.coeffs_[i];
    for (size_t i = 0; i < b.coeffs_.size(); ++i) r[i] -= b.coeffs_[i];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.isZero() || b.isZero()) return Polynomial();
    std::vector<Rational> r(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
    for (size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (a.coeffs_[i].isZero()) continue;
      for (size_t j = 0; j < b.coeffs_.size(); ++j)
        r[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(const Rational& c, const Polynomial& p) {
    std::vector<Rational> r = p.coeffs_;
    for (auto& v : r) v *= c;
    return Polynomial(std::move(r));
  }

  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }

  /// exact division by (1 + x); throws if not divisible
  Polynomial dividedByOnePlusX() const {
    if (isZero()) return Polynomial();
    std::vector<Rational> q(coeffs_.size() - 1, Rational(0));
    // long division, highest degree first
    std::vector<Rational> work = coeffs_;
    for (int k = degree(); k >= 1; --k) {
      Rational c = work[k];
      q[k - 1] = c;
      work[k] -= c;
      work[k - 1] -= c;
    }
    if (!work[0].isZero())
      throw DomainError("polynomial not divisible by (1+x)");
    return Polynomial(std::move(q));
  }

  Rational evaluate(const Rational& x) const {
    Rational r(0);
    for (size_t i = coeffs_.size(); i-- > 0;) r = r * x + coeffs_[i];
    return r;
  }

  std::vector<double> toDoubleCoeffs() const {
    std::vector<double> r(coeffs_.size());
    for (size_t i = 0; i < coeffs_.size(); ++i) r[i] = coeffs_[i].toDouble();
    return r;
  }

  /// change of basis x -> (v - 1), returning coefficients in v = 1 + x
  Polynomial inOnePlusXBasis() const {
    Polynomial r;
    for (int k = 0; k <= degree(); ++k) {
      if (coeffs_[k].isZero()) continue;
      // x^k = (v - 1)^k
      std::vector<Rational> t(k + 1, Rational(0));
      for (int j = 0; j <= k; ++j) {
        Rational b(BigInt::binomial(k, j));
        if ((k - j) % 2 == 1) b = -b;
        t[j] = coeffs_[k] * b;
      }
      r += Polynomial(std::move(t));
    }
    return r;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back().isZero()) coeffs_.pop_back();
  }

  std::vector<Rational> coeffs_;
};

}  // namespace uasd
