#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "uasd/types.hpp"

namespace uasd {

/// Arbitrary-precision signed integer, sign + base-2^32 magnitude.
/// Only what the exact density algebra needs: ring ops, divmod, gcd,
/// double conversion.
class BigInt {
 public:
  BigInt() = default;
  BigInt(long long v) {  // NOLINT: implicit by design, mirrors int literals
    if (v < 0) {
      neg_ = true;
      // avoid UB on LLONG_MIN
      unsigned long long m = static_cast<unsigned long long>(-(v + 1)) + 1ull;
      setU64(m);
    } else {
      setU64(static_cast<unsigned long long>(v));
    }
  }

  bool isZero() const { return limbs_.empty(); }
  bool isNegative() const { return neg_; }
  bool isOne() const { return !neg_ && limbs_.size() == 1 && limbs_[0] == 1; }
  bool isEven() const { return limbs_.empty() || (limbs_[0] & 1u) == 0; }

  friend BigInt operator-(BigInt a) {
    if (!a.isZero()) a.neg_ = !a.neg_;
    return a;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.neg_ == b.neg_) {
      BigInt r;
      r.limbs_ = addMag(a.limbs_, b.limbs_);
      r.neg_ = a.neg_;
      r.normalize();
      return r;
    }
    int c = cmpMag(a.limbs_, b.limbs_);
    BigInt r;
    if (c == 0) return r;
    if (c > 0) {
      r.limbs_ = subMag(a.limbs_, b.limbs_);
      r.neg_ = a.neg_;
    } else {
      r.limbs_ = subMag(b.limbs_, a.limbs_);
      r.neg_ = b.neg_;
    }
    r.normalize();
    return r;
  }

  friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.isZero() || b.isZero()) return r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
      std::uint64_t carry = 0;
      for (size_t j = 0; j < b.limbs_.size(); ++j) {
        std::uint64_t cur = static_cast<std::uint64_t>(a.limbs_[i]) * b.limbs_[j] +
                            r.limbs_[i + j] + carry;
        r.limbs_[i + j] = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
      }
      size_t k = i + b.limbs_.size();
      while (carry) {
        std::uint64_t cur = r.limbs_[k] + carry;
        r.limbs_[k] = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
        ++k;
      }
    }
    r.neg_ = a.neg_ != b.neg_;
    r.normalize();
    return r;
  }

  /// truncated quotient (rounds toward zero)
  friend BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmodMag(a, b, q, r);
    q.neg_ = !q.isZero() && (a.neg_ != b.neg_);
    return q;
  }

  friend BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmodMag(a, b, q, r);
    r.neg_ = !r.isZero() && a.neg_;
    return r;
  }

  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.neg_ == b.neg_ && a.limbs_ == b.limbs_;
  }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
  friend bool operator<(const BigInt& a, const BigInt& b) {
    if (a.neg_ != b.neg_) return a.neg_;
    int c = cmpMag(a.limbs_, b.limbs_);
    return a.neg_ ? c > 0 : c < 0;
  }

  static BigInt gcd(BigInt a, BigInt b) {
    a.neg_ = false;
    b.neg_ = false;
    if (a.isZero()) return b;
    if (b.isZero()) return a;
    int shift = 0;
    while (a.isEven() && b.isEven()) {
      a.shr1();
      b.shr1();
      ++shift;
    }
    while (a.isEven()) a.shr1();
    while (!b.isZero()) {
      while (b.isEven()) b.shr1();
      if (cmpMag(a.limbs_, b.limbs_) > 0) std::swap(a, b);
      b = b - a;
      b.neg_ = false;
    }
    for (int i = 0; i < shift; ++i) a.shl1();
    return a;
  }

  static BigInt factorial(int n) {
    BigInt r(1);
    for (int i = 2; i <= n; ++i) r *= BigInt(i);
    return r;
  }

  static BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return BigInt(0);
    k = std::min(k, n - k);
    BigInt num(1), den(1);
    for (int i = 0; i < k; ++i) {
      num *= BigInt(n - i);
      den *= BigInt(i + 1);
    }
    return num / den;
  }

  double toDouble() const {
    double v = 0.0;
    for (size_t i = limbs_.size(); i-- > 0;) v = v * 4294967296.0 + limbs_[i];
    return neg_ ? -v : v;
  }

  int bitLength() const {
    if (limbs_.empty()) return 0;
    std::uint32_t top = limbs_.back();
    int bits = 32 * static_cast<int>(limbs_.size() - 1);
    while (top) {
      ++bits;
      top >>= 1;
    }
    return bits;
  }

  /// value / 2^k as double, exact rounding not required (>= 60 significant bits kept)
  double toDoubleScaled(int k) const {
    return toDouble() * std::pow(2.0, -k);
  }

  BigInt shiftedLeft(int bits) const {
    BigInt r = *this;
    for (int i = 0; i < bits; ++i) r.shl1();
    return r;
  }

  std::string toString() const {
    if (isZero()) return "0";
    BigInt t = *this;
    t.neg_ = false;
    std::string s;
    BigInt ten(10);
    while (!t.isZero()) {
      BigInt q, r;
      divmodMag(t, ten, q, r);
      s.push_back(static_cast<char>('0' + (r.limbs_.empty() ? 0 : r.limbs_[0])));
      t = q;
    }
    if (neg_) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
  }

 private:
  static std::vector<std::uint32_t> addMag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    const auto& big = a.size() >= b.size() ? a : b;
    const auto& small = a.size() >= b.size() ? b : a;
    std::vector<std::uint32_t> r = big;
    std::uint64_t carry = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      std::uint64_t cur = static_cast<std::uint64_t>(r[i]) + carry +
                          (i < small.size() ? small[i] : 0u);
      r[i] = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
      if (!carry && i >= small.size()) break;
    }
    if (carry) r.push_back(static_cast<std::uint32_t>(carry));
    return r;
  }

  // requires |a| >= |b|
  static std::vector<std::uint32_t> subMag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r = a;
    std::int64_t borrow = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      std::int64_t cur = static_cast<std::int64_t>(r[i]) - borrow -
                         (i < b.size() ? b[i] : 0u);
      borrow = cur < 0 ? 1 : 0;
      if (cur < 0) cur += 1ll << 32;
      r[i] = static_cast<std::uint32_t>(cur);
      if (!borrow && i >= b.size()) break;
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  static int cmpMag(const std::vector<std::uint32_t>& a,
                    const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }

  // magnitude shift-subtract long division
  static void divmodMag(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.isZero()) throw DomainError("BigInt division by zero");
    q = BigInt();
    r = BigInt();
    if (cmpMag(a.limbs_, b.limbs_) < 0) {
      r.limbs_ = a.limbs_;
      return;
    }
    int shift = a.bitLength() - b.bitLength();
    BigInt d = b;
    d.neg_ = false;
    d = d.shiftedLeft(shift);
    r.limbs_ = a.limbs_;
    std::vector<bool> bits(shift + 1, false);
    for (int i = shift; i >= 0; --i) {
      if (cmpMag(r.limbs_, d.limbs_) >= 0) {
        r.limbs_ = subMag(r.limbs_, d.limbs_);
        bits[i] = true;
      }
      d.shr1();
    }
    q.limbs_.assign(shift / 32 + 1, 0);
    for (int i = 0; i <= shift; ++i)
      if (bits[i]) q.limbs_[i / 32] |= 1u << (i % 32);
    q.normalize();
    r.normalize();
  }

  void shr1() {
    std::uint32_t carry = 0;
    for (size_t i = limbs_.size(); i-- > 0;) {
      std::uint32_t next = limbs_[i] & 1u;
      limbs_[i] = (limbs_[i] >> 1) | (carry << 31);
      carry = next;
    }
    normalize();
  }

  void shl1() {
    std::uint32_t carry = 0;
    for (size_t i = 0; i < limbs_.size(); ++i) {
      std::uint32_t next = limbs_[i] >> 31;
      limbs_[i] = (limbs_[i] << 1) | carry;
      carry = next;
    }
    if (carry) limbs_.push_back(carry);
  }

  void setU64(unsigned long long v) {
    limbs_.clear();
    while (v) {
      limbs_.push_back(static_cast<std::uint32_t>(v));
      v >>= 32;
    }
  }

  void normalize() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
  }

  bool neg_ = false;
  std::vector<std::uint32_t> limbs_;
};

}  // namespace uasd
