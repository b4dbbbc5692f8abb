#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

#include "permatch/error.hpp"

namespace permatch {

/// Arbitrary-precision count. Counts in this library are never negative, but
/// intermediate sums (Ryser's alternating sum) are, so the type is signed.
using BigCount = boost::multiprecision::cpp_int;

inline BigCount factorial(unsigned n) {
  BigCount r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

inline BigCount binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigCount r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline BigCount pow10(unsigned e) {
  BigCount r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

/// Natural log of a positive integer, valid far beyond double range.
inline double log_big(const BigCount& x) {
  if (x <= 0) return -INFINITY;
  unsigned msb = boost::multiprecision::msb(x);
  if (msb < 1000) return std::log(x.convert_to<double>());
  unsigned shift = msb - 60;
  BigCount top = x >> shift;
  return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

/// Decimal rendering of num/den (num >= 0, den > 0) with `sig` significant
/// digits, rounding half to even. Never uses exponent notation.
inline std::string to_decimal(const BigCount& num, const BigCount& den, unsigned sig = 12) {
  require(den > 0 && num >= 0, ErrorKind::BadParams, "to_decimal expects num >= 0, den > 0");
  if (num == 0) return "0." + std::string(sig, '0');

  const BigCount lo = pow10(sig - 1);
  const BigCount hi = lo * 10;
  // value * 10^scale lands in [lo, hi)
  int scale = static_cast<int>(sig) - 1 -
              (static_cast<int>(num.str().size()) - static_cast<int>(den.str().size()));
  BigCount q, r, d;
  for (;;) {
    BigCount n = num;
    d = den;
    if (scale >= 0) n *= pow10(static_cast<unsigned>(scale));
    else d *= pow10(static_cast<unsigned>(-scale));
    q = n / d;
    r = n % d;
    if (q < lo) ++scale;
    else if (q >= hi) --scale;
    else break;
  }
  BigCount twice = 2 * r;
  if (twice > d || (twice == d && (q & 1) != 0)) ++q;
  if (q == hi) {
    q /= 10;
    --scale;
  }

  std::string digits = q.str();
  if (scale <= 0) return digits + std::string(static_cast<std::size_t>(-scale), '0');
  auto s = static_cast<std::size_t>(scale);
  if (s < digits.size()) return digits.substr(0, digits.size() - s) + "." + digits.substr(digits.size() - s);
  return "0." + std::string(s - digits.size(), '0') + digits;
}

/// Reduced fraction with positive denominator.
class ExactRatio {
 public:
  ExactRatio() : num_(0), den_(1) {}
  ExactRatio(BigCount num) : num_(std::move(num)), den_(1) {}  // NOLINT(implicit)
  ExactRatio(BigCount num, BigCount den) : num_(std::move(num)), den_(std::move(den)) {
    require(den_ != 0, ErrorKind::BadParams, "zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    BigCount g = boost::multiprecision::gcd(num_ < 0 ? BigCount(-num_) : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  const BigCount& num() const { return num_; }
  const BigCount& den() const { return den_; }

  std::string str() const { return num_.str() + "/" + den_.str(); }
  std::string decimal(unsigned sig = 12) const {
    if (num_ < 0) return "-" + to_decimal(-num_, den_, sig);
    return to_decimal(num_, den_, sig);
  }
  double to_double() const {
    if (num_ == 0) return 0.0;
    return std::exp(log_big(num_ < 0 ? BigCount(-num_) : num_) - log_big(den_)) * (num_ < 0 ? -1.0 : 1.0);
  }

  friend ExactRatio operator+(const ExactRatio& a, const ExactRatio& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend ExactRatio operator-(const ExactRatio& a, const ExactRatio& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend ExactRatio operator*(const ExactRatio& a, const ExactRatio& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend ExactRatio operator/(const ExactRatio& a, const ExactRatio& b) {
    require(b.num_ != 0, ErrorKind::BadParams, "division by zero ratio");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  ExactRatio& operator+=(const ExactRatio& o) { return *this = *this + o; }

  friend bool operator==(const ExactRatio& a, const ExactRatio& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const ExactRatio& a, const ExactRatio& b) {
    BigCount l = a.num_ * b.den_;
    BigCount r = b.num_ * a.den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  BigCount num_;
  BigCount den_;
};

}  // namespace permatch
