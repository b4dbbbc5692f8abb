#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "permatch/error.hpp"
#include "permatch/exact.hpp"
#include "permatch/parallel.hpp"

namespace permatch {

/// Square matrix of non-negative integers, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {
    require(n >= 0, ErrorKind::BadParams, "negative dimension");
  }
  IntMatrix(int n, std::vector<std::int64_t> entries) : n_(n), a_(std::move(entries)) {
    require(n >= 0 && a_.size() == static_cast<std::size_t>(n) * static_cast<std::size_t>(n), ErrorKind::BadParams,
            "matrix must be square");
    for (auto x : a_) require(x >= 0, ErrorKind::BadParams, "matrix entries must be non-negative");
  }

  /// 0/1 matrix from bitmask rows (bit j of row i is entry (i, j)).
  static IntMatrix from_bit_rows(std::span<const std::uint64_t> rows) {
    const int n = static_cast<int>(rows.size());
    IntMatrix m(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m.set(i, j, static_cast<std::int64_t>((rows[static_cast<std::size_t>(i)] >> j) & 1U));
    return m;
  }

  static IntMatrix identity(int n) {
    IntMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }
  static IntMatrix ones(int n) { return IntMatrix(n, std::vector<std::int64_t>(static_cast<std::size_t>(n * n), 1)); }

  int n() const { return n_; }
  std::int64_t operator()(int i, int j) const { return a_[idx(i, j)]; }
  void set(int i, int j, std::int64_t v) {
    require(v >= 0, ErrorKind::BadParams, "matrix entries must be non-negative");
    a_[idx(i, j)] = v;
  }

  bool is_binary() const {
    for (auto x : a_)
      if (x > 1) return false;
    return true;
  }

  /// Rows in `rows`, columns in `cols` (bitmasks, increasing order kept).
  IntMatrix submatrix(std::uint64_t rows, std::uint64_t cols) const {
    std::vector<int> r;
    std::vector<int> c;
    for (int i = 0; i < n_; ++i) {
      if ((rows >> i) & 1U) r.push_back(i);
      if ((cols >> i) & 1U) c.push_back(i);
    }
    require(r.size() == c.size(), ErrorKind::BadParams, "submatrix must be square");
    IntMatrix m(static_cast<int>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) m.a_[i * r.size() + j] = (*this)(r[i], c[j]);
    return m;
  }

  /// Block-diagonal composition.
  friend IntMatrix direct_sum(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix m(a.n() + b.n());
    for (int i = 0; i < a.n(); ++i)
      for (int j = 0; j < a.n(); ++j) m.set(i, j, a(i, j));
    for (int i = 0; i < b.n(); ++i)
      for (int j = 0; j < b.n(); ++j) m.set(a.n() + i, a.n() + j, b(i, j));
    return m;
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  int n_ = 0;
  std::vector<std::int64_t> a_;
};

namespace detail {

/// Unsigned integer modulo 2^(64*Limbs). Ryser's alternating sum is evaluated
/// in this ring; when the permanent is known to be below 2^(64*Limbs-1) the
/// wrapped result is exact.
template <int Limbs>
struct WrapUInt {
  std::array<std::uint64_t, Limbs> w{};

  static WrapUInt from(std::uint64_t x) {
    WrapUInt r;
    r.w[0] = x;
    return r;
  }
  void mul_small(std::uint64_t x) {
    unsigned __int128 carry = 0;
    for (auto& limb : w) {
      unsigned __int128 t = static_cast<unsigned __int128>(limb) * x + carry;
      limb = static_cast<std::uint64_t>(t);
      carry = t >> 64;
    }
  }
  WrapUInt& operator+=(const WrapUInt& o) {
    unsigned char c = 0;
    for (int i = 0; i < Limbs; ++i) {
      unsigned __int128 t = static_cast<unsigned __int128>(w[i]) + o.w[i] + c;
      w[i] = static_cast<std::uint64_t>(t);
      c = static_cast<unsigned char>(t >> 64);
    }
    return *this;
  }
  WrapUInt& operator-=(const WrapUInt& o) {
    unsigned char b = 0;
    for (int i = 0; i < Limbs; ++i) {
      std::uint64_t x = w[i];
      std::uint64_t d = x - o.w[i] - b;
      b = static_cast<unsigned char>((x < o.w[i]) || (x - o.w[i] < b));
      w[i] = d;
    }
    return *this;
  }
  bool top_bit() const { return (w[Limbs - 1] >> 63) != 0; }
  BigCount to_big() const {
    BigCount r = 0;
    for (int i = Limbs - 1; i >= 0; --i) {
      r <<= 64;
      r += w[i];
    }
    return r;
  }
};

template <class Acc>
struct AccOps;

template <>
struct AccOps<std::uint64_t> {
  static std::uint64_t from(std::uint64_t x) { return x; }
  static void mul(std::uint64_t& a, std::uint64_t x) { a *= x; }
  static bool negative(std::uint64_t a) { return (a >> 63) != 0; }
  static BigCount to_big(std::uint64_t a) { return a; }
};

template <>
struct AccOps<unsigned __int128> {
  using T = unsigned __int128;
  static T from(std::uint64_t x) { return x; }
  static void mul(T& a, std::uint64_t x) { a *= x; }
  static bool negative(T a) { return (a >> 127) != 0; }
  static BigCount to_big(T a) {
    BigCount r = static_cast<std::uint64_t>(a >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(a);
    return r;
  }
};

template <int L>
struct AccOps<WrapUInt<L>> {
  using T = WrapUInt<L>;
  static T from(std::uint64_t x) { return T::from(x); }
  static void mul(T& a, std::uint64_t x) { a.mul_small(x); }
  static bool negative(const T& a) { return a.top_bit(); }
  static BigCount to_big(const T& a) { return a.to_big(); }
};

template <>
struct AccOps<BigCount> {
  static BigCount from(std::uint64_t x) { return x; }
  static void mul(BigCount& a, std::uint64_t x) { a *= x; }
  static bool negative(const BigCount& a) { return a < 0; }
  static BigCount to_big(const BigCount& a) { return a; }
};

/// Upper bound on log2(per(M)): the Minc-Bregman bound for 0/1 matrices,
/// otherwise the smaller of the row-sum and column-sum products.
inline double permanent_log2_bound(const IntMatrix& m) {
  const int n = m.n();
  if (m.is_binary()) {
    double bits = 0;
    for (int i = 0; i < n; ++i) {
      int r = 0;
      for (int j = 0; j < n; ++j) r += static_cast<int>(m(i, j));
      if (r == 0) return -INFINITY;
      bits += std::lgamma(r + 1.0) / r / std::log(2.0);
    }
    return bits;
  }
  double rows = 0;
  double cols = 0;
  for (int i = 0; i < n; ++i) {
    double r = 0;
    double c = 0;
    for (int j = 0; j < n; ++j) {
      r += static_cast<double>(m(i, j));
      c += static_cast<double>(m(j, i));
    }
    if (r == 0 || c == 0) return -INFINITY;
    rows += std::log2(r);
    cols += std::log2(c);
  }
  return std::min(rows, cols);
}

/// Sum over Gray-code steps k in [begin, end) of (-1)^{n-|S_k|} prod_i rowsum_i(S_k),
/// where S_k = k ^ (k >> 1).
template <class Acc>
Acc ryser_range(const IntMatrix& m, std::uint64_t begin, std::uint64_t end) {
  using Ops = AccOps<Acc>;
  const int n = m.n();
  std::vector<std::uint64_t> sums(static_cast<std::size_t>(n), 0);
  std::vector<std::uint64_t> cols(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) cols[static_cast<std::size_t>(j * n + i)] = static_cast<std::uint64_t>(m(i, j));

  std::uint64_t start = (begin - 1) ^ ((begin - 1) >> 1);
  for (int j = 0; j < n; ++j)
    if ((start >> j) & 1U)
      for (int i = 0; i < n; ++i) sums[static_cast<std::size_t>(i)] += cols[static_cast<std::size_t>(j * n + i)];

  Acc pos = Ops::from(0);
  Acc neg = Ops::from(0);
  for (std::uint64_t k = begin; k < end; ++k) {
    const int j = std::countr_zero(k);
    const std::uint64_t gray = k ^ (k >> 1);
    const std::uint64_t* col = &cols[static_cast<std::size_t>(j * n)];
    if ((gray >> j) & 1U)
      for (int i = 0; i < n; ++i) sums[static_cast<std::size_t>(i)] += col[i];
    else
      for (int i = 0; i < n; ++i) sums[static_cast<std::size_t>(i)] -= col[i];

    Acc prod = Ops::from(1);
    bool zero = false;
    for (int i = 0; i < n; ++i) {
      std::uint64_t s = sums[static_cast<std::size_t>(i)];
      if (s == 0) {
        zero = true;
        break;
      }
      Ops::mul(prod, s);
    }
    if (zero) continue;
    if (((n - std::popcount(gray)) & 1) == 0) pos += prod;
    else neg += prod;
  }
  pos -= neg;
  return pos;
}

template <class Acc>
BigCount ryser_with(const IntMatrix& m, unsigned threads) {
  using Ops = AccOps<Acc>;
  const std::uint64_t total = std::uint64_t{1} << m.n();
  // Chunks stay small enough that each worker recomputes its starting row sums cheaply.
  const std::size_t chunks = (threads > 1 && m.n() >= 14) ? std::size_t{threads} * 4 : 1;
  std::vector<Acc> part(chunks, Ops::from(0));
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t b = 1 + (total - 1) * c / chunks;
    const std::uint64_t e = 1 + (total - 1) * (c + 1) / chunks;
    part[c] = ryser_range<Acc>(m, b, e);
  });
  Acc acc = Ops::from(0);
  for (auto& p : part) acc += p;
  if (Ops::negative(acc)) throw std::logic_error("Ryser accumulator ended negative");
  return Ops::to_big(acc);
}

template <class Acc>
void naive_rec(const IntMatrix& m, int row, std::uint64_t used, const Acc& prefix, Acc& total) {
  const int n = m.n();
  if (row == n) {
    total += prefix;
    return;
  }
  for (int j = 0; j < n; ++j) {
    if ((used >> j) & 1U) continue;
    const auto x = m(row, j);
    if (x == 0) continue;
    Acc next = prefix * static_cast<std::uint64_t>(x);
    naive_rec(m, row + 1, used | (std::uint64_t{1} << j), next, total);
  }
}

}  // namespace detail

/// Definition-level permanent: the sum over all n! permutations of the
/// product of the selected entries. Oracle use only.
inline BigCount permanent_naive(const IntMatrix& m) {
  require(m.n() <= 10, ErrorKind::TooLarge, "permanent_naive limited to n <= 10");
  if (m.n() == 0) return 1;
  std::int64_t max_entry = 0;
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j) max_entry = std::max(max_entry, m(i, j));
  const double bits = std::lgamma(m.n() + 1.0) / std::log(2.0) + m.n() * std::log2(std::max<double>(1, max_entry));
  if (bits < 126) {
    unsigned __int128 total = 0;
    detail::naive_rec<unsigned __int128>(m, 0, 0, 1, total);
    return detail::AccOps<unsigned __int128>::to_big(total);
  }
  BigCount total = 0;
  detail::naive_rec<BigCount>(m, 0, 0, BigCount(1), total);
  return total;
}

/// Ryser's inclusion-exclusion formula walked in Gray-code order, so each
/// subset step updates the row sums with a single column. The accumulator
/// width is picked from an upper bound on the permanent; arithmetic wraps
/// modulo 2^width and the result is exact because the permanent fits.
inline BigCount permanent_ryser(const IntMatrix& m, unsigned threads = 1) {
  require(m.n() <= 30, ErrorKind::TooLarge, "permanent_ryser limited to n <= 30");
  if (m.n() == 0) return 1;
  const double bits = detail::permanent_log2_bound(m) + 2;  // +1 sign bit, +1 rounding slack
  if (bits == -INFINITY) return 0;
  if (bits <= 64) return detail::ryser_with<std::uint64_t>(m, threads);
  if (bits <= 128) return detail::ryser_with<unsigned __int128>(m, threads);
  if (bits <= 256) return detail::ryser_with<detail::WrapUInt<4>>(m, threads);
  if (bits <= 512) return detail::ryser_with<detail::WrapUInt<8>>(m, threads);
  return detail::ryser_with<BigCount>(m, threads);
}

struct SubpermanentSides {
  BigCount lhs;  ///< C(n,k) per(M)
  BigCount rhs;  ///< sum over k-sets S, S' of per(M(S,S')) per(M(S^c,S'^c))
};

inline SubpermanentSides subpermanent_sides(const IntMatrix& m, int k) {
  const int n = m.n();
  require(n <= 8, ErrorKind::TooLarge, "subpermanent identity limited to n <= 8");
  require(k >= 0 && k <= n, ErrorKind::BadK, "k must lie in [0, n]");
  SubpermanentSides out{binomial(static_cast<unsigned>(n), static_cast<unsigned>(k)) * permanent_ryser(m), 0};
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t s = 0; s <= all; ++s) {
    if (std::popcount(s) != k) continue;
    for (std::uint64_t t = 0; t <= all; ++t) {
      if (std::popcount(t) != k) continue;
      BigCount inner = permanent_ryser(m.submatrix(s, t));
      if (inner == 0) continue;
      out.rhs += inner * permanent_ryser(m.submatrix(all & ~s, all & ~t));
    }
  }
  return out;
}

struct LogBounds {
  double log_lower;  ///< log(n! (k/n)^n), van der Waerden for k-regular 0/1 matrices
  double log_upper;  ///< log(k!^(n/k)), Minc-Bregman
};

inline LogBounds log_bounds(int n, int k) {
  require(k >= 1 && k <= n, ErrorKind::BadParams, "bounds need 1 <= k <= n");
  const double nn = n;
  const double kk = k;
  return {std::lgamma(nn + 1) + nn * std::log(kk / nn), nn / kk * std::lgamma(kk + 1)};
}

}  // namespace permatch
