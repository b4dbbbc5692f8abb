#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "permatch/exact.hpp"
#include "permatch/graph.hpp"
#include "permatch/permanent.hpp"

namespace permatch {

/// Bijection on [0, n), stored as its image list.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> images) : sigma_(std::move(images)) {
    const int n = size();
    require(n >= 1 && n <= kMaxVertices, ErrorKind::NotPermutation, "permutation size outside [1,64]");
    std::uint64_t seen = 0;
    for (int x : sigma_) {
      require(x >= 0 && x < n && ((seen >> x) & 1U) == 0, ErrorKind::NotPermutation, "images are not a bijection");
      seen |= bit(x);
    }
  }

  static Permutation identity(int n) {
    std::vector<int> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = i;
    return Permutation(std::move(s));
  }

  /// "1,2,0" means sigma(0)=1, sigma(1)=2, sigma(2)=0.
  static Permutation parse(std::string_view text) {
    std::vector<int> s;
    std::string tok;
    std::istringstream in{std::string(text)};
    while (std::getline(in, tok, ',')) {
      auto b = tok.find_first_not_of(" \t");
      auto e = tok.find_last_not_of(" \t");
      if (b == std::string::npos) fail(ErrorKind::SyntaxError, "empty permutation entry");
      tok = tok.substr(b, e - b + 1);
      if (tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 3)
        fail(ErrorKind::SyntaxError, "bad permutation entry '" + tok + "'");
      s.push_back(std::stoi(tok));
    }
    return Permutation(std::move(s));
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < sigma_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(sigma_[i]);
    }
    return out;
  }

  int size() const { return static_cast<int>(sigma_.size()); }
  int operator[](int v) const { return sigma_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& images() const { return sigma_; }

  std::uint64_t fixed_mask() const {
    std::uint64_t m = 0;
    for (int v = 0; v < size(); ++v)
      if ((*this)[v] == v) m |= bit(v);
    return m;
  }
  int fixed_count() const { return std::popcount(fixed_mask()); }
  bool is_derangement() const { return fixed_mask() == 0; }
  bool is_identity() const { return fixed_mask() == low_mask(size()); }

  /// Every moved vertex follows an arc of g.
  bool is_on(const Digraph& g) const {
    if (g.n() != size()) return false;
    for (int v = 0; v < size(); ++v)
      if ((*this)[v] != v && !g.has_arc(v, (*this)[v])) return false;
    return true;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> sigma_;
};

inline IntMatrix adjacency_matrix(const Digraph& g) { return IntMatrix::from_bit_rows(g.rows()); }

inline IntMatrix adjacency_plus_identity(const Digraph& g) {
  return IntMatrix::from_bit_rows(permutation_model(g).rows());
}

/// per(A): bijections sending every vertex along an arc.
inline BigCount count_derangements(const Digraph& g, unsigned threads = 1) {
  require(g.n() <= 30, ErrorKind::TooLarge, "derangement counting limited to n <= 30");
  return permanent_ryser(adjacency_matrix(g), threads);
}

/// per(A + I): bijections whose moved vertices follow arcs.
inline BigCount count_permutations(const Digraph& g, unsigned threads = 1) {
  require(g.n() <= 30, ErrorKind::TooLarge, "permutation counting limited to n <= 30");
  return permanent_ryser(adjacency_plus_identity(g), threads);
}

inline ExactRatio dp_ratio(const Digraph& g, unsigned threads = 1) {
  return {count_derangements(g, threads), count_permutations(g, threads)};
}

/// Visits every permutation (or derangement) on g in lexicographic order of
/// the image list. The visitor returns false to stop early.
inline void for_each_permutation(const Digraph& g, bool derangements_only,
                                 const std::function<bool(const std::vector<int>&)>& visit) {
  const int n = g.n();
  std::vector<int> sigma(static_cast<std::size_t>(n), -1);
  bool stop = false;
  std::function<void(int, std::uint64_t)> rec = [&](int v, std::uint64_t used) {
    if (stop) return;
    if (v == n) {
      if (!visit(sigma)) stop = true;
      return;
    }
    std::uint64_t choices = g.row(v);
    if (!derangements_only) choices |= bit(v);
    choices &= ~used;
    for (; choices != 0 && !stop; choices &= choices - 1) {
      int w = std::countr_zero(choices);
      sigma[static_cast<std::size_t>(v)] = w;
      rec(v + 1, used | bit(w));
    }
  };
  rec(0, 0);
}

inline std::vector<Permutation> enumerate_permutations(const Digraph& g, bool derangements_only) {
  require(g.n() <= 10, ErrorKind::TooLarge, "enumeration limited to n <= 10");
  std::vector<Permutation> out;
  for_each_permutation(g, derangements_only, [&](const std::vector<int>& s) {
    out.emplace_back(s);
    return true;
  });
  return out;
}

inline bool is_directed_cycle(const Digraph& g) {
  const int n = g.n();
  if (n < 2 || g.arc_count() != n) return false;
  for (int v = 0; v < n; ++v)
    if (g.out_degree(v) != 1 || g.in_degree(v) != 1) return false;
  int v = 0;
  for (int step = 1; step < n; ++step) {
    v = std::countr_zero(g.row(v));
    if (v == 0) return false;
  }
  return std::countr_zero(g.row(v)) == 0;
}

// ---------------------------------------------------------------------------
// Perfect matchings

/// Number of perfect matchings = per(biadjacency); unbalanced graphs have none.
inline BigCount count_perfect_matchings(const BipartiteGraph& b, unsigned threads = 1) {
  if (!b.balanced()) return 0;
  require(b.n_left() <= 30, ErrorKind::TooLarge, "bipartite matching count limited to parts <= 30");
  return permanent_ryser(IntMatrix::from_bit_rows(b.rows()), threads);
}

namespace detail {

inline std::uint64_t count_pm_memo(const UndirectedGraph& g, std::uint64_t rest,
                                   std::unordered_map<std::uint64_t, std::uint64_t>& memo) {
  if (rest == 0) return 1;
  if (auto it = memo.find(rest); it != memo.end()) return it->second;
  const int v = std::countr_zero(rest);
  const std::uint64_t others = rest & ~bit(v);
  std::uint64_t total = 0;
  for (std::uint64_t nb = g.neighbors(v) & others; nb != 0; nb &= nb - 1)
    total += count_pm_memo(g, others & ~bit(std::countr_zero(nb)), memo);
  memo.emplace(rest, total);
  return total;
}

}  // namespace detail

/// Branches on the lowest unmatched vertex, memoised on the unmatched set.
inline BigCount count_perfect_matchings_general(const UndirectedGraph& g) {
  require(g.n() <= 24, ErrorKind::TooLarge, "general matching count limited to 24 vertices");
  if (g.n() % 2 != 0) return 0;
  std::unordered_map<std::uint64_t, std::uint64_t> memo;
  return detail::count_pm_memo(g, low_mask(g.n()), memo);
}

inline std::vector<PerfectMatching> enumerate_perfect_matchings(const BipartiteGraph& b) {
  std::vector<PerfectMatching> out;
  if (!b.balanced()) return out;
  require(b.n_left() <= 12, ErrorKind::TooLarge, "bipartite matching enumeration limited to parts <= 12");
  const int n = b.n_left();
  std::vector<Arc> cur;
  std::function<void(int, std::uint64_t)> rec = [&](int l, std::uint64_t used) {
    if (l == n) {
      out.push_back({cur});
      return;
    }
    for (std::uint64_t c = b.row(l) & ~used; c != 0; c &= c - 1) {
      int r = std::countr_zero(c);
      cur.emplace_back(l, r);
      rec(l + 1, used | bit(r));
      cur.pop_back();
    }
  };
  rec(0, 0);
  return out;
}

inline std::vector<PerfectMatching> enumerate_perfect_matchings_general(const UndirectedGraph& g) {
  std::vector<PerfectMatching> out;
  if (g.n() % 2 != 0) return out;
  require(g.n() <= 24, ErrorKind::TooLarge, "general matching enumeration limited to 24 vertices");
  std::vector<Arc> cur;
  std::function<void(std::uint64_t)> rec = [&](std::uint64_t rest) {
    if (rest == 0) {
      out.push_back(PerfectMatching::undirected(cur));
      return;
    }
    const int v = std::countr_zero(rest);
    const std::uint64_t others = rest & ~bit(v);
    for (std::uint64_t nb = g.neighbors(v) & others; nb != 0; nb &= nb - 1) {
      int w = std::countr_zero(nb);
      cur.emplace_back(v, w);
      rec(others & ~bit(w));
      cur.pop_back();
    }
  };
  rec(low_mask(g.n()));
  return out;
}

/// Perfect matchings of the host split by whether they share an edge with M.
struct IntersectionTally {
  BigCount hits;
  BigCount misses;
  BigCount total() const { return hits + misses; }
};

/// Misses are the perfect matchings of G with M's edges deleted; hits are the rest.
inline IntersectionTally matching_intersection_tally(const UndirectedGraph& g, const PerfectMatching& m) {
  require(is_perfect_matching(g, m), ErrorKind::NotPerfectMatching, "not a perfect matching of the graph");
  std::vector<std::uint64_t> rows(g.digraph().rows().begin(), g.digraph().rows().end());
  for (auto [u, v] : m.edges) {
    rows[static_cast<std::size_t>(u)] &= ~bit(v);
    rows[static_cast<std::size_t>(v)] &= ~bit(u);
  }
  auto without = UndirectedGraph::from_symmetric(Digraph::from_rows(std::move(rows)));
  BigCount total = count_perfect_matchings_general(g);
  BigCount misses = count_perfect_matchings_general(without);
  return {total - misses, misses};
}

inline IntersectionTally matching_intersection_tally(const BipartiteGraph& b, const PerfectMatching& m) {
  require(is_perfect_matching(b, m), ErrorKind::NotPerfectMatching, "not a perfect matching of the bipartite graph");
  std::vector<std::uint64_t> rows(b.rows().begin(), b.rows().end());
  for (auto [l, r] : m.edges) rows[static_cast<std::size_t>(l)] &= ~bit(r);
  BigCount total = count_perfect_matchings(b);
  BigCount misses = count_perfect_matchings(BipartiteGraph::from_rows(b.n_right(), std::move(rows)));
  return {total - misses, misses};
}

// ---------------------------------------------------------------------------
// Fixed-point decompositions

/// Entry m counts permutations on g with exactly m fixed points; the moved
/// set S contributes per(A(S,S)).
inline std::vector<BigCount> permutations_by_fixed_points(const Digraph& g) {
  const int n = g.n();
  require(n <= 12, ErrorKind::TooLarge, "fixed-point partition limited to n <= 12");
  const IntMatrix a = adjacency_matrix(g);
  std::vector<BigCount> out(static_cast<std::size_t>(n + 1), 0);
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s)
    out[static_cast<std::size_t>(n - std::popcount(s))] += permanent_ryser(a.submatrix(s, s));
  return out;
}

/// Sum over S, S' of per(M(S,S'))^2: permutations on the symmetric digraph
/// of b, grouped by the moved left set S and moved right set S'.
inline BigCount bipartite_permutation_sum(const BipartiteGraph& b) {
  require(b.balanced(), ErrorKind::BadParams, "bipartite_permutation_sum needs a balanced graph");
  const int n = b.n_left();
  require(n <= 8, ErrorKind::TooLarge, "bipartite permutation sum limited to n <= 8");
  const IntMatrix m = IntMatrix::from_bit_rows(b.rows());
  BigCount total = 0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s)
    for (std::uint64_t t = 0; t < (std::uint64_t{1} << n); ++t) {
      if (std::popcount(s) != std::popcount(t)) continue;
      BigCount p = permanent_ryser(m.submatrix(s, t));
      total += p * p;
    }
  return total;
}

/// sum_{k=0}^{n} (k!)^{-2}: the p/d value of K_{n,n}.
inline ExactRatio complete_bipartite_pd(int n) {
  ExactRatio s;
  for (int k = 0; k <= n; ++k) {
    BigCount f = factorial(static_cast<unsigned>(k));
    s += ExactRatio(1, f * f);
  }
  return s;
}

}  // namespace permatch
