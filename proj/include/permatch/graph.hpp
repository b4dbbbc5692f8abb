#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "permatch/error.hpp"

namespace permatch {

using Arc = std::pair<int, int>;

inline constexpr int kMaxVertices = 64;

inline constexpr std::uint64_t bit(int i) { return std::uint64_t{1} << i; }

inline constexpr std::uint64_t low_mask(int n) { return n >= 64 ? ~std::uint64_t{0} : bit(n) - 1; }

/// Loopless directed graph on vertices [0, n) with one 64-bit adjacency row
/// per vertex: bit j of row i is set iff the arc (i, j) is present.
class Digraph {
 public:
  explicit Digraph(int n) : rows_(check_size(n), 0) {}

  static Digraph from_arcs(int n, std::span<const Arc> arcs) {
    Digraph g(n);
    for (auto [u, v] : arcs) {
      require(u >= 0 && v >= 0 && u < n && v < n, ErrorKind::OutOfRange,
              "arc (" + std::to_string(u) + "," + std::to_string(v) + ") outside [0," + std::to_string(n) + ")");
      require(u != v, ErrorKind::SelfLoop, "arc (" + std::to_string(u) + "," + std::to_string(u) + ")");
      g.rows_[static_cast<std::size_t>(u)] |= bit(v);
    }
    return g;
  }

  static Digraph from_arcs(int n, std::initializer_list<Arc> arcs) {
    return from_arcs(n, std::span<const Arc>(arcs.begin(), arcs.size()));
  }

  static Digraph from_rows(std::vector<std::uint64_t> rows) {
    Digraph g(static_cast<int>(rows.size()));
    const int n = g.n();
    for (int i = 0; i < n; ++i) {
      std::uint64_t r = rows[static_cast<std::size_t>(i)];
      require((r & ~low_mask(n)) == 0, ErrorKind::OutOfRange, "row " + std::to_string(i) + " has bits >= n");
      require((r & bit(i)) == 0, ErrorKind::SelfLoop, "row " + std::to_string(i) + " has its diagonal bit set");
    }
    g.rows_ = std::move(rows);
    return g;
  }

  int n() const { return static_cast<int>(rows_.size()); }
  std::uint64_t row(int u) const { return rows_[static_cast<std::size_t>(u)]; }
  std::span<const std::uint64_t> rows() const { return rows_; }
  bool has_arc(int u, int v) const { return (row(u) >> v) & 1U; }

  int out_degree(int u) const { return std::popcount(row(u)); }
  int in_degree(int v) const {
    int d = 0;
    for (auto r : rows_) d += static_cast<int>((r >> v) & 1U);
    return d;
  }
  int arc_count() const {
    int c = 0;
    for (auto r : rows_) c += std::popcount(r);
    return c;
  }

  /// All arcs in lexicographic order.
  std::vector<Arc> arcs() const {
    std::vector<Arc> out;
    for (int u = 0; u < n(); ++u)
      for (std::uint64_t r = row(u); r != 0; r &= r - 1) out.emplace_back(u, std::countr_zero(r));
    return out;
  }

  bool is_symmetric() const {
    for (int u = 0; u < n(); ++u)
      for (std::uint64_t r = row(u); r != 0; r &= r - 1)
        if (!has_arc(std::countr_zero(r), u)) return false;
    return true;
  }

  Digraph with_arc(int u, int v) const { return toggled(u, v, true); }
  Digraph without_arc(int u, int v) const { return toggled(u, v, false); }

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  static std::size_t check_size(int n) {
    require(n >= 1 && n <= kMaxVertices, ErrorKind::BadParams,
            "vertex count " + std::to_string(n) + " outside [1,64]");
    return static_cast<std::size_t>(n);
  }

  Digraph toggled(int u, int v, bool on) const {
    require(u >= 0 && v >= 0 && u < n() && v < n(), ErrorKind::OutOfRange, "arc endpoint out of range");
    require(u != v, ErrorKind::SelfLoop, "self loop");
    Digraph g = *this;
    if (on) g.rows_[static_cast<std::size_t>(u)] |= bit(v);
    else g.rows_[static_cast<std::size_t>(u)] &= ~bit(v);
    return g;
  }

  std::vector<std::uint64_t> rows_;
};

/// Undirected graph stored as a symmetric digraph.
class UndirectedGraph {
 public:
  explicit UndirectedGraph(int n) : g_(n) {}

  static UndirectedGraph from_edges(int n, std::span<const Arc> edges) {
    std::vector<Arc> arcs;
    arcs.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
      arcs.emplace_back(u, v);
      arcs.emplace_back(v, u);
    }
    return UndirectedGraph(Digraph::from_arcs(n, arcs));
  }
  static UndirectedGraph from_edges(int n, std::initializer_list<Arc> edges) {
    return from_edges(n, std::span<const Arc>(edges.begin(), edges.size()));
  }

  static UndirectedGraph from_symmetric(Digraph g) {
    require(g.is_symmetric(), ErrorKind::BadParams, "adjacency is not symmetric");
    return UndirectedGraph(std::move(g));
  }

  int n() const { return g_.n(); }
  const Digraph& digraph() const { return g_; }
  bool has_edge(int u, int v) const { return g_.has_arc(u, v); }
  std::uint64_t neighbors(int u) const { return g_.row(u); }
  int degree(int u) const { return g_.out_degree(u); }
  int edge_count() const { return g_.arc_count() / 2; }

  /// Edges (u, v) with u < v, lexicographic.
  std::vector<Arc> edges() const {
    std::vector<Arc> out;
    for (auto [u, v] : g_.arcs())
      if (u < v) out.emplace_back(u, v);
    return out;
  }

  friend bool operator==(const UndirectedGraph&, const UndirectedGraph&) = default;

 private:
  explicit UndirectedGraph(Digraph g) : g_(std::move(g)) {}
  Digraph g_;
};

/// Bipartite graph given by its biadjacency matrix: bit r of row l is set iff
/// left vertex l is adjacent to right vertex r.
class BipartiteGraph {
 public:
  BipartiteGraph(int n_left, int n_right) : n_right_(n_right), rows_(check_sizes(n_left, n_right), 0) {}

  static BipartiteGraph from_edges(int n_left, int n_right, std::span<const Arc> edges) {
    BipartiteGraph b(n_left, n_right);
    for (auto [l, r] : edges) {
      require(l >= 0 && r >= 0 && l < n_left && r < n_right, ErrorKind::OutOfRange,
              "edge (" + std::to_string(l) + "," + std::to_string(r) + ") out of range");
      b.rows_[static_cast<std::size_t>(l)] |= bit(r);
    }
    return b;
  }
  static BipartiteGraph from_edges(int n_left, int n_right, std::initializer_list<Arc> edges) {
    return from_edges(n_left, n_right, std::span<const Arc>(edges.begin(), edges.size()));
  }

  static BipartiteGraph from_rows(int n_right, std::vector<std::uint64_t> rows) {
    BipartiteGraph b(static_cast<int>(rows.size()), n_right);
    for (auto r : rows) require((r & ~low_mask(n_right)) == 0, ErrorKind::OutOfRange, "biadjacency bit >= nR");
    b.rows_ = std::move(rows);
    return b;
  }

  static BipartiteGraph complete(int n_left, int n_right) {
    return from_rows(n_right, std::vector<std::uint64_t>(static_cast<std::size_t>(n_left), low_mask(n_right)));
  }

  int n_left() const { return static_cast<int>(rows_.size()); }
  int n_right() const { return n_right_; }
  bool balanced() const { return n_left() == n_right_; }
  std::uint64_t row(int l) const { return rows_[static_cast<std::size_t>(l)]; }
  std::span<const std::uint64_t> rows() const { return rows_; }
  bool has_edge(int l, int r) const { return (row(l) >> r) & 1U; }

  int edge_count() const {
    int c = 0;
    for (auto r : rows_) c += std::popcount(r);
    return c;
  }
  bool is_complete() const {
    return std::all_of(rows_.begin(), rows_.end(), [&](std::uint64_t r) { return r == low_mask(n_right_); });
  }

  std::vector<Arc> edges() const {
    std::vector<Arc> out;
    for (int l = 0; l < n_left(); ++l)
      for (std::uint64_t r = row(l); r != 0; r &= r - 1) out.emplace_back(l, std::countr_zero(r));
    return out;
  }

  /// The same graph on [0, nL + nR): left vertex l -> l, right vertex r -> nL + r.
  UndirectedGraph to_undirected() const {
    std::vector<Arc> e;
    for (auto [l, r] : edges()) e.emplace_back(l, n_left() + r);
    return UndirectedGraph::from_edges(n_left() + n_right_, e);
  }

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  static std::size_t check_sizes(int nl, int nr) {
    require(nl >= 1 && nr >= 1 && nl <= kMaxVertices && nr <= kMaxVertices, ErrorKind::BadParams,
            "bipartite part sizes must lie in [1,64]");
    return static_cast<std::size_t>(nl);
  }

  int n_right_;
  std::vector<std::uint64_t> rows_;
};

/// A set of vertex-disjoint edges. For undirected hosts each edge is stored
/// as (min, max); for bipartite hosts as (left, right). Edges are kept sorted.
struct PerfectMatching {
  std::vector<Arc> edges;

  static PerfectMatching undirected(std::vector<Arc> e) {
    for (auto& [u, v] : e)
      if (u > v) std::swap(u, v);
    std::sort(e.begin(), e.end());
    return {std::move(e)};
  }
  static PerfectMatching bipartite(std::vector<Arc> e) {
    std::sort(e.begin(), e.end());
    return {std::move(e)};
  }

  /// Left-to-right map of a bipartite matching.
  std::vector<int> mates() const {
    std::vector<int> m(edges.size(), -1);
    for (auto [l, r] : edges) m[static_cast<std::size_t>(l)] = r;
    return m;
  }

  friend bool operator==(const PerfectMatching&, const PerfectMatching&) = default;
  friend auto operator<=>(const PerfectMatching&, const PerfectMatching&) = default;
};

inline bool is_perfect_matching(const UndirectedGraph& g, const PerfectMatching& m) {
  if (g.n() % 2 != 0 || static_cast<int>(m.edges.size()) * 2 != g.n()) return false;
  std::uint64_t covered = 0;
  for (auto [u, v] : m.edges) {
    if (u < 0 || v < 0 || u >= g.n() || v >= g.n() || u == v || !g.has_edge(u, v)) return false;
    if ((covered & (bit(u) | bit(v))) != 0) return false;
    covered |= bit(u) | bit(v);
  }
  return covered == low_mask(g.n());
}

inline bool is_perfect_matching(const BipartiteGraph& b, const PerfectMatching& m) {
  if (!b.balanced() || static_cast<int>(m.edges.size()) != b.n_left()) return false;
  std::uint64_t left = 0;
  std::uint64_t right = 0;
  for (auto [l, r] : m.edges) {
    if (l < 0 || r < 0 || l >= b.n_left() || r >= b.n_right() || !b.has_edge(l, r)) return false;
    if ((left & bit(l)) != 0 || (right & bit(r)) != 0) return false;
    left |= bit(l);
    right |= bit(r);
  }
  return true;
}

inline bool intersects(const PerfectMatching& a, const PerfectMatching& b) {
  for (const auto& e : a.edges)
    if (std::binary_search(b.edges.begin(), b.edges.end(), e)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Constructions

inline Digraph directed_cycle(int n) {
  require(n >= 2 && n <= kMaxVertices, ErrorKind::BadParams, "directed cycle needs 2 <= n <= 64");
  std::vector<Arc> arcs;
  for (int i = 0; i < n; ++i) arcs.emplace_back(i, (i + 1) % n);
  return Digraph::from_arcs(n, arcs);
}

inline UndirectedGraph complete_graph(int n) {
  require(n >= 1 && n <= kMaxVertices, ErrorKind::BadParams, "complete graph needs 1 <= n <= 64");
  std::vector<Arc> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return UndirectedGraph::from_edges(n, e);
}

/// K_{n,n} on [0, 2n): left part [0, n), right part [n, 2n).
inline UndirectedGraph complete_bipartite(int n) {
  require(n >= 1 && 2 * n <= kMaxVertices, ErrorKind::BadParams, "complete bipartite needs 1 <= n <= 32");
  return BipartiteGraph::complete(n, n).to_undirected();
}

/// k-blowup of the directed l-cycle. Layer-major labels: member i of layer j
/// is vertex j*k + i; every vertex of layer j points at every vertex of layer
/// (j+1) mod l.
inline Digraph blowup(int k, int l) {
  require(k >= 1 && l >= 2 && k * l <= kMaxVertices, ErrorKind::BadParams, "blowup needs k >= 1, l >= 2, kl <= 64");
  std::vector<Arc> arcs;
  for (int j = 0; j < l; ++j)
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) arcs.emplace_back(j * k + a, ((j + 1) % l) * k + b);
  return Digraph::from_arcs(k * l, arcs);
}

struct GraphWithMatching {
  UndirectedGraph graph;
  PerfectMatching matching;
};

/// The 3-regular graph on 4n vertices whose perfect matching M0 is disjoint
/// from all 2^n other perfect matchings. Vertex v_i (1-based) is i-1 and u_i
/// is 2n+i-1. Blocks {v_{2i-1}, v_{2i}} x {u_{2i-1}, u_{2i}} are complete;
/// M0 = {v_{2i-1}v_{2i}} + {u_{2i}u_{2i+1}} with u_{2n+1} = u_1.
inline GraphWithMatching disjoint_matching_graph(int n) {
  require(n >= 1 && 4 * n <= kMaxVertices, ErrorKind::BadParams, "needs 1 <= n <= 16");
  const int m = 2 * n;
  auto v = [](int i) { return i - 1; };
  auto u = [m](int i) { return m + ((i - 1) % m); };
  std::vector<Arc> edges;
  std::vector<Arc> m0;
  for (int i = 1; i <= n; ++i) {
    for (int a : {2 * i - 1, 2 * i})
      for (int b : {2 * i - 1, 2 * i}) edges.emplace_back(v(a), u(b));
    edges.emplace_back(v(2 * i - 1), v(2 * i));
    edges.emplace_back(u(2 * i), u(2 * i + 1));
    m0.emplace_back(v(2 * i - 1), v(2 * i));
    m0.emplace_back(u(2 * i), u(2 * i + 1));
  }
  return {UndirectedGraph::from_edges(2 * m, edges), PerfectMatching::undirected(std::move(m0))};
}

enum class ConstructionKind { Cycle, Complete, CompleteBipartite, Blowup, DisjointMatching };

struct ConstructParams {
  int n = 0;
  int k = 0;
  int l = 0;
};

struct Construction {
  std::variant<Digraph, UndirectedGraph> graph;
  std::optional<PerfectMatching> matching;
};

inline Construction construct(ConstructionKind kind, const ConstructParams& p) {
  switch (kind) {
    case ConstructionKind::Cycle: return {directed_cycle(p.n), std::nullopt};
    case ConstructionKind::Complete: return {complete_graph(p.n), std::nullopt};
    case ConstructionKind::CompleteBipartite: return {complete_bipartite(p.n), std::nullopt};
    case ConstructionKind::Blowup: return {blowup(p.k, p.l), std::nullopt};
    case ConstructionKind::DisjointMatching: {
      auto h = disjoint_matching_graph(p.n);
      return {std::move(h.graph), std::move(h.matching)};
    }
  }
  fail(ErrorKind::BadParams, "unknown construction");
}

// ---------------------------------------------------------------------------
// Directed <-> bipartite reductions

/// G' with {u_l, v_r} an edge iff (u, v) is an arc or u == v; its perfect
/// matchings are the permutations on G.
inline BipartiteGraph permutation_model(const Digraph& g) {
  std::vector<std::uint64_t> rows(g.rows().begin(), g.rows().end());
  for (int i = 0; i < g.n(); ++i) rows[static_cast<std::size_t>(i)] |= bit(i);
  return BipartiteGraph::from_rows(g.n(), std::move(rows));
}

/// Biadjacency equal to the adjacency matrix; perfect matchings are the
/// derangements on G.
inline BipartiteGraph derangement_model(const Digraph& g) {
  return BipartiteGraph::from_rows(g.n(), std::vector<std::uint64_t>(g.rows().begin(), g.rows().end()));
}

/// One side assignment over a perfect matching: `left_mask` holds the left
/// vertices; `graph` keeps only the crossing edges, with rows indexed by
/// position in `left` and columns by position in `right`.
struct Bipartition {
  std::uint64_t left_mask = 0;
  std::vector<int> left;
  std::vector<int> right;
  BipartiteGraph graph;

  bool contains(const PerfectMatching& m) const {
    for (auto [a, b] : m.edges)
      if (((left_mask >> a) & 1U) == ((left_mask >> b) & 1U)) return false;
    return true;
  }
};

/// All 2^(n-1) bipartitions that split every edge of the perfect matching
/// `m`, with vertex 0 always on the left.
inline std::vector<Bipartition> bipartitions_over_matching(const UndirectedGraph& g, const PerfectMatching& m) {
  require(is_perfect_matching(g, m), ErrorKind::NotPerfectMatching, "matching is not a perfect matching of the graph");
  require(g.n() <= 24, ErrorKind::TooLarge, "bipartition enumeration limited to 24 vertices");
  std::vector<Arc> rest;
  for (auto [a, b] : m.edges)
    if (a != 0) rest.emplace_back(a, b);
  const int pairs = static_cast<int>(rest.size());
  std::vector<Bipartition> out;
  out.reserve(std::size_t{1} << pairs);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs); ++mask) {
    std::uint64_t left = bit(0);
    for (int e = 0; e < pairs; ++e) left |= bit(((mask >> e) & 1U) ? rest[static_cast<std::size_t>(e)].second
                                                                     : rest[static_cast<std::size_t>(e)].first);
    std::vector<int> lv;
    std::vector<int> rv;
    for (int x = 0; x < g.n(); ++x) ((left >> x) & 1U ? lv : rv).push_back(x);
    std::vector<std::uint64_t> rows(lv.size(), 0);
    for (std::size_t i = 0; i < lv.size(); ++i)
      for (std::size_t j = 0; j < rv.size(); ++j)
        if (g.has_edge(lv[i], rv[j])) rows[i] |= bit(static_cast<int>(j));
    auto graph = BipartiteGraph::from_rows(static_cast<int>(rv.size()), std::move(rows));
    out.push_back({left, std::move(lv), std::move(rv), std::move(graph)});
  }
  return out;
}

/// Adjacency rows as fixed-width hex, separated by ':'.
inline std::string adjacency_hex(const Digraph& g) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const int width = (g.n() + 3) / 4;
  std::string out;
  for (int i = 0; i < g.n(); ++i) {
    if (i) out += ':';
    for (int d = width - 1; d >= 0; --d) out += kDigits[(g.row(i) >> (4 * d)) & 0xF];
  }
  return out;
}

}  // namespace permatch
