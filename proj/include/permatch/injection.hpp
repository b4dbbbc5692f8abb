#pragma once

// Injection from derangements on a digraph to permutations with at least one
// fixed point. Cycles avoiding the special vertex v are kept. The cycle C
// through v is read as a Hamilton cycle (v_0 = v, v_1, ..., v_{r-1}) of the
// subgraph induced on its vertices and replaced by either
//   (a) all fixed points, when C has no forward chord, or
//   (b) the shortened cycle C_st plus the fixed points L_st, where (v_s, v_t)
//       is the first minimal forward chord.
// A chord (v_i, v_j) skips the positions L_ij strictly between i and j along
// C; it is forward when L_ij avoids position 0. Forward chords are ordered by
// strict inclusion of their L sets.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "permatch/counting.hpp"
#include "permatch/exact.hpp"
#include "permatch/graph.hpp"

namespace permatch {

struct CycleDecomposition {
  std::vector<std::vector<int>> cycles;  ///< each starts at its minimum vertex; sorted by that minimum
  std::vector<int> fixed;                ///< increasing
};

inline CycleDecomposition cycle_decomposition(const Digraph& g, const Permutation& p) {
  require(p.size() == g.n(), ErrorKind::NotOnGraph, "permutation size differs from vertex count");
  require(p.is_on(g), ErrorKind::NotOnGraph, "some moved vertex does not follow an arc");
  CycleDecomposition out;
  std::uint64_t seen = 0;
  for (int v = 0; v < p.size(); ++v) {
    if ((seen >> v) & 1U) continue;
    if (p[v] == v) {
      out.fixed.push_back(v);
      seen |= bit(v);
      continue;
    }
    std::vector<int> c;
    for (int x = v; ((seen >> x) & 1U) == 0; x = p[x]) {
      c.push_back(x);
      seen |= bit(x);
    }
    out.cycles.push_back(std::move(c));
  }
  return out;
}

/// A chord (v_i, v_j) of a cycle (v_0, ..., v_{r-1}), positions i and j.
struct ChordRecord {
  int i = 0;
  int j = 0;
  int from = 0;                         ///< v_i
  int to = 0;                           ///< v_j
  std::uint64_t leftover_positions = 0; ///< positions strictly between i and j walking forward
  std::vector<int> leftover;            ///< L_ij, in cycle order
  std::vector<int> completed;           ///< C_ij, listed from v_0

  friend bool operator==(const ChordRecord&, const ChordRecord&) = default;
};

namespace detail {

inline bool is_subset_strict(std::uint64_t a, std::uint64_t b) { return a != b && (a & ~b) == 0; }

/// Chords of `cycle` among arcs of g between cycle vertices, in (i, j) order.
/// Both forward and non-forward chords are returned; `forward_only` filters.
inline std::vector<ChordRecord> chords_of(const Digraph& g, std::span<const int> cycle, bool forward_only) {
  const int r = static_cast<int>(cycle.size());
  std::vector<int> pos(static_cast<std::size_t>(g.n()), -1);
  std::uint64_t members = 0;
  for (int k = 0; k < r; ++k) {
    pos[static_cast<std::size_t>(cycle[static_cast<std::size_t>(k)])] = k;
    members |= bit(cycle[static_cast<std::size_t>(k)]);
  }
  std::vector<ChordRecord> out;
  for (int i = 0; i < r; ++i) {
    const int from = cycle[static_cast<std::size_t>(i)];
    std::vector<ChordRecord> here;
    for (std::uint64_t nb = g.row(from) & members; nb != 0; nb &= nb - 1) {
      const int to = std::countr_zero(nb);
      const int j = pos[static_cast<std::size_t>(to)];
      if (j == (i + 1) % r) continue;  // an arc of the cycle itself
      ChordRecord c;
      c.i = i;
      c.j = j;
      c.from = from;
      c.to = to;
      for (int k = (i + 1) % r; k != j; k = (k + 1) % r) {
        c.leftover_positions |= bit(k);
        c.leftover.push_back(cycle[static_cast<std::size_t>(k)]);
      }
      if (forward_only && (c.leftover_positions & 1U) != 0) continue;
      // C_ij from v_0: forward chords keep v_0 .. v_i then v_j .. v_{r-1}.
      for (int k = 0; k < r; ++k)
        if (((c.leftover_positions >> k) & 1U) == 0) c.completed.push_back(cycle[static_cast<std::size_t>(k)]);
      here.push_back(std::move(c));
    }
    std::sort(here.begin(), here.end(), [](const ChordRecord& a, const ChordRecord& b) {
      return std::popcount(a.leftover_positions) < std::popcount(b.leftover_positions);
    });
    for (auto& c : here) out.push_back(std::move(c));
  }
  return out;
}

inline std::optional<ChordRecord> first_minimal_of(const std::vector<ChordRecord>& forward) {
  std::optional<ChordRecord> best;
  std::uint64_t starts = 0;
  for (const auto& c : forward) {
    bool minimal = std::none_of(forward.begin(), forward.end(), [&](const ChordRecord& o) {
      return is_subset_strict(o.leftover_positions, c.leftover_positions);
    });
    if (!minimal) continue;
    if ((starts >> c.i) & 1U)
      fail(ErrorKind::UniquenessViolation, "two minimal forward chords start at position " + std::to_string(c.i));
    starts |= bit(c.i);
    if (!best) best = c;
  }
  return best;
}

inline void require_hamilton(const Digraph& g, std::span<const int> cycle) {
  const int n = g.n();
  require(n >= 2 && static_cast<int>(cycle.size()) == n, ErrorKind::NotHamilton, "cycle must visit every vertex");
  std::uint64_t seen = 0;
  for (int x : cycle) {
    require(x >= 0 && x < n && ((seen >> x) & 1U) == 0, ErrorKind::NotHamilton, "cycle repeats or leaves the graph");
    seen |= bit(x);
  }
  for (int k = 0; k < n; ++k)
    require(g.has_arc(cycle[static_cast<std::size_t>(k)], cycle[static_cast<std::size_t>((k + 1) % n)]),
            ErrorKind::NotHamilton, "consecutive cycle vertices are not joined by an arc");
}

/// Hamilton cycles of the subgraph induced on `mask`, rooted at `start`,
/// stopping after `limit` have been found.
inline std::vector<std::vector<int>> hamilton_cycles_in(const Digraph& g, std::uint64_t mask, int start,
                                                        std::size_t limit) {
  std::vector<std::vector<int>> found;
  const int target = std::popcount(mask);
  if (target < 2 || ((mask >> start) & 1U) == 0) return found;
  std::vector<int> path{start};
  auto rec = [&](auto&& self, std::uint64_t used) -> void {
    if (found.size() >= limit) return;
    const int last = path.back();
    if (static_cast<int>(path.size()) == target) {
      if (g.has_arc(last, start)) found.push_back(path);
      return;
    }
    for (std::uint64_t nb = g.row(last) & mask & ~used; nb != 0; nb &= nb - 1) {
      const int w = std::countr_zero(nb);
      path.push_back(w);
      self(self, used | bit(w));
      path.pop_back();
      if (found.size() >= limit) return;
    }
  };
  rec(rec, bit(start));
  return found;
}

/// The cycle of p through v, listed from v.
inline std::vector<int> orbit_from(const Permutation& p, int v) {
  std::vector<int> c{v};
  for (int x = p[v]; x != v; x = p[x]) c.push_back(x);
  return c;
}

inline void close_cycle(std::vector<int>& sigma, std::span<const int> cycle) {
  const std::size_t r = cycle.size();
  for (std::size_t k = 0; k < r; ++k) sigma[static_cast<std::size_t>(cycle[k])] = cycle[(k + 1) % r];
}

}  // namespace detail

/// Forward chords of a Hamilton cycle of g given as (v_0, ..., v_{n-1}).
inline std::vector<ChordRecord> forward_chords(const Digraph& g, std::span<const int> cycle) {
  detail::require_hamilton(g, cycle);
  return detail::chords_of(g, cycle, true);
}

/// The minimal forward chord (under strict L-set inclusion) with the smallest
/// start position, or nothing when the cycle has no forward chord.
inline std::optional<ChordRecord> first_minimal_forward_chord(const Digraph& g, std::span<const int> cycle) {
  detail::require_hamilton(g, cycle);
  return detail::first_minimal_of(detail::chords_of(g, cycle, true));
}

/// F_v: maps a derangement on g to a permutation on g with at least one fixed point.
inline Permutation apply_injection(const Digraph& g, const Permutation& d, int v) {
  require(v >= 0 && v < g.n(), ErrorKind::OutOfRange, "special vertex out of range");
  require(d.size() == g.n() && d.is_on(g), ErrorKind::NotOnGraph, "permutation does not live on the graph");
  require(d.is_derangement(), ErrorKind::NotDerangement, "input has a fixed point");
  const std::vector<int> cycle = detail::orbit_from(d, v);
  std::vector<int> sigma = d.images();
  auto chord = detail::first_minimal_of(detail::chords_of(g, cycle, true));
  if (!chord) {
    for (int x : cycle) sigma[static_cast<std::size_t>(x)] = x;
  } else {
    for (int x : chord->leftover) sigma[static_cast<std::size_t>(x)] = x;
    detail::close_cycle(sigma, chord->completed);
  }
  return Permutation(std::move(sigma));
}

/// Recovers the derangement D with apply_injection(g, D, v) == p, or throws
/// NotInImage.
inline Permutation invert_injection(const Digraph& g, const Permutation& p, int v) {
  require(v >= 0 && v < g.n(), ErrorKind::OutOfRange, "special vertex out of range");
  require(p.size() == g.n() && p.is_on(g), ErrorKind::NotOnGraph, "permutation does not live on the graph");
  const std::uint64_t fixed = p.fixed_mask();
  if (fixed == 0) fail(ErrorKind::NotInImage, "images always have a fixed point");

  std::vector<int> sigma = p.images();
  std::vector<int> rebuilt;
  if (p[v] == v) {
    // Case (a): the fixed points are exactly the broken cycle's vertices and
    // that cycle is the unique Hamilton cycle of the subgraph they induce.
    auto cycles = detail::hamilton_cycles_in(g, fixed, v, 2);
    if (cycles.size() != 1) fail(ErrorKind::NotInImage, "fixed set does not carry a unique Hamilton cycle");
    rebuilt = std::move(cycles.front());
  } else {
    const std::vector<int> q = detail::orbit_from(p, v);
    std::size_t a = 0;
    std::uint64_t into = 0;
    for (; a < q.size(); ++a) {
      into = g.row(q[a]) & fixed;
      if (into != 0) break;
    }
    if (a == q.size()) fail(ErrorKind::NotInImage, "no cycle vertex has an arc into the fixed set");
    if (std::popcount(into) != 1) fail(ErrorKind::NotInImage, "v_s has several arcs into the fixed set");
    // Order the fixed set: each prefix has exactly one arc into the remainder.
    std::vector<int> order{std::countr_zero(into)};
    std::uint64_t placed = into;
    std::uint64_t rest = fixed & ~into;
    while (rest != 0) {
      int next = -1;
      int arcs = 0;
      for (int u : order)
        for (std::uint64_t nb = g.row(u) & rest; nb != 0; nb &= nb - 1) {
          ++arcs;
          next = std::countr_zero(nb);
        }
      if (arcs != 1) fail(ErrorKind::NotInImage, "fixed set order is not forced");
      order.push_back(next);
      placed |= bit(next);
      rest &= ~bit(next);
    }
    rebuilt.assign(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(a) + 1);
    rebuilt.insert(rebuilt.end(), order.begin(), order.end());
    rebuilt.insert(rebuilt.end(), q.begin() + static_cast<std::ptrdiff_t>(a) + 1, q.end());
  }

  for (std::size_t k = 0; k < rebuilt.size(); ++k)
    if (!g.has_arc(rebuilt[k], rebuilt[(k + 1) % rebuilt.size()]))
      fail(ErrorKind::NotInImage, "rebuilt cycle leaves the graph");
  detail::close_cycle(sigma, rebuilt);
  Permutation candidate(std::move(sigma));
  if (!(apply_injection(g, candidate, v) == p)) fail(ErrorKind::NotInImage, "no derangement maps to this permutation");
  return candidate;
}

/// A vertex v for which the identity is not an image of F_v.
inline int choose_special_vertex(const Digraph& g) {
  require(!is_directed_cycle(g), ErrorKind::IsDirectedCycle, "every vertex of a directed cycle maps its derangement to the identity");
  auto ham = detail::hamilton_cycles_in(g, low_mask(g.n()), 0, 2);
  if (ham.size() != 1) return 0;
  const auto& c = ham.front();
  std::vector<int> succ(static_cast<std::size_t>(g.n()));
  for (std::size_t k = 0; k < c.size(); ++k) succ[static_cast<std::size_t>(c[k])] = c[(k + 1) % c.size()];
  for (int u = 0; u < g.n(); ++u)
    if ((g.row(u) & ~bit(succ[static_cast<std::size_t>(u)])) != 0) return u;
  return 0;
}

struct HamiltonCensus {
  BigCount ham_count;
  std::vector<BigCount> cycles_through;  ///< simple directed cycles (length >= 2) through each vertex
  bool corollary_ok = false;
};

inline HamiltonCensus hamilton_census(const Digraph& g) {
  const int n = g.n();
  require(n <= 12, ErrorKind::TooLarge, "cycle census limited to n <= 12");
  std::vector<std::uint64_t> through(static_cast<std::size_t>(n), 0);
  std::uint64_t ham = 0;
  // Each cycle is rooted at its minimum vertex s and extended through larger vertices.
  for (int s = 0; s < n; ++s) {
    const std::uint64_t allowed = low_mask(n) & ~low_mask(s + 1);
    auto rec = [&](auto&& self, int last, std::uint64_t used) -> void {
      if (g.has_arc(last, s) && used != bit(s)) {
        for (std::uint64_t m = used; m != 0; m &= m - 1) ++through[static_cast<std::size_t>(std::countr_zero(m))];
        if (std::popcount(used) == n) ++ham;
      }
      for (std::uint64_t nb = g.row(last) & allowed & ~used; nb != 0; nb &= nb - 1) {
        const int w = std::countr_zero(nb);
        self(self, w, used | bit(w));
      }
    };
    rec(rec, s, bit(s));
  }
  HamiltonCensus out;
  out.ham_count = ham;
  bool some = false;
  for (auto t : through) {
    out.cycles_through.emplace_back(t);
    some = some || t >= 2 * ham;
  }
  out.corollary_ok = is_directed_cycle(g) || some;
  return out;
}

}  // namespace permatch
