// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "permatch/permatch.hpp"

using namespace permatch;

namespace {

// Wall-clock limits in seconds.
constexpr double kLimit1 = 10;
constexpr double kLimit2 = 60;
constexpr double kLimit3 = 120;
constexpr double kLimit4 = 60;
constexpr double kLimit5 = 60;
constexpr double kLimit6 = 120;
constexpr double kLimit7 = 120;
constexpr double kLimit8 = 60;
constexpr double kLimit9 = 60;
constexpr double kLimit10 = 60;
constexpr double kLimit11 = 300;
constexpr double kLimit12 = 120;

constexpr double kLogSlack = 1e-9;        // criterion 9
constexpr double kMeanRelTol = 0.20;      // criterion 11
constexpr int kMcVertices = 20;
constexpr std::uint64_t kMcSamples = 200;

struct Outcome {
  bool ok = true;
  std::string note;
  void fail(const std::string& why) {
    if (ok) note = why;
    ok = false;
  }
};

int failures = 0;

void criterion(int id, const char* title, double limit, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.ok && secs > limit) o.fail("over time limit " + std::to_string(limit) + "s");
  if (!o.ok) ++failures;
  std::printf("criterion %2d %s [%.2fs] %s%s%s\n", id, o.ok ? "PASS" : "FAIL", secs, title, o.note.empty() ? "" : ": ",
              o.note.c_str());
  std::fflush(stdout);
}

IntMatrix random_matrix(std::mt19937_64& rng, int n, int max_entry) {
  IntMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.set(i, j, static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(max_entry + 1)));
  return m;
}

Digraph digraph_from_slots(int n, std::uint64_t s) {
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(n), 0);
  int slot = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) rows[static_cast<std::size_t>(i)] |= ((s >> slot++) & 1U) << j;
  return Digraph::from_rows(std::move(rows));
}

ExactRatio inverse_factorial_square_sum(int n) {
  ExactRatio s;
  for (int k = 0; k <= n; ++k) {
    const BigCount f = factorial(static_cast<unsigned>(k));
    s += ExactRatio(BigCount(1), f * f);
  }
  return s;
}

void c1(Outcome& o) {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 1000 && o.ok; ++t) {
    const int n = 1 + static_cast<int>(rng() % 8);
    auto m = random_matrix(rng, n, t % 3 == 0 ? 1 : 20);
    if (permanent_ryser(m) != oracle::permanent(m)) o.fail("mismatch at trial " + std::to_string(t));
  }
  o.note = o.ok ? "1000 matrices" : o.note;
}

void c2(Outcome& o) {
  int eq3 = 0;
  int eq4 = 0;
  for (int n : {3, 4}) {
    const std::uint64_t total = std::uint64_t{1} << (n * (n - 1));
    for (std::uint64_t s = 0; s < total; ++s) {
      const Digraph g = digraph_from_slots(n, s);
      const auto d = oracle::derangements(g);
      const auto p = oracle::permutations(g);
      if (2 * d > p) o.fail("2d > p at " + adjacency_hex(g));
      const bool eq = 2 * d == p;
      if (eq != is_directed_cycle(g)) o.fail("equality mismatch at " + adjacency_hex(g));
      if (BigCount(d) != count_derangements(g) || BigCount(p) != count_permutations(g))
        o.fail("count mismatch at " + adjacency_hex(g));
      (n == 3 ? eq3 : eq4) += eq;
    }
  }
  if (eq3 != 2) o.fail("n=3 equality count " + std::to_string(eq3));
  if (eq4 != 6) o.fail("n=4 equality count " + std::to_string(eq4));
  for (int n : {6, 7})
    for (std::uint64_t i = 0; i < 10000 && o.ok; ++i) {
      const double q = unit_draw(derive_seed(2, i), 0);
      const auto r = check_theorem3(sample_digraph({ModelKind::Digraph, n, q, 0}, derive_seed(n, i)));
      if (!r.holds) o.fail(*r.witness);
    }
  if (o.ok) o.note = "equality cases n=3: 2, n=4: 6; 20000 sampled digraphs";
}

void c3(Outcome& o) {
  std::uint64_t equality = 0;
  std::uint64_t checked = 0;
  for (std::uint64_t s = 0; s < (1U << 16) && o.ok; ++s) {
    std::vector<std::uint64_t> rows(4);
    for (int i = 0; i < 4; ++i) rows[static_cast<std::size_t>(i)] = (s >> (4 * i)) & 0xF;
    for (const auto& r : check_theorem1(BipartiteGraph::from_rows(4, rows))) {
      ++checked;
      if (!r.holds) o.fail(*r.witness);
      equality += r.equality;
    }
  }
  if (o.ok)
    o.note = "65536 graphs, " + std::to_string(checked) + " matchings, " + std::to_string(equality) + " equality instances";
}

void c4(Outcome& o) {
  for (int n = 1; n <= 5; ++n) {
    const Digraph k = complete_bipartite(n).digraph();
    const ExactRatio pd(BigCount(oracle::permutations(k)), BigCount(oracle::derangements(k)));
    if (pd != inverse_factorial_square_sum(n)) o.fail("K_{n,n} p/d differs at n=" + std::to_string(n));
    if (complete_bipartite_pd(n) != pd) o.fail("library closed form differs at n=" + std::to_string(n));
  }
  std::mt19937_64 rng(404);
  int done = 0;
  while (done < 10000 && o.ok) {
    const int n = 2 + static_cast<int>(rng() % 4);
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(n));
    const double q = 0.5 + 0.5 * std::uniform_real_distribution<double>()(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::uniform_real_distribution<double>()(rng) < q) rows[static_cast<std::size_t>(i)] |= bit(j);
    const auto b = BipartiteGraph::from_rows(n, rows);
    if (b.is_complete()) continue;
    const Digraph g = b.to_undirected().digraph();
    const BigCount d = count_derangements(g);
    if (d == 0) continue;
    ++done;
    if (!(ExactRatio(count_permutations(g), d) > inverse_factorial_square_sum(n))) o.fail("not strict at " + adjacency_hex(g));
  }
  if (o.ok) o.note = "K_{n,n} exact for n<=5; 10000 proper subgraphs strictly above";
}

void c5(Outcome& o) {
  int cases = 0;
  for (int k = 1; k <= 3; ++k)
    for (int l = 2; l <= 4; ++l) {
      if (k * l > 12) continue;
      ++cases;
      const auto r = check_blowup_formulas(k, l);
      if (!r.holds) o.fail(*r.witness);
      if (r.detail.find("enumerated_d=") == std::string::npos) o.fail("no enumeration for k=" + std::to_string(k));
      if (k * l <= 9) {
        const Digraph g = blowup(k, l);
        if (BigCount(oracle::derangements(g)) != count_derangements(g) ||
            BigCount(oracle::permutations(g)) != count_permutations(g))
          o.fail("brute force differs at k=" + std::to_string(k) + " l=" + std::to_string(l));
      }
    }
  if (o.ok) o.note = std::to_string(cases) + " blowups";
}

void c6(Outcome& o) {
  std::uint64_t graphs = 0;
  for (int n = 1; n <= 4; ++n) {
    const std::uint64_t total = std::uint64_t{1} << (n * (n - 1));
    for (std::uint64_t s = 0; s < total; ++s) {
      const auto r = check_injection(digraph_from_slots(n, s));
      ++graphs;
      if (!r.holds) o.fail(*r.witness);
    }
  }
  for (std::uint64_t i = 0; i < 500 && o.ok; ++i) {
    const int n = 5 + static_cast<int>(i % 3);
    const auto r = check_injection(sample_digraph({ModelKind::Digraph, n, 0.5, 0}, derive_seed(6, i)));
    ++graphs;
    if (!r.holds) o.fail(*r.witness);
  }
  // Hamilton cycle 0..7 with chords v1v4, v1v5, v3v6, v7v2.
  const Digraph fig = Digraph::from_arcs(8, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 0},
                                             {1, 4}, {1, 5}, {3, 6}, {7, 2}});
  const Permutation cyc = Permutation::parse("1,2,3,4,5,6,7,0");
  if (apply_injection(fig, cyc, 0).str() != "1,4,2,3,5,6,7,0") o.fail("worked example does not use v1v4");
  if (o.ok) o.note = std::to_string(graphs) + " graphs; worked example uses v1v4";
}

void c7(Outcome& o) {
  for (int n = 2; n <= 4; ++n) {
    const auto h = disjoint_matching_graph(n);
    const auto ms = enumerate_perfect_matchings_general(h.graph);
    if (ms.size() != (std::size_t{1} << n) + 1) o.fail("thm2h matching count at n=" + std::to_string(n));
    if (oracle::matchings(h.graph).size() != ms.size()) o.fail("brute force matching count at n=" + std::to_string(n));
    for (const auto& m : ms)
      if (!(m.edges == h.matching.edges) && intersects(m, h.matching)) o.fail("M0 meets another matching");
  }
  std::mt19937_64 rng(707);
  int done = 0;
  while (done < 10000 && o.ok) {
    const int v = 2 * (1 + static_cast<int>(rng() % 6));
    const double q = 0.3 + 0.7 * std::uniform_real_distribution<double>()(rng);
    std::vector<Arc> e;
    for (int a = 0; a < v; ++a)
      for (int b = a + 1; b < v; ++b)
        if (std::uniform_real_distribution<double>()(rng) < q) e.emplace_back(a, b);
    const auto g = UndirectedGraph::from_edges(v, e);
    const auto ms = enumerate_perfect_matchings_general(g);
    if (ms.empty()) continue;
    ++done;
    const auto& m = ms[rng() % ms.size()];
    const auto t = matching_intersection_tally(g, m);
    if (t.misses > (BigCount(1) << (v / 2 - 1)) * t.hits) o.fail("misses > 2^(n-1) hits on " + adjacency_hex(g.digraph()));
  }
  if (o.ok) o.note = "construction n=2..4; 10000 random graphs";
}

void c8(Outcome& o) {
  std::mt19937_64 rng(808);
  for (int t = 0; t < 200 && o.ok; ++t) {
    const int n = 1 + static_cast<int>(rng() % 7);
    auto m = random_matrix(rng, n, 4);
    const BigCount per = oracle::permanent(m);
    for (int k = 0; k <= n; ++k) {
      const auto s = subpermanent_sides(m, k);
      if (s.lhs != s.rhs || s.lhs != binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)) * per)
        o.fail("identity fails at trial " + std::to_string(t) + " k=" + std::to_string(k));
    }
  }
  if (o.ok) o.note = "200 matrices, all k";
}

void c9(Outcome& o) {
  std::mt19937_64 rng(909);
  for (int t = 0; t < 100 && o.ok; ++t) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    // Union of k disjoint permutation matrices: a row- and column-shuffled circulant.
    auto rp = oracle::iota_vec(n);
    auto cp = oracle::iota_vec(n);
    auto shifts = oracle::iota_vec(n);
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    std::shuffle(shifts.begin(), shifts.end(), rng);
    IntMatrix m(n);
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < k; ++d)
        m.set(rp[static_cast<std::size_t>(i)], cp[static_cast<std::size_t>((i + shifts[static_cast<std::size_t>(d)]) % n)], 1);
    for (int i = 0; i < n; ++i) {
      std::int64_t row = 0;
      std::int64_t col = 0;
      for (int j = 0; j < n; ++j) row += m(i, j), col += m(j, i);
      if (row != k || col != k) o.fail("matrix not regular");
    }
    const double lp = log_big(permanent_ryser(m));
    const auto b = log_bounds(n, k);
    if (lp < b.log_lower - kLogSlack || lp > b.log_upper + kLogSlack)
      o.fail("bounds fail at n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  if (o.ok) o.note = "100 regular matrices";
}

void c10(Outcome& o) {
  for (int m = 4; m <= 8; ++m) {
    BigCount sum_d = 0;
    BigCount sum_p = 0;
    std::uint64_t sets = 0;
    for (std::uint64_t s = 0; s < (1U << 12); ++s) {
      if (std::popcount(s) != m) continue;
      const Digraph g = digraph_from_slots(4, s);
      sum_d += oracle::derangements(g);
      sum_p += oracle::permutations(g);
      ++sets;
    }
    const auto e = expected_counts_dgnm(4, m);
    if (e.derangements != ExactRatio(sum_d, BigCount(sets))) o.fail("E[X] differs at m=" + std::to_string(m));
    if (e.permutations != ExactRatio(sum_p, BigCount(sets))) o.fail("E[Y] differs at m=" + std::to_string(m));
  }
  if (expected_counts_dgnm(4, 6).derangements != ExactRatio(3, 11)) o.fail("E[X] at m=6 is not 3/11");
  if (o.ok) o.note = "m=4..8 exact; E[X](4,6)=3/11";
}

void c11(Outcome& o) {
  std::ostringstream note;
  for (double q : {0.5, 0.8}) {
    const auto s = mc_dp_ratio({ModelKind::Digraph, kMcVertices, q, 0}, kMcSamples, 1100, default_threads());
    const double rel = std::abs(s.mean - s.target) / s.target;
    note << "q=" << q << " mean=" << s.mean << " target=" << s.target << " rel=" << rel << "; ";
    if (rel > kMeanRelTol) o.fail(note.str() + "mean outside tolerance");
    if (s.above_half != 0 || s.max_ratio > ExactRatio(1, 2)) o.fail(note.str() + "sample above 1/2");
  }
  if (o.ok) o.note = note.str();
}

void c12(Outcome& o) {
  std::uint64_t checked = 0;
  for (int n = 2; n <= 5; ++n) {
    const std::uint64_t total = std::uint64_t{1} << (n * (n - 1));
    for (std::uint64_t s = 0; s < total && o.ok; ++s) {
      const Digraph g = digraph_from_slots(n, s);
      if (g.arc_count() < n || is_directed_cycle(g)) continue;
      const auto c = hamilton_census(g);
      if (c.ham_count == 0) continue;
      ++checked;
      if (!c.corollary_ok) o.fail("no vertex on 2*ham cycles at " + adjacency_hex(g));
      if (n <= 4) {
        const auto through = oracle::cycles_through(g);
        if (BigCount(oracle::hamilton_cycles(g)) != c.ham_count) o.fail("hamilton count differs at " + adjacency_hex(g));
        for (int v = 0; v < n; ++v)
          if (BigCount(through[static_cast<std::size_t>(v)]) != c.cycles_through[static_cast<std::size_t>(v)])
            o.fail("cycle count differs at " + adjacency_hex(g));
      }
    }
  }
  if (o.ok) o.note = std::to_string(checked) + " hamiltonian non-cycle digraphs";
}

}  // namespace

int main() {
  criterion(1, "Ryser equals brute force", kLimit1, c1);
  criterion(2, "2d <= p, equality exactly on cycles", kLimit2, c2);
  criterion(3, "bipartite matching intersection", kLimit3, c3);
  criterion(4, "bipartite p/d bound", kLimit4, c4);
  criterion(5, "blowup closed forms", kLimit5, c5);
  criterion(6, "injection", kLimit6, c6);
  criterion(7, "general matching intersection", kLimit7, c7);
  criterion(8, "subpermanent identity", kLimit8, c8);
  criterion(9, "regular permanent bounds", kLimit9, c9);
  criterion(10, "expected counts in D(n,m)", kLimit10, c10);
  criterion(11, "random digraph ratio", kLimit11, c11);
  criterion(12, "cycle census corollary", kLimit12, c12);
  std::printf("%s: %d failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
