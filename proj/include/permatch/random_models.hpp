#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <variant>
#include <vector>

#include "permatch/counting.hpp"
#include "permatch/exact.hpp"
#include "permatch/graph.hpp"
#include "permatch/parallel.hpp"

namespace permatch {

// ---------------------------------------------------------------------------
// Counter-based randomness: draw c of stream `key` is mix64(key + (c+1)*phi),
// i.e. the c-th output of a SplitMix64 generator seeded with `key`. Draws are
// addressed by index, so samples never depend on scheduling.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t counter_draw(std::uint64_t key, std::uint64_t counter) {
  return mix64(key + (counter + 1) * kGolden);
}

/// Seed of the index-th independent sample derived from a master seed.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

inline double unit_draw(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>(counter_draw(key, counter) >> 11) * 0x1.0p-53;
}

/// Sequential view over one counter stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  std::uint64_t next() { return counter_draw(key_, counter_++); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform in [0, bound), unbiased (rejection on the low product word).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------

enum class ModelKind { Graph, Digraph, DigraphFixedArcs };

struct ModelSpec {
  ModelKind kind = ModelKind::Digraph;
  int n = 1;
  double q = 0.5;  ///< edge/arc probability (Graph, Digraph)
  int m = 0;       ///< arc count (DigraphFixedArcs)

  /// Edge density the (d/p) ratio should approach: q, or m / n(n-1).
  double density() const {
    if (kind == ModelKind::DigraphFixedArcs) return n > 1 ? static_cast<double>(m) / (n * (n - 1.0)) : 0.0;
    return q;
  }
};

inline void validate(const ModelSpec& s) {
  require(s.n >= 1 && s.n <= 30, ErrorKind::BadParams, "model needs 1 <= n <= 30");
  if (s.kind == ModelKind::DigraphFixedArcs)
    require(s.m >= 0 && s.m <= s.n * (s.n - 1), ErrorKind::BadParams, "arc count must lie in [0, n(n-1)]");
  else
    require(s.q >= 0.0 && s.q <= 1.0, ErrorKind::BadParams, "probability must lie in [0, 1]");
}

using SampledGraph = std::variant<Digraph, UndirectedGraph>;

/// One draw per arc slot (i, j), counter i*n + j; undirected graphs draw only
/// for i < j. Fixed-arc digraphs take a uniform m-subset of the n(n-1) slots
/// by Floyd's algorithm.
inline SampledGraph sample(const ModelSpec& s, std::uint64_t seed) {
  validate(s);
  const int n = s.n;
  const std::uint64_t key = mix64(seed);
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(n), 0);
  switch (s.kind) {
    case ModelKind::Graph:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (unit_draw(key, static_cast<std::uint64_t>(i * n + j)) < s.q) {
            rows[static_cast<std::size_t>(i)] |= bit(j);
            rows[static_cast<std::size_t>(j)] |= bit(i);
          }
      return UndirectedGraph::from_symmetric(Digraph::from_rows(std::move(rows)));
    case ModelKind::Digraph:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && unit_draw(key, static_cast<std::uint64_t>(i * n + j)) < s.q) rows[static_cast<std::size_t>(i)] |= bit(j);
      return Digraph::from_rows(std::move(rows));
    case ModelKind::DigraphFixedArcs: {
      const auto slots = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1);
      CounterRng rng(key);
      std::unordered_set<std::uint64_t> chosen;
      for (std::uint64_t j = slots - static_cast<std::uint64_t>(s.m); j < slots; ++j) {
        std::uint64_t t = rng.below(j + 1);
        chosen.insert(chosen.count(t) ? j : t);
      }
      for (auto slot : chosen) {
        const int i = static_cast<int>(slot / static_cast<std::uint64_t>(n - 1));
        int j = static_cast<int>(slot % static_cast<std::uint64_t>(n - 1));
        if (j >= i) ++j;
        rows[static_cast<std::size_t>(i)] |= bit(j);
      }
      return Digraph::from_rows(std::move(rows));
    }
  }
  fail(ErrorKind::BadParams, "unknown model");
}

inline Digraph sample_digraph(const ModelSpec& s, std::uint64_t seed) {
  auto g = sample(s, seed);
  if (auto* u = std::get_if<UndirectedGraph>(&g)) return u->digraph();
  return std::get<Digraph>(g);
}

/// Subfactorial via Der(n) = (n-1)(Der(n-1) + Der(n-2)).
inline BigCount derangement_number(unsigned n) {
  BigCount prev = 1;  // Der(0)
  if (n == 0) return prev;
  BigCount cur = 0;   // Der(1)
  for (unsigned k = 2; k <= n; ++k) {
    BigCount next = (k - 1) * (cur + prev);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// Probability that a fixed t-arc digraph lies inside a uniform digraph with
/// exactly m arcs on n vertices: C(n(n-1) - t, m - t) / C(n(n-1), m).
inline ExactRatio inclusion_probability_f(int n, int m, int t) {
  require(n >= 1, ErrorKind::BadParams, "n must be positive");
  const long long slots = static_cast<long long>(n) * (n - 1);
  require(m >= 0 && m <= slots && t >= 0, ErrorKind::BadParams, "need 0 <= m <= n(n-1) and t >= 0");
  if (t > m) return {0};
  return {binomial(static_cast<std::uint64_t>(slots - t), static_cast<std::uint64_t>(m - t)),
          binomial(static_cast<std::uint64_t>(slots), static_cast<std::uint64_t>(m))};
}

struct ExpectedCounts {
  ExactRatio derangements;   ///< E[X] = f(n) Der(n)
  ExactRatio permutations;   ///< E[Y] = sum_k f(n-k) C(n,k) Der(n-k)
};

inline ExpectedCounts expected_counts_dgnm(int n, int m) {
  require(n >= 1 && n <= 30, ErrorKind::BadParams, "expectations need 1 <= n <= 30");
  require(m >= 0 && m <= n * (n - 1), ErrorKind::BadParams, "arc count must lie in [0, n(n-1)]");
  ExpectedCounts out;
  out.derangements = inclusion_probability_f(n, m, n) * ExactRatio(derangement_number(static_cast<unsigned>(n)));
  for (int k = 0; k <= n; ++k)
    out.permutations += inclusion_probability_f(n, m, n - k) *
                        ExactRatio(binomial(static_cast<unsigned>(n), static_cast<unsigned>(k)) *
                                   derangement_number(static_cast<unsigned>(n - k)));
  return out;
}

struct McSummary {
  ModelSpec model;
  std::uint64_t samples = 0;
  double mean = 0;
  double stddev = 0;  ///< sample standard deviation (n-1 denominator)
  double target = 0;  ///< exp(-1/density)
  ExactRatio max_ratio;
  std::uint64_t above_half = 0;  ///< samples with ratio > 1/2; always 0 unless the bound fails
  std::vector<ExactRatio> ratios;  ///< kept only when requested
};

/// Exact (d/p) of `samples` independent draws; sample i uses derive_seed(seed, i).
inline McSummary mc_dp_ratio(const ModelSpec& s, std::uint64_t samples, std::uint64_t seed, unsigned threads = 1,
                             bool keep_ratios = false) {
  validate(s);
  require(s.n <= 24, ErrorKind::BadParams, "Monte Carlo limited to n <= 24");
  require(samples >= 1, ErrorKind::BadParams, "need at least one sample");
  std::vector<ExactRatio> ratios(static_cast<std::size_t>(samples));
  parallel_for(ratios.size(), threads,
               [&](std::size_t i) { ratios[i] = dp_ratio(sample_digraph(s, derive_seed(seed, i))); });

  McSummary out;
  out.model = s;
  out.samples = samples;
  const ExactRatio half(1, 2);
  double sum = 0;
  for (const auto& r : ratios) {
    sum += r.to_double();
    if (r > out.max_ratio) out.max_ratio = r;
    if (r > half) ++out.above_half;
  }
  out.mean = sum / static_cast<double>(samples);
  if (samples > 1) {
    double ss = 0;
    for (const auto& r : ratios) ss += (r.to_double() - out.mean) * (r.to_double() - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(samples - 1));
  }
  const double d = s.density();
  out.target = d > 0 ? std::exp(-1.0 / d) : 0.0;
  if (keep_ratios) out.ratios = std::move(ratios);
  return out;
}

}  // namespace permatch
