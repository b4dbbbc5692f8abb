#include <cmath>

#include "permatch/counting.hpp"
#include "permatch/random_models.hpp"
#include "test_support.hpp"

using namespace permatch;

TEST(Rng, SplitMixReferenceValues) {
  // First outputs of SplitMix64 seeded with 0.
  EXPECT_EQ(counter_draw(0, 0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(counter_draw(0, 1), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(counter_draw(0, 2), 0x06C45D188009454FULL);
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  CounterRng rng(42);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[static_cast<std::size_t>(rng.below(7))];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(Sample, TrivialProbabilities) {
  for (int n : {1, 2, 7, 30}) {
    auto full = std::get<Digraph>(sample({ModelKind::Digraph, n, 1.0, 0}, 5));
    EXPECT_EQ(full.arc_count(), n * (n - 1));
    auto none = std::get<Digraph>(sample({ModelKind::Digraph, n, 0.0, 0}, 5));
    EXPECT_EQ(none.arc_count(), 0);
    auto fixed = std::get<Digraph>(sample({ModelKind::DigraphFixedArcs, n, 0, n * (n - 1)}, 5));
    EXPECT_EQ(fixed, full);
    auto ug = std::get<UndirectedGraph>(sample({ModelKind::Graph, n, 1.0, 0}, 5));
    EXPECT_EQ(ug.digraph(), complete_graph(n).digraph());
  }
}

TEST(Sample, Validation) {
  EXPECT_ERROR_KIND(sample({ModelKind::Digraph, 0, 0.5, 0}, 1), ErrorKind::BadParams);
  EXPECT_ERROR_KIND(sample({ModelKind::Digraph, 31, 0.5, 0}, 1), ErrorKind::BadParams);
  EXPECT_ERROR_KIND(sample({ModelKind::Graph, 5, 1.5, 0}, 1), ErrorKind::BadParams);
  EXPECT_ERROR_KIND(sample({ModelKind::DigraphFixedArcs, 4, 0, 13}, 1), ErrorKind::BadParams);
  EXPECT_ERROR_KIND(sample({ModelKind::DigraphFixedArcs, 4, 0, -1}, 1), ErrorKind::BadParams);
}

TEST(Sample, InvariantsAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int n = 1 + static_cast<int>(seed % 20);
    auto d = std::get<Digraph>(sample({ModelKind::Digraph, n, 0.3, 0}, seed));
    for (int v = 0; v < n; ++v) EXPECT_FALSE(d.has_arc(v, v));
    EXPECT_EQ(d, std::get<Digraph>(sample({ModelKind::Digraph, n, 0.3, 0}, seed)));
    auto u = std::get<UndirectedGraph>(sample({ModelKind::Graph, n, 0.5, 0}, seed));
    EXPECT_TRUE(u.digraph().is_symmetric());
    const int m = static_cast<int>(seed % static_cast<std::uint64_t>(n * (n - 1) + 1));
    auto f = std::get<Digraph>(sample({ModelKind::DigraphFixedArcs, n, 0, m}, seed));
    EXPECT_EQ(f.arc_count(), m);
  }
}

TEST(Sample, EdgeFrequencyMatchesQ) {
  long long arcs = 0;
  const int n = 12;
  for (std::uint64_t seed = 0; seed < 500; ++seed) arcs += sample_digraph({ModelKind::Digraph, n, 0.3, 0}, seed).arc_count();
  const double freq = static_cast<double>(arcs) / (500.0 * n * (n - 1));
  EXPECT_NEAR(freq, 0.3, 0.01);
}

TEST(Sample, FixedArcSlotsAreUniform) {
  // Each of the 12 slots of a 4-vertex digraph should be chosen with probability m/12.
  std::vector<int> hits(16, 0);
  const int trials = 12000;
  for (int s = 0; s < trials; ++s) {
    auto g = sample_digraph({ModelKind::DigraphFixedArcs, 4, 0, 3}, static_cast<std::uint64_t>(s));
    for (auto [a, b] : g.arcs()) ++hits[static_cast<std::size_t>(a * 4 + b)];
  }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b) EXPECT_NEAR(hits[static_cast<std::size_t>(a * 4 + b)], trials * 3 / 12, 150);
}

TEST(Subfactorial, Values) {
  EXPECT_EQ(derangement_number(0), 1);
  EXPECT_EQ(derangement_number(1), 0);
  EXPECT_EQ(derangement_number(2), 1);
  EXPECT_EQ(derangement_number(4), 9);
  EXPECT_EQ(derangement_number(10), 1334961);
  for (int n = 2; n <= 7; ++n)
    EXPECT_EQ(derangement_number(static_cast<unsigned>(n)), count_derangements(complete_graph(n).digraph()));
}

TEST(InclusionProbability, Values) {
  EXPECT_EQ(inclusion_probability_f(4, 6, 0), ExactRatio(1));
  EXPECT_EQ(inclusion_probability_f(4, 6, 4), ExactRatio(1, 33));
  EXPECT_EQ(inclusion_probability_f(4, 6, 6), ExactRatio(1, 924));
  EXPECT_EQ(inclusion_probability_f(4, 6, 7), ExactRatio(0));
  EXPECT_ERROR_KIND(inclusion_probability_f(4, 13, 1), ErrorKind::BadParams);
  EXPECT_ERROR_KIND(inclusion_probability_f(4, 3, -1), ErrorKind::BadParams);
}

TEST(InclusionProbability, MatchesArcSetCount) {
  // A fixed 4-arc digraph lies inside C(8,2) of the C(12,6) six-arc digraphs.
  const std::uint64_t fixed = 0b1111;
  int inside = 0;
  int total = 0;
  for (std::uint64_t s = 0; s < (1U << 12); ++s) {
    if (std::popcount(s) != 6) continue;
    ++total;
    inside += (s & fixed) == fixed;
  }
  EXPECT_EQ(ExactRatio(inside, total), inclusion_probability_f(4, 6, 4));
}

TEST(Expectations, Examples) {
  EXPECT_EQ(expected_counts_dgnm(4, 6).derangements, ExactRatio(3, 11));
  for (int n = 2; n <= 7; ++n) {
    auto full = expected_counts_dgnm(n, n * (n - 1));
    EXPECT_EQ(full.derangements, ExactRatio(derangement_number(static_cast<unsigned>(n))));
    EXPECT_EQ(full.permutations, ExactRatio(factorial(static_cast<unsigned>(n))));
    EXPECT_EQ(expected_counts_dgnm(n, n - 1).derangements, ExactRatio(0));
    EXPECT_EQ(expected_counts_dgnm(n, 0).permutations, ExactRatio(1));
  }
  EXPECT_ERROR_KIND(expected_counts_dgnm(4, 13), ErrorKind::BadParams);
}

TEST(Expectations, ExhaustiveAverageForFourVertices) {
  for (int m = 0; m <= 12; ++m) {
    BigCount sum_d = 0;
    BigCount sum_p = 0;
    long long sets = 0;
    for (std::uint64_t s = 0; s < (1U << 12); ++s) {
      if (std::popcount(s) != m) continue;
      std::vector<std::uint64_t> rows(4, 0);
      int slot = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if (i != j) rows[static_cast<std::size_t>(i)] |= ((s >> slot++) & 1U) << j;
      auto g = Digraph::from_rows(rows);
      sum_d += count_derangements(g);
      sum_p += count_permutations(g);
      ++sets;
    }
    auto e = expected_counts_dgnm(4, m);
    EXPECT_EQ(e.derangements, ExactRatio(sum_d, BigCount(sets))) << "m=" << m;
    EXPECT_EQ(e.permutations, ExactRatio(sum_p, BigCount(sets))) << "m=" << m;
  }
}

TEST(MonteCarlo, TrivialModels) {
  auto full = mc_dp_ratio({ModelKind::Digraph, 6, 1.0, 0}, 5, 3);
  const double want = dp_ratio(complete_graph(6).digraph()).to_double();
  EXPECT_DOUBLE_EQ(full.mean, want);
  EXPECT_NEAR(full.stddev, 0.0, 1e-15);
  auto empty = mc_dp_ratio({ModelKind::Graph, 6, 0.0, 0}, 5, 3);
  EXPECT_EQ(empty.mean, 0.0);
  EXPECT_EQ(empty.target, 0.0);
  EXPECT_ERROR_KIND(mc_dp_ratio({ModelKind::Digraph, 25, 0.5, 0}, 1, 0), ErrorKind::BadParams);
  EXPECT_ERROR_KIND(mc_dp_ratio({ModelKind::Digraph, 5, 0.5, 0}, 0, 0), ErrorKind::BadParams);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const ModelSpec spec{ModelKind::Digraph, 10, 0.5, 0};
  auto a = mc_dp_ratio(spec, 40, 99, 1, true);
  auto b = mc_dp_ratio(spec, 40, 99, 3, true);
  EXPECT_EQ(a.ratios, b.ratios);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stddev, b.stddev);
  EXPECT_EQ(a.above_half, 0U);
  EXPECT_LE(a.max_ratio, ExactRatio(1, 2));
  EXPECT_NEAR(a.target, std::exp(-2.0), 1e-15);
  auto c = mc_dp_ratio(spec, 40, 100, 1, true);
  EXPECT_NE(a.ratios, c.ratios);
}
