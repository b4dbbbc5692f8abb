#include <random>
#include <sstream>

#include "permatch/verify.hpp"
#include "test_support.hpp"

using namespace permatch;

namespace {

bool all_hold(const std::vector<TheoremReport>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const TheoremReport& r) { return r.holds && !r.witness; });
}

UndirectedGraph even_cycle(int n) {
  std::vector<Arc> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return UndirectedGraph::from_edges(n, e);
}

}  // namespace

TEST(Report, WitnessIffViolated) {
  TheoremReport r("3", "x");
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(r.witness);
  r.violate("first");
  r.violate("second");
  EXPECT_FALSE(r.holds);
  EXPECT_EQ(*r.witness, "first");
  EXPECT_TRUE(r.to_json()["witness"].is_string());
}

TEST(Theorem1, Examples) {
  auto c4 = BipartiteGraph::from_edges(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  auto r = check_theorem1(c4);
  ASSERT_EQ(r.size(), 2U);
  for (const auto& x : r) EXPECT_TRUE(x.holds && x.equality);
  auto k33 = check_theorem1(BipartiteGraph::complete(3, 3));
  ASSERT_EQ(k33.size(), 6U);
  for (const auto& x : k33) {
    EXPECT_TRUE(x.holds);
    EXPECT_FALSE(x.equality);
    EXPECT_EQ(x.detail, "hits=4 misses=2");
  }
  EXPECT_TRUE(check_theorem1(BipartiteGraph::from_edges(2, 2, {{0, 0}, {1, 0}})).empty());
  EXPECT_ERROR_KIND(check_theorem1(BipartiteGraph::complete(7, 7)), ErrorKind::TooLarge);
}

TEST(Theorem2, Examples) {
  auto [h, m0] = disjoint_matching_graph(2);
  auto rs = check_theorem2(h);
  ASSERT_EQ(rs.size(), 5U);
  EXPECT_TRUE(all_hold(rs));
  auto it = std::find_if(rs.begin(), rs.end(), [&](const TheoremReport& r) { return r.instance == "M = " + matching_str(m0); });
  ASSERT_NE(it, rs.end());
  EXPECT_EQ(it->detail, "hits=1 misses=4 bound=8");

  auto k4 = check_theorem2(complete_graph(4));
  ASSERT_EQ(k4.size(), 3U);
  for (const auto& r : k4) {
    EXPECT_EQ(r.detail, "hits=1 misses=2 bound=2");
    EXPECT_TRUE(r.equality);
  }
  auto c6 = check_theorem2(even_cycle(6));
  ASSERT_EQ(c6.size(), 2U);
  for (const auto& r : c6) {
    EXPECT_EQ(r.detail, "hits=1 misses=1 bound=4");
    EXPECT_FALSE(r.equality);
  }
  EXPECT_ERROR_KIND(check_theorem2(complete_graph(14)), ErrorKind::TooLarge);
}

TEST(Theorem2, ConstructionFamily) {
  for (int n = 2; n <= 3; ++n) {
    auto rs = check_theorem2(disjoint_matching_graph(n).graph);
    EXPECT_EQ(rs.size(), (1U << n) + 1);
    EXPECT_TRUE(all_hold(rs));
  }
}

TEST(Theorem3, Examples) {
  auto c5 = check_theorem3(directed_cycle(5));
  EXPECT_TRUE(c5.holds);
  EXPECT_TRUE(c5.equality);
  auto d25 = check_theorem3(blowup(2, 5));
  EXPECT_TRUE(d25.holds);
  EXPECT_FALSE(d25.equality);
  EXPECT_NE(d25.detail.find("ratio=32/65"), std::string::npos);
  auto k3 = check_theorem3(complete_graph(3).digraph());
  EXPECT_TRUE(k3.holds);
  EXPECT_FALSE(k3.equality);
  EXPECT_ERROR_KIND(check_theorem3(Digraph::from_arcs(25, {})), ErrorKind::TooLarge);
}

TEST(Theorem6, Examples) {
  auto k22 = check_theorem6(BipartiteGraph::complete(2, 2));
  EXPECT_TRUE(k22.holds);
  EXPECT_TRUE(k22.equality);
  EXPECT_NE(k22.detail.find("p/d=9/4"), std::string::npos);
  auto k33 = BipartiteGraph::complete(3, 3);
  std::vector<Arc> e = k33.edges();
  e.erase(e.begin());
  auto minus = check_theorem6(BipartiteGraph::from_edges(3, 3, e));
  EXPECT_TRUE(minus.holds);
  EXPECT_FALSE(minus.equality);
  auto unbalanced = check_theorem6(BipartiteGraph::complete(2, 3));
  EXPECT_TRUE(unbalanced.holds);
  EXPECT_NE(unbalanced.detail.find("no derangements"), std::string::npos);
  auto none = check_theorem6(BipartiteGraph::from_edges(2, 2, {{0, 0}, {1, 0}}));
  EXPECT_TRUE(none.holds);
  EXPECT_EQ(none.detail, "no derangements");
}

TEST(Injection, Examples) {
  auto c = check_injection(directed_cycle(6));
  EXPECT_TRUE(c.holds);
  EXPECT_NE(c.detail.find("special=-"), std::string::npos);
  auto k4 = check_injection(complete_graph(4).digraph());
  EXPECT_TRUE(k4.holds);
  EXPECT_NE(k4.detail.find("d=9"), std::string::npos);
  std::mt19937_64 rng(51);
  for (int t = 0; t < 30; ++t) {
    auto g = sample_digraph({ModelKind::Digraph, 6, 0.5, 0}, rng());
    EXPECT_TRUE(check_injection(g).holds) << adjacency_hex(g);
  }
  EXPECT_ERROR_KIND(check_injection(Digraph::from_arcs(8, {})), ErrorKind::TooLarge);
}

TEST(Blowup, Formulas) {
  auto k1 = check_blowup_formulas(1, 7);
  EXPECT_TRUE(k1.holds);
  EXPECT_NE(k1.detail.find("d=1 p=2 ratio=1/2"), std::string::npos);
  auto k25 = check_blowup_formulas(2, 5);
  EXPECT_TRUE(k25.holds);
  EXPECT_NE(k25.detail.find("d=32 p=65"), std::string::npos);
  auto k32 = check_blowup_formulas(3, 2);
  EXPECT_TRUE(k32.holds);
  // 1 / (1 + 1 + 1/4 + 1/36) = 36/82 = 18/41
  EXPECT_NE(k32.detail.find("ratio=18/41"), std::string::npos);
  EXPECT_NE(k32.detail.find("enumerated_d=36"), std::string::npos);
  EXPECT_TRUE(check_blowup_formulas(5, 6).holds);  // permanent-only range
  EXPECT_ERROR_KIND(check_blowup_formulas(0, 3), ErrorKind::BadParams);
  EXPECT_ERROR_KIND(check_blowup_formulas(2, 1), ErrorKind::BadParams);
  EXPECT_ERROR_KIND(check_blowup_formulas(4, 8), ErrorKind::TooLarge);
}

TEST(Subpermanent, ReportsPerK) {
  auto rs = check_subpermanent(IntMatrix::ones(4));
  ASSERT_EQ(rs.size(), 5U);
  EXPECT_TRUE(all_hold(rs));
}

TEST(Corollary, Reports) {
  EXPECT_TRUE(check_corollary(directed_cycle(5)).holds);
  auto t = check_corollary(blowup(2, 3));
  EXPECT_TRUE(t.holds);
  EXPECT_TRUE(t.equality);
}

TEST(Scan, DigraphsThree) {
  std::vector<SurveyRecord> recs;
  auto s = scan({ScanFamily::AllDigraphs, 3, 0, 0, 1}, [&](const SurveyRecord& r) { recs.push_back(r); });
  EXPECT_EQ(s.graphs, 64U);
  EXPECT_EQ(recs.size(), 64U);
  EXPECT_EQ(s.max_ratio, ExactRatio(1, 2));
  EXPECT_EQ(s.argmax_count, 2U);
  EXPECT_EQ(s.counterexamples, 0U);
  EXPECT_EQ(s.equality_instances, 2U);
  for (const auto& r : recs) {
    EXPECT_FALSE(r.flagged);
    EXPECT_EQ(r.ratio_float(), r.ratio.decimal(12));
    EXPECT_EQ(r.ratio, ExactRatio(r.derangements, r.permutations));
  }
}

TEST(Scan, BipartiteThree) {
  auto s = scan({ScanFamily::AllBipartite, 3, 0, 0, 2}, nullptr);
  EXPECT_EQ(s.graphs, 512U);
  EXPECT_EQ(s.counterexamples, 0U);
  ASSERT_TRUE(s.min_intersecting_fraction);
  EXPECT_EQ(*s.min_intersecting_fraction, ExactRatio(1, 2));
}

TEST(Scan, SampledIsDeterministic) {
  auto run = [](unsigned threads) {
    std::ostringstream out;
    auto s = scan({ScanFamily::SampledUndirected, 8, 300, 17, threads}, [&](const SurveyRecord& r) { out << r.csv() << '\n'; });
    return std::pair(out.str(), s.to_json().dump());
  };
  auto a = run(1);
  auto b = run(3);
  EXPECT_EQ(a, b);
  auto s = scan({ScanFamily::SampledUndirected, 8, 300, 17, 1}, nullptr);
  EXPECT_EQ(s.counterexamples, 0U);
  ASSERT_TRUE(s.conjecture_reference);
  EXPECT_EQ(*s.conjecture_reference, dp_ratio(complete_bipartite(4).digraph()));
  EXPECT_LE(s.max_ratio, ExactRatio(1, 2));
}

TEST(Scan, Limits) {
  EXPECT_ERROR_KIND(scan({ScanFamily::AllDigraphs, 5, 0, 0, 1}, nullptr), ErrorKind::TooLarge);
  EXPECT_ERROR_KIND(scan({ScanFamily::AllBipartite, 5, 0, 0, 1}, nullptr), ErrorKind::TooLarge);
  EXPECT_ERROR_KIND(scan({ScanFamily::SampledUndirected, 25, 1, 0, 1}, nullptr), ErrorKind::TooLarge);
}

TEST(SurveyRecordFormat, CsvAndJson) {
  SurveyRecord r;
  r.n = 3;
  r.arcs = 3;
  r.adjacency_hex = "2:4:1";
  r.derangements = 1;
  r.permutations = 2;
  r.ratio = ExactRatio(1, 2);
  EXPECT_EQ(SurveyRecord::csv_header(), "n,arcs,adjacency_hex,derangements,permutations,ratio_exact,ratio_float");
  EXPECT_EQ(r.csv(), "3,3,2:4:1,1,2,1/2,0.500000000000");
  EXPECT_EQ(r.to_json()["ratio_float"], "0.500000000000");
}
