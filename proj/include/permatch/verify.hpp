#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "permatch/counting.hpp"
#include "permatch/graph.hpp"
#include "permatch/injection.hpp"
#include "permatch/parallel.hpp"
#include "permatch/permanent.hpp"
#include "permatch/random_models.hpp"

namespace permatch {

/// Outcome of one theorem check on one instance. `witness` is set exactly
/// when the check failed.
struct TheoremReport {
  std::string theorem;
  std::string instance;
  bool holds = true;
  bool equality = false;
  std::string detail;
  std::optional<std::string> witness;

  TheoremReport() = default;
  TheoremReport(std::string t, std::string inst) : theorem(std::move(t)), instance(std::move(inst)) {}

  void violate(std::string why) {
    holds = false;
    if (!witness) witness = std::move(why);
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"theorem", theorem}, {"instance", instance}, {"holds", holds},
                        {"equality", equality}, {"detail", detail}};
    j["witness"] = witness ? nlohmann::json(*witness) : nlohmann::json(nullptr);
    return j;
  }
};

inline std::string matching_str(const PerfectMatching& m) {
  std::string s;
  for (auto [a, b] : m.edges) {
    if (!s.empty()) s += ' ';
    s += std::to_string(a) + "-" + std::to_string(b);
  }
  return s;
}

/// Every perfect matching M of b meets at least half of all perfect matchings.
inline std::vector<TheoremReport> check_theorem1(const BipartiteGraph& b) {
  require(b.n_left() <= 6 && b.n_right() <= 6, ErrorKind::TooLarge, "theorem 1 check limited to parts <= 6");
  std::vector<TheoremReport> out;
  const auto all = enumerate_perfect_matchings(b);
  for (const auto& m : all) {
    std::size_t hits = 0;
    for (const auto& o : all) hits += intersects(m, o) ? 1 : 0;
    const std::size_t misses = all.size() - hits;
    TheoremReport r{"1", "M = " + matching_str(m)};
    r.equality = hits == misses;
    r.detail = "hits=" + std::to_string(hits) + " misses=" + std::to_string(misses);
    if (hits < misses) r.violate("matching " + matching_str(m) + " meets fewer than half: " + r.detail);
    out.push_back(std::move(r));
  }
  return out;
}

/// On 2n vertices every perfect matching M has misses <= 2^(n-1) hits, and
/// every matching disjoint from M is carried by a bipartition splitting M.
inline std::vector<TheoremReport> check_theorem2(const UndirectedGraph& g) {
  require(g.n() <= 12, ErrorKind::TooLarge, "theorem 2 check limited to 12 vertices");
  std::vector<TheoremReport> out;
  const auto all = enumerate_perfect_matchings_general(g);
  if (all.empty()) return out;
  const BigCount scale = BigCount(1) << (g.n() / 2 - 1);
  for (const auto& m : all) {
    const auto parts = bipartitions_over_matching(g, m);
    std::size_t hits = 0;
    TheoremReport r{"2", "M = " + matching_str(m)};
    for (const auto& o : all) {
      if (intersects(m, o)) {
        ++hits;
        continue;
      }
      bool carried = std::any_of(parts.begin(), parts.end(), [&](const Bipartition& p) { return p.contains(o); });
      if (!carried) r.violate("disjoint matching " + matching_str(o) + " lies in no bipartition over M");
    }
    const std::size_t misses = all.size() - hits;
    const BigCount bound = scale * hits;
    r.equality = BigCount(misses) == bound;
    r.detail = "hits=" + std::to_string(hits) + " misses=" + std::to_string(misses) + " bound=" + bound.str();
    if (BigCount(misses) > bound) r.violate("misses exceed 2^(n-1) * hits: " + r.detail);
    out.push_back(std::move(r));
  }
  return out;
}

/// 2d <= p, with equality exactly for directed cycles.
inline TheoremReport check_theorem3(const Digraph& g, unsigned threads = 1) {
  require(g.n() <= 24, ErrorKind::TooLarge, "theorem 3 check limited to n <= 24");
  const BigCount d = count_derangements(g, threads);
  const BigCount p = count_permutations(g, threads);
  TheoremReport r{"3", adjacency_hex(g)};
  r.equality = 2 * d == p;
  const bool cycle = is_directed_cycle(g);
  r.detail = "d=" + d.str() + " p=" + p.str() + " ratio=" + ExactRatio(d, p).str();
  if (2 * d > p) r.violate("2d > p: " + r.detail);
  else if (r.equality != cycle)
    r.violate(std::string(cycle ? "directed cycle without equality: " : "equality on a non-cycle: ") + r.detail);
  return r;
}

/// p >= d * sum_{k<=n} (k!)^-2 for bipartite graphs, equality iff complete.
inline TheoremReport check_theorem6(const BipartiteGraph& b) {
  require(b.n_left() <= 6 && b.n_right() <= 6, ErrorKind::TooLarge, "theorem 6 check limited to parts <= 6");
  TheoremReport r{"6", "bipartite " + std::to_string(b.n_left()) + "x" + std::to_string(b.n_right())};
  if (!b.balanced()) {
    r.detail = "no derangements (unbalanced)";
    return r;
  }
  const Digraph g = b.to_undirected().digraph();
  const BigCount d = count_derangements(g);
  const BigCount p = count_permutations(g);
  if (d == 0) {
    r.detail = "no derangements";
    return r;
  }
  const ExactRatio rhs = ExactRatio(d) * complete_bipartite_pd(b.n_left());
  const ExactRatio lhs(p);
  r.equality = lhs == rhs;
  r.detail = "d=" + d.str() + " p=" + p.str() + " p/d=" + ExactRatio(p, d).str() + " bound=" +
             complete_bipartite_pd(b.n_left()).str();
  if (lhs < rhs) r.violate("p below d * sum k!^-2: " + r.detail);
  else if (r.equality != b.is_complete())
    r.violate(std::string(r.equality ? "equality on an incomplete graph: " : "complete graph without equality: ") +
              r.detail);
  return r;
}

/// For every v, F_v is injective, lands on non-derangements and inverts
/// exactly; for non-cycles the identity misses the image at the special vertex.
inline TheoremReport check_injection(const Digraph& g) {
  require(g.n() <= 7, ErrorKind::TooLarge, "injection check limited to n <= 7");
  TheoremReport r{"injection", adjacency_hex(g)};
  const auto ders = enumerate_permutations(g, true);
  const bool cycle = is_directed_cycle(g);
  for (int v = 0; v < g.n() && r.holds; ++v) {
    std::vector<Permutation> images;
    images.reserve(ders.size());
    for (const auto& d : ders) {
      Permutation img = apply_injection(g, d, v);
      if (img.is_derangement()) r.violate("image of " + d.str() + " at v=" + std::to_string(v) + " is a derangement");
      if (!img.is_on(g)) r.violate("image of " + d.str() + " leaves the graph");
      try {
        if (!(invert_injection(g, img, v) == d))
          r.violate("inverse of " + img.str() + " at v=" + std::to_string(v) + " is not " + d.str());
      } catch (const Error& e) {
        r.violate("inverting " + img.str() + " at v=" + std::to_string(v) + " failed: " + e.what());
      }
      images.push_back(std::move(img));
    }
    std::sort(images.begin(), images.end());
    if (std::adjacent_find(images.begin(), images.end()) != images.end())
      r.violate("F_" + std::to_string(v) + " is not injective");
  }
  std::string special = "-";
  if (!cycle && r.holds) {
    const int v = choose_special_vertex(g);
    special = std::to_string(v);
    for (const auto& d : ders)
      if (apply_injection(g, d, v).is_identity()) r.violate("identity is the image of " + d.str() + " at v=" + special);
  }
  const BigCount p = count_permutations(g);
  const BigCount need = 2 * BigCount(ders.size()) + (cycle ? 0 : 1);
  if (!cycle && p < need) r.violate("p < 2d + 1");
  r.equality = cycle;
  r.detail = "d=" + std::to_string(ders.size()) + " p=" + p.str() + " special=" + special;
  return r;
}

/// d, p and (d/p) of D_{k,l} against their closed forms; enumeration adds a
/// second route when kl <= 12.
inline TheoremReport check_blowup_formulas(int k, int l) {
  require(k >= 1 && l >= 2, ErrorKind::BadParams, "blowup needs k >= 1 and l >= 2");
  require(k * l <= 30, ErrorKind::TooLarge, "blowup formula check limited to kl <= 30");
  TheoremReport r{"blowup", "D_{" + std::to_string(k) + "," + std::to_string(l) + "}"};
  const Digraph g = blowup(k, l);
  const BigCount kf = factorial(static_cast<unsigned>(k));
  const BigCount d_formula = boost::multiprecision::pow(kf, static_cast<unsigned>(l));
  BigCount p_formula = 0;
  ExactRatio inv_sum;
  for (int i = 0; i <= k; ++i) {
    p_formula += boost::multiprecision::pow(binomial(static_cast<unsigned>(k), static_cast<unsigned>(i)) *
                                                factorial(static_cast<unsigned>(k - i)),
                                            static_cast<unsigned>(l));
    inv_sum += ExactRatio(1, boost::multiprecision::pow(factorial(static_cast<unsigned>(i)), static_cast<unsigned>(l)));
  }
  const BigCount d = count_derangements(g);
  const BigCount p = count_permutations(g);
  const ExactRatio ratio(d, p);
  r.detail = "d=" + d.str() + " p=" + p.str() + " ratio=" + ratio.str();
  if (d != d_formula) r.violate("derangements " + d.str() + " != (k!)^l = " + d_formula.str());
  if (p != p_formula) r.violate("permutations " + p.str() + " != formula " + p_formula.str());
  if (!(ratio == ExactRatio(1) / inv_sum)) r.violate("ratio " + ratio.str() + " != 1/sum (i!)^-l");
  if (k * l <= 12) {
    std::uint64_t de = 0;
    std::uint64_t pe = 0;
    for_each_permutation(g, false, [&](const std::vector<int>& s) {
      ++pe;
      bool moved_all = true;
      for (std::size_t v = 0; v < s.size(); ++v) moved_all = moved_all && s[v] != static_cast<int>(v);
      de += moved_all ? 1 : 0;
      return true;
    });
    r.detail += " enumerated_d=" + std::to_string(de) + " enumerated_p=" + std::to_string(pe);
    if (BigCount(de) != d_formula || BigCount(pe) != p_formula) r.violate("enumeration disagrees with the formulas");
  }
  return r;
}

/// C(n,k) per(M) against the subpermanent expansion, one report per k.
inline std::vector<TheoremReport> check_subpermanent(const IntMatrix& m) {
  std::vector<TheoremReport> out;
  for (int k = 0; k <= m.n(); ++k) {
    auto sides = subpermanent_sides(m, k);
    TheoremReport r{"subpermanent", "k=" + std::to_string(k)};
    r.equality = sides.lhs == sides.rhs;
    r.detail = "lhs=" + sides.lhs.str() + " rhs=" + sides.rhs.str();
    if (!r.equality) r.violate("sides differ: " + r.detail);
    out.push_back(std::move(r));
  }
  return out;
}

/// Some vertex lies on at least twice as many cycles as there are Hamilton cycles.
inline TheoremReport check_corollary(const Digraph& g) {
  TheoremReport r{"corollary", adjacency_hex(g)};
  const auto c = hamilton_census(g);
  BigCount best = 0;
  for (const auto& t : c.cycles_through) best = std::max(best, t);
  r.detail = "hamilton=" + c.ham_count.str() + " max_cycles_through=" + best.str();
  r.equality = best == 2 * c.ham_count;
  if (!c.corollary_ok) r.violate("no vertex reaches 2 * hamilton: " + r.detail);
  return r;
}

// ---------------------------------------------------------------------------
// Scans

enum class ScanFamily { AllDigraphs, AllBipartite, SampledUndirected };

struct ScanOptions {
  ScanFamily family = ScanFamily::AllDigraphs;
  int n = 3;                  ///< vertex count, or part size for AllBipartite
  std::uint64_t samples = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// One scanned graph. Ratios above 1/2 are flagged as counterexamples.
struct SurveyRecord {
  int n = 0;
  int arcs = 0;
  std::string adjacency_hex;
  BigCount derangements;
  BigCount permutations;
  ExactRatio ratio;
  bool flagged = false;

  std::string ratio_float() const { return ratio.decimal(12); }

  static std::string csv_header() { return "n,arcs,adjacency_hex,derangements,permutations,ratio_exact,ratio_float"; }
  std::string csv() const {
    return std::to_string(n) + "," + std::to_string(arcs) + "," + adjacency_hex + "," + derangements.str() + "," +
           permutations.str() + "," + ratio.str() + "," + ratio_float();
  }
  nlohmann::json to_json() const {
    return {{"n", n}, {"arcs", arcs}, {"adjacency_hex", adjacency_hex}, {"derangements", derangements.str()},
            {"permutations", permutations.str()}, {"ratio_exact", ratio.str()}, {"ratio_float", ratio_float()}};
  }
};

struct ScanSummary {
  ScanFamily family = ScanFamily::AllDigraphs;
  int n = 0;
  std::uint64_t graphs = 0;
  ExactRatio max_ratio;
  std::string argmax_adjacency;
  std::uint64_t argmax_count = 0;          ///< graphs attaining max_ratio
  std::uint64_t counterexamples = 0;       ///< graphs failing some theorem check
  std::uint64_t equality_instances = 0;    ///< graphs with an equality case in a checked theorem
  std::uint64_t conjecture_exceedances = 0;
  std::optional<ExactRatio> conjecture_reference;
  std::optional<ExactRatio> min_intersecting_fraction;  ///< worst hits/total over checked matchings
  std::vector<std::string> witnesses;      ///< first few counterexample descriptions

  nlohmann::json to_json() const {
    static const char* names[] = {"digraphs", "bipartite", "sampled-undirected"};
    nlohmann::json j = {{"family", names[static_cast<int>(family)]},
                        {"n", n},
                        {"graphs", graphs},
                        {"max_ratio", max_ratio.str()},
                        {"max_ratio_float", max_ratio.decimal(12)},
                        {"argmax_adjacency", argmax_adjacency},
                        {"argmax_count", argmax_count},
                        {"counterexamples", counterexamples},
                        {"equality_instances", equality_instances},
                        {"conjecture_exceedances", conjecture_exceedances},
                        {"witnesses", witnesses}};
    j["conjecture_reference"] = conjecture_reference ? nlohmann::json(conjecture_reference->str()) : nlohmann::json(nullptr);
    j["min_intersecting_fraction"] =
        min_intersecting_fraction ? nlohmann::json(min_intersecting_fraction->str()) : nlohmann::json(nullptr);
    return j;
  }
};

namespace detail {

struct ScanItem {
  SurveyRecord record;
  std::vector<std::string> failures;
  bool equality = false;
  std::optional<ExactRatio> worst_fraction;
};

inline SurveyRecord make_record(const Digraph& g, unsigned threads) {
  SurveyRecord rec;
  rec.n = g.n();
  rec.arcs = g.arc_count();
  rec.adjacency_hex = adjacency_hex(g);
  rec.derangements = count_derangements(g, threads);
  rec.permutations = count_permutations(g, threads);
  rec.ratio = ExactRatio(rec.derangements, rec.permutations);
  rec.flagged = rec.ratio > ExactRatio(1, 2);
  return rec;
}

inline void absorb(ScanItem& item, const TheoremReport& r) {
  if (!r.holds) item.failures.push_back("theorem " + r.theorem + " on " + r.instance + ": " + *r.witness);
  item.equality = item.equality || r.equality;
}

inline void absorb_fraction(ScanItem& item, const std::vector<TheoremReport>& reports, std::size_t total) {
  for (const auto& r : reports) {
    auto pos = r.detail.find("hits=");
    std::size_t hits = std::stoull(r.detail.substr(pos + 5));
    ExactRatio f(static_cast<long long>(hits), static_cast<long long>(total));
    if (!item.worst_fraction || f < *item.worst_fraction) item.worst_fraction = f;
  }
}

inline ScanItem scan_digraph(const Digraph& g) {
  ScanItem item{make_record(g, 1), {}, false, std::nullopt};
  const TheoremReport t3 = check_theorem3(g);
  absorb(item, t3);
  if (g.n() <= 7) absorb(item, check_injection(g));
  item.equality = t3.equality;
  if (item.record.flagged) item.failures.push_back("ratio above 1/2 on " + item.record.adjacency_hex);
  return item;
}

inline ScanItem scan_bipartite(const BipartiteGraph& b) {
  ScanItem item{make_record(b.to_undirected().digraph(), 1), {}, false, std::nullopt};
  const auto t1 = check_theorem1(b);
  bool eq = false;
  for (const auto& r : t1) {
    if (!r.holds) item.failures.push_back("theorem 1 on " + item.record.adjacency_hex + ": " + *r.witness);
    eq = eq || r.equality;
  }
  if (!t1.empty()) absorb_fraction(item, t1, t1.size());
  const TheoremReport t6 = check_theorem6(b);
  if (!t6.holds) item.failures.push_back("theorem 6 on " + item.record.adjacency_hex + ": " + *t6.witness);
  item.equality = eq || t6.equality;
  if (item.record.flagged) item.failures.push_back("ratio above 1/2 on " + item.record.adjacency_hex);
  return item;
}

inline ScanItem scan_undirected(const UndirectedGraph& g) {
  ScanItem item{make_record(g.digraph(), 1), {}, false, std::nullopt};
  absorb(item, check_theorem3(g.digraph()));
  if (g.n() % 2 == 0 && g.n() <= 12) {
    // Pairwise matching comparisons are quadratic; very dense samples skip theorem 2.
    if (count_perfect_matchings_general(g) <= 2000) {
      const auto t2 = check_theorem2(g);
      for (const auto& r : t2) absorb(item, r);
      if (!t2.empty()) absorb_fraction(item, t2, t2.size());
    }
  }
  if (item.record.flagged) item.failures.push_back("ratio above 1/2 on " + item.record.adjacency_hex);
  return item;
}

}  // namespace detail

/// Runs the family's checkers over every graph in scope and streams one
/// SurveyRecord per graph to `sink`, in index order.
inline ScanSummary scan(const ScanOptions& opt, const std::function<void(const SurveyRecord&)>& sink) {
  ScanSummary sum;
  sum.family = opt.family;
  sum.n = opt.n;
  std::uint64_t total = 0;
  std::function<detail::ScanItem(std::uint64_t)> make;
  switch (opt.family) {
    case ScanFamily::AllDigraphs: {
      require(opt.n >= 1 && opt.n <= 4, ErrorKind::TooLarge, "exhaustive digraph scan limited to n <= 4");
      const int n = opt.n;
      total = std::uint64_t{1} << (n * (n - 1));
      make = [n](std::uint64_t idx) {
        std::vector<std::uint64_t> rows(static_cast<std::size_t>(n), 0);
        int slot = 0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (i != j) {
              if ((idx >> slot) & 1U) rows[static_cast<std::size_t>(i)] |= bit(j);
              ++slot;
            }
        return detail::scan_digraph(Digraph::from_rows(std::move(rows)));
      };
      break;
    }
    case ScanFamily::AllBipartite: {
      require(opt.n >= 1 && opt.n <= 4, ErrorKind::TooLarge, "exhaustive bipartite scan limited to parts <= 4");
      const int n = opt.n;
      total = std::uint64_t{1} << (n * n);
      make = [n](std::uint64_t idx) {
        std::vector<std::uint64_t> rows(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = (idx >> (i * n)) & low_mask(n);
        return detail::scan_bipartite(BipartiteGraph::from_rows(n, std::move(rows)));
      };
      break;
    }
    case ScanFamily::SampledUndirected: {
      require(opt.n >= 1 && opt.n <= 24, ErrorKind::TooLarge, "sampled scan limited to n <= 24");
      total = opt.samples;
      const int n = opt.n;
      const std::uint64_t seed = opt.seed;
      make = [n, seed](std::uint64_t idx) {
        const std::uint64_t s = derive_seed(seed, idx);
        // Edge density varies per sample so the survey covers sparse and dense graphs.
        const double q = 0.1 + 0.9 * unit_draw(s, 0xFFFFFFFFULL);
        auto g = std::get<UndirectedGraph>(sample({ModelKind::Graph, n, q, 0}, s));
        return detail::scan_undirected(g);
      };
      sum.conjecture_reference = dp_ratio(n % 2 == 0 ? complete_bipartite(n / 2).digraph() : complete_graph(n).digraph());
      break;
    }
  }

  constexpr std::uint64_t kBlock = 4096;
  std::vector<detail::ScanItem> block;
  for (std::uint64_t start = 0; start < total; start += kBlock) {
    const std::uint64_t len = std::min(kBlock, total - start);
    block.assign(static_cast<std::size_t>(len), {});
    parallel_for(static_cast<std::size_t>(len), opt.threads, [&](std::size_t i) { block[i] = make(start + i); });
    for (auto& item : block) {
      ++sum.graphs;
      const auto& rec = item.record;
      if (sum.graphs == 1 || rec.ratio > sum.max_ratio) {
        sum.max_ratio = rec.ratio;
        sum.argmax_adjacency = rec.adjacency_hex;
        sum.argmax_count = 1;
      } else if (rec.ratio == sum.max_ratio) {
        ++sum.argmax_count;
      }
      if (!item.failures.empty()) {
        ++sum.counterexamples;
        for (auto& f : item.failures)
          if (sum.witnesses.size() < 10) sum.witnesses.push_back(f);
      }
      if (item.equality) ++sum.equality_instances;
      if (sum.conjecture_reference && rec.ratio > *sum.conjecture_reference) ++sum.conjecture_exceedances;
      if (item.worst_fraction && (!sum.min_intersecting_fraction || *item.worst_fraction < *sum.min_intersecting_fraction))
        sum.min_intersecting_fraction = item.worst_fraction;
      if (sink) sink(rec);
    }
  }
  return sum;
}

}  // namespace permatch
