#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "permatch/permatch.hpp"

namespace permatch::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2, kFile = 3 };

namespace detail {

using nlohmann::json;

struct Options {
  unsigned threads = default_threads();
  bool json = false;
  std::string input;
  std::string out;
  std::string what;
  std::string kind;
  std::string theorem;
  std::string family;
  std::string model;
  std::string perm;
  int n = 0;
  int k = 0;
  int l = 0;
  int m = 0;
  int vertex = 0;
  bool invert = false;
  double q = 0.5;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 0;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string ratio_text(const ExactRatio& r) { return r.str() + " (" + r.decimal(12) + ")"; }

inline json ratio_json(const ExactRatio& r) { return {{"exact", r.str()}, {"decimal", r.decimal(12)}}; }

template <class T>
const T& expect_kind(const AnyGraph& g, const char* need) {
  if (const T* p = std::get_if<T>(&g)) return *p;
  throw Usage(std::string("this operation needs a ") + need + " input");
}

inline void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

inline int cmd_count(const Options& o, std::ostream& out) {
  const AnyGraph g = read_graph_file(o.input);
  const Digraph d = as_digraph(g);
  json j = {{"input", o.input}, {"what", o.what}, {"n", d.n()}};
  std::string text;
  if (o.what == "derangements" || o.what == "permutations") {
    const BigCount c = o.what == "derangements" ? count_derangements(d, o.threads) : count_permutations(d, o.threads);
    j["value"] = c.str();
    text = c.str();
  } else if (o.what == "matchings") {
    BigCount c;
    if (const auto* b = std::get_if<BipartiteGraph>(&g)) c = count_perfect_matchings(*b, o.threads);
    else if (const auto* u = std::get_if<UndirectedGraph>(&g)) c = count_perfect_matchings_general(*u);
    else throw Usage("matchings needs an undirected or bipartite input");
    j["value"] = c.str();
    text = c.str();
  } else if (o.what == "ratio") {
    const ExactRatio r = dp_ratio(d, o.threads);
    j["value"] = ratio_json(r);
    text = ratio_text(r);
  } else {
    const auto counts = permutations_by_fixed_points(d);
    json arr = json::array();
    for (std::size_t m = 0; m < counts.size(); ++m) {
      arr.push_back(counts[m].str());
      text += std::to_string(m) + " " + counts[m].str() + (m + 1 < counts.size() ? "\n" : "");
    }
    j["value"] = arr;
  }
  if (o.json) emit(out, j);
  else out << text << '\n';
  return kOk;
}

inline int cmd_construct(const Options& o, std::ostream& out) {
  static const std::map<std::string, ConstructionKind> kinds = {
      {"cycle", ConstructionKind::Cycle},
      {"complete", ConstructionKind::Complete},
      {"complete-bipartite", ConstructionKind::CompleteBipartite},
      {"blowup", ConstructionKind::Blowup},
      {"thm2h", ConstructionKind::DisjointMatching}};
  const ConstructionKind kind = kinds.at(o.kind);
  if (kind == ConstructionKind::Blowup && (o.k == 0 || o.l == 0)) throw Usage("blowup needs --k and --l");
  if (kind != ConstructionKind::Blowup && o.n == 0) throw Usage("--kind " + o.kind + " needs --n");
  const Construction c = construct(kind, {o.n, o.k, o.l});
  const AnyGraph g = std::visit([](const auto& x) -> AnyGraph { return x; }, c.graph);
  const bool as_json = o.out.size() >= 5 && o.out.ends_with(".json");
  std::string text;
  if (as_json) {
    json doc = graph_to_json(g);
    if (c.matching) {
      json m = json::array();
      for (auto [a, b] : c.matching->edges) m.push_back({a, b});
      doc["matching"] = m;
    }
    text = doc.dump() + "\n";
  } else {
    text = serialize_graph(g);
    if (c.matching) text += "# M0: " + matching_str(*c.matching) + "\n";
  }
  write_text_file(o.out, text);
  const Digraph d = as_digraph(g);
  json j = {{"kind", o.kind}, {"out", o.out}, {"n", d.n()}, {"arcs", d.arc_count()}};
  if (o.json) emit(out, j);
  else out << "wrote " << o.out << " (" << o.kind << ", n=" << d.n() << ", arcs=" << d.arc_count() << ")\n";
  return kOk;
}

inline int cmd_inject(const Options& o, std::ostream& out) {
  const Digraph g = as_digraph(read_graph_file(o.input));
  const Permutation p = Permutation::parse(o.perm);
  require(p.size() == g.n(), ErrorKind::NotPermutation, "permutation size does not match the graph");
  require(o.vertex >= 0 && o.vertex < g.n(), ErrorKind::OutOfRange, "vertex out of range");
  json j = {{"vertex", o.vertex}, {"perm", p.str()}, {"invert", o.invert}};
  std::string text;
  if (!o.invert) {
    const Permutation img = apply_injection(g, p, o.vertex);
    j["result"] = img.str();
    j["in_image"] = true;
    text = img.str();
  } else {
    try {
      const Permutation pre = invert_injection(g, p, o.vertex);
      j["result"] = pre.str();
      j["in_image"] = true;
      text = pre.str();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotInImage) throw;
      j["result"] = nullptr;
      j["in_image"] = false;
      text = "not-in-image";
    }
  }
  if (o.json) emit(out, j);
  else out << text << '\n';
  return kOk;
}

inline IntMatrix matrix_of(const AnyGraph& g) {
  if (const auto* b = std::get_if<BipartiteGraph>(&g)) {
    if (!b->balanced()) throw Usage("subpermanent check needs a square biadjacency");
    return IntMatrix::from_bit_rows(b->rows());
  }
  return adjacency_matrix(as_digraph(g));
}

inline int cmd_verify(const Options& o, std::ostream& out) {
  std::vector<TheoremReport> reports;
  const std::string& t = o.theorem;
  if (t == "blowup") {
    if (o.k == 0 || o.l == 0) throw Usage("--theorem blowup needs --k and --l");
    reports.push_back(check_blowup_formulas(o.k, o.l));
  } else {
    if (o.input.empty()) throw Usage("--theorem " + t + " needs --input");
    const AnyGraph g = read_graph_file(o.input);
    if (t == "1") reports = check_theorem1(expect_kind<BipartiteGraph>(g, "bipartite"));
    else if (t == "2") reports = check_theorem2(expect_kind<UndirectedGraph>(g, "undirected"));
    else if (t == "3") reports.push_back(check_theorem3(as_digraph(g), o.threads));
    else if (t == "6") reports.push_back(check_theorem6(expect_kind<BipartiteGraph>(g, "bipartite")));
    else if (t == "injection") reports.push_back(check_injection(as_digraph(g)));
    else if (t == "subpermanent") reports = check_subpermanent(matrix_of(g));
    else reports.push_back(check_corollary(as_digraph(g)));
  }
  bool all = true;
  json arr = json::array();
  for (const auto& r : reports) {
    all = all && r.holds;
    arr.push_back(r.to_json());
  }
  if (o.json) {
    emit(out, {{"theorem", t}, {"holds", all}, {"reports", arr}});
  } else {
    if (reports.empty()) out << "theorem " << t << ": holds (vacuous, nothing to check)\n";
    for (const auto& r : reports) {
      out << "theorem " << r.theorem << " [" << r.instance << "]: ";
      if (r.holds) out << "holds (" << (r.equality ? "equality" : "strict") << "); " << r.detail << '\n';
      else out << "VIOLATED; " << *r.witness << '\n';
    }
  }
  return all ? kOk : kViolation;
}

inline int cmd_scan(const Options& o, std::ostream& out) {
  static const std::map<std::string, ScanFamily> families = {{"digraphs", ScanFamily::AllDigraphs},
                                                             {"bipartite", ScanFamily::AllBipartite},
                                                             {"sampled-undirected", ScanFamily::SampledUndirected}};
  ScanOptions so;
  so.family = families.at(o.family);
  so.n = o.n;
  so.samples = o.samples;
  so.seed = o.seed;
  so.threads = o.threads;
  std::ofstream file(o.out, std::ios::binary);
  if (!file) fail(ErrorKind::IoError, "cannot write '" + o.out + "'");
  const bool jsonl = o.out.ends_with(".jsonl");
  if (!jsonl) file << SurveyRecord::csv_header() << '\n';
  const ScanSummary s = scan(so, [&](const SurveyRecord& r) {
    if (jsonl) file << r.to_json().dump() << '\n';
    else file << r.csv() << '\n';
  });
  file.close();
  if (!file) fail(ErrorKind::IoError, "write failed for '" + o.out + "'");
  json j = s.to_json();
  j["seed"] = o.seed;
  j["out"] = o.out;
  emit(out, j);
  return s.counterexamples == 0 ? kOk : kViolation;
}

inline int cmd_mc(const Options& o, std::ostream& out) {
  const ModelSpec spec{o.model == "graph" ? ModelKind::Graph : ModelKind::Digraph, o.n, o.q, 0};
  const McSummary s = mc_dp_ratio(spec, o.samples, o.seed, o.threads);
  emit(out, {{"model", o.model},
             {"n", o.n},
             {"q", o.q},
             {"samples", s.samples},
             {"seed", o.seed},
             {"mean", s.mean},
             {"stddev", s.stddev},
             {"target", s.target},
             {"max_ratio", s.max_ratio.str()},
             {"above_half", s.above_half}});
  return s.above_half == 0 ? kOk : kViolation;
}

inline int cmd_expect(const Options& o, std::ostream& out) {
  const ExpectedCounts e = expected_counts_dgnm(o.n, o.m);
  const ExactRatio f = inclusion_probability_f(o.n, o.m, o.n);
  if (o.json) {
    emit(out, {{"n", o.n},
               {"m", o.m},
               {"f_n", ratio_json(f)},
               {"expected_derangements", ratio_json(e.derangements)},
               {"expected_permutations", ratio_json(e.permutations)}});
  } else {
    out << "f(" << o.n << ") = " << ratio_text(f) << '\n'
        << "E[X] = " << ratio_text(e.derangements) << '\n'
        << "E[Y] = " << ratio_text(e.permutations) << '\n';
  }
  return kOk;
}

inline int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::SyntaxError || e.kind() == ErrorKind::IoError ? kFile : kUsage;
}

}  // namespace detail

/// Parses `args` (without the program name) and runs one subcommand.
/// Exit codes: 0 ok, 1 theorem violated, 2 usage or parameter error, 3 file error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using detail::Options;
  Options o;
  CLI::App app{"Exact derangement, permutation and perfect-matching counts on small graphs", "permatch"};
  app.require_subcommand(1, 1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "worker threads (default: PERMATCH_THREADS or 1)")
        ->check(CLI::Range(1U, 256U));
  };
  auto json_flag = [&](CLI::App* sub) { sub->add_flag("--json", o.json, "machine-readable output"); };

  auto* count = app.add_subcommand("count", "count derangements, permutations, matchings or the d/p ratio");
  count->add_option("--input", o.input, "graph file")->required();
  count->add_option("--what", o.what)
      ->required()
      ->check(CLI::IsMember({"derangements", "permutations", "matchings", "ratio", "fixed-points"}));
  json_flag(count);
  common(count);

  auto* cons = app.add_subcommand("construct", "write a named graph construction to a file");
  cons->add_option("--kind", o.kind)
      ->required()
      ->check(CLI::IsMember({"cycle", "complete", "complete-bipartite", "blowup", "thm2h"}));
  cons->add_option("--n", o.n);
  cons->add_option("--k", o.k);
  cons->add_option("--l", o.l);
  cons->add_option("--out", o.out, "output path (.json selects JSON)")->required();
  json_flag(cons);
  common(cons);

  auto* inj = app.add_subcommand("inject", "apply or invert the derangement injection at a vertex");
  inj->add_option("--input", o.input)->required();
  inj->add_option("--vertex", o.vertex)->required();
  inj->add_option("--perm", o.perm, "comma-separated images, e.g. 1,2,0")->required();
  inj->add_flag("--invert", o.invert);
  json_flag(inj);
  common(inj);

  auto* ver = app.add_subcommand("verify", "check a theorem on one instance");
  ver->add_option("--theorem", o.theorem)
      ->required()
      ->check(CLI::IsMember({"1", "2", "3", "6", "injection", "blowup", "subpermanent", "corollary"}));
  ver->add_option("--input", o.input);
  ver->add_option("--k", o.k);
  ver->add_option("--l", o.l);
  json_flag(ver);
  common(ver);

  auto* sc = app.add_subcommand("scan", "exhaustive or sampled survey over a graph family");
  sc->add_option("--family", o.family)
      ->required()
      ->check(CLI::IsMember({"digraphs", "bipartite", "sampled-undirected"}));
  sc->add_option("--n", o.n)->required();
  sc->add_option("--samples", o.samples);
  sc->add_option("--seed", o.seed);
  sc->add_option("--out", o.out, "records file (.csv or .jsonl)")->required();
  common(sc);

  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of d/p on random graphs");
  mc->add_option("--model", o.model)->required()->check(CLI::IsMember({"graph", "digraph"}));
  mc->add_option("--n", o.n)->required();
  mc->add_option("--q", o.q)->required();
  mc->add_option("--samples", o.samples)->required();
  mc->add_option("--seed", o.seed);
  common(mc);

  auto* ex = app.add_subcommand("expect", "exact expectations for uniform digraphs with m arcs");
  ex->add_option("--n", o.n)->required();
  ex->add_option("--m", o.m)->required();
  json_flag(ex);
  common(ex);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (count->parsed()) return detail::cmd_count(o, out);
    if (cons->parsed()) return detail::cmd_construct(o, out);
    if (inj->parsed()) return detail::cmd_inject(o, out);
    if (ver->parsed()) return detail::cmd_verify(o, out);
    if (sc->parsed()) return detail::cmd_scan(o, out);
    if (mc->parsed()) return detail::cmd_mc(o, out);
    return detail::cmd_expect(o, out);
  } catch (const detail::Usage& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return detail::exit_code_for(e);
  }
}

}  // namespace permatch::cli
