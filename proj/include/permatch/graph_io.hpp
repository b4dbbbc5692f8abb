#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "permatch/graph.hpp"

namespace permatch {

using AnyGraph = std::variant<Digraph, UndirectedGraph, BipartiteGraph>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void syntax(int line, const std::string& msg) {
  fail(ErrorKind::SyntaxError, "line " + std::to_string(line) + ": " + msg);
}

/// Splits on whitespace and parses non-negative integers.
inline std::vector<long long> ints(std::string_view s, int line) {
  std::vector<long long> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 6)
      syntax(line, "expected a non-negative integer, got '" + tok + "'");
    out.push_back(std::stoll(tok));
  }
  return out;
}

inline AnyGraph parse_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::SyntaxError, std::string("json: ") + e.what());
  }
  try {
    const auto type = j.at("type").get<std::string>();
    auto pairs = [&](const char* key) {
      std::vector<Arc> out;
      if (!j.contains(key)) return out;
      for (const auto& p : j.at(key)) {
        if (!p.is_array() || p.size() != 2) fail(ErrorKind::SyntaxError, std::string("json: malformed pair in ") + key);
        out.emplace_back(p[0].get<int>(), p[1].get<int>());
      }
      return out;
    };
    if (type == "digraph") return Digraph::from_arcs(j.at("n").get<int>(), pairs("arcs"));
    if (type == "graph") {
      auto e = pairs(j.contains("edges") ? "edges" : "arcs");
      return UndirectedGraph::from_edges(j.at("n").get<int>(), e);
    }
    if (type == "bipartite") return BipartiteGraph::from_edges(j.at("nL").get<int>(), j.at("nR").get<int>(), pairs("edges"));
    fail(ErrorKind::SyntaxError, "json: unknown type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::SyntaxError, std::string("json: ") + e.what());
  }
}

}  // namespace detail

/// Parses the line format (`digraph n` | `graph n` | `bipartite nL nR`,
/// then one `u v` pair per line, `#` comments) or the JSON form.
inline AnyGraph parse_graph(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return detail::parse_json(text);

  enum class Kind { None, Directed, Undirected, Bipartite } kind = Kind::None;
  int n_a = 0;
  int n_b = 0;
  std::vector<Arc> pairs;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (kind == Kind::None) {
      auto sp = line.find_first_of(" \t");
      std::string_view word = line.substr(0, sp);
      auto nums = detail::ints(sp == std::string_view::npos ? std::string_view{} : line.substr(sp), line_no);
      if (word == "digraph" || word == "graph") {
        if (nums.size() != 1) detail::syntax(line_no, "header needs exactly one vertex count");
        kind = word == "digraph" ? Kind::Directed : Kind::Undirected;
        n_a = static_cast<int>(nums[0]);
      } else if (word == "bipartite") {
        if (nums.size() != 2) detail::syntax(line_no, "bipartite header needs two part sizes");
        kind = Kind::Bipartite;
        n_a = static_cast<int>(nums[0]);
        n_b = static_cast<int>(nums[1]);
      } else {
        detail::syntax(line_no, "unknown header '" + std::string(word) + "'");
      }
      continue;
    }
    auto nums = detail::ints(line, line_no);
    if (nums.size() != 2) detail::syntax(line_no, "expected 'u v'");
    pairs.emplace_back(static_cast<int>(nums[0]), static_cast<int>(nums[1]));
  }

  switch (kind) {
    case Kind::None: fail(ErrorKind::SyntaxError, "line 1: missing header");
    case Kind::Directed: return Digraph::from_arcs(n_a, pairs);
    case Kind::Undirected: return UndirectedGraph::from_edges(n_a, pairs);
    case Kind::Bipartite: return BipartiteGraph::from_edges(n_a, n_b, pairs);
  }
  fail(ErrorKind::SyntaxError, "unreachable");
}

/// Canonical text: header line, then pairs in lexicographic order.
inline std::string serialize_graph(const AnyGraph& g) {
  std::ostringstream out;
  auto emit = [&](const std::vector<Arc>& pairs) {
    for (auto [a, b] : pairs) out << a << ' ' << b << '\n';
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Digraph>) {
          out << "digraph " << x.n() << '\n';
          emit(x.arcs());
        } else if constexpr (std::is_same_v<T, UndirectedGraph>) {
          out << "graph " << x.n() << '\n';
          emit(x.edges());
        } else {
          out << "bipartite " << x.n_left() << ' ' << x.n_right() << '\n';
          emit(x.edges());
        }
      },
      g);
  return out.str();
}

inline nlohmann::json graph_to_json(const AnyGraph& g) {
  auto pairs = [](const std::vector<Arc>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (auto [x, y] : v) a.push_back({x, y});
    return a;
  };
  return std::visit(
      [&](const auto& x) -> nlohmann::json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Digraph>) return {{"type", "digraph"}, {"n", x.n()}, {"arcs", pairs(x.arcs())}};
        else if constexpr (std::is_same_v<T, UndirectedGraph>)
          return {{"type", "graph"}, {"n", x.n()}, {"edges", pairs(x.edges())}};
        else
          return {{"type", "bipartite"}, {"nL", x.n_left()}, {"nR", x.n_right()}, {"edges", pairs(x.edges())}};
      },
      g);
}

inline AnyGraph read_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::IoError, "write failed for '" + path + "'");
}

/// The digraph view used for counting: undirected and bipartite inputs become
/// their symmetric digraphs.
inline Digraph as_digraph(const AnyGraph& g) {
  return std::visit(
      [](const auto& x) -> Digraph {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Digraph>) return x;
        else if constexpr (std::is_same_v<T, UndirectedGraph>) return x.digraph();
        else return x.to_undirected().digraph();
      },
      g);
}

}  // namespace permatch
