#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netsens/adjacency.hpp"
#include "netsens/error.hpp"

namespace netsens {

struct EdgeListOptions {
  bool directed = true;
  // Index of the first node in the file (1 for the MatrixMarket convention).
  unsigned index_base = 1;
};

struct MatrixMarketOptions {
  // Defaults to undirected for symmetric storage and directed for general.
  std::optional<bool> directed;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t\r", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t\r", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

inline std::optional<unsigned long long> parse_index(std::string_view tok) {
  unsigned long long v = 0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

inline std::optional<double> parse_real(std::string_view tok) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

} // namespace detail

// Parses "i j [w]" lines; '#' starts a comment. A comment of the form
// "# nodes: N" fixes the node count (otherwise the largest index is used).
// In undirected mode a line sets both orientations; repeating the reverse
// orientation is accepted only with the same weight.
inline AdjacencyMatrix parse_edge_list(std::istream& in, const EdgeListOptions& opts = {}) {
  std::map<std::pair<index_t, index_t>, std::pair<double, std::size_t>> listed;
  std::size_t declared_nodes = 0;
  std::size_t max_index = 0;
  bool any = false;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      const auto comment = detail::trim(line.substr(hash + 1));
      if (comment.starts_with("nodes:")) {
        const auto value = detail::parse_index(detail::trim(comment.substr(6)));
        if (!value) throw ParseError(line_no, "malformed node count directive");
        declared_nodes = static_cast<std::size_t>(*value);
      }
      line = line.substr(0, hash);
    }
    const auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2 && toks.size() != 3) {
      throw ParseError(line_no, "expected 'i j' or 'i j w', got " + std::to_string(toks.size()) + " fields");
    }
    const auto a = detail::parse_index(toks[0]);
    const auto b = detail::parse_index(toks[1]);
    if (!a || !b) throw ParseError(line_no, "node indices must be nonnegative integers");
    if (*a < opts.index_base || *b < opts.index_base) {
      throw ParseError(line_no, "node index below the index base " + std::to_string(opts.index_base));
    }
    double w = 1.0;
    if (toks.size() == 3) {
      const auto parsed = detail::parse_real(toks[2]);
      if (!parsed) throw ParseError(line_no, "malformed weight '" + std::string(toks[2]) + "'");
      w = *parsed;
    }
    if (!(w > 0.0) || !std::isfinite(w)) throw ParseError(line_no, "weight must be positive");
    const auto i = static_cast<index_t>(*a - opts.index_base);
    const auto j = static_cast<index_t>(*b - opts.index_base);
    if (i == j) throw ParseError(line_no, "self-loop at node " + std::string(toks[0]));

    if (listed.contains({i, j})) {
      throw ParseError(line_no, "duplicate edge (" + std::string(toks[0]) + "," + std::string(toks[1]) +
                                    "), first given on line " + std::to_string(listed[{i, j}].second));
    }
    if (!opts.directed) {
      if (const auto rev = listed.find({j, i}); rev != listed.end() && rev->second.first != w) {
        throw ParseError(line_no, "undirected edge listed in both orientations with different weights");
      }
    }
    listed[{i, j}] = {w, line_no};
    max_index = std::max({max_index, i, j});
    any = true;
  }

  std::size_t n = any ? max_index + 1 : 0;
  if (declared_nodes != 0) {
    if (declared_nodes < n) {
      throw ParseError(0, "node count directive " + std::to_string(declared_nodes) + " is smaller than the largest index");
    }
    n = declared_nodes;
  }

  std::vector<Edge> edges;
  edges.reserve(listed.size() * (opts.directed ? 1 : 2));
  for (const auto& [key, value] : listed) {
    edges.push_back({key.first, key.second, value.first});
    if (!opts.directed && !listed.contains({key.second, key.first})) {
      edges.push_back({key.second, key.first, value.first});
    }
  }
  return AdjacencyMatrix(n, std::move(edges), opts.directed);
}

inline AdjacencyMatrix parse_edge_list(std::string_view text, const EdgeListOptions& opts = {}) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in, opts);
}

// MatrixMarket coordinate files: real, integer or pattern entries with
// general or symmetric storage. Pattern entries get weight 1.
inline AdjacencyMatrix parse_matrix_market(std::istream& in, const MatrixMarketOptions& opts = {}) {
  std::string raw;
  std::size_t line_no = 0;
  if (!std::getline(in, raw)) throw ParseError(1, "empty MatrixMarket file");
  ++line_no;
  const auto banner = detail::split_ws(raw);
  if (banner.size() != 5 || detail::lower(banner[0]) != "%%matrixmarket") {
    throw ParseError(line_no, "malformed MatrixMarket header");
  }
  const auto object = detail::lower(banner[1]);
  const auto format = detail::lower(banner[2]);
  const auto field = detail::lower(banner[3]);
  const auto symmetry = detail::lower(banner[4]);
  if (object != "matrix") throw ParseError(line_no, "unsupported MatrixMarket object '" + object + "'");
  if (format != "coordinate") throw ParseError(line_no, "unsupported MatrixMarket format '" + format + "'");
  if (field != "real" && field != "integer" && field != "pattern") {
    throw ParseError(line_no, "unsupported MatrixMarket field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw ParseError(line_no, "unsupported MatrixMarket symmetry '" + symmetry + "'");
  }
  const bool pattern = field == "pattern";
  const bool sym = symmetry == "symmetric";

  std::optional<std::size_t> rows;
  std::size_t expected = 0;
  std::size_t seen = 0;
  std::vector<Edge> edges;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '%') continue;
    const auto toks = detail::split_ws(line);
    if (!rows) {
      if (toks.size() != 3) throw ParseError(line_no, "malformed size line");
      const auto r = detail::parse_index(toks[0]);
      const auto c = detail::parse_index(toks[1]);
      const auto nz = detail::parse_index(toks[2]);
      if (!r || !c || !nz) throw ParseError(line_no, "malformed size line");
      if (*r != *c) throw ParseError(line_no, "adjacency matrix must be square");
      rows = static_cast<std::size_t>(*r);
      expected = static_cast<std::size_t>(*nz);
      edges.reserve(expected * (sym ? 2 : 1));
      continue;
    }
    if (toks.size() != (pattern ? 2u : 3u)) throw ParseError(line_no, "malformed entry");
    const auto a = detail::parse_index(toks[0]);
    const auto b = detail::parse_index(toks[1]);
    if (!a || !b || *a == 0 || *b == 0 || *a > *rows || *b > *rows) {
      throw ParseError(line_no, "entry index out of range");
    }
    double w = 1.0;
    if (!pattern) {
      const auto parsed = detail::parse_real(toks[2]);
      if (!parsed) throw ParseError(line_no, "malformed value");
      w = *parsed;
    }
    if (!(w > 0.0) || !std::isfinite(w)) throw ParseError(line_no, "weight must be positive");
    if (*a == *b) throw ParseError(line_no, "diagonal entry (self-loop)");
    const auto i = static_cast<index_t>(*a - 1);
    const auto j = static_cast<index_t>(*b - 1);
    edges.push_back({i, j, w});
    if (sym) edges.push_back({j, i, w});
    ++seen;
  }
  if (!rows) throw ParseError(line_no, "missing size line");
  if (seen != expected) {
    throw ParseError(0, "expected " + std::to_string(expected) + " entries, found " + std::to_string(seen));
  }
  const bool directed = opts.directed.value_or(!sym);
  return AdjacencyMatrix(*rows, std::move(edges), directed);
}

inline AdjacencyMatrix parse_matrix_market(std::string_view text, const MatrixMarketOptions& opts = {}) {
  std::istringstream in{std::string(text)};
  return parse_matrix_market(in, opts);
}

// Canonical edge list: node-count directive, then "i j w" sorted by (i, j),
// 1-based, with weights in shortest round-trip form.
inline void write_edge_list(const AdjacencyMatrix& a, std::ostream& out) {
  out << "# nodes: " << a.size() << '\n';
  out << "# " << (a.directed() ? "directed" : "undirected") << '\n';
  char buf[64];
  for (const auto& e : a.edges()) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, e.w);
    out << (e.i + 1) << ' ' << (e.j + 1) << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
  }
}

inline std::string to_edge_list(const AdjacencyMatrix& a) {
  std::ostringstream out;
  write_edge_list(a, out);
  return out.str();
}

enum class InputFormat { automatic, edge_list, matrix_market };

struct LoadOptions {
  InputFormat format = InputFormat::automatic;
  // For edge lists this is the orientation; for MatrixMarket it overrides
  // the default derived from the symmetry field.
  std::optional<bool> directed;
  unsigned index_base = 1;
};

inline AdjacencyMatrix load_graph(const std::string& path, const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  auto format = opts.format;
  if (format == InputFormat::automatic) {
    std::string first;
    std::getline(in, first);
    format = detail::lower(detail::trim(first)).starts_with("%%matrixmarket") ? InputFormat::matrix_market
                                                                           : InputFormat::edge_list;
    in.clear();
    in.seekg(0);
  }
  if (format == InputFormat::matrix_market) return parse_matrix_market(in, {opts.directed});
  return parse_edge_list(in, {opts.directed.value_or(true), opts.index_base});
}

} // namespace netsens
