#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netsens/adjacency.hpp"
#include "netsens/error.hpp"

namespace netsens {

enum class Method {
  exact,          // dense block Frechet derivative
  perron_root,    // S^PR, rank-one Perron root sensitivity
  perron_network, // S^PN, finite difference of the Perron communicability
  arnoldi_block,
  arnoldi_fd,
  lanczos_block,
  lanczos_fd,
  kkrs,
};

inline std::string_view to_string(Method m) {
  switch (m) {
  case Method::exact: return "exact";
  case Method::perron_root: return "perron-root";
  case Method::perron_network: return "perron-network";
  case Method::arnoldi_block: return "arnoldi-block";
  case Method::arnoldi_fd: return "arnoldi-fd";
  case Method::lanczos_block: return "lanczos-block";
  case Method::lanczos_fd: return "lanczos-fd";
  case Method::kkrs: return "kkrs";
  }
  return "unknown";
}

inline std::optional<Method> method_from_string(std::string_view s) {
  for (auto m : {Method::exact, Method::perron_root, Method::perron_network, Method::arnoldi_block,
                 Method::arnoldi_fd, Method::lanczos_block, Method::lanczos_fd, Method::kkrs}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

inline bool is_krylov(Method m) {
  return m == Method::arnoldi_block || m == Method::arnoldi_fd || m == Method::lanczos_block ||
         m == Method::lanczos_fd || m == Method::kkrs;
}

struct SensitivityRecord {
  Direction direction;
  Method method = Method::exact;
  double value = 0.0;
  std::size_t steps = 0;
  std::size_t matvecs = 0;
  bool converged = true;
  // Set when a Lanczos run broke down and the value came from this method.
  std::optional<Method> fallback;
  // Free-form diagnostics, e.g. a cancellation warning.
  std::string note;

  // "lanczos-block>arnoldi-block" when a fallback happened.
  std::string method_tag() const {
    std::string tag(to_string(method));
    if (fallback) {
      tag += '>';
      tag += to_string(*fallback);
    }
    return tag;
  }
};

// Descending by value; ties broken by (i, j) ascending.
inline void rank_records(std::vector<SensitivityRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const SensitivityRecord& a, const SensitivityRecord& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.direction < b.direction;
  });
}

enum class CandidateFilter { existing_edges, non_edges, all };

inline std::optional<CandidateFilter> filter_from_string(std::string_view s) {
  if (s == "existing" || s == "existing-edges" || s == "edges") return CandidateFilter::existing_edges;
  if (s == "non-edges" || s == "nonedges" || s == "add") return CandidateFilter::non_edges;
  if (s == "all") return CandidateFilter::all;
  return std::nullopt;
}

inline bool passes(CandidateFilter f, const AdjacencyMatrix& a, index_t i, index_t j) {
  if (i == j) return false;
  switch (f) {
  case CandidateFilter::existing_edges: return a.has_edge(i, j);
  case CandidateFilter::non_edges: return !a.has_edge(i, j);
  case CandidateFilter::all: return true;
  }
  return false;
}

// Every off-diagonal direction passing the filter. Undirected graphs get
// symmetric directions over pairs i < j.
inline std::vector<Direction> candidate_directions(const AdjacencyMatrix& a, CandidateFilter f) {
  std::vector<Direction> out;
  const bool sym = !a.directed();
  if (f == CandidateFilter::existing_edges) {
    for (const auto& e : a.edges()) {
      if (!sym || e.i < e.j) out.emplace_back(e.i, e.j, sym);
    }
    return out;
  }
  for (index_t i = 0; i < a.size(); ++i) {
    for (index_t j = sym ? i + 1 : 0; j < a.size(); ++j) {
      if (passes(f, a, i, j)) out.emplace_back(i, j, sym);
    }
  }
  return out;
}

} // namespace netsens
