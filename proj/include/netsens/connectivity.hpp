#pragma once

#include <vector>

#include "netsens/adjacency.hpp"

namespace netsens {

namespace detail {

// Marks every node reachable from `root` following rows (forward) or
// columns (backward) of the adjacency matrix.
inline std::size_t reach_count(const AdjacencyMatrix& a, index_t root, bool forward) {
  std::vector<char> seen(a.size(), 0);
  std::vector<index_t> stack{root};
  seen[root] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto u : forward ? a.row_indices(v) : a.column_indices(v)) {
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count;
}

} // namespace detail

// True iff A is irreducible: node 0 reaches everyone and everyone reaches 0.
inline bool is_strongly_connected(const AdjacencyMatrix& a) {
  if (a.size() <= 1) return true;
  return detail::reach_count(a, 0, true) == a.size() && detail::reach_count(a, 0, false) == a.size();
}

} // namespace netsens
