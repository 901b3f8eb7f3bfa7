#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "netsens/adjacency.hpp"
#include "netsens/perron.hpp"
#include "netsens/record.hpp"

namespace netsens {

struct DeltaSelection {
  double delta;
  PerturbedOperator op;
  PerronTriple triple;
  std::size_t reductions; // how many times delta was divided
};

// Picks the edge an analysis would select for a given shifted operator.
using EdgeSelector = std::function<Direction(const PerturbedOperator&, const PerronTriple&)>;

// Top S^PR entry under a candidate filter.
inline EdgeSelector root_sensitivity_selector(CandidateFilter filter = CandidateFilter::non_edges, bool pairs = false) {
  return [filter, pairs](const PerturbedOperator& op, const PerronTriple& t) {
    const auto top = top_k_root_sensitivities(t, 1, filter, op.base(), pairs);
    if (top.empty()) throw DataError("no candidate edges");
    return top.front().direction;
  };
}

// Shrinks delta by `factor` until two consecutive values select the same
// edge and returns the smaller of the two. Each solve starts from the
// previous Perron vectors.
inline DeltaSelection select_delta(const AdjacencyMatrix& a, const EdgeSelector& objective, double delta0 = 1e-4,
                                   double factor = 10.0, std::size_t max_reductions = 8,
                                   const PerronOptions& perron_opts = {}) {
  if (!(delta0 > 0.0)) throw DataError("delta0 must be positive");
  if (!(factor > 1.0)) throw DataError("delta reduction factor must exceed 1");

  double delta = delta0;
  PerturbedOperator op(a, delta);
  PerronTriple triple = perron_triple(op, perron_opts);
  Direction chosen = objective(op, triple);
  for (std::size_t k = 1; k <= max_reductions; ++k) {
    const double next = delta / factor;
    PerturbedOperator next_op(a, next);
    PerronOptions warm = perron_opts;
    warm.x0 = triple.x;
    warm.y0 = triple.y;
    PerronTriple next_triple = perron_triple(next_op, warm);
    const Direction next_chosen = objective(next_op, next_triple);
    if (next_chosen == chosen) return {next, std::move(next_op), std::move(next_triple), k};
    delta = next;
    op = std::move(next_op);
    triple = std::move(next_triple);
    chosen = next_chosen;
  }
  throw NumericalError("selected edge did not settle after " + std::to_string(max_reductions) + " delta reductions");
}

} // namespace netsens
