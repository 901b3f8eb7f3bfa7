#pragma once

#include <cstddef>
#include <vector>

#include "netsens/adjacency.hpp"
#include "netsens/expm.hpp"
#include "netsens/parallel.hpp"
#include "netsens/record.hpp"

namespace netsens {

inline constexpr std::size_t kDefaultDenseLimit = 3000;

inline void check_dense_limit(const AdjacencyMatrix& a, std::size_t dense_limit) {
  if (a.size() > dense_limit) throw DenseLimitError(a.size(), dense_limit);
}

// 1^T exp0(A) 1.
inline double total_communicability(const Matrix& a) { return exp0(a).sum(); }

inline double total_communicability(const AdjacencyMatrix& a, std::size_t dense_limit = kDefaultDenseLimit) {
  check_dense_limit(a, dense_limit);
  return total_communicability(a.to_dense());
}

// Frechet derivative L(A, E) of exp0 read off the (1,2) block of
// exp([[A, E], [0, A]]). E = E_ij, or E_ij + E_ji for symmetric directions.
inline Matrix frechet_block(const Matrix& a, const Direction& d) {
  const auto n = a.rows();
  if (a.cols() != n) throw DataError("frechet_block needs a square matrix");
  const auto i = static_cast<Eigen::Index>(d.i());
  const auto j = static_cast<Eigen::Index>(d.j());
  if (i >= n || j >= n) throw DataError("direction outside the matrix");
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = a;
  block.bottomRightCorner(n, n) = a;
  block(i, n + j) += 1.0;
  if (d.symmetric()) block(j, n + i) += 1.0;
  return expm(block).topRightCorner(n, n);
}

inline double total_sensitivity_exact(const Matrix& a, const Direction& d) { return frechet_block(a, d).sum(); }

// S^TN_ij = 1^T L(A, E_ij) 1.
inline double total_sensitivity_exact(const AdjacencyMatrix& a, const Direction& d,
                                      std::size_t dense_limit = kDefaultDenseLimit) {
  check_dense_limit(a, dense_limit);
  return total_sensitivity_exact(a.to_dense(), d);
}

struct ExactScan {
  std::vector<SensitivityRecord> records; // ranked
  double aggregate = 0.0;                 // sum over all candidates, in candidate order
};

inline ExactScan total_sensitivity_scan(const AdjacencyMatrix& a, const std::vector<Direction>& candidates,
                                        std::size_t dense_limit = kDefaultDenseLimit, std::size_t threads = 1) {
  check_dense_limit(a, dense_limit);
  ExactScan out;
  if (candidates.empty()) return out;
  const Matrix dense = a.to_dense();
  std::vector<double> values(candidates.size());
  parallel_for(candidates.size(), threads,
               [&](std::size_t k) { values[k] = total_sensitivity_exact(dense, candidates[k]); });
  out.records.reserve(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    out.aggregate += values[k];
    out.records.push_back({candidates[k], Method::exact, values[k]});
  }
  rank_records(out.records);
  return out;
}

} // namespace netsens
