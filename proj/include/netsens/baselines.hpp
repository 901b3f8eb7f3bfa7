#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "netsens/adjacency.hpp"
#include "netsens/communicability.hpp"
#include "netsens/connectivity.hpp"
#include "netsens/expm.hpp"
#include "netsens/operators.hpp"
#include "netsens/perron.hpp"
#include "netsens/record.hpp"

namespace netsens {

struct SvdFactors {
  Matrix U;
  Vector sigma; // descending
  Matrix V;
};

// Full SVD with the first nonzero entry of every u_k made positive (v_k is
// flipped along with it).
inline SvdFactors svd_factors(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdFactors f{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  for (Eigen::Index k = 0; k < f.U.cols(); ++k) {
    const auto col = f.U.col(k);
    Eigen::Index p = 0;
    while (p < col.size() && std::abs(col[p]) <= 1e-14) ++p;
    if (p < col.size() && col[p] < 0.0) {
      f.U.col(k) *= -1.0;
      f.V.col(k) *= -1.0;
    }
  }
  return f;
}

// Row and column sums of e^A (the full exponential, identity included).
struct EdgeTotalCommunicability {
  Vector broadcast; // e^A 1
  Vector receive;   // (1^T e^A)^T

  explicit EdgeTotalCommunicability(const Matrix& a) {
    const Matrix e = expm(a);
    broadcast = e.rowwise().sum();
    receive = e.colwise().sum().transpose();
  }
  double operator()(const Direction& d) const {
    return broadcast[static_cast<Eigen::Index>(d.i())] * receive[static_cast<Eigen::Index>(d.j())];
  }
};

// Total hub and authority communicabilities U sinh(S) V^T 1 and V sinh(S) U^T 1.
struct EdgeGeneralizedCommunicability {
  Vector hub;
  Vector authority;

  explicit EdgeGeneralizedCommunicability(const Matrix& a) {
    const auto f = svd_factors(a);
    const Vector s = f.sigma.array().sinh().matrix();
    const Vector one = Vector::Ones(a.rows());
    hub = f.U.leftCols(s.size()) * s.asDiagonal() * (f.V.leftCols(s.size()).transpose() * one);
    authority = f.V.leftCols(s.size()) * s.asDiagonal() * (f.U.leftCols(s.size()).transpose() * one);
  }
  double operator()(const Direction& d) const {
    return hub[static_cast<Eigen::Index>(d.i())] * authority[static_cast<Eigen::Index>(d.j())];
  }
};

inline double edge_tc(const AdjacencyMatrix& a, const Direction& d, std::size_t dense_limit = kDefaultDenseLimit) {
  check_dense_limit(a, dense_limit);
  return EdgeTotalCommunicability(a.to_dense())(d);
}

inline double edge_gtc(const AdjacencyMatrix& a, const Direction& d, std::size_t dense_limit = kDefaultDenseLimit) {
  check_dense_limit(a, dense_limit);
  return EdgeGeneralizedCommunicability(a.to_dense())(d);
}

struct CompareOptions {
  // Irreducibility shift for the Perron rows and the C^PN column; 0 uses A
  // itself (which must then be irreducible).
  double delta = 0.0;
  double t_step = 2e-5;
  // Weight change applied to the selected edge; negative for removals.
  double change = 1.0;
  std::size_t dense_limit = kDefaultDenseLimit;
};

struct ComparisonRow {
  std::string method; // eTC, egTC, S^TN, S^PN, S^PR
  std::optional<Direction> selected;
  double score = std::numeric_limits<double>::quiet_NaN();
  double ctn_after = std::numeric_limits<double>::quiet_NaN();
  double cpn_after = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  double ctn = 0.0;
  std::optional<double> cpn;
  double delta = 0.0;
};

// For each selection rule, the candidate it picks and the communicabilities
// after changing that edge's weight by `change`.
inline ComparisonTable compare_methods(const AdjacencyMatrix& a, const std::vector<Direction>& candidates,
                                       const CompareOptions& opts = {}) {
  check_dense_limit(a, opts.dense_limit);
  if (candidates.empty()) throw DataError("no candidate edges to compare");
  const Matrix dense = a.to_dense();
  const PerturbedOperator shifted(a, opts.delta);

  ComparisonTable table;
  table.delta = opts.delta;
  table.ctn = total_communicability(dense);

  std::optional<PerronTriple> triple;
  std::string perron_error;
  try {
    triple = perron_triple(shifted, {.tol = 1e-13});
    table.cpn = perron_communicability(*triple);
  } catch (const Error& e) {
    perron_error = e.what();
  }

  auto pick = [&](const std::string& name, const std::function<double(const Direction&)>& score) {
    ComparisonRow row{name};
    try {
      for (const auto& d : candidates) {
        const double s = score(d);
        if (!row.selected || s > row.score) {
          row.selected = d;
          row.score = s;
        }
      }
      const auto& d = *row.selected;
      row.ctn_after = total_communicability(a.with_change(d.i(), d.j(), opts.change));
      if (triple) {
        RankUpdatedOperator<PerturbedOperator> moved(shifted, d, opts.change);
        PerronOptions po;
        po.tol = 1e-13;
        po.x0 = triple->x;
        po.y0 = triple->y;
        row.cpn_after = perron_communicability(perron_triple(moved, po));
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  };

  const EdgeTotalCommunicability etc(dense);
  const EdgeGeneralizedCommunicability egtc(dense);
  pick("eTC", [&](const Direction& d) {
    if (!d.symmetric()) return etc(d);
    return etc(d) + etc(Direction(d.j(), d.i()));
  });
  pick("egTC", [&](const Direction& d) {
    if (!d.symmetric()) return egtc(d);
    return egtc(d) + egtc(Direction(d.j(), d.i()));
  });
  pick("S^TN", [&](const Direction& d) { return total_sensitivity_exact(dense, d); });
  auto needs_triple = [&]() -> const PerronTriple& {
    if (!triple) throw NumericalError(perron_error);
    return *triple;
  };
  pick("S^PN", [&](const Direction& d) {
    return perron_sensitivity(shifted, d, needs_triple(), {.t_step = opts.t_step});
  });
  pick("S^PR", [&](const Direction& d) { return perron_root_sensitivity(needs_triple(), d); });
  return table;
}

} // namespace netsens
